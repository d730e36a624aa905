"""
From lattice to SWAT circuit
============================

Each lattice node becomes a SWAP followed by a Toffoli.  The variable value
rides along the SWAPs while the data lines accumulate left ^ v right.
"""

import numpy as np

from davio_synth import (DecompositionStyle, VarSet, build_lattice, circuit_unitary, parse_esop,
                         simulate_classical, synthesize_from_lattice, verify_synthesis)
from davio_synth.circuit import TOFFOLI, Circuit, decompose_toffoli, equal_up_to_phase, interaction_edges

vs = VarSet.of("a,b,c")
f = parse_esop("a b ^ b c ^ a c", vs)
c = synthesize_from_lattice(build_lattice(f))
print(c.labels)
for op in c.ops:
    print(" ", op)

# %%
# Simulate every assignment at once; qubit 0 carries the result.
idx = np.arange(8)
inputs = np.zeros((8, c.n_qubits), dtype=bool)
for q, name in c.variable_lines().items():
    inputs[:, q] = (idx >> vs.index(name)) & 1
out = simulate_classical(c, inputs)
print(out[:, 0].astype(int), f.truth_table.bits.astype(int))
print("verified:", verify_synthesis(c, f))

# %%
# Toffoli decompositions and the qubit pairs they couple.
ccx = circuit_unitary(Circuit(3, (TOFFOLI(0, 1, 2),)))
for style in DecompositionStyle:
    gates = decompose_toffoli(TOFFOLI(0, 1, 2), style)
    u = circuit_unitary(Circuit(3, tuple(gates)))
    pairs = sorted(tuple(sorted(e)) for e in interaction_edges(gates))
    n_cx = sum(g.kind.value == "CNOT" for g in gates)
    print(f"{style.value:16s} gates={len(gates):2d} cnots={n_cx} pairs={pairs} ok={equal_up_to_phase(u, ccx)}")
