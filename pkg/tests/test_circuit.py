import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from davio_synth.boolfn import EsopFunction, VarSet, parse_esop, symmetric_function
from davio_synth.circuit import (CNOT, OUTPUT_LINE, SWAP, TOFFOLI, Circuit, DecompositionStyle,
                                 DimensionLimitError, Gate, GateKind, GateKindError, NonPermutationGateError,
                                 QubitBudgetError, SwatBlock, X, circuit_from_json, circuit_from_qasm,
                                 circuit_to_dict, circuit_to_json, circuit_to_qasm, circuit_unitary,
                                 decompose_swap, decompose_swat, decompose_toffoli, equal_up_to_phase,
                                 interaction_edges, simulate_classical, synthesize_from_lattice,
                                 verify_synthesis)
from davio_synth.lattice import LevelBudgetExceeded, build_lattice, lattice_from_leaves, symmetric_lattice

from conftest import esops

ABC = VarSet.of("a,b,c")
STYLES = list(DecompositionStyle)

_I = np.eye(2)
_P0, _P1 = np.diag([1, 0]), np.diag([0, 1])
_X = np.array([[0, 1], [1, 0]])


def kron_all(ops, n):
    """Full operator with ops[q] on qubit q; qubit 0 is the rightmost factor."""
    out = np.array([[1.0 + 0j]])
    for q in range(n - 1, -1, -1):
        out = np.kron(out, ops.get(q, _I))
    return out


def ccx(c1, c2, t, n=3):
    # I - P1P1 + P1P1X
    both = kron_all({c1: _P1, c2: _P1}, n)
    return np.eye(1 << n) - both + kron_all({c1: _P1, c2: _P1, t: _X}, n)


def swap_matrix(a, b, n):
    m = np.zeros((1 << n, 1 << n))
    for i in range(1 << n):
        ba, bb = i >> a & 1, i >> b & 1
        j = i & ~(1 << a) & ~(1 << b) | (bb << a) | (ba << b)
        m[j, i] = 1
    return m


class TestGate:
    @pytest.mark.parametrize("kind,qubits", [("X", (0, 1)), ("CNOT", (0,)), ("TOFFOLI", (0, 1)), ("SWAP", (1, 1)),
                                             ("TOFFOLI", (0, 1, 0))])
    def test_invalid(self, kind, qubits):
        with pytest.raises(GateKindError):
            Gate(GateKind(kind), qubits)

    def test_operand_bound(self):
        with pytest.raises(ValueError):
            Circuit(2, (CNOT(0, 2),))

    def test_swat_distinct(self):
        with pytest.raises(GateKindError):
            SwatBlock(0, 1, 1)

    def test_swat_expansion(self):
        assert SwatBlock(2, 1, 0).gates == (SWAP(2, 1), TOFFOLI(0, 1, 2))


class TestUnitary:
    def test_x(self):
        assert np.allclose(circuit_unitary(Circuit(1, (X(0),))), [[0, 1], [1, 0]])

    def test_v_squared_is_x(self):
        c = Circuit(1, (Gate(GateKind.V, (0,)), Gate(GateKind.V, (0,))))
        assert np.max(np.abs(circuit_unitary(c) - _X)) < 1e-9

    def test_v_vdg_identity(self):
        c = Circuit(1, (Gate(GateKind.V, (0,)), Gate(GateKind.VDG, (0,))))
        assert np.allclose(circuit_unitary(c), np.eye(2))

    @pytest.mark.parametrize("perm", list(itertools.permutations(range(3))))
    def test_toffoli_matches_kron_oracle(self, perm):
        assert np.allclose(circuit_unitary(Circuit(3, (TOFFOLI(*perm),))), ccx(*perm))

    def test_little_endian_cnot(self):
        u = circuit_unitary(Circuit(2, (CNOT(0, 1),)))
        # |q1 q0> = |01> (index 1) maps to |11> (index 3)
        assert u[3, 1] == 1 and u[1, 1] == 0

    def test_dimension_limit(self):
        with pytest.raises(DimensionLimitError):
            circuit_unitary(Circuit(11))

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.tuples(st.sampled_from(list(GateKind)), st.permutations(range(4))), max_size=8))
    def test_composition_matches_kron_product(self, gate_specs):
        gates = [Gate(k, tuple(p[:k.arity])) for k, p in gate_specs]
        u = circuit_unitary(Circuit(4, tuple(gates)))
        expected = np.eye(16, dtype=complex)
        for g in gates:
            expected = circuit_unitary(Circuit(4, (g,))) @ expected
        assert np.allclose(u, expected)

    def test_phase_compare(self):
        u = ccx(0, 1, 2)
        assert equal_up_to_phase(np.exp(0.7j) * u, u)
        assert not equal_up_to_phase(u, ccx(1, 2, 0))


class TestDecompositions:
    def test_swap_sequence(self):
        assert decompose_swap(SWAP(0, 1)) == [CNOT(0, 1), CNOT(1, 0), CNOT(0, 1)]
        u = circuit_unitary(Circuit(2, tuple(decompose_swap(SWAP(0, 1)))))
        assert np.max(np.abs(u - swap_matrix(0, 1, 2))) < 1e-9

    def test_swap_twice_identity(self):
        c = Circuit(2, tuple(decompose_swap(SWAP(0, 1)) * 2))
        for bits in itertools.product([0, 1], repeat=2):
            assert list(simulate_classical(c, bits)) == list(bits)

    def test_wrong_kind(self):
        with pytest.raises(GateKindError):
            decompose_swap(CNOT(0, 1))
        with pytest.raises(GateKindError):
            decompose_toffoli(SWAP(0, 1), "amy")

    @pytest.mark.parametrize("style", STYLES)
    @pytest.mark.parametrize("perm", list(itertools.permutations(range(3))))
    def test_toffoli_unitary(self, style, perm):
        c = Circuit(3, tuple(decompose_toffoli(TOFFOLI(*perm), style)))
        assert equal_up_to_phase(circuit_unitary(c), ccx(*perm), atol=1e-9)

    @pytest.mark.parametrize("style", STYLES)
    def test_toffoli_basis_columns(self, style):
        u = circuit_unitary(Circuit(3, tuple(decompose_toffoli(TOFFOLI(0, 1, 2), style))))
        for col in range(8):
            expected = col ^ 4 if col & 3 == 3 else col
            assert abs(abs(u[expected, col]) - 1) < 1e-9

    @pytest.mark.parametrize("style", ["qiskit-standard", "barenco", "amy"])
    def test_triangle_styles(self, style):
        edges = interaction_edges(decompose_toffoli(TOFFOLI(0, 1, 2), style))
        assert edges == {frozenset(p) for p in [(0, 1), (0, 2), (1, 2)]}

    def test_linear_nn_skips_control_pair(self):
        for a, b, t in itertools.permutations(range(3)):
            edges = interaction_edges(decompose_toffoli(TOFFOLI(a, b, t), "linear-nn"))
            assert edges == {frozenset((a, t)), frozenset((b, t))}

    def test_amy_t_depth(self):
        gates = decompose_toffoli(TOFFOLI(0, 1, 2), "amy")
        t_like = [g for g in gates if g.kind in (GateKind.T, GateKind.TDG)]
        assert len(t_like) == 7
        # group T layers separated by CNOTs
        layers, current = 0, False
        for g in gates:
            if g.kind in (GateKind.T, GateKind.TDG):
                current = True
            elif g.kind is GateKind.CNOT and current:
                layers, current = layers + 1, False
        assert layers + current == 3

    @pytest.mark.parametrize("style", STYLES)
    def test_swat_unitary(self, style):
        b = SwatBlock(0, 1, 2)
        u = circuit_unitary(Circuit(3, tuple(decompose_swat(b, style))))
        assert equal_up_to_phase(u, ccx(2, 1, 0) @ swap_matrix(0, 1, 3))

    def test_swat_linear_nn_v_shape(self):
        edges = interaction_edges(decompose_swat(SwatBlock(0, 1, 2), "linear-nn"))
        assert edges == {frozenset((0, 1)), frozenset((0, 2))}

    def test_swat_classical(self):
        c = Circuit(3, (SwatBlock(0, 1, 2),))
        for hi, lo, ctrl in itertools.product([0, 1], repeat=3):
            out = simulate_classical(c, [hi, lo, ctrl])
            assert list(out) == [lo ^ (ctrl & hi), hi, ctrl]

    def test_swat_decomposition_agrees_on_basis_states(self):
        c = Circuit(3, (SwatBlock(1, 2, 0),))
        u = circuit_unitary(c.decomposed("barenco"))
        for i in range(8):
            bits = [(i >> q) & 1 for q in range(3)]
            out = simulate_classical(c, bits)
            j = sum(int(b) << q for q, b in enumerate(out))
            assert abs(abs(u[j, i]) - 1) < 1e-9


class TestSimulation:
    def test_empty(self):
        assert list(simulate_classical(Circuit(3), [1, 0, 1])) == [1, 0, 1]

    def test_toffoli(self):
        assert list(simulate_classical(Circuit(3, (TOFFOLI(0, 1, 2),)), [1, 1, 0])) == [1, 1, 1]

    def test_rejects_phase_gates(self):
        with pytest.raises(NonPermutationGateError):
            simulate_classical(Circuit(1, (Gate(GateKind.H, (0,)),)), [0])

    def test_batch(self):
        c = Circuit(2, (CNOT(0, 1),))
        out = simulate_classical(c, [[0, 0], [1, 0], [0, 1], [1, 1]])
        assert out.astype(int).tolist() == [[0, 0], [1, 1], [0, 1], [1, 0]]


def brute(f):
    return [f(x) for x in range(1 << f.n)]


def _synth(text, vars=ABC):
    f = parse_esop(text, vars)
    return f, synthesize_from_lattice(build_lattice(f))


class TestSynthesis:
    def test_symmetric_three_levels(self):
        c = synthesize_from_lattice(symmetric_lattice(3, (0, 0, 1, 0), ABC))
        assert len(c.swat_blocks) == 6 and c.n_qubits == 7
        assert c.labels == ("v0:a", "v1:b", "v2:c", "d0", "d1", "d2", "d3")
        assert verify_synthesis(c, symmetric_function({2, 3}, ABC))

    def test_example_three(self):
        f, c = _synth("a b ^ b c ^ a !c")
        assert len(c.swat_blocks) == 10
        assert verify_synthesis(c, f)
        idx = np.arange(8)
        ins = np.zeros((8, c.n_qubits), bool)
        for q, name in c.variable_lines().items():
            ins[:, q] = (idx >> ABC.index(name)) & 1
        assert simulate_classical(c, ins)[:, OUTPUT_LINE].astype(int).tolist() == brute(f)

    def test_example_two(self):
        vs = VarSet.of("a,b,c,d")
        f, c = _synth("1 ^ a d ^ b d ^ a b d ^ a c ^ b c ^ c d ^ b c d", vs)
        assert len(c.swat_blocks) == 78
        assert verify_synthesis(c, f)

    def test_single_level(self):
        vs = VarSet.of("x0")
        c = synthesize_from_lattice(lattice_from_leaves(vs, ["x0"], [0, 1]))
        assert c.swat_blocks == (SwatBlock(0, 1, 2),)
        assert verify_synthesis(c, EsopFunction.variable(vs, "x0"))

    def test_extra_x_fails(self):
        f, c = _synth("a b ^ c")
        broken = Circuit(c.n_qubits, c.ops + (X(OUTPUT_LINE),), c.labels)
        assert not verify_synthesis(broken, f)

    def test_constant_function(self):
        f, c = _synth("1")
        assert c.n_qubits == 1 and verify_synthesis(c, f)

    def test_qubit_budget(self):
        vs = VarSet.of("a")
        lat = lattice_from_leaves(vs, ["a"] * 13, [0] * 14)
        with pytest.raises(QubitBudgetError):
            synthesize_from_lattice(lat)

    def test_all_two_variable_functions(self):
        vs = VarSet.of("a,b")
        for bits in itertools.product([0, 1], repeat=4):
            f = EsopFunction.from_truth_table(vs, list(bits))
            assert verify_synthesis(synthesize_from_lattice(build_lattice(f)), f)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_swat_census(self, n):
        c = synthesize_from_lattice(symmetric_lattice(n, [1] * (n + 1)))
        assert len(c.swat_blocks) == n * (n + 1) // 2
        assert all(len(set(b.qubits)) == 3 for b in c.swat_blocks)

    @settings(max_examples=40, deadline=None)
    @given(esops(min_vars=3, max_vars=5, max_cubes=5))
    def test_random_functions(self, f):
        try:
            lat = build_lattice(f, max_levels=12)
        except LevelBudgetExceeded:
            return
        assert verify_synthesis(synthesize_from_lattice(lat), f)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_bijection(self, n):
        c = synthesize_from_lattice(symmetric_lattice(n, [1, 0, 1, 1][: n + 1]))
        m = c.n_qubits
        idx = np.arange(1 << m)
        ins = ((idx[:, None] >> np.arange(m)) & 1).astype(bool)
        outs = simulate_classical(c, ins)
        codes = (outs.astype(int) << np.arange(m)).sum(axis=1)
        assert len(set(codes.tolist())) == 1 << m

    @pytest.mark.parametrize("style", STYLES)
    def test_decomposed_circuit_unitary(self, style):
        c = synthesize_from_lattice(symmetric_lattice(2, (1, 0, 1), VarSet.of("a,b")))
        assert equal_up_to_phase(circuit_unitary(c.decomposed(style)), circuit_unitary(c))


class TestSerialization:
    def test_qasm_text(self):
        c = Circuit(3, (X(0), CNOT(0, 1), SwatBlock(0, 1, 2), Gate(GateKind.TDG, (2,))))
        assert circuit_to_qasm(c).splitlines() == [
            "qreg q[3]", "x q[0]", "cx q[0],q[1]", "swap q[0],q[1]", "ccx q[2],q[1],q[0]", "tdg q[2]"]

    def test_json_fields(self):
        _, c = _synth("a b ^ c")
        data = circuit_to_dict(c)
        assert set(data) == {"n_qubits", "labels", "gates"}
        assert data["gates"][0] == {"kind": "X", "qubits": [data["gates"][0]["qubits"][0]]}

    @settings(max_examples=20, deadline=None)
    @given(esops(max_vars=3, max_cubes=4))
    def test_round_trips(self, f):
        c = synthesize_from_lattice(build_lattice(f, max_levels=12))
        assert circuit_from_json(circuit_to_json(c)) == c
        assert circuit_from_qasm(circuit_to_qasm(c)).ops == c.ops

    def test_decomposed_round_trip(self):
        _, c = _synth("a b ^ b c")
        d = c.decomposed("amy")
        assert circuit_from_json(circuit_to_json(d)) == d
        assert json.loads(circuit_to_json(d))["n_qubits"] == d.n_qubits
