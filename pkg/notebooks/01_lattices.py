"""
Building Positive Davio lattices
================================

A walk from an ESOP string to a lattice and back, and a look at why some
functions need many more levels than they have variables.
"""

import numpy as np

from davio_synth import VarSet, build_lattice, parse_esop, symmetric_lattice, symmetry_indices
from davio_synth.lattice import LevelBudgetExceeded, lattice_to_dot

# %%
# Functions are XORs of cubes over a declared variable order.
vs = VarSet.of("a,b,c")
f = parse_esop("a b ^ b c ^ a !c", vs)
print(f)
print(f.truth_table.bits.astype(int))

# %%
# Three distinct variables give a lattice whose root is
# w ^ (a^b^c) x ^ (ab^bc^ac) y ^ abc z, so only symmetric functions fit.
for leaves in [(0, 0, 1, 0), (0, 1, 0, 0), (1, 1, 1, 1)]:
    g = symmetric_lattice(3, leaves, vs).function
    print(leaves, "->", g, symmetry_indices(g))

# %%
# f is not symmetric, so some variable has to repeat.
try:
    build_lattice(f, max_levels=3)
except LevelBudgetExceeded as exc:
    print("3 levels:", exc)

lat = build_lattice(f)
print(lat)
for k, row in enumerate(lat.levels):
    print(k, [str(node.residual) for node in row])

# %%
# The lattice can be drawn with graphviz.
print(lattice_to_dot(lat)[:200], "...")

# %%
# Level counts grow quickly.  Repeated variable v_j enters the root only
# through parities of binomial coefficients, which is what limits capacity.
abcd = VarSet.of("a,b,c,d")
ex = parse_esop("1 ^ a d ^ b d ^ a b d ^ a c ^ b c ^ c d ^ b c d", abcd)
big = build_lattice(ex)
print(big.n_levels, big.level_vars)

rng = np.random.default_rng(3)
levels = []
for _ in range(30):
    g = parse_esop(" ^ ".join(rng.choice(["a b", "!c", "a d", "b c d", "!a b"], size=3)), abcd)
    try:
        levels.append(build_lattice(g, max_levels=16).n_levels)
    except LevelBudgetExceeded:
        levels.append(-1)
print("levels for 30 random functions:", levels)
