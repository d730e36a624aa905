import itertools

from hypothesis import strategies as st

from davio_synth.boolfn import Cube, EsopFunction, VarSet

NAMES = "abcdefgh"


def var_set(n):
    return VarSet.of(list(NAMES[:n]))


@st.composite
def esops(draw, min_vars=1, max_vars=5, max_cubes=8):
    n = draw(st.integers(min_vars, max_vars))
    vars = var_set(n)
    lits = st.lists(st.sampled_from([0, 1, 2]), min_size=n, max_size=n)
    cubes = []
    for row in draw(st.lists(lits, max_size=max_cubes)):
        pos = sum(1 << i for i, x in enumerate(row) if x == 1)
        neg = sum(1 << i for i, x in enumerate(row) if x == 2)
        cubes.append(Cube(pos, neg))
    return EsopFunction(vars, cubes)


def brute_table(f):
    """Independent evaluation: loop over assignments and literals."""
    out = []
    for bits in itertools.product([0, 1], repeat=f.n):
        x = bits[::-1]  # x[i] is variable i
        value = 0
        for c in f.cubes:
            term = 1
            for i in range(f.n):
                if c.pos >> i & 1:
                    term &= x[i]
                if c.neg >> i & 1:
                    term &= 1 - x[i]
            value ^= term
        out.append(value)
    return out
