"""Positive Davio lattices.

Level ``k`` holds ``k + 1`` nodes and one expansion variable ``v``.  Node ``i``
of level ``k`` is related to nodes ``i`` and ``i + 1`` of level ``k + 1`` by

    node = left ^ v & right

so neighbouring nodes share their middle child.  Expansion stops when every
node of the last level is a constant; those constants are the leaves.

Residual functions are kept in positive-polarity form, which is canonical,
so syntactic support equals semantic dependence.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Sequence

from .boolfn import (
    Cube,
    EsopFunction,
    VarSet,
    assignment_index,
    parse_esop,
    positive_davio_expand,
    to_anf,
)
from .errors import DavioError

EXHAUSTIVE_VAR_LIMIT = 6


class LevelBudgetExceeded(DavioError, RuntimeError):
    """Residuals did not all reach constants within ``max_levels``."""

    def __init__(self, max_levels: int, partial_levels: int):
        super().__init__(f"lattice not finished after {partial_levels} levels (budget {max_levels})")
        self.max_levels = max_levels
        self.partial_levels = partial_levels


class Ordering(str, Enum):
    FIXED = "fixed-order"
    ROUND_ROBIN = "round-robin"
    EXHAUSTIVE = "exhaustive-min-levels"


@dataclass(frozen=True)
class OrderingStrategy:
    """How to choose the expansion variable of each level.

    ``order`` overrides the VarSet order.  ``search_budget`` caps the number
    of candidate level sequences examined before giving up.
    """

    kind: Ordering = Ordering.FIXED
    order: tuple[str, ...] | None = None
    search_budget: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "kind", Ordering(self.kind))
        if self.order is not None:
            object.__setattr__(self, "order", tuple(self.order))


@dataclass(frozen=True, eq=False)
class LatticeNode:
    level: int
    position: int
    residual: EsopFunction
    left_child: "LatticeNode | None" = field(default=None, repr=False)
    right_child: "LatticeNode | None" = field(default=None, repr=False)

    @property
    def is_leaf(self) -> bool:
        return self.left_child is None


@dataclass(frozen=True, eq=False)
class DavioLattice:
    vars: VarSet
    levels: tuple[tuple[LatticeNode, ...], ...]
    level_vars: tuple[str, ...]

    @property
    def n_levels(self) -> int:
        """Number of expansion levels (the leaf row is not counted)."""
        return len(self.level_vars)

    @property
    def root(self) -> LatticeNode:
        return self.levels[0][0]

    @property
    def function(self) -> EsopFunction:
        return self.root.residual

    @property
    def leaves(self) -> tuple[int, ...]:
        return tuple(node.residual.constant_value for node in self.levels[-1])

    def __repr__(self) -> str:
        return f"DavioLattice(n_levels={self.n_levels}, level_vars={self.level_vars}, leaves={self.leaves})"


def join_children(x: EsopFunction, y: EsopFunction, z: EsopFunction, w_unused: object = None,
                  *, v: str) -> tuple[EsopFunction, EsopFunction]:
    """Merge the inner children of two adjacent expansions.

    The left parent has children ``(w, x)``, the right parent ``(y, z)``.
    Returns the shared middle node ``v x ^ !v y`` and the corrected right
    child ``x ^ y ^ z``; both parents keep their functions.
    """
    vx = x.times_literal(v, 1)
    middle = vx ^ y ^ y.times_literal(v, 1)
    return middle, x ^ y ^ z


def expand_level(nodes: Sequence[EsopFunction], v: str) -> list[EsopFunction]:
    """Top-down step: expand every node by ``v`` and join neighbours left to right.

    Exact whenever ``v`` does not occur again further down the lattice; with
    a repeated variable the cofactor choice is no longer forced and this step
    can cycle forever, which is why :func:`build_lattice` solves for the
    leaves instead.
    """
    pairs = [positive_davio_expand(f, v) for f in nodes]
    out = [pairs[0][0]]
    carry = pairs[0][1]
    for y, z in pairs[1:]:
        middle, carry = join_children(carry, y, z, v=v)
        out.append(middle)
    out.append(carry)
    return out


def _all_constant(nodes: Iterable[EsopFunction]) -> bool:
    return all(len(f.cubes) == 0 or f.cubes == _ONE_CUBES for f in nodes)


_ONE_CUBES = frozenset([Cube()])


def _assemble(vars: VarSet, rows: list[list[EsopFunction]], level_vars: list[str]) -> DavioLattice:
    built: list[tuple[LatticeNode, ...]] = []
    below: tuple[LatticeNode, ...] | None = None
    for k in range(len(rows) - 1, -1, -1):
        row = []
        for i, f in enumerate(rows[k]):
            if below is None:
                row.append(LatticeNode(k, i, f))
            else:
                row.append(LatticeNode(k, i, f, below[i], below[i + 1]))
        below = tuple(row)
        built.append(below)
    built.reverse()
    return DavioLattice(vars, tuple(built), tuple(level_vars))


def default_max_levels(f: EsopFunction) -> int:
    return 3 * max(1, len(f.support()))


def default_strategy(f: EsopFunction) -> OrderingStrategy:
    """Exhaustive search where it is allowed, cyclic order otherwise."""
    if len(f.support()) <= EXHAUSTIVE_VAR_LIMIT:
        return OrderingStrategy(Ordering.EXHAUSTIVE)
    return OrderingStrategy(Ordering.FIXED)


class _LeafSolver:
    """Decides whether ``f`` is an XOR of elementary symmetric products of a sequence.

    The root of a lattice with constant leaves ``c`` and level variables
    ``v_0..v_{n-1}`` is ``XOR_j c_j e_j(v_0..v_{n-1})``, where ``e_j`` is the
    XOR of all products of ``j`` entries of the sequence.  Finding a lattice
    for a given sequence is therefore a linear system over GF(2) on truth
    tables, packed here into Python integers.
    """

    def __init__(self, f: EsopFunction):
        self.vars = f.vars
        self.target = f.truth_table.as_int()
        n = len(f.vars)
        self.full = (1 << (1 << n)) - 1
        self.var_tables = {name: EsopFunction.variable(f.vars, name).truth_table.as_int()
                           for name in f.vars}

    def elementary(self, sequence: Sequence[str]) -> list[int]:
        e = [self.full]
        for name in sequence:
            t = self.var_tables[name]
            e.append(0)
            for j in range(len(e) - 1, 0, -1):
                e[j] ^= t & e[j - 1]
        return e

    def solve(self, sequence: Sequence[str]) -> list[int] | None:
        pivots: dict[int, tuple[int, int]] = {}
        for j, vec in enumerate(self.elementary(sequence)):
            combo = 1 << j
            while vec:
                h = vec.bit_length() - 1
                if h not in pivots:
                    pivots[h] = (vec, combo)
                    break
                pv, pc = pivots[h]
                vec ^= pv
                combo ^= pc
        vec, combo = self.target, 0
        while vec:
            h = vec.bit_length() - 1
            if h not in pivots:
                return None
            pv, pc = pivots[h]
            vec ^= pv
            combo ^= pc
        return [combo >> j & 1 for j in range(len(sequence) + 1)]


def _cyclic(order: Sequence[str], length: int, start: int = 0) -> list[str]:
    return [order[(start + i) % len(order)] for i in range(length)]


def build_lattice(f: EsopFunction, strategy: OrderingStrategy | str | None = None,
                  max_levels: int | None = None) -> DavioLattice:
    """Shortest lattice for ``f`` among the sequences the strategy proposes.

    fixed-order
        prefixes of the declared order repeated cyclically, restricted to the
        variables ``f`` depends on.
    round-robin
        the same, but every rotation of that cycle is tried at each length.
    exhaustive-min-levels
        every multiset of variables, shortest first; the result has the
        minimum possible number of levels.

    Raises :class:`LevelBudgetExceeded` when no lattice within ``max_levels``
    levels is found.  Without a strategy, :func:`default_strategy` decides.
    """
    if strategy is None:
        strategy = default_strategy(f)
    elif isinstance(strategy, (str, Ordering)):
        strategy = OrderingStrategy(Ordering(strategy))
    if max_levels is None:
        max_levels = default_max_levels(f)
    if max_levels < 1:
        raise ValueError("max_levels must be at least 1")
    root = to_anf(f)
    vars = root.vars
    declared = strategy.order if strategy.order is not None else vars.names
    for name in declared:
        vars.index(name)
    live = set(root.support())
    order = [name for name in declared if name in live]
    missing = live.difference(order)
    if missing:
        raise ValueError(f"ordering omits variables the function depends on: {sorted(missing)}")

    if root.is_constant:
        return _assemble(vars, [[root]], [])

    if strategy.kind is Ordering.EXHAUSTIVE and len(order) > EXHAUSTIVE_VAR_LIMIT:
        raise ValueError(f"exhaustive ordering search is limited to {EXHAUSTIVE_VAR_LIMIT} "
                         f"variables, function depends on {len(order)}")

    solver = _LeafSolver(root)
    tried = 0
    for length in range(len(order), max_levels + 1):
        if strategy.kind is Ordering.FIXED:
            candidates: Iterable[Sequence[str]] = [_cyclic(order, length)]
        elif strategy.kind is Ordering.ROUND_ROBIN:
            candidates = [_cyclic(order, length, s) for s in range(len(order))]
        else:
            candidates = _multisets(order, length)
        for sequence in candidates:
            tried += 1
            if tried > strategy.search_budget:
                raise LevelBudgetExceeded(max_levels, length)
            leaves = solver.solve(sequence)
            if leaves is not None:
                lattice = lattice_from_leaves(vars, sequence, leaves)
                if lattice.function.cubes != root.cubes:
                    raise AssertionError("solved leaves do not reproduce the function")
                return lattice
    raise LevelBudgetExceeded(max_levels, max_levels)


def _multisets(order: Sequence[str], length: int) -> Iterator[list[str]]:
    """Multisets of ``order`` of the given size, every variable at least once."""
    for combo in combinations_with_replacement(range(len(order)), length - len(order)):
        counts = [1] * len(order)
        for i in combo:
            counts[i] += 1
        yield [name for name, c in zip(order, counts) for _ in range(c)]


def build_lattice_top_down(f: EsopFunction, sequence: Sequence[str]) -> DavioLattice:
    """Expand level by level with :func:`expand_level`; no repeated variables allowed."""
    if len(set(sequence)) != len(sequence):
        raise ValueError("top-down expansion needs distinct level variables")
    rows = [[to_anf(f)]]
    for name in sequence:
        rows.append(expand_level(rows[-1], name))
    if not _all_constant(rows[-1]):
        raise LevelBudgetExceeded(len(sequence), len(sequence))
    return _assemble(f.vars, rows, list(sequence))


def symmetric_lattice(n: int, leaves: Sequence[int], vars: VarSet | Iterable[str] | None = None) -> DavioLattice:
    """Lattice with one distinct variable per level and the given leaf constants.

    Leaf ``k`` is weighted by the XOR of all products of ``k`` distinct
    variables, so any totally symmetric function is reachable.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if len(leaves) != n + 1:
        raise ValueError(f"expected {n + 1} leaf constants, got {len(leaves)}")
    if vars is None:
        vars = VarSet(tuple(f"x{i}" for i in range(n)))
    elif not isinstance(vars, VarSet):
        vars = VarSet.of(vars)
    if len(vars) < n:
        raise ValueError(f"need {n} variables, VarSet has {len(vars)}")
    level_vars = list(vars.names[:n])
    return lattice_from_leaves(vars, level_vars, leaves)


def lattice_from_leaves(vars: VarSet, level_vars: Sequence[str], leaves: Sequence[int]) -> DavioLattice:
    """Rebuild every residual bottom-up from the leaf constants."""
    n = len(level_vars)
    if len(leaves) != n + 1:
        raise ValueError(f"expected {n + 1} leaf constants, got {len(leaves)}")
    rows: list[list[EsopFunction]] = [[EsopFunction.constant(vars, int(b)) for b in leaves]]
    for k in range(n - 1, -1, -1):
        v = level_vars[k]
        below = rows[0]
        rows.insert(0, [below[i] ^ below[i + 1].times_literal(v, 1) for i in range(k + 1)])
    return _assemble(vars, rows, list(level_vars))


def evaluate_lattice(lattice: DavioLattice, assignment: int | dict[str, int] | Sequence[int]) -> int:
    """Bottom-up evaluation using only leaf constants and level variables."""
    index = assignment_index(lattice.vars, assignment)
    values = list(lattice.leaves)
    for k in range(lattice.n_levels - 1, -1, -1):
        v = index >> lattice.vars.index(lattice.level_vars[k]) & 1
        values = [values[i] ^ (v & values[i + 1]) for i in range(k + 1)]
    return values[0]


def lattice_truth_table(lattice: DavioLattice) -> list[int]:
    return [evaluate_lattice(lattice, i) for i in range(1 << len(lattice.vars))]


# serialization

def lattice_to_dict(lattice: DavioLattice) -> dict:
    return {
        "vars": list(lattice.vars.names),
        "levels": [[str(node.residual) for node in row] for row in lattice.levels],
        "level_vars": list(lattice.level_vars),
        "leaves": list(lattice.leaves),
    }


def lattice_to_json(lattice: DavioLattice) -> str:
    return json.dumps(lattice_to_dict(lattice), indent=2)


def lattice_from_dict(data: dict) -> DavioLattice:
    """Inverse of :func:`lattice_to_dict`; residual text is checked, not trusted."""
    vars = VarSet.of(data["vars"])
    lattice = lattice_from_leaves(vars, data["level_vars"], data["leaves"])
    for k, (row, text_row) in enumerate(zip(lattice.levels, data["levels"])):
        if len(row) != len(text_row):
            raise ValueError(f"level {k} has {len(text_row)} nodes, expected {len(row)}")
        for node, text in zip(row, text_row):
            if parse_esop(text, vars) != node.residual:
                raise ValueError(f"residual {text!r} at level {k} does not match the leaves")
    # keep the stored residual text so serialization round-trips exactly
    rows = [[parse_esop(text, vars) for text in text_row] for text_row in data["levels"]]
    return _assemble(vars, rows, list(data["level_vars"]))


def lattice_from_json(text: str) -> DavioLattice:
    return lattice_from_dict(json.loads(text))


def lattice_to_dot(lattice: DavioLattice) -> str:
    lines = ["digraph lattice {", "  node [shape=box];"]
    for k, row in enumerate(lattice.levels):
        ids = []
        for node in row:
            nid = f"n{k}_{node.position}"
            ids.append(nid)
            lines.append(f'  {nid} [label="{node.residual}"];')
        lines.append("  { rank=same; " + "; ".join(ids) + "; }")
    for k, row in enumerate(lattice.levels[:-1]):
        v = lattice.level_vars[k]
        for node in row:
            lines.append(f"  n{k}_{node.position} -> n{k + 1}_{node.position};")
            lines.append(f'  n{k}_{node.position} -> n{k + 1}_{node.position + 1} [label="{v}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
