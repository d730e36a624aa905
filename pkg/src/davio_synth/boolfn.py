"""Boolean functions over GF(2) written as exclusive-or sums of products.

A function is stored as a set of cubes.  Each cube is a pair of bit masks
``(pos, neg)`` over the variables of a :class:`VarSet`: bit ``i`` of ``pos``
marks a positive literal of variable ``i``, bit ``i`` of ``neg`` a negative
one.  The empty cube ``(0, 0)`` is the constant 1 and the empty set is the
constant 0.  Identical cubes cancel on construction, since ``x ^ x = 0``.

Truth tables put variable 0 in the least significant bit of the input index.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DavioError

MAX_VARS = 16

_IDENT = re.compile(r"[a-z][a-z0-9]*")


class EsopSyntaxError(DavioError, ValueError):
    """Malformed ESOP text.  ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownVariableError(DavioError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown variable {self.name!r}"


@dataclass(frozen=True)
class VarSet:
    """Ordered, immutable list of variable names shared by related functions."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        if len(names) > MAX_VARS:
            raise ValueError(f"at most {MAX_VARS} variables are supported, got {len(names)}")
        for name in names:
            if not _IDENT.fullmatch(name):
                raise ValueError(f"invalid variable name {name!r}")

    @classmethod
    def of(cls, names: str | Iterable[str]) -> "VarSet":
        """Build from an iterable or a comma/space separated string."""
        if isinstance(names, str):
            names = [n for n in re.split(r"[,\s]+", names) if n]
        return cls(tuple(names))

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariableError(name) from None


class Literal(IntEnum):
    ABSENT = 0
    POSITIVE = 1
    NEGATIVE = 2


@dataclass(frozen=True, order=True)
class Cube:
    """A product term as two disjoint bit masks."""

    pos: int = 0
    neg: int = 0

    def literals(self, n: int) -> tuple[Literal, ...]:
        out = []
        for i in range(n):
            bit = 1 << i
            if self.pos & bit:
                out.append(Literal.POSITIVE)
            elif self.neg & bit:
                out.append(Literal.NEGATIVE)
            else:
                out.append(Literal.ABSENT)
        return tuple(out)

    @property
    def support(self) -> int:
        return self.pos | self.neg

    def evaluate(self, index: int) -> int:
        return int((index & self.pos) == self.pos and (index & self.neg) == 0)


def _normalize(cubes: Iterable[Cube]) -> frozenset[Cube]:
    counts = Counter(cubes)
    return frozenset(c for c, k in counts.items() if k % 2)


@dataclass(frozen=True)
class TruthTable:
    n: int
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} entries, got shape {bits.shape}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __getitem__(self, index: int) -> int:
        return int(self.bits[index])

    def __len__(self) -> int:
        return len(self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def __xor__(self, other: "TruthTable") -> "TruthTable":
        if self.n != other.n:
            raise ValueError("truth tables of different sizes")
        return TruthTable(self.n, self.bits ^ other.bits)

    def as_int(self) -> int:
        """Bits packed into an integer, entry ``i`` at bit ``i``."""
        return int.from_bytes(np.packbits(self.bits, bitorder="little").tobytes(), "little")

    @classmethod
    def from_int(cls, n: int, value: int) -> "TruthTable":
        size = 1 << n
        raw = np.frombuffer(value.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
        return cls(n, np.unpackbits(raw, bitorder="little")[:size].astype(bool))

    def ones(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.bits)]


def _popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint32))


@dataclass(frozen=True, eq=False)
class EsopFunction:
    """XOR of cubes over a fixed variable list.

    Equality and hashing go through the truth table, so two different cube
    sets describing the same function compare equal.  Use :attr:`cubes` for
    structural comparisons.
    """

    vars: VarSet
    cubes: frozenset[Cube] = field(default_factory=frozenset)

    def __post_init__(self):
        full = (1 << len(self.vars)) - 1
        cubes = _normalize(self.cubes)
        for c in cubes:
            if c.pos & c.neg or (c.pos | c.neg) & ~full:
                raise ValueError(f"invalid cube {c} for {len(self.vars)} variables")
        object.__setattr__(self, "cubes", cubes)

    # construction helpers

    @classmethod
    def zero(cls, vars: VarSet) -> "EsopFunction":
        return cls(vars, frozenset())

    @classmethod
    def one(cls, vars: VarSet) -> "EsopFunction":
        return cls(vars, frozenset([Cube()]))

    @classmethod
    def constant(cls, vars: VarSet, value: int) -> "EsopFunction":
        return cls.one(vars) if value else cls.zero(vars)

    @classmethod
    def variable(cls, vars: VarSet, name: str, polarity: int = 1) -> "EsopFunction":
        bit = 1 << vars.index(name)
        return cls(vars, frozenset([Cube(bit, 0) if polarity else Cube(0, bit)]))

    @classmethod
    def from_cubes(cls, vars: VarSet, cubes: Iterable[Cube | tuple[int, int]]) -> "EsopFunction":
        return cls(vars, [c if isinstance(c, Cube) else Cube(*c) for c in cubes])

    @classmethod
    def from_truth_table(cls, vars: VarSet, table: TruthTable | Sequence[int]) -> "EsopFunction":
        """Positive-polarity (ANF) form of a truth table, by the binary Moebius transform."""
        bits = table.bits if isinstance(table, TruthTable) else np.asarray(table, dtype=bool)
        n = len(vars)
        if bits.shape != (1 << n,):
            raise ValueError("truth table size does not match the variable count")
        coeffs = bits.astype(np.uint8).copy()
        for i in range(n):
            step = 1 << i
            view = coeffs.reshape(-1, 2 * step)
            view[:, step:] ^= view[:, :step]
        return cls(vars, frozenset(Cube(int(m), 0) for m in np.flatnonzero(coeffs)))

    # properties

    @property
    def n(self) -> int:
        return len(self.vars)

    @cached_property
    def truth_table(self) -> TruthTable:
        return to_truth_table(self)

    @property
    def is_constant(self) -> bool:
        return self.constant_value is not None

    @cached_property
    def constant_value(self) -> int | None:
        """0 or 1 for constant functions, ``None`` otherwise."""
        if not self.cubes:
            return 0
        if self.cubes == frozenset([Cube()]):
            return 1
        bits = self.truth_table.bits
        if not bits.any():
            return 0
        if bits.all():
            return 1
        return None

    @property
    def is_anf(self) -> bool:
        return all(c.neg == 0 for c in self.cubes)

    def support(self) -> tuple[str, ...]:
        """Variables the function actually depends on, in declared order."""
        anf = to_anf(self)
        mask = 0
        for c in anf.cubes:
            mask |= c.pos
        return tuple(name for i, name in enumerate(self.vars) if mask >> i & 1)

    def depends_on(self, name: str) -> bool:
        return name in self.support()

    def sorted_cubes(self) -> list[Cube]:
        """Cubes ordered lexicographically by literal vector, last variable most significant."""
        n = self.n
        return sorted(self.cubes, key=lambda c: c.literals(n)[::-1])

    # algebra

    def _check_vars(self, other: "EsopFunction") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable sets differ: {self.vars.names} vs {other.vars.names}")

    def __xor__(self, other: "EsopFunction | int") -> "EsopFunction":
        if isinstance(other, int):
            return self ^ EsopFunction.constant(self.vars, other)
        self._check_vars(other)
        return EsopFunction(self.vars, self.cubes.symmetric_difference(other.cubes))

    __rxor__ = __xor__

    def __and__(self, other: "EsopFunction | int") -> "EsopFunction":
        if isinstance(other, int):
            return self if other else EsopFunction.zero(self.vars)
        self._check_vars(other)
        products = []
        for a in self.cubes:
            for b in other.cubes:
                pos, neg = a.pos | b.pos, a.neg | b.neg
                if pos & neg == 0:
                    products.append(Cube(pos, neg))
        return EsopFunction(self.vars, products)

    __rand__ = __and__

    def __invert__(self) -> "EsopFunction":
        return self ^ 1

    def times_literal(self, name: str, polarity: int = 1) -> "EsopFunction":
        """Product with a single literal; cheaper than a general ``&``."""
        bit = 1 << self.vars.index(name)
        out = []
        for c in self.cubes:
            if polarity:
                if not c.neg & bit:
                    out.append(Cube(c.pos | bit, c.neg))
            elif not c.pos & bit:
                out.append(Cube(c.pos, c.neg | bit))
        return EsopFunction(self.vars, out)

    def __call__(self, assignment: int | dict[str, int] | Sequence[int]) -> int:
        return self.evaluate(assignment)

    def evaluate(self, assignment: int | dict[str, int] | Sequence[int]) -> int:
        index = assignment_index(self.vars, assignment)
        value = 0
        for c in self.cubes:
            value ^= c.evaluate(index)
        return value

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EsopFunction):
            return NotImplemented
        if self.vars != other.vars:
            return False
        if self.cubes == other.cubes:
            return True
        return self.truth_table == other.truth_table

    def __hash__(self) -> int:
        return hash((self.vars, self.truth_table))

    # text

    def cube_text(self, cube: Cube) -> str:
        if cube.support == 0:
            return "1"
        parts = []
        for i, name in enumerate(self.vars):
            bit = 1 << i
            if cube.pos & bit:
                parts.append(name)
            elif cube.neg & bit:
                parts.append("!" + name)
        return " ".join(parts)

    def __str__(self) -> str:
        if not self.cubes:
            return "0"
        return " ^ ".join(self.cube_text(c) for c in self.sorted_cubes())

    def __repr__(self) -> str:
        return f"EsopFunction({str(self)!r}, vars={','.join(self.vars)})"


def assignment_index(vars: VarSet, assignment: int | dict[str, int] | Sequence[int]) -> int:
    """Input index with variable 0 as the least significant bit."""
    if isinstance(assignment, (int, np.integer)):
        return int(assignment)
    if isinstance(assignment, dict):
        index = 0
        for name, value in assignment.items():
            if value:
                index |= 1 << vars.index(name)
        return index
    if len(assignment) != len(vars):
        raise ValueError(f"expected {len(vars)} input bits, got {len(assignment)}")
    return sum(1 << i for i, b in enumerate(assignment) if b)


def parse_esop(text: str, vars: VarSet | Iterable[str] | str) -> EsopFunction:
    """Parse ``a ^ !a b ^ a c ^ c`` style text.

    Terms are separated by ``^``; a term is ``0``, ``1`` or a run of literals,
    each an identifier optionally prefixed by ``!``.  A glued identifier such
    as ``ab`` that is not itself declared is split into declared names.
    """
    if not isinstance(vars, VarSet):
        vars = VarSet.of(vars)
    cubes: list[Cube] = []
    pos = 0
    length = len(text)

    def skip_ws(p: int) -> int:
        while p < length and text[p].isspace():
            p += 1
        return p

    while True:
        pos = skip_ws(pos)
        term_start = pos
        cube_pos = cube_neg = 0
        zero = False
        seen_literal = False
        seen_const = False
        while pos < length and text[pos] != "^":
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            if ch in "01" and not (pos + 1 < length and text[pos + 1].isalnum()):
                if seen_literal or seen_const:
                    raise EsopSyntaxError("constant must stand alone in a term", pos)
                seen_const = True
                zero = ch == "0"
                pos += 1
                continue
            if seen_const:
                raise EsopSyntaxError("constant must stand alone in a term", pos)
            negated = False
            if ch == "!":
                negated = True
                pos += 1
                pos = skip_ws(pos)
            m = _IDENT.match(text, pos)
            if not m:
                raise EsopSyntaxError(f"unexpected character {text[pos:pos + 1]!r}" if pos < length
                                      else "unexpected end of input", pos)
            names = _split_identifier(m.group(), vars)
            if names is None:
                raise UnknownVariableError(m.group())
            for k, name in enumerate(names):
                bit = 1 << vars.index(name)
                if negated and k == 0:
                    cube_neg |= bit
                else:
                    cube_pos |= bit
            seen_literal = True
            pos = m.end()
        if not seen_literal and not seen_const:
            raise EsopSyntaxError("empty term", term_start if term_start < length else length)
        if not zero and not (cube_pos & cube_neg):
            cubes.append(Cube(cube_pos, cube_neg))
        if pos >= length:
            break
        pos += 1  # '^'
    return EsopFunction(vars, cubes)


def _split_identifier(ident: str, vars: VarSet) -> list[str] | None:
    if ident in vars:
        return [ident]
    # longest declared prefix first
    for cut in range(len(ident) - 1, 0, -1):
        head = ident[:cut]
        if head in vars:
            rest = _split_identifier(ident[cut:], vars)
            if rest is not None:
                return [head] + rest
    return None


def to_truth_table(f: EsopFunction) -> TruthTable:
    n = f.n
    idx = np.arange(1 << n, dtype=np.uint32)
    bits = np.zeros(1 << n, dtype=bool)
    for c in f.cubes:
        bits ^= ((idx & c.pos) == c.pos) & ((idx & c.neg) == 0)
    return TruthTable(n, bits)


def to_anf(f: EsopFunction) -> EsopFunction:
    """Rewrite every negative literal as ``1 ^ x`` and cancel."""
    if f.is_anf:
        return f
    out: list[Cube] = []
    for c in f.cubes:
        negs = [1 << i for i in range(f.n) if c.neg >> i & 1]
        # each subset of the negated variables contributes one positive cube
        for sub in range(1 << len(negs)):
            extra = 0
            for j, bit in enumerate(negs):
                if sub >> j & 1:
                    extra |= bit
            out.append(Cube(c.pos | extra, 0))
    return EsopFunction(f.vars, out)


def cofactor(f: EsopFunction, v: str, polarity: int) -> EsopFunction:
    """Substitute ``v := polarity``."""
    bit = 1 << f.vars.index(v)
    out = []
    for c in f.cubes:
        if polarity:
            if c.neg & bit:
                continue
            out.append(Cube(c.pos & ~bit, c.neg))
        else:
            if c.pos & bit:
                continue
            out.append(Cube(c.pos, c.neg & ~bit))
    return EsopFunction(f.vars, out)


def shannon_expand(f: EsopFunction, v: str) -> tuple[EsopFunction, EsopFunction]:
    """``f = !v f0 ^ v f1``; returns ``(f0, f1)``."""
    return cofactor(f, v, 0), cofactor(f, v, 1)


def positive_davio_expand(f: EsopFunction, v: str) -> tuple[EsopFunction, EsopFunction]:
    """``f = f0 ^ v (f0 ^ f1)``; returns ``(f0, f0 ^ f1)``."""
    f0, f1 = shannon_expand(f, v)
    return f0, f0 ^ f1


def negative_davio_expand(f: EsopFunction, v: str) -> tuple[EsopFunction, EsopFunction]:
    """``f = f1 ^ !v (f0 ^ f1)``; returns ``(f1, f0 ^ f1)``."""
    f0, f1 = shannon_expand(f, v)
    return f1, f0 ^ f1


@dataclass(frozen=True)
class SymmetryIndexSet:
    """Popcounts on which a totally symmetric function is 1."""

    n: int
    indices: frozenset[int]

    def __post_init__(self):
        indices = frozenset(int(k) for k in self.indices)
        bad = [k for k in indices if not 0 <= k <= self.n]
        if bad:
            raise ValueError(f"symmetry indices {sorted(bad)} outside 0..{self.n}")
        object.__setattr__(self, "indices", indices)

    def __xor__(self, other: "SymmetryIndexSet") -> "SymmetryIndexSet":
        if self.n != other.n:
            raise ValueError("index sets over different variable counts")
        return SymmetryIndexSet(self.n, self.indices ^ other.indices)

    def __str__(self) -> str:
        return "S^{" + ",".join(str(k) for k in sorted(self.indices)) + "}"


def symmetry_indices(f: EsopFunction) -> SymmetryIndexSet | None:
    """Index set if ``f`` depends only on the number of ones in its input."""
    bits = f.truth_table.bits
    counts = _popcounts(f.n)
    indices = set()
    for k in range(f.n + 1):
        values = bits[counts == k]
        if values.all():
            indices.add(k)
        elif values.any():
            return None
    return SymmetryIndexSet(f.n, frozenset(indices))


def symmetric_function(indices: SymmetryIndexSet | Iterable[int], vars: VarSet) -> EsopFunction:
    if not isinstance(indices, SymmetryIndexSet):
        indices = SymmetryIndexSet(len(vars), frozenset(indices))
    if indices.n != len(vars):
        raise ValueError(f"index set is over {indices.n} variables, VarSet has {len(vars)}")
    counts = _popcounts(len(vars))
    bits = np.isin(counts, sorted(indices.indices))
    return EsopFunction.from_truth_table(vars, bits)


def random_esop(vars: VarSet | Iterable[str] | str, rng: np.random.Generator,
                n_cubes: int | None = None) -> EsopFunction:
    """Random ESOP; each literal is absent, positive or negative with equal odds."""
    if not isinstance(vars, VarSet):
        vars = VarSet.of(vars)
    n = len(vars)
    if n_cubes is None:
        n_cubes = int(rng.integers(1, 2 * n + 1))
    cubes = []
    for _ in range(n_cubes):
        lits = rng.integers(0, 3, size=n)
        pos = sum(1 << i for i in range(n) if lits[i] == Literal.POSITIVE)
        neg = sum(1 << i for i in range(n) if lits[i] == Literal.NEGATIVE)
        cubes.append(Cube(pos, neg))
    return EsopFunction(vars, cubes)
