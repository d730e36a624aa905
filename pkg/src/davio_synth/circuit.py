"""Gate-level circuits, SWAT blocks, lattice synthesis and small simulators.

Basis states are little-endian: qubit 0 is the least significant bit of a
basis index.  Multi-qubit gates list controls before targets.

A SWAT block on ``(hi, lo, ctrl)`` is ``SWAP(hi, lo)`` followed by
``TOFFOLI(ctrl, lo -> hi)``; on basis states it maps

    hi, lo  ->  lo ^ (ctrl & hi), hi
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence, Union

import numpy as np

from .boolfn import EsopFunction
from .errors import DavioError
from .lattice import DavioLattice

MAX_SYNTH_LEVELS = 12
MAX_UNITARY_QUBITS = 10

# qubit carrying the function value after synthesis
OUTPUT_LINE = 0

_VAR_LABEL = re.compile(r"v(\d+):([a-z][a-z0-9]*)")


class GateKindError(DavioError, ValueError):
    pass


class NonPermutationGateError(DavioError, ValueError):
    pass


class DimensionLimitError(DavioError, ValueError):
    pass


class QubitBudgetError(DavioError, ValueError):
    pass


class GateKind(str, Enum):
    X = "X"
    H = "H"
    T = "T"
    TDG = "Tdg"
    V = "V"
    VDG = "Vdg"
    CNOT = "CNOT"
    CZ = "CZ"
    SWAP = "SWAP"
    TOFFOLI = "TOFFOLI"

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {
    GateKind.X: 1, GateKind.H: 1, GateKind.T: 1, GateKind.TDG: 1, GateKind.V: 1, GateKind.VDG: 1,
    GateKind.CNOT: 2, GateKind.CZ: 2, GateKind.SWAP: 2, GateKind.TOFFOLI: 3,
}

PERMUTATION_KINDS = frozenset({GateKind.X, GateKind.CNOT, GateKind.SWAP, GateKind.TOFFOLI})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        kind = GateKind(self.kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != kind.arity:
            raise GateKindError(f"{kind.value} takes {kind.arity} qubits, got {len(qubits)}")
        if len(set(qubits)) != len(qubits):
            raise GateKindError(f"repeated operand in {kind.value}{qubits}")
        if min(qubits) < 0:
            raise GateKindError(f"negative qubit index in {kind.value}{qubits}")

    def relabel(self, mapping: Sequence[int] | dict[int, int]) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits))

    def __str__(self) -> str:
        return f"{self.kind.value}({', '.join(map(str, self.qubits))})"


def X(q: int) -> Gate:
    return Gate(GateKind.X, (q,))


def CNOT(c: int, t: int) -> Gate:
    return Gate(GateKind.CNOT, (c, t))


def SWAP(a: int, b: int) -> Gate:
    return Gate(GateKind.SWAP, (a, b))


def TOFFOLI(c1: int, c2: int, t: int) -> Gate:
    return Gate(GateKind.TOFFOLI, (c1, c2, t))


def _g1(kind: GateKind, q: int) -> Gate:
    return Gate(kind, (q,))


@dataclass(frozen=True)
class SwatBlock:
    """SWAP(hi, lo) then TOFFOLI(ctrl, lo -> hi)."""

    hi: int
    lo: int
    ctrl: int

    def __post_init__(self):
        if len({self.hi, self.lo, self.ctrl}) != 3:
            raise GateKindError(f"SWAT needs three distinct qubits, got {self.qubits}")

    @property
    def qubits(self) -> tuple[int, int, int]:
        return (self.hi, self.lo, self.ctrl)

    @property
    def gates(self) -> tuple[Gate, Gate]:
        return (SWAP(self.hi, self.lo), TOFFOLI(self.ctrl, self.lo, self.hi))

    def relabel(self, mapping: Sequence[int] | dict[int, int]) -> "SwatBlock":
        return SwatBlock(mapping[self.hi], mapping[self.lo], mapping[self.ctrl])

    def __str__(self) -> str:
        return f"SWAT({self.hi}, {self.lo}; {self.ctrl})"


Op = Union[Gate, SwatBlock]


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[Op, ...] = ()
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        ops = tuple(self.ops)
        labels = tuple(self.labels) or tuple(f"q{i}" for i in range(self.n_qubits))
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "labels", labels)
        if len(labels) != self.n_qubits:
            raise ValueError(f"{len(labels)} labels for {self.n_qubits} qubits")
        for op in ops:
            if max(op.qubits) >= self.n_qubits:
                raise ValueError(f"{op} acts outside {self.n_qubits} qubits")

    @property
    def gates(self) -> tuple[Gate, ...]:
        """Flat gate list with every SWAT block written as its SWAP and TOFFOLI."""
        out: list[Gate] = []
        for op in self.ops:
            if isinstance(op, SwatBlock):
                out.extend(op.gates)
            else:
                out.append(op)
        return tuple(out)

    @property
    def swat_blocks(self) -> tuple[SwatBlock, ...]:
        return tuple(op for op in self.ops if isinstance(op, SwatBlock))

    @property
    def level_vars(self) -> tuple[str, ...]:
        """Variable of each level for synthesized circuits, read from the labels."""
        found = {}
        for label in self.labels:
            m = _VAR_LABEL.fullmatch(label)
            if m:
                found[int(m.group(1))] = m.group(2)
        return tuple(found[k] for k in sorted(found))

    def variable_lines(self) -> dict[int, str]:
        """Qubit index -> variable name for every line that takes an input."""
        out = {}
        for q, label in enumerate(self.labels):
            m = _VAR_LABEL.fullmatch(label)
            if m:
                out[q] = m.group(2)
        return out

    def count(self, kind: GateKind | str) -> int:
        kind = GateKind(kind)
        return sum(1 for g in self.gates if g.kind is kind)

    def decomposed(self, style: "DecompositionStyle | str") -> "Circuit":
        out: list[Gate] = []
        for op in self.ops:
            if isinstance(op, SwatBlock):
                out.extend(decompose_swat(op, style))
            elif op.kind is GateKind.TOFFOLI:
                out.extend(decompose_toffoli(op, style))
            elif op.kind is GateKind.SWAP:
                out.extend(decompose_swap(op))
            else:
                out.append(op)
        return Circuit(self.n_qubits, tuple(out), self.labels)

    def __len__(self) -> int:
        return len(self.ops)


# decompositions

class DecompositionStyle(str, Enum):
    QISKIT = "qiskit-standard"
    BARENCO = "barenco"
    AMY = "amy"
    LINEAR_NN = "linear-nn"


def decompose_swap(g: Gate) -> list[Gate]:
    if g.kind is not GateKind.SWAP:
        raise GateKindError(f"expected SWAP, got {g.kind.value}")
    a, b = g.qubits
    return [CNOT(a, b), CNOT(b, a), CNOT(a, b)]


def _controlled_sqrt_x(c: int, t: int, inverse: bool = False) -> list[Gate]:
    # H . controlled-S . H, with controlled-S from two CNOTs and three T-type gates
    p, m = (GateKind.TDG, GateKind.T) if inverse else (GateKind.T, GateKind.TDG)
    return [_g1(GateKind.H, t), _g1(p, c), _g1(p, t), CNOT(c, t), _g1(m, t), CNOT(c, t),
            _g1(GateKind.H, t)]


def decompose_toffoli(g: Gate, style: DecompositionStyle | str = DecompositionStyle.QISKIT) -> list[Gate]:
    """One- and two-qubit gate sequence equal to ``g`` up to global phase.

    ``linear-nn`` never couples the two controls: every two-qubit gate
    touches the target, so the three qubits only need a path through it.
    """
    if g.kind is not GateKind.TOFFOLI:
        raise GateKindError(f"expected TOFFOLI, got {g.kind.value}")
    style = DecompositionStyle(style)
    a, b, t = g.qubits
    H, T, Tdg = GateKind.H, GateKind.T, GateKind.TDG
    if style is DecompositionStyle.QISKIT:
        return [
            _g1(H, t), CNOT(b, t), _g1(Tdg, t), CNOT(a, t), _g1(T, t), CNOT(b, t), _g1(Tdg, t),
            CNOT(a, t), _g1(T, b), _g1(T, t), _g1(H, t), CNOT(a, b), _g1(T, a), _g1(Tdg, b),
            CNOT(a, b),
        ]
    if style is DecompositionStyle.BARENCO:
        return (_controlled_sqrt_x(b, t) + [CNOT(a, b)] + _controlled_sqrt_x(b, t, inverse=True)
                + [CNOT(a, b)] + _controlled_sqrt_x(a, t))
    if style is DecompositionStyle.AMY:
        # T-depth 3: phases on {a, b, t}, then {a^t, a^b, a^b^t}, then {b^t}
        return [
            _g1(H, t), _g1(T, a), _g1(T, b), _g1(T, t),
            CNOT(a, b), CNOT(t, a), CNOT(b, t),
            _g1(Tdg, a), _g1(Tdg, b), _g1(T, t),
            CNOT(a, b),
            _g1(Tdg, b),
            CNOT(a, b), CNOT(b, t), CNOT(t, a), CNOT(a, b),
            _g1(H, t),
        ]
    # linear-nn: the parities that mix both controls are formed on the control b
    # by passing through the target wire
    return [
        _g1(H, t), _g1(T, a), _g1(T, b), _g1(T, t),
        CNOT(a, t), _g1(Tdg, t),
        CNOT(t, b), _g1(T, b),
        CNOT(a, t), CNOT(t, b), _g1(Tdg, b),
        CNOT(a, t), CNOT(t, b), _g1(Tdg, b),
        CNOT(a, t), CNOT(t, b),
        _g1(H, t),
    ]


def decompose_swat(b: SwatBlock, style: DecompositionStyle | str = DecompositionStyle.LINEAR_NN) -> list[Gate]:
    swap, toffoli = b.gates
    return decompose_swap(swap) + decompose_toffoli(toffoli, style)


def interaction_edges(gates: Iterable[Gate | SwatBlock]) -> set[frozenset[int]]:
    """Qubit pairs touched together by any multi-qubit operation."""
    edges = set()
    for g in gates:
        qs = g.qubits
        if len(qs) < 2:
            continue
        for i in range(len(qs)):
            for j in range(i + 1, len(qs)):
                edges.add(frozenset((qs[i], qs[j])))
    return edges


# synthesis

def synthesize_from_lattice(lattice: DavioLattice) -> Circuit:
    """SWAT network computing the lattice function onto qubit :data:`OUTPUT_LINE`.

    Qubits ``0..n-1`` take the variable of each level, qubits ``n..2n`` start
    at zero and are loaded with the leaf constants by X gates.  Node ``i`` of
    level ``k`` is the SWAT on ``(k+i, k+i+1; k+i+2)``: before it the first
    qubit holds the level variable and the other two the node's left and
    right children.  The SWAP moves the variable one step along, the Toffoli
    forms ``left ^ v & right`` where the variable was.  Levels run bottom-up,
    nodes left to right, so every block acts on three consecutive qubits.
    """
    n = lattice.n_levels
    if n > MAX_SYNTH_LEVELS:
        raise QubitBudgetError(f"lattice has {n} levels, synthesis supports at most {MAX_SYNTH_LEVELS}")
    labels = [f"v{k}:{name}" for k, name in enumerate(lattice.level_vars)]
    labels += [f"d{j}" for j in range(n + 1)]
    ops: list[Op] = [X(n + j) for j, leaf in enumerate(lattice.leaves) if leaf]
    for k in range(n - 1, -1, -1):
        for i in range(k + 1):
            ops.append(SwatBlock(k + i, k + i + 1, k + i + 2))
    return Circuit(2 * n + 1, tuple(ops), tuple(labels))


# simulation

def simulate_classical(c: Circuit, bits: Sequence[int] | np.ndarray) -> np.ndarray:
    """Apply a permutation circuit to one bit vector or a batch of rows."""
    state = np.array(bits, dtype=bool)
    single = state.ndim == 1
    if single:
        state = state[None, :]
    if state.shape[1] != c.n_qubits:
        raise ValueError(f"expected {c.n_qubits} input bits, got {state.shape[1]}")
    for g in c.gates:
        q = g.qubits
        if g.kind is GateKind.X:
            state[:, q[0]] ^= True
        elif g.kind is GateKind.CNOT:
            state[:, q[1]] ^= state[:, q[0]]
        elif g.kind is GateKind.SWAP:
            state[:, [q[0], q[1]]] = state[:, [q[1], q[0]]]
        elif g.kind is GateKind.TOFFOLI:
            state[:, q[2]] ^= state[:, q[0]] & state[:, q[1]]
        else:
            raise NonPermutationGateError(f"{g.kind.value} is not a classical permutation gate")
    return state[0] if single else state


_S2 = 1 / np.sqrt(2)
_W = np.exp(1j * np.pi / 4)
_SINGLE = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _S2,
    GateKind.T: np.diag([1, _W]),
    GateKind.TDG: np.diag([1, np.conj(_W)]),
    GateKind.V: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    GateKind.VDG: 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]]),
}


def _permutation_matrix(k: int, fn) -> np.ndarray:
    # operand 0 is the most significant bit of the local index
    m = np.zeros((1 << k, 1 << k), dtype=complex)
    for col in range(1 << k):
        bits = [(col >> (k - 1 - j)) & 1 for j in range(k)]
        out = fn(bits)
        row = sum(b << (k - 1 - j) for j, b in enumerate(out))
        m[row, col] = 1
    return m


_MULTI = {
    GateKind.CNOT: _permutation_matrix(2, lambda b: [b[0], b[1] ^ b[0]]),
    GateKind.SWAP: _permutation_matrix(2, lambda b: [b[1], b[0]]),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.TOFFOLI: _permutation_matrix(3, lambda b: [b[0], b[1], b[2] ^ (b[0] & b[1])]),
}


def gate_matrix(kind: GateKind | str) -> np.ndarray:
    """Matrix with operand 0 as the most significant local bit."""
    kind = GateKind(kind)
    return (_SINGLE.get(kind) if kind in _SINGLE else _MULTI[kind]).copy()


def circuit_unitary(c: Circuit) -> np.ndarray:
    n = c.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise DimensionLimitError(f"unitary of {n} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit limit")
    dim = 1 << n
    # tensor axes: n row axes (axis 0 = qubit n-1) followed by the column index
    u = np.eye(dim, dtype=complex).reshape([2] * n + [dim])
    for g in c.gates:
        k = len(g.qubits)
        m = gate_matrix(g.kind).reshape([2] * (2 * k))
        axes = [n - 1 - q for q in g.qubits]
        u = np.tensordot(m, u, axes=(list(range(k, 2 * k)), axes))
        # tensordot puts the gate's output axes first; move them back
        u = np.moveaxis(u, list(range(k)), axes)
    return u.reshape(dim, dim)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> bool:
    """Compare after removing the phase of ``b``'s largest entry from ``a``."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(a[idx]) < atol:
        return False
    phase = a[idx] / b[idx]
    phase /= abs(phase)
    return bool(np.max(np.abs(a - phase * b)) < atol)


def verify_synthesis(c: Circuit, f: EsopFunction, output_line: int = OUTPUT_LINE,
                     leaf_init: Sequence[int] | None = None) -> bool:
    """Exhaustive check that ``output_line`` ends up holding ``f``.

    Variable lines are recognised by their ``v<k>:<name>`` labels and receive
    the value of that variable; all other lines start from ``leaf_init``
    (zeros by default).
    """
    var_lines = c.variable_lines()
    other = [q for q in range(c.n_qubits) if q not in var_lines]
    if leaf_init is None:
        leaf_init = [0] * len(other)
    if len(leaf_init) != len(other):
        raise ValueError(f"leaf_init needs {len(other)} bits, got {len(leaf_init)}")
    n = f.n
    inputs = np.zeros((1 << n, c.n_qubits), dtype=bool)
    index = np.arange(1 << n)
    for q, name in var_lines.items():
        inputs[:, q] = (index >> f.vars.index(name)) & 1
    for q, bit in zip(other, leaf_init):
        inputs[:, q] = bool(bit)
    out = simulate_classical(c, inputs)
    return bool(np.array_equal(out[:, output_line], f.truth_table.bits))


# serialization

_QASM_NAMES = {
    GateKind.X: "x", GateKind.H: "h", GateKind.T: "t", GateKind.TDG: "tdg", GateKind.V: "v",
    GateKind.VDG: "vdg", GateKind.CNOT: "cx", GateKind.CZ: "cz", GateKind.SWAP: "swap",
    GateKind.TOFFOLI: "ccx",
}
_QASM_KINDS = {name: kind for kind, name in _QASM_NAMES.items()}


def circuit_to_qasm(c: Circuit) -> str:
    lines = [f"qreg q[{c.n_qubits}]"]
    for g in c.gates:
        lines.append(f"{_QASM_NAMES[g.kind]} " + ",".join(f"q[{q}]" for q in g.qubits))
    return "\n".join(lines) + "\n"


def circuit_from_qasm(text: str) -> Circuit:
    n = None
    gates = []
    for raw in text.splitlines():
        line = raw.strip().rstrip(";")
        if not line or line.startswith("//"):
            continue
        m = re.fullmatch(r"qreg q\[(\d+)\]", line)
        if m:
            n = int(m.group(1))
            continue
        name, _, args = line.partition(" ")
        if name not in _QASM_KINDS:
            raise ValueError(f"unknown QASM gate {name!r}")
        qubits = [int(x) for x in re.findall(r"q\[(\d+)\]", args)]
        gates.append(Gate(_QASM_KINDS[name], tuple(qubits)))
    if n is None:
        n = 1 + max((max(g.qubits) for g in gates), default=-1)
    return Circuit(n, tuple(group_swats(gates)))


def group_swats(gates: Sequence[Gate]) -> list[Op]:
    """Fold each SWAP(a, b) directly followed by TOFFOLI(c, b, a) into a SWAT block."""
    out: list[Op] = []
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.kind is GateKind.SWAP and i + 1 < len(gates):
            nxt = gates[i + 1]
            a, b = g.qubits
            if nxt.kind is GateKind.TOFFOLI and nxt.qubits[1:] == (b, a) and nxt.qubits[0] not in (a, b):
                out.append(SwatBlock(a, b, nxt.qubits[0]))
                i += 2
                continue
        out.append(g)
        i += 1
    return out


def circuit_to_dict(c: Circuit) -> dict:
    return {
        "n_qubits": c.n_qubits,
        "labels": list(c.labels),
        "gates": [{"kind": g.kind.value, "qubits": list(g.qubits)} for g in c.gates],
    }


def circuit_from_dict(data: dict) -> Circuit:
    gates = [Gate(GateKind(g["kind"]), tuple(g["qubits"])) for g in data["gates"]]
    return Circuit(int(data["n_qubits"]), tuple(group_swats(gates)), tuple(data["labels"]))


def circuit_to_json(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), indent=2)


def circuit_from_json(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))
