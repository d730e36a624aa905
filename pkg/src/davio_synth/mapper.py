"""Placement of SWAT circuits on coupling graphs and the SWAP insertion cost model.

Inside ``SwatBlock(hi, lo, ctrl)`` the Toffoli targets ``hi`` with controls
``lo`` and ``ctrl``; the SWAP couples ``hi`` and ``lo``.  Connectivity is
classified by which of the three pairs is missing from the layout:

============================  ==============  =====  =====
pattern                       missing pair    SWAPs  CNOTs
============================  ==============  =====  =====
full-triangle                 none            0      0
v-shape                       lo / ctrl       0      0
missing-target-ctrl1          hi / lo         4      9
missing-target-ctrl2          hi / ctrl       2      4
============================  ==============  =====  =====

A v-shape needs nothing extra because the linear-nn Toffoli never couples
its two controls.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .circuit import Circuit, Op, SwatBlock, SWAP, synthesize_from_lattice
from .errors import DavioError
from .lattice import symmetric_lattice
from .layout import (LayoutGraph, LayoutKind, are_adjacent, heavy_hex_layout, square_layout,
                     triangular_layout)

THREADS_ENV = "DAVIO_SYNTH_THREADS"


class PlacementError(DavioError, ValueError):
    pass


class InconsistentReportError(DavioError, ValueError):
    pass


class SwatConnectivity(str, Enum):
    FULL_TRIANGLE = "full-triangle"
    V_SHAPE = "v-shape"
    MISSING_TARGET_CTRL1 = "missing-target-ctrl1"
    MISSING_TARGET_CTRL2 = "missing-target-ctrl2"


_SWAPS = {
    SwatConnectivity.FULL_TRIANGLE: 0,
    SwatConnectivity.V_SHAPE: 0,
    SwatConnectivity.MISSING_TARGET_CTRL1: 4,
    SwatConnectivity.MISSING_TARGET_CTRL2: 2,
}
_CNOTS = {
    SwatConnectivity.FULL_TRIANGLE: 0,
    SwatConnectivity.V_SHAPE: 0,
    SwatConnectivity.MISSING_TARGET_CTRL1: 9,
    SwatConnectivity.MISSING_TARGET_CTRL2: 4,
}


def swat_swap_cost(conn: SwatConnectivity | str) -> int:
    return _SWAPS[SwatConnectivity(conn)]


def swat_cnot_cost(conn: SwatConnectivity | str) -> int:
    """Extra CNOTs after cancelling the inserted SWAPs against the block's own gates."""
    return _CNOTS[SwatConnectivity(conn)]


def classify_swat(g: LayoutGraph, hi: int, lo: int, ctrl: int) -> SwatConnectivity:
    """Connectivity pattern of three physical qubits playing hi, lo and ctrl."""
    missing = []
    if not are_adjacent(g, hi, lo):
        missing.append(SwatConnectivity.MISSING_TARGET_CTRL1)
    if not are_adjacent(g, hi, ctrl):
        missing.append(SwatConnectivity.MISSING_TARGET_CTRL2)
    if not are_adjacent(g, lo, ctrl):
        missing.append(SwatConnectivity.V_SHAPE)
    if not missing:
        return SwatConnectivity.FULL_TRIANGLE
    if len(missing) > 1:
        raise PlacementError(f"qubits ({hi}, {lo}, {ctrl}) miss {len(missing)} of the three couplings")
    return missing[0]


@dataclass(frozen=True)
class Placement:
    """Logical qubit -> physical node, injective."""

    assignment: Mapping[int, int]

    def __post_init__(self):
        a = dict(self.assignment)
        if len(set(a.values())) != len(a):
            raise PlacementError("placement maps two logical qubits to one node")
        object.__setattr__(self, "assignment", a)

    def __getitem__(self, logical: int) -> int:
        return self.assignment[logical]

    def __len__(self) -> int:
        return len(self.assignment)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.assignment.items())


@dataclass(frozen=True)
class MappingReport:
    layout: LayoutKind
    n_levels: int
    placement: Placement
    connectivity: tuple[SwatConnectivity, ...]
    per_swat_swaps: tuple[int, ...]
    total_swaps: int
    total_extra_cnots: int
    bound_only: bool = False
    graph: LayoutGraph | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.total_swaps != sum(self.per_swat_swaps):
            raise InconsistentReportError("total_swaps differs from the sum of per-SWAT costs")
        if self.total_extra_cnots != sum(swat_cnot_cost(c) for c in self.connectivity):
            raise InconsistentReportError("total_extra_cnots differs from the per-SWAT CNOT costs")

    @property
    def per_swat_cnots(self) -> tuple[int, ...]:
        return tuple(swat_cnot_cost(c) for c in self.connectivity)

    def to_dict(self) -> dict:
        return {
            "layout": self.layout.value,
            "n_levels": self.n_levels,
            "placement": [list(p) for p in self.placement.pairs()],
            "connectivity": [c.value for c in self.connectivity],
            "per_swat_swaps": list(self.per_swat_swaps),
            "total_swaps": self.total_swaps,
            "total_extra_cnots": self.total_extra_cnots,
            "bound_only": self.bound_only,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "MappingReport":
        kind = LayoutKind(data["layout"])
        n = int(data["n_levels"])
        if "connectivity" not in data:
            raise InconsistentReportError("report lacks per-SWAT connectivity")
        return cls(
            layout=kind,
            n_levels=n,
            placement=Placement({int(a): int(b) for a, b in data["placement"]}),
            connectivity=tuple(SwatConnectivity(c) for c in data["connectivity"]),
            per_swat_swaps=tuple(int(x) for x in data["per_swat_swaps"]),
            total_swaps=int(data["total_swaps"]),
            total_extra_cnots=int(data["total_extra_cnots"]),
            bound_only=bool(data.get("bound_only", False)),
            graph=layout_for(kind, n),
        )

    @classmethod
    def from_json(cls, text: str) -> "MappingReport":
        return cls.from_dict(json.loads(text))


# placements along the qubit chain 0..2n (variable lines, then data lines)

def _expected_swats(n: int) -> tuple[SwatBlock, ...]:
    return tuple(SwatBlock(k + i, k + i + 1, k + i + 2) for k in range(n - 1, -1, -1) for i in range(k + 1))


def _check_structure(circuit: Circuit, n_levels: int) -> None:
    if n_levels < 1:
        raise ValueError("n_levels must be at least 1")
    if circuit.n_qubits != 2 * n_levels + 1:
        raise PlacementError(f"expected {2 * n_levels + 1} qubits for {n_levels} levels, got {circuit.n_qubits}")
    if circuit.swat_blocks != _expected_swats(n_levels):
        raise PlacementError("circuit is not a lattice SWAT network of the stated size")


def layout_for(kind: LayoutKind | str, n_levels: int) -> LayoutGraph:
    """Smallest patch of the given kind that holds the placement for ``n_levels``."""
    kind = LayoutKind(kind)
    if kind is LayoutKind.TRIANGULAR:
        return triangular_layout(2, n_levels + 1)
    if kind is LayoutKind.SQUARE:
        return square_layout(n_levels + 1, 2)
    x0 = _heavy_hex_start(n_levels)
    return heavy_hex_layout(max(1, -(-(x0 + 2 * n_levels) // 4)), 1)


def _heavy_hex_start(n: int) -> int:
    # the second-to-last chain qubit must sit on a hexagon corner with a downward side qubit
    return (-(2 * n - 2)) % 4


def placement_for(kind: LayoutKind | str, n_levels: int, g: LayoutGraph | None = None) -> Placement:
    """Deterministic chain placement.

    triangular and square: chain qubit ``j`` at column ``j // 2``, row ``j % 2``.
    heavy-hex: chain qubits ``0..2n-1`` left to right along the top row of
    hexagons, the last one on the side qubit below chain qubit ``2n-2``.
    """
    kind = LayoutKind(kind)
    g = g or layout_for(kind, n_levels)
    m = 2 * n_levels + 1
    if kind in (LayoutKind.TRIANGULAR, LayoutKind.SQUARE):
        return Placement({j: g.node_at(j // 2, j % 2) for j in range(m)})
    x0 = _heavy_hex_start(n_levels)
    a = {j: g.node_at(x0 + j, 0) for j in range(m - 1)}
    a[m - 1] = g.node_at(x0 + 2 * n_levels - 2, 1)
    return Placement(a)


def measure(circuit: Circuit, g: LayoutGraph, placement: Placement) -> tuple[SwatConnectivity, ...]:
    """Connectivity of every SWAT block under ``placement``."""
    return tuple(classify_swat(g, placement[b.hi], placement[b.lo], placement[b.ctrl])
                 for b in circuit.swat_blocks)


def map_circuit(circuit: Circuit, n_levels: int, kind: LayoutKind | str) -> MappingReport:
    kind = LayoutKind(kind)
    _check_structure(circuit, n_levels)
    g = layout_for(kind, n_levels)
    placement = placement_for(kind, n_levels, g)
    conn = measure(circuit, g, placement)
    per = tuple(swat_swap_cost(c) for c in conn)
    level_vars = circuit.level_vars
    return MappingReport(
        layout=kind,
        n_levels=n_levels,
        placement=placement,
        connectivity=conn,
        per_swat_swaps=per,
        total_swaps=sum(per),
        total_extra_cnots=sum(swat_cnot_cost(c) for c in conn),
        bound_only=len(set(level_vars)) != len(level_vars),
        graph=g,
    )


def map_to_triangular(circuit: Circuit, n_levels: int) -> MappingReport:
    report = map_circuit(circuit, n_levels, LayoutKind.TRIANGULAR)
    if report.total_swaps:
        raise PlacementError("triangular placement needed extra SWAPs")
    return report


def map_to_square(circuit: Circuit, n_levels: int) -> MappingReport:
    return map_circuit(circuit, n_levels, LayoutKind.SQUARE)


def map_to_heavy_hex(circuit: Circuit, n_levels: int) -> MappingReport:
    return map_circuit(circuit, n_levels, LayoutKind.HEAVY_HEX)


def predicted_swaps(kind: LayoutKind | str, n: int) -> int:
    kind = LayoutKind(kind)
    if n < 1:
        raise ValueError("n must be at least 1")
    if kind is LayoutKind.TRIANGULAR:
        return 0
    if kind is LayoutKind.SQUARE:
        return n * n if n % 2 == 0 else n * n - 1
    return n * n + n - 2


# routing

def _routed_block(b: SwatBlock, conn: SwatConnectivity) -> list[Op]:
    p0, p1, p2 = b.hi, b.lo, b.ctrl
    if conn is SwatConnectivity.MISSING_TARGET_CTRL2:
        return [SWAP(p0, p1), SwatBlock(p1, p0, p2), SWAP(p0, p1)]
    if conn is SwatConnectivity.MISSING_TARGET_CTRL1:
        return [SWAP(p1, p2), SWAP(p0, p2), SwatBlock(p2, p0, p1), SWAP(p0, p2), SWAP(p1, p2)]
    return [b]


def route_swat(circuit: Circuit, report: MappingReport) -> Circuit:
    """Relabel ``circuit`` onto physical nodes and wrap each SWAT with its SWAPs.

    Afterwards every SWAT is a triangle or a v-shape on the layout, so its
    linear-nn decomposition only uses coupled pairs.  Unplaced nodes become
    idle lines labelled ``p<id>``.
    """
    g = report.graph or layout_for(report.layout, report.n_levels)
    blocks = circuit.swat_blocks
    if len(blocks) != len(report.per_swat_swaps) or len(blocks) != len(report.connectivity):
        raise InconsistentReportError("report does not describe this circuit's SWAT blocks")
    missing = [q for q in range(circuit.n_qubits) if q not in report.placement.assignment]
    if missing:
        raise InconsistentReportError(f"logical qubits {missing} are not placed")
    try:
        conn = measure(circuit, g, report.placement)
    except PlacementError as exc:
        raise InconsistentReportError(str(exc)) from exc
    if conn != report.connectivity or tuple(swat_swap_cost(c) for c in conn) != report.per_swat_swaps:
        raise InconsistentReportError("report costs do not match the placement")

    phys = report.placement.assignment
    labels = [f"p{i}" for i in g.nodes]
    for q, p in phys.items():
        labels[p] = circuit.labels[q]
    ops: list[Op] = []
    k = 0
    for op in circuit.ops:
        mapped = op.relabel(phys)
        if isinstance(op, SwatBlock):
            ops.extend(_routed_block(mapped, conn[k]))
            k += 1
        else:
            ops.append(mapped)
    return Circuit(g.n_nodes, tuple(ops), tuple(labels))


def logical_view(routed_bits, report: MappingReport):
    """Columns of a routed simulation result ordered by logical qubit."""
    cols = [report.placement[q] for q in sorted(report.placement.assignment)]
    return routed_bits[..., cols]


# sweep

SWEEP_COLUMNS = (LayoutKind.SQUARE, LayoutKind.HEAVY_HEX, LayoutKind.TRIANGULAR)


def _sweep_row(n: int, kinds: Sequence[LayoutKind]) -> dict:
    leaves = [0] * n + [1]
    circuit = synthesize_from_lattice(symmetric_lattice(n, leaves))
    return {"n": n, **{k: map_circuit(circuit, n, k).total_swaps for k in kinds}}


def thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        value = int(raw)
    except ValueError:
        value = os.cpu_count() or 1
    return max(1, value)


def sweep(ns: Iterable[int], kinds: Iterable[LayoutKind | str] = SWEEP_COLUMNS,
          workers: int | None = None) -> list[dict]:
    """Measured extra SWAP totals per layout for each level count."""
    kinds = [LayoutKind(k) for k in kinds]
    kinds = [k for k in SWEEP_COLUMNS if k in kinds]
    ns = list(ns)
    workers = min(workers or thread_cap(), max(1, len(ns)))
    if workers == 1:
        return [_sweep_row(n, kinds) for n in ns]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda n: _sweep_row(n, kinds), ns))


def sweep_to_csv(rows: Sequence[dict]) -> str:
    kinds = [k for k in SWEEP_COLUMNS if rows and k in rows[0]]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n"] + [k.value.replace("-", "_") for k in kinds])
    for row in rows:
        w.writerow([row["n"]] + [row[k] for k in kinds])
    return buf.getvalue()
