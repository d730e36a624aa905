"""Positive Davio lattice synthesis of reversible circuits and their layout mapping."""
from .boolfn import (
    Cube,
    EsopFunction,
    EsopSyntaxError,
    SymmetryIndexSet,
    TruthTable,
    UnknownVariableError,
    VarSet,
    cofactor,
    negative_davio_expand,
    parse_esop,
    positive_davio_expand,
    random_esop,
    shannon_expand,
    symmetric_function,
    symmetry_indices,
    to_anf,
    to_truth_table,
)
from .circuit import (
    Circuit,
    DecompositionStyle,
    Gate,
    GateKind,
    SwatBlock,
    circuit_unitary,
    decompose_swap,
    decompose_swat,
    decompose_toffoli,
    simulate_classical,
    synthesize_from_lattice,
    verify_synthesis,
)
from .errors import DavioError
from .lattice import (
    DavioLattice,
    LevelBudgetExceeded,
    Ordering,
    OrderingStrategy,
    build_lattice,
    join_children,
    lattice_from_leaves,
    symmetric_lattice,
)
from .layout import LayoutGraph, LayoutKind, are_adjacent, heavy_hex_layout, square_layout, triangular_layout
from .mapper import (
    MappingReport,
    Placement,
    SwatConnectivity,
    map_to_heavy_hex,
    map_to_square,
    map_to_triangular,
    predicted_swaps,
    route_swat,
    swat_cnot_cost,
    swat_swap_cost,
)

__all__ = [name for name in dir() if not name.startswith("_")]
