"""Command-line front end.

    davio-synth synth  -f "a b ^ b c ^ a !c" --vars a,b,c
    davio-synth map    -f "a b ^ b c" --vars a,b,c --layout heavy-hex --route
    davio-synth verify -f "a ^ b c" --vars a,b,c
    davio-synth verify --random 50 --n-vars 4 --seed 1
    davio-synth sweep  --layouts square,heavy-hex,triangular --n 1..7
    davio-synth export --input synth.json --format qasm

Any option may also come from a JSON file given with ``--config``; flags on
the command line win.  Exit status: 0 success, 1 verification failure,
2 usage error, 3 level budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Sequence

import numpy as np

from .boolfn import EsopFunction, EsopSyntaxError, UnknownVariableError, VarSet, parse_esop, random_esop
from .circuit import (Circuit, DecompositionStyle, QubitBudgetError, circuit_from_dict, circuit_to_dict,
                      circuit_to_qasm, synthesize_from_lattice, verify_synthesis)
from .lattice import (DavioLattice, LevelBudgetExceeded, Ordering, OrderingStrategy, build_lattice,
                      lattice_from_dict, lattice_to_dict, lattice_to_dot)
from .layout import LayoutKind, layout_from_dict, layout_to_dict, layout_to_dot
from .mapper import (MappingReport, SWEEP_COLUMNS, map_circuit, route_swat, sweep, sweep_to_csv)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

COMMANDS = ("synth", "map", "verify", "sweep", "export")
FORMATS = ("json", "dot", "qasm", "csv", "text")


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """``"1..7"`` or ``"3"`` or ``"1,4,9"``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise UsageError(f"empty range {text!r}")
    return out


def _layout_list(text: str | Sequence[str]) -> list[LayoutKind]:
    names = text.split(",") if isinstance(text, str) else list(text)
    try:
        return [LayoutKind(n.strip()) for n in names if n.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--seed", type=int, default=0, help="seed for random corpora (default 0)")
    common.add_argument("--format", dest="output_format", choices=FORMATS, help="output format")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    fn = argparse.ArgumentParser(add_help=False)
    fn.add_argument("-f", "--function", dest="function_text", help='ESOP text, e.g. "a b ^ !c"')
    fn.add_argument("--vars", help="declared variable order, comma separated")
    fn.add_argument("--strategy", choices=[o.value for o in Ordering],
                    help="level ordering (default: exhaustive up to 6 variables, else fixed-order)")
    fn.add_argument("--max-levels", type=int, help="level budget for lattice construction")

    p = argparse.ArgumentParser(prog="davio-synth", description="Positive Davio lattice synthesis and mapping")
    sub = p.add_subparsers(dest="command", metavar="command")

    s = sub.add_parser("synth", parents=[common, fn], help="build a lattice and its SWAT circuit")
    s.add_argument("--style", choices=[d.value for d in DecompositionStyle],
                   help="decompose Toffolis and SWAPs in the emitted circuit")

    m = sub.add_parser("map", parents=[common, fn], help="place a circuit on a layout")
    m.add_argument("--layout", choices=[k.value for k in LayoutKind])
    m.add_argument("--input", help="circuit JSON (or synth output) instead of -f")
    m.add_argument("--route", action="store_true", help="also emit the routed circuit")

    v = sub.add_parser("verify", parents=[common, fn], help="exhaustively check synthesized circuits")
    v.add_argument("--input", help="circuit JSON (or synth output) to check against -f")
    v.add_argument("--random", type=int, default=0, help="also check this many seeded random ESOPs")
    v.add_argument("--n-vars", type=int, default=4, help="variable count of the random ESOPs")

    w = sub.add_parser("sweep", parents=[common], help="measured extra SWAPs per layout and level count")
    w.add_argument("--layouts", default=",".join(k.value for k in SWEEP_COLUMNS))
    w.add_argument("--n", dest="n_range", default="1..7", help="level counts, e.g. 1..7")

    e = sub.add_parser("export", parents=[common], help="convert a JSON artifact to DOT, QASM or JSON")
    e.add_argument("--input", help="JSON artifact written by another command")
    p.set_defaults(_subparsers={"synth": s, "map": m, "verify": v, "sweep": w, "export": e})
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    try:
        with open(known.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cfg = {k.replace("-", "_"): val for k, val in cfg.items()}
    command = cfg.pop("command", None)
    if not any(a in COMMANDS for a in argv):
        if command is None:
            raise UsageError("no command given")
        argv = [command] + argv
    command = next(a for a in argv if a in COMMANDS)
    aliases = {"format": "output_format", "function": "function_text", "n": "n_range"}
    cfg = {aliases.get(k, k): val for k, val in cfg.items()}
    if isinstance(cfg.get("vars"), list):
        cfg["vars"] = ",".join(cfg["vars"])
    if isinstance(cfg.get("layouts"), list):
        cfg["layouts"] = ",".join(cfg["layouts"])
    parser.get_default("_subparsers")[command].set_defaults(**cfg)
    return argv


# helpers

def _function(args) -> EsopFunction:
    if args.function_text is None:
        raise UsageError("-f/--function is required")
    if args.vars:
        vars = VarSet.of(args.vars)
    else:
        # declared order defaults to first appearance
        names = []
        for name in re.findall(r"[a-z][a-z0-9]*", args.function_text):
            if name not in names:
                names.append(name)
        vars = VarSet.of(names)
    return parse_esop(args.function_text, vars)


def _strategy(args) -> OrderingStrategy | None:
    return OrderingStrategy(Ordering(args.strategy)) if args.strategy else None


def _lattice(args, f: EsopFunction) -> DavioLattice:
    return build_lattice(f, _strategy(args), args.max_levels)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _circuit_from_artifact(data: dict) -> Circuit:
    if "circuit" in data:
        data = data["circuit"]
    if "gates" not in data:
        raise UsageError("input holds no circuit")
    return circuit_from_dict(data)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _circuit_text(c: Circuit) -> str:
    lines = [f"{c.n_qubits} qubits: " + " ".join(c.labels)]
    lines += [f"  {op}" for op in c.ops]
    return "\n".join(lines) + "\n"


# commands

def cmd_synth(args) -> int:
    f = _function(args)
    lattice = _lattice(args, f)
    circuit = synthesize_from_lattice(lattice)
    emitted = circuit.decomposed(args.style) if args.style else circuit
    fmt = args.output_format or "json"
    if fmt == "json":
        _emit(_dump({"function": str(f), "lattice": lattice_to_dict(lattice),
                     "circuit": circuit_to_dict(emitted), "swat_blocks": len(circuit.swat_blocks)}), args)
    elif fmt == "dot":
        _emit(lattice_to_dot(lattice), args)
    elif fmt == "qasm":
        _emit(circuit_to_qasm(emitted), args)
    elif fmt == "text":
        rows = [f"level {k} [{v}]: " + " | ".join(str(n.residual) for n in row)
                for k, (v, row) in enumerate(zip(lattice.level_vars, lattice.levels))]
        rows.append("leaves: " + " ".join(map(str, lattice.leaves)))
        _emit(f"f = {f}\n" + "\n".join(rows) + "\n" + _circuit_text(emitted), args)
    else:
        raise UsageError(f"synth cannot write {fmt}")
    return EXIT_OK


def cmd_map(args) -> int:
    if not args.layout:
        raise UsageError("--layout is required")
    if args.input:
        circuit = _circuit_from_artifact(_read_json(args.input))
    else:
        circuit = synthesize_from_lattice(_lattice(args, _function(args)))
    n = len(circuit.level_vars)
    report = map_circuit(circuit, n, args.layout)
    fmt = args.output_format or "json"
    if fmt == "json":
        out = {"report": report.to_dict()}
        if args.route:
            out["routed"] = circuit_to_dict(route_swat(circuit, report))
        _emit(_dump(out), args)
    elif fmt == "text":
        lines = [f"layout {report.layout.value}, {n} levels",
                 "per-SWAT swaps: " + " ".join(map(str, report.per_swat_swaps)),
                 f"total swaps {report.total_swaps}, extra CNOTs {report.total_extra_cnots}"
                 + (" (upper bound)" if report.bound_only else "")]
        _emit("\n".join(lines) + "\n", args)
    elif fmt == "dot":
        labels = {p: circuit.labels[q] for q, p in report.placement.pairs()}
        _emit(layout_to_dot(report.graph, labels), args)
    elif fmt == "qasm":
        _emit(circuit_to_qasm(route_swat(circuit, report)), args)
    else:
        raise UsageError(f"map cannot write {fmt}")
    return EXIT_OK


def cmd_verify(args) -> int:
    checks: list[tuple[str, bool]] = []
    if args.function_text is not None:
        f = _function(args)
        if args.input:
            circuit = _circuit_from_artifact(_read_json(args.input))
        else:
            circuit = synthesize_from_lattice(_lattice(args, f))
        checks.append((str(f), verify_synthesis(circuit, f)))
    elif args.input:
        raise UsageError("--input needs -f to name the expected function")
    if args.random:
        if not 1 <= args.n_vars <= 6:
            raise UsageError("--n-vars must be between 1 and 6")
        rng = np.random.default_rng(args.seed)
        vars = VarSet.of([chr(ord("a") + i) for i in range(args.n_vars)])
        for _ in range(args.random):
            f = random_esop(vars, rng)
            try:
                lattice = build_lattice(f, None, args.max_levels or 12)
            except LevelBudgetExceeded:
                checks.append((str(f), False))
                continue
            checks.append((str(f), verify_synthesis(synthesize_from_lattice(lattice), f)))
    if not checks:
        raise UsageError("nothing to verify: give -f or --random")
    fmt = args.output_format or "text"
    if fmt == "json":
        _emit(_dump([{"function": t, "pass": ok} for t, ok in checks]), args)
    else:
        _emit("".join(f"{'PASS' if ok else 'FAIL'} {t}\n" for t, ok in checks), args)
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_FAIL


def cmd_sweep(args) -> int:
    ns = parse_range(args.n_range)
    if any(n < 1 or n > 12 for n in ns):
        raise UsageError("level counts must lie in 1..12")
    rows = sweep(ns, _layout_list(args.layouts))
    fmt = args.output_format or "csv"
    if fmt == "csv":
        _emit(sweep_to_csv(rows), args)
    elif fmt == "json":
        _emit(_dump([{("n" if k == "n" else k.value): val for k, val in row.items()} for row in rows]), args)
    else:
        raise UsageError(f"sweep cannot write {fmt}")
    return EXIT_OK


def _artifact_kind(data) -> str:
    if isinstance(data, dict):
        if "lattice" in data and "circuit" in data:
            return "synth"
        if "report" in data:
            return "map"
        if "gates" in data:
            return "circuit"
        if "level_vars" in data:
            return "lattice"
        if "edges" in data:
            return "layout"
        if "per_swat_swaps" in data:
            return "report"
    raise UsageError("unrecognised JSON artifact")


def cmd_export(args) -> int:
    if not args.input:
        raise UsageError("--input is required")
    data = _read_json(args.input)
    kind = _artifact_kind(data)
    fmt = args.output_format or "json"
    if kind == "synth":
        lattice = lattice_from_dict(data["lattice"])
        circuit = circuit_from_dict(data["circuit"])
        out = {"function": data.get("function", str(lattice.function)), "lattice": lattice_to_dict(lattice),
               "circuit": circuit_to_dict(circuit), "swat_blocks": len(circuit.swat_blocks)}
        texts = {"json": lambda: _dump(out), "dot": lambda: lattice_to_dot(lattice),
                 "qasm": lambda: circuit_to_qasm(circuit)}
    elif kind == "circuit":
        circuit = circuit_from_dict(data)
        texts = {"json": lambda: _dump(circuit_to_dict(circuit)), "qasm": lambda: circuit_to_qasm(circuit)}
    elif kind == "lattice":
        lattice = lattice_from_dict(data)
        texts = {"json": lambda: _dump(lattice_to_dict(lattice)), "dot": lambda: lattice_to_dot(lattice)}
    elif kind == "layout":
        g = layout_from_dict(data)
        texts = {"json": lambda: _dump(layout_to_dict(g)), "dot": lambda: layout_to_dot(g)}
    else:
        report = MappingReport.from_dict(data["report"] if kind == "map" else data)
        out = dict(data)
        if kind == "map":
            out["report"] = report.to_dict()
            routed = circuit_from_dict(data["routed"]) if "routed" in data else None
            if routed is not None:
                out["routed"] = circuit_to_dict(routed)
        else:
            out = report.to_dict()
            routed = None
        texts = {"json": lambda: _dump(out), "dot": lambda: layout_to_dot(report.graph)}
        if routed is not None:
            texts["qasm"] = lambda: circuit_to_qasm(routed)
    if fmt not in texts:
        raise UsageError(f"cannot export a {kind} artifact as {fmt}")
    _emit(texts[fmt](), args)
    return EXIT_OK


HANDLERS = {"synth": cmd_synth, "map": cmd_map, "verify": cmd_verify, "sweep": cmd_sweep, "export": cmd_export}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return HANDLERS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (LevelBudgetExceeded, QubitBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, EsopSyntaxError, UnknownVariableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
