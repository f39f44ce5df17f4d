"""``ensemblectl`` command line.

Exit codes: 0 when the checked property holds, 2 when it fails, 1 for bad
input (unreadable files, malformed documents, usage errors).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .analysis import check_condition_A, check_condition_B
from .enumeration import DEFAULT_N_MAX, enumerate_minimal
from .graph import weakly_connected_components
from .reduction import NotStructurallyControllable, canonical_relabel, reduce_to_minimal
from .synthesis import SynthesisError, build_ensemble_pair
from .verification import SingularGramianError, certify, eigen_trajectories, steer_subensemble

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2
SEED_ENV = "ENSEMBLECTL_SEED"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; keep exit 2 for failed properties
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _pattern(path: str):
    try:
        return io.parse_pattern(_read(path))
    except io.PatternFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _json_arg(text: str):
    """Inline JSON, or ``@path`` to read it from a file."""
    if text.startswith("@"):
        text = _read(text[1:])
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad JSON argument: {exc}") from None


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw in (None, ""):
        return None
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _emit(obj) -> None:
    sys.stdout.write(io.dumps(obj))


# -- subcommands --------------------------------------------------------------


def cmd_check(args) -> int:
    G = _pattern(args.file)
    report = check_condition_A(G)
    _emit(report.to_dict())
    holds = report.condition_A_finite if args.finite else report.condition_A
    return EXIT_OK if holds else EXIT_FAIL


def cmd_reduce(args) -> int:
    G = _pattern(args.file)
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        parts = reduce_to_minimal(G, seed=seed)
    except NotStructurallyControllable as exc:
        print(f"reduce: {exc}", file=sys.stderr)
        return EXIT_FAIL
    components = []
    for K in parts:
        base = K.base
        original = sorted((base.source_of(u), base.source_of(v)) for u, v in base.edges)
        components.append({
            "n": base.n,
            "m": base.m,
            "edges": [list(e) for e in base.named_edges()],
            "original_nodes": [G.node_name(base.source_of(v)) for v in range(base.num_nodes)],
            "original_edges": [[G.node_name(u), G.node_name(v)] for u, v in original],
            "cycle_sizes": list(K.cycle_sizes),
            "condition_B": check_condition_B(base),
        })
    kept = {tuple(e) for c in components for e in c["original_edges"]}
    removed = [list(e) for e in G.named_edges() if e not in kept]
    _emit({"seed": seed, "components": components, "removed_edges": removed})
    return EXIT_OK


def cmd_enumerate(args) -> int:
    try:
        catalog = enumerate_minimal(args.n, n_max=args.n_max)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit([entry.to_dict() for entry in catalog])
    return EXIT_OK


def cmd_synthesize(args) -> int:
    G = _pattern(args.file)
    seed = args.seed if args.seed is not None else _default_seed()
    if G.m != 1 or len(weakly_connected_components(G)) != 1 or not check_condition_B(G):
        print("synthesize: input must be a single minimal pattern "
              "(one control-node, condition-B); run `reduce` first", file=sys.stderr)
        return EXIT_FAIL
    K = canonical_relabel(G)
    try:
        pair = build_ensemble_pair(K, seed=seed)
    except SynthesisError as exc:
        print(f"synthesize: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(io.serialize_pair(pair, K.base))
    return EXIT_OK


def _pair(path: str):
    try:
        return io.parse_pair(_read(path))
    except io.PatternFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_certify(args) -> int:
    pair = _pair(args.pair_file)
    if args.grid < 2:
        raise InputError("--grid must be at least 2")
    report = certify(pair, grid_size=args.grid)
    if args.eigen_csv:
        with open(args.eigen_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(io.eigen_csv(eigen_trajectories(pair, args.grid)))
    _emit(report.to_dict())
    return EXIT_OK if report.verdict else EXIT_FAIL


def _profile(value, M: int, n: int, label: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.size != M * n:
        raise InputError(f"--{label} needs {M} x {n} numbers, got {arr.size}")
    return arr.reshape(M, n)


def cmd_steer(args) -> int:
    pair = _pair(args.pair_file)
    try:
        sigmas = np.asarray(_json_arg(args.sigmas), dtype=float).reshape(-1)
        x0 = _profile(_json_arg(args.x0), sigmas.size, pair.n, "x0")
        xhat = _profile(_json_arg(args.xhat), sigmas.size, pair.n, "xhat")
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad steering input: {exc}") from None
    try:
        result = steer_subensemble(pair, sigmas, x0, xhat, T=args.T, steps=args.steps)
    except SingularGramianError as exc:
        print(f"steer: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise InputError(str(exc)) from None
    bound = args.tol * max(1.0, float(np.max(np.linalg.norm(xhat, axis=1))))
    out = result.to_dict()
    out["tolerance"] = bound
    out["reached"] = result.terminal_error < bound
    _emit(out)
    return EXIT_OK if out["reached"] else EXIT_FAIL


def cmd_export_dot(args) -> int:
    G = _pattern(args.file)
    sys.stdout.write(io.export_dot(G))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ensemblectl", description="Structural controllability of sparse linear ensembles.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", help="condition-A report for a pattern")
    s.add_argument("file")
    s.add_argument("--finite", action="store_true", help="decide on condition-A' (Hall) instead")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("reduce", help="trim a pattern into minimal patterns")
    s.add_argument("file")
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("enumerate", help="list minimal patterns with n state-nodes")
    s.add_argument("n", type=int)
    s.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("synthesize", help="build an ensemble pair for a minimal pattern")
    s.add_argument("file")
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("certify", help="check a pair document on a sigma grid")
    s.add_argument("pair_file")
    s.add_argument("--grid", type=int, default=101)
    s.add_argument("--eigen-csv", default=None, metavar="PATH")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("steer", help="minimum-energy steering of a finite subensemble")
    s.add_argument("pair_file")
    s.add_argument("--sigmas", required=True, help="JSON list, or @file")
    s.add_argument("--x0", required=True, help="JSON list of M profiles, or @file")
    s.add_argument("--xhat", required=True, help="JSON list of M profiles, or @file")
    s.add_argument("--T", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--tol", type=float, default=1e-6)
    s.set_defaults(func=cmd_steer)

    s = sub.add_parser("export-dot", help="Graphviz text for a pattern")
    s.add_argument("file")
    s.set_defaults(func=cmd_export_dot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"ensemblectl: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
