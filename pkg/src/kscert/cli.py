"""Command-line front end. JSON goes to stdout, progress to stderr.

Exit codes: 0 pass, 1 certification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from .coloring import enumerate_choices, figure_data
from .exact import format_rational, to_rational
from .incidence import build_graph, export_graph
from .inequality import InequalitySpec, bound_certificate, violation_window
from .rays import BASIS_NAMES, Configuration, ConfigurationError, DensityMatrix, build_configuration

FIGURE_CHOICE = {"0": 0, "inf": 0, "1": 0, "2": 1}

log = logging.getLogger("kscert")


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return to_rational(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_config(path: str | None) -> Configuration:
    if path is None:
        return build_configuration()
    try:
        with open(path) as fh:
            return Configuration.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, ConfigurationError, ValueError) as exc:
        raise UsageError(f"cannot load configuration {path}: {exc}") from exc


def _load_weights(path: str | None, n: int) -> tuple[Fraction, ...]:
    if path is None:
        return ()
    try:
        with open(path) as fh:
            raw = json.load(fh)
        if isinstance(raw, dict):
            if set(raw) != {str(i) for i in range(n)}:
                raise ValueError(f"weights must be keyed by ray ids 0..{n - 1}")
            return tuple(to_rational(raw[str(i)]) for i in range(n))
        if isinstance(raw, list) and len(raw) == n:
            return tuple(to_rational(x) for x in raw)
        raise ValueError(f"expected {n} weights")
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot load weights {path}: {exc}") from exc


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_verify_all(args) -> int:
    from .certificate import verify_all

    cert = verify_all(_load_config(args.config))
    _emit(cert)
    failed = [name for name, s in cert["sections"].items() if not s["passed"]]
    if failed:
        print(f"kscert: certification failed in: {', '.join(failed)}", file=sys.stderr)
        return 1
    log.info("all sections pass")
    return 0


def cmd_bound(args) -> int:
    config = _load_config(args.config)
    graph = build_graph(config)
    spec = InequalitySpec(graph, args.k, _load_weights(args.weights, len(config)))
    _emit(bound_certificate(spec, config, workers=args.workers).to_json())
    return 0


def cmd_colorings(args) -> int:
    config = _load_config(args.config)
    _emit(enumerate_choices(build_graph(config), config).to_json())
    return 0


def cmd_graph(args) -> int:
    config = _load_config(args.config)
    sys.stdout.write(export_graph(build_graph(config), args.format))
    if args.format == "json":
        sys.stdout.write("\n")
    return 0


def cmd_sweep(args) -> int:
    if args.k_min > args.k_max:
        raise UsageError("--k-min must not exceed --k-max")
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    config = _load_config(args.config)
    graph = build_graph(config)
    # the state only matters when the weights make Q state dependent
    window = violation_window(
        config, graph, _load_weights(args.weights, len(config)), rho=DensityMatrix.maximally_mixed()
    )
    rows = []
    for s in range(args.steps + 1):
        k = args.k_min + (args.k_max - args.k_min) * Fraction(s, args.steps)
        m, q = window.classical_at(k), window.quantum_at(k)
        rows.append(
            {"k": format_rational(k), "classicalMax": format_rational(m),
             "quantum": format_rational(q), "violation": q > m}
        )
    out = window.to_json()
    out["samples"] = rows
    out["display"] = {
        "samples": [[float(Fraction(r["k"])), float(to_rational(r["classicalMax"])), float(to_rational(r["quantum"]))]
                    for r in rows]
    }
    _emit(out)
    return 0


def _parse_choice(text: str) -> dict[str, int]:
    parts = text.split(",")
    if len(parts) != len(BASIS_NAMES) or any(p not in ("0", "1", "2") for p in parts):
        raise argparse.ArgumentTypeError("choice is four comma-separated indices 0..2 for bases 0,inf,1,2")
    return dict(zip(BASIS_NAMES, map(int, parts)))


def cmd_figures(args) -> int:
    config = _load_config(args.config)
    _emit(figure_data(args.choice, build_graph(config), config))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="ray configuration JSON (default: built-in 21 rays)")
    common.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")

    parser = argparse.ArgumentParser(prog="kscert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-all", parents=[common], help="run every certification")
    p.set_defaults(func=cmd_verify_all)

    p = sub.add_parser("bound", parents=[common], help="classical bound and quantum value for one k")
    p.add_argument("--k", type=_rational, default=Fraction(1, 5), metavar="P/Q")
    p.add_argument("--weights", metavar="FILE", help="JSON with one p/q weight per ray id")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("colorings", parents=[common], help="KS propagation over all basis choices")
    p.set_defaults(func=cmd_colorings)

    p = sub.add_parser("graph", parents=[common], help="export the compatibility graph")
    p.add_argument("--format", choices=("dot", "json"), default="json")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("sweep", parents=[common], help="violation window and sampled M(k)")
    p.add_argument("--k-min", type=_rational, default=Fraction(0), metavar="P/Q")
    p.add_argument("--k-max", type=_rational, default=Fraction(1, 2), metavar="P/Q")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--weights", metavar="FILE")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", parents=[common], help="grid data for the propagation pictures")
    p.add_argument("--choice", type=_parse_choice, default=FIGURE_CHOICE, metavar="C0,CINF,C1,C2")
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"kscert: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
