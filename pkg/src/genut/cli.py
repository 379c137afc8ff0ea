"""Command-line entry point.

Subcommands ``sigma-points``, ``propagate``, ``mc-truth`` and ``reproduce``.
The exit status is 0 exactly when every pass flag in the produced output is
true; argument or domain errors exit with 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import bench
from .errors import GenUTError
from .montecarlo import DEFAULT_TRUTH_N, mc_truth
from .moments import MomentSpec, independent_joint, parse_distributions
from .propagation import make_transform, propagate
from .sigma import DEFAULT_THETA, BoxConstraint, constrain, generate
from .ut import ut_sigma_points

log = logging.getLogger("genut")

SCHEMES = ("genut", "genut-constrained", "ut")


def _load_json(text: str) -> Any:
    """Parse ``text`` as JSON, or as the path of a JSON file."""
    p = Path(text)
    if not text.lstrip().startswith(("{", "[")) and p.is_file():
        text = p.read_text()
    return json.loads(text)


def _fn_params(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"--fn-params expects key=value, got {item!r}")
        out[key] = float(val)
    return out


def _floats(text: Optional[str], n: int, fill: float) -> np.ndarray:
    if text is None:
        return np.full(n, fill)
    vals = [float(v) for v in text.split(",")]
    return np.full(n, vals[0]) if len(vals) == 1 else np.array(vals)


def _moment_spec(data: Any) -> MomentSpec:
    if isinstance(data, dict) and "mean" in data:
        return MomentSpec.from_dict(data)
    return independent_joint(parse_distributions(data))


def _sigma_set(args, spec: MomentSpec):
    if args.scheme == "ut":
        return ut_sigma_points(spec.mean, spec.covariance, kappa=args.kappa, sqrt_method=args.sqrt)
    u: Any = args.u
    if u not in ("match-kurtosis", "default"):
        u = _floats(u, spec.n, 1.0)
    s = generate(spec, u, sqrt_method=args.sqrt)
    if args.scheme == "genut-constrained":
        box = BoxConstraint(
            _floats(args.lower, spec.n, -np.inf), _floats(args.upper, spec.n, np.inf), args.theta
        )
        s = constrain(spec, s, box)
    return s


def _emit(args, name: str, payload: dict) -> None:
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(text)


def cmd_sigma_points(args) -> int:
    spec = _moment_spec(_load_json(args.dist))
    _emit(args, "sigma-points", _sigma_set(args, spec).to_dict())
    return 0


def cmd_propagate(args) -> int:
    spec = _moment_spec(_load_json(args.dist))
    f = make_transform(args.fn, _fn_params(args.fn_params))
    res = propagate(_sigma_set(args, spec), f)
    _emit(args, "propagate", res.to_dict())
    return 0


def cmd_mc_truth(args) -> int:
    ds = parse_distributions(_load_json(args.dist))
    f = make_transform(args.fn, _fn_params(args.fn_params))
    res = mc_truth(ds, f, N=args.n, seed=args.seed, workers=args.workers)
    _emit(args, "mc-truth", res.to_dict())
    return 0


def cmd_reproduce(args) -> int:
    tables = bench.SELECTORS if args.table == "all" else (args.table,)
    ok = True
    for t in tables:
        rep = bench.reproduce(t, seed=args.seed, out=args.out, fmt=args.format)
        ok &= rep.passed
        print(f"{t}: {'PASS' if rep.passed else 'FAIL'} ({rep.runtime_s:.2f} s)")
        for r in rep.failures():
            print(f"  {r.distribution} {r.scheme} {r.quantity}: error {r.error_pct} tolerance {r.tolerance}")
    return 0 if ok else 1


def _add_scheme_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dist", required=True, help="JSON distribution, list of distributions, MomentSpec, or a file")
    p.add_argument("--scheme", choices=SCHEMES, default="genut")
    p.add_argument("--u", default="match-kurtosis", help="'match-kurtosis', 'default' or comma-separated values")
    p.add_argument("--kappa", type=float, default=None, help="UT spread; defaults to 3 - n")
    p.add_argument("--lower", help="lower bound(s), comma-separated")
    p.add_argument("--upper", help="upper bound(s), comma-separated")
    p.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p.add_argument("--sqrt", choices=("cholesky", "symmetric"), default="cholesky")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", default=None, help="output directory (GENUT_OUT overrides)")
    common.add_argument("--format", choices=("csv", "json", "both"), default="both")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="genut", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sigma-points", parents=[common], help="print a sigma-point set as JSON")
    _add_scheme_args(p)
    p.set_defaults(func=cmd_sigma_points)

    p = sub.add_parser("propagate", parents=[common], help="propagate sigma points through a named transform")
    _add_scheme_args(p)
    p.add_argument("--fn", required=True)
    p.add_argument("--fn-params", nargs="*", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("mc-truth", parents=[common], help="Monte Carlo moments of a transformed vector")
    p.add_argument("--dist", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--fn-params", nargs="*", default=[], metavar="KEY=VALUE")
    p.add_argument("--n", type=int, default=DEFAULT_TRUTH_N)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mc_truth)

    p = sub.add_parser("reproduce", parents=[common], help="reproduce a published example, table or case")
    p.add_argument("table", choices=(*bench.SELECTORS, "all"))
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if os.environ.get("GENUT_OUT"):
        args.out = os.environ["GENUT_OUT"]
    try:
        return args.func(args)
    except (GenUTError, ValueError, argparse.ArgumentTypeError, json.JSONDecodeError) as exc:
        print(f"genut: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
