"""``curvlab`` command line: compute, verify, catalog.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .catalog import CATALOG, catalog_ids, get_entry
from .curvature import compute_pack, kretschmann
from .errors import CurvlabError, InputError
from .specfile import load_spec
from .suites import SUITES, run_suite, summary_table
from .theorems import coincidence_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 42

INDEX_ORDER = {
    "g": "ij",
    "christoffel": "^k ij",
    "riemann": "ij ^k l",
    "ricci": "jl",
    "scalar": "",
    "phi": "ij",
    "varphi": "ij",
    "rho": "ij",
    "P": "ij",
    "W": "ij ^k l",
    "C": "ij ^k l",
    "y": "ijl",
    "Y": "ijl",
    "div_W": "ijl",
    "div_C": "ijl",
    "grad_scalar": "i",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_params(items):
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise InputError(f"--params expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise InputError(f"--params {name}: {value!r} is not a number") from None
    return out


def _parse_point(text, n):
    try:
        point = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"--point must be comma-separated numbers, got {text!r}") from None
    if len(point) != n:
        raise InputError(f"--point has {len(point)} values, the chart has dimension {n}")
    if not all(np.isfinite(point)):
        raise InputError("--point values must be finite")
    return np.array(point)


def _resolve_specs(catalog_id, spec_path, allow_all):
    if spec_path is not None:
        return [load_spec(spec_path)]
    if catalog_id is None:
        raise InputError("give --catalog ID or --spec FILE")
    if catalog_id == "all":
        if not allow_all:
            raise InputError("--catalog all is only valid for verify")
        return [CATALOG[k] for k in catalog_ids()]
    return [get_entry(catalog_id)]


def _seed(arg):
    if arg is not None:
        return arg
    env = os.environ.get("CURVLAB_SEED")
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise InputError(f"CURVLAB_SEED must be an integer, got {env!r}") from None


def _write_json(doc, path):
    text = json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _tolist(t):
    return None if t is None else np.asarray(t.values).tolist()


def compute_document(spec, point):
    pack = compute_pack(spec.source(), point)
    conn = pack.connection
    co = coincidence_check(pack)
    g = conn.metric.g.value
    tensors = {
        "g": np.asarray(g).tolist(),
        "christoffel": np.asarray(conn.gamma.value).tolist(),
        "riemann": _tolist(pack.riemann),
        "ricci": _tolist(pack.ricci),
        "scalar": float(pack.scalar.value),
        "phi": _tolist(pack.phi),
        "varphi": _tolist(pack.varphi),
        "rho": _tolist(pack.rho),
        "P": _tolist(pack.p),
        "W": _tolist(pack.w),
        "C": _tolist(pack.c),
        "y": _tolist(pack.y),
        "Y": _tolist(pack.yy),
        "div_W": _tolist(pack.div_w),
        "div_C": _tolist(pack.div_c),
        "grad_scalar": pack.grad_scalar.tolist(),
    }
    diagnostics = {
        "det_g": float(conn.metric.det.value),
        "ricci_max_abs": float(np.max(np.abs(pack.ricci.values))),
        "ricci_skew_max_abs": float(np.max(np.abs(pack.varphi.values))),
        "w_first_third_trace": float(np.max(np.abs(np.einsum("kjkl->jl", pack.w.values)))),
        "c_first_third_trace": float(np.max(np.abs(np.einsum("kjkl->jl", pack.c.values)))),
        "kretschmann": kretschmann(pack),
        "scale": pack.scale(),
    }
    return {
        "tool": "curvlab",
        "version": __version__,
        "metric_id": spec.id or "custom",
        "dimension": spec.n,
        "coordinates": list(spec.coordinates),
        "params": dict(spec.params),
        "point": [float(v) for v in point],
        "connection": "weyl" if pack.kind == "weyl" else "levi-civita",
        "index_order": INDEX_ORDER,
        "tensors": tensors,
        "diagnostics": diagnostics,
        "coincidence": {
            "residual": co.residual,
            "scale": co.scale,
            "phi_max_abs": float(np.max(np.abs(pack.phi.values))),
            "varphi_max_abs": float(np.max(np.abs(pack.varphi.values))),
            "scalar": float(pack.scalar.value),
            "coincide": bool(co.coincide),
        },
    }


def cmd_compute(args):
    (spec,) = _resolve_specs(args.catalog, args.spec, allow_all=False)
    params = _parse_params(args.params)
    if params:
        spec = spec.with_params(**params)
    point = _parse_point(args.point, spec.n)
    _write_json(compute_document(spec, point), args.json)
    return EXIT_OK


def cmd_verify(args):
    catalog_id = args.catalog if (args.catalog or args.spec) else "all"
    specs = _resolve_specs(catalog_id, args.spec, allow_all=True)
    result = run_suite(args.suite, specs, _seed(args.seed), args.samples, args.tol)
    print(summary_table(result))
    if args.json:
        _write_json(result.to_dict(), args.json)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_catalog(args):
    if args.action == "list":
        width = max(len(k) for k in CATALOG)
        for key in catalog_ids():
            entry = CATALOG[key]
            print(f"{key.ljust(width)}  n={entry.n}  {entry.classification:<14}  {entry.label}")
        return EXIT_OK
    if args.id is None:
        raise InputError("catalog show needs an entry id")
    _write_json(get_entry(args.id).to_dict(), None)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="curvlab", description="Curvature of metrics and Weyl structures; "
                                                 "numerical checks of projective/conformal Weyl coincidence.")
    parser.add_argument("--version", action="version", version=f"curvlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="all curvature tensors at one point, as JSON")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog", metavar="ID")
    src.add_argument("--spec", metavar="FILE")
    p.add_argument("--params", nargs="*", metavar="K=V", help="override spec parameters")
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    p.add_argument("--json", metavar="PATH", help="output file (default stdout)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--catalog", metavar="ID|all", help="catalog entry or 'all' (default)")
    src.add_argument("--spec", metavar="FILE")
    p.add_argument("--samples", type=int, default=10, help="points per entry (default 10)")
    p.add_argument("--seed", type=int, default=None, help="default: $CURVLAB_SEED, else 42")
    p.add_argument("--tol", type=float, default=None, help="override every upper-bound tolerance")
    p.add_argument("--json", metavar="PATH", help="write the full report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="list or show built-in metrics")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("id", nargs="?")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CurvlabError as exc:
        print(f"curvlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
