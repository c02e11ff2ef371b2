"""Command-line front end.

Subcommands: pdf, cdf, quantile, moments, mode, classify, sample, fit,
plot-data, verify.  Parameters are given as ``--params a+,l+,a-,l-``
(that order; transposing shape and rate is the likeliest mistake) or via
``--params-file`` pointing at JSON; explicit flags override file values.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure,
5 verification failure.  Errors go to stderr with a machine-parsable
``code:N`` prefix.  Numeric output carries 17 significant digits so runs
are byte-reproducible.
"""

import argparse
import dataclasses
import enum
import json
import sys

import numpy as np

from .analysis import mode as mode_op
from .analysis import shape_report
from .density import pdf
from .distribution import cdf, moments, quantile
from .errors import BilgammaError, DataError, DomainError, PoleError
from .oracle import run_verification_suite
from .params import BgParams
from .simfit import RngState, fit_mle, sample

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
EXIT_VERIFY = 5

# illustrative default panel for plot-data: one representative set per
# density shape class at lambda+ = lambda- = 1
DEFAULT_PANEL = [
    ("pole", (0.4, 1.0, 0.4, 1.0)),
    ("steep_cusp", (0.7, 1.0, 0.8, 1.0)),
    ("offset_infinite_slope", (1.5, 1.0, 0.4, 1.0)),
    ("exponential_peak", (1.0, 1.0, 1.0, 1.0)),
    ("smooth", (3.0, 1.0, 2.5, 1.0)),
]


def _fmt(v):
    return format(float(v), ".17g")


class _UsageError(Exception):
    """Bad flags or flag values (exit 2); file-content problems are DataError."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"code:{EXIT_USAGE} usage error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_params(spec_str):
    parts = [s for s in spec_str.replace(";", ",").split(",") if s.strip()]
    if len(parts) != 4:
        raise _UsageError(f"--params needs 4 comma-separated values "
                          f"(alpha+,lambda+,alpha-,lambda-), got {spec_str!r}")
    try:
        vals = [float(s) for s in parts]
    except ValueError as exc:
        raise _UsageError(f"non-numeric parameter in {spec_str!r}") from exc
    return BgParams(*vals)


def _resolve_params(args):
    file_vals = None
    if getattr(args, "params_file", None):
        try:
            with open(args.params_file) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read params file: {exc}") from exc
        try:
            file_vals = BgParams(doc["alpha_plus"], doc["lambda_plus"],
                                 doc["alpha_minus"], doc["lambda_minus"])
        except (KeyError, TypeError) as exc:
            raise DataError(f"params file missing keys: {exc}") from exc
    if getattr(args, "params", None):
        return _parse_params(args.params)  # flags override the file
    if file_vals is not None:
        return file_vals
    raise _UsageError("no parameters given (use --params or --params-file)")


def _read_values(args, flag):
    vals = getattr(args, flag, None)
    if vals:
        return [float(v) for v in vals]
    out = []
    for lineno, line in enumerate(sys.stdin, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(float(line.split(",")[0]))
        except ValueError as exc:
            raise DataError(f"stdin line {lineno} is not numeric: {line!r}") from exc
    if not out:
        raise DataError(f"no {flag} values given (flag or stdin column)")
    return out


def _config_echo(args, params=None):
    fields = {}
    if params is not None:
        fields["params"] = ",".join(_fmt(v) for v in params.astuple())
    for key in ("seed", "n", "grid", "input", "output"):
        v = getattr(args, key, None)
        if v is not None:
            fields[key] = str(v)
    return " ".join(f"{k}={v}" for k, v in sorted(fields.items()))


def _out_stream(args):
    if getattr(args, "output", None):
        return open(args.output, "w")
    return sys.stdout


def _json_default(obj):
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj):
        return dataclasses.asdict(obj)
    if isinstance(obj, BgParams):
        return obj.astuple()
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _emit_json(args, doc):
    stream = _out_stream(args)
    json.dump(doc, stream, indent=2, sort_keys=True, default=_json_default)
    stream.write("\n")
    if stream is not sys.stdout:
        stream.close()


def _cmd_eval(args, fn, flag):
    params = _resolve_params(args)
    xs = _read_values(args, flag)
    rows = [(x, fn(params, x)) for x in xs]  # evaluate before emitting anything
    stream = _out_stream(args)
    stream.write(f"# bilgamma {args.command} {_config_echo(args, params)}\n")
    for x, v in rows:
        stream.write(f"{_fmt(x)},{_fmt(v)}\n")
    if stream is not sys.stdout:
        stream.close()
    return EXIT_OK


def _cmd_moments(args):
    params = _resolve_params(args)
    m = moments(params)
    _emit_json(args, {"config": _config_echo(args, params),
                      "moments": dataclasses.asdict(m)})
    return EXIT_OK


def _cmd_mode(args):
    params = _resolve_params(args)
    r = mode_op(params)
    _emit_json(args, {"config": _config_echo(args, params),
                      "mode": r.x0, "bracket": list(r.bracket)})
    return EXIT_OK


def _cmd_classify(args):
    params = _resolve_params(args)
    rep = shape_report(params)
    doc = dataclasses.asdict(rep)
    doc["taxonomy"] = rep.taxonomy.value
    doc["near_zero_pos"]["tag"] = rep.near_zero_pos.tag.value
    doc["near_zero_neg"]["tag"] = rep.near_zero_neg.tag.value
    _emit_json(args, {"config": _config_echo(args, params), "report": doc})
    return EXIT_OK


def _cmd_sample(args):
    params = _resolve_params(args)
    if args.n < 1:
        raise _UsageError(f"--n must be >= 1, got {args.n}")
    draws = sample(params, args.n, RngState(args.seed))
    stream = _out_stream(args)
    stream.write(f"# bilgamma sample {_config_echo(args, params)}\n")
    for v in draws:
        stream.write(_fmt(v) + "\n")
    if stream is not sys.stdout:
        stream.close()
    return EXIT_OK


def _read_fit_column(path):
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        try:
            with open(path) as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise DataError(f"cannot read input: {exc}") from exc
    values = []
    bad = []
    for lineno, line in enumerate(lines, start=1):
        cell = line.split(",")[0].strip()
        if not cell:
            continue
        try:
            values.append(float(cell))
        except ValueError:
            if lineno == 1:
                continue  # optional header row
            bad.append(lineno)
    if bad:
        raise DataError(f"non-numeric rows at lines {bad}")
    if not values:
        raise DataError("input contains no numeric data")
    return np.array(values)


def _cmd_fit(args):
    data = _read_fit_column(args.input)
    init = _parse_params(args.init) if args.init else None
    res = fit_mle(data, init=init, rng=RngState(args.seed))
    doc = {
        "config": _config_echo(args) + f" n_data={data.size}",
        "params": dict(zip(("alpha_plus", "lambda_plus",
                            "alpha_minus", "lambda_minus"),
                           res.params.astuple())),
        "log_likelihood": res.log_likelihood,
        "iterations": res.iterations,
        "converged": res.converged,
        "init_params": dict(zip(("alpha_plus", "lambda_plus",
                                 "alpha_minus", "lambda_minus"),
                                res.init_params.astuple())),
    }
    _emit_json(args, doc)
    return EXIT_OK


def _cmd_plot_data(args):
    if args.params:
        sets = [(f"set{i+1}", _parse_params(s).astuple())
                for i, s in enumerate(args.params)]
    else:
        sets = DEFAULT_PANEL
    try:
        lo_s, hi_s, n_s = args.grid.split(",")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError as exc:
        raise _UsageError(f"--grid must be min,max,count, got {args.grid!r}") from exc
    if not (hi > lo and n >= 2):
        raise _UsageError("--grid needs max > min and count >= 2")
    xs = np.linspace(lo, hi, n)
    stream = _out_stream(args)
    stream.write(f"# bilgamma plot-data {_config_echo(args)} sets="
                 + ";".join(f"{name}:{','.join(_fmt(v) for v in ps)}"
                            for name, ps in sets) + "\n")
    stream.write("x," + ",".join(name for name, _ in sets) + "\n")
    plist = [BgParams(*ps) for _, ps in sets]
    for x in xs:
        row = [_fmt(x)]
        for p in plist:
            try:
                row.append(_fmt(pdf(p, float(x))))
            except PoleError:
                row.append("inf")
        stream.write(",".join(row) + "\n")
    if stream is not sys.stdout:
        stream.close()
    return EXIT_OK


def _cmd_verify(args):
    reports = run_verification_suite(rel_threshold=args.rel_threshold,
                                     abs_threshold=args.abs_threshold,
                                     mc_n=args.mc_n, seed=args.seed)
    _emit_json(args, [dataclasses.asdict(r) for r in reports])
    if all(r.passed for r in reports):
        return EXIT_OK
    print(f"code:{EXIT_VERIFY} verification failure: "
          + ", ".join(r.target for r in reports if not r.passed),
          file=sys.stderr)
    return EXIT_VERIFY


def build_parser():
    ap = _Parser(prog="bilgamma",
                 description="Bilateral Gamma distribution toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_params(p):
        p.add_argument("--params", help="alpha+,lambda+,alpha-,lambda- "
                                        "(this order)")
        p.add_argument("--params-file", help="JSON file with the four "
                                             "parameter fields")
        p.add_argument("--output", help="write to file instead of stdout")

    for name, flag, helptext in (("pdf", "x", "density"),
                                 ("cdf", "x", "distribution function"),
                                 ("quantile", "u", "inverse CDF")):
        p = sub.add_parser(name, help=f"evaluate the {helptext}")
        add_params(p)
        p.add_argument(f"--{flag}", action="append",
                       help="evaluation point (repeatable; else stdin column)")

    for name in ("moments", "mode", "classify"):
        p = sub.add_parser(name, help=f"report {name} as JSON")
        add_params(p)

    p = sub.add_parser("sample", help="draw variates, one per line")
    add_params(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fit", help="maximum-likelihood fit of a data column")
    p.add_argument("--input", required=True,
                   help="CSV with one numeric column ('-' for stdin; "
                        "header row optional)")
    p.add_argument("--init", help="starting parameters a+,l+,a-,l-")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")

    p = sub.add_parser("plot-data",
                       help="density curves as CSV (default: one illustrative "
                            "set per shape class at lambda+=lambda-=1)")
    p.add_argument("--params", action="append",
                   help="parameter set (repeatable)")
    p.add_argument("--grid", default="-4,4,800", help="min,max,count")
    p.add_argument("--output")

    p = sub.add_parser("verify", help="run the oracle cross-checks")
    p.add_argument("--rel-threshold", type=float, default=1e-7)
    p.add_argument("--abs-threshold", type=float, default=1e-5)
    p.add_argument("--mc-n", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=20250801)
    p.add_argument("--output")
    return ap


_DISPATCH = {
    "pdf": lambda a: _cmd_eval(a, lambda p, x: pdf(p, x), "x"),
    "cdf": lambda a: _cmd_eval(a, lambda p, x: cdf(p, x), "x"),
    "quantile": lambda a: _cmd_eval(a, lambda p, u: quantile(p, u), "u"),
    "moments": _cmd_moments,
    "mode": _cmd_mode,
    "classify": _cmd_classify,
    "sample": _cmd_sample,
    "fit": _cmd_fit,
    "plot-data": _cmd_plot_data,
    "verify": _cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except _UsageError as exc:
        print(f"code:{EXIT_USAGE} usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"code:{EXIT_DATA} data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DomainError, BilgammaError) as exc:
        print(f"code:{EXIT_NUMERIC} numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
