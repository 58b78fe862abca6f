"""Command-line front end: ``qcurv spectra | det | verify | sweep``.

Exit codes: 0 success / all checks passed, 1 a check or computation
failed, 2 bad usage (unknown option, malformed operator or config).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from decimal import Decimal

from .cache import PartialSumCache
from .config import load_config
from .errors import InvalidSpec, QcurvError
from .functionals import (
    F0,
    FunctionalReport,
    beckner_ratio,
    classify_leading_form,
    det_quotient,
    reports_to_csv,
    reports_to_json,
    volume_normalized,
)
from .harmonic import AxisymField
from .spectra import Kind, OperatorSpec, SpectralSequence
from .suites import SUITES, mellin_zeta0, run_suite
from .zeta import heat_trace

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_operator(text):
    """``kind:key=value,...``, e.g. ``gjms:n=4,m=4`` or ``laplacian:n=2``."""
    kind_s, _, rest = text.partition(":")
    try:
        kind = Kind(kind_s.strip())
    except ValueError:
        raise InvalidSpec(f"unknown operator kind {kind_s!r}") from None
    kw = {}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = part.partition("=")
        if not eq or key not in ("n", "m", "nu", "a"):
            raise InvalidSpec(f"bad operator parameter {part!r}")
        kw[key] = int(val) if key in ("n", "m") else float(val)
    if "n" not in kw:
        raise InvalidSpec("operator needs n=<dimension>")
    return OperatorSpec(kind, **kw)


# ------------------------------------------------------------------ output


def _table_csv(header, rows):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _table_json(header, rows):
    return json.dumps([dict(zip(header, r)) for r in rows], indent=2, sort_keys=True) + "\n"


def render_table(header, rows, fmt):
    return _table_json(header, rows) if fmt == "json" else _table_csv(header, rows)


# ------------------------------------------------------------------ commands


def cmd_spectra(spec, j_max):
    """(j, lambda_j, m_j) rows for j = 0..j_max."""
    seq = SpectralSequence(spec, j_max)
    return [(j, float(lam), int(m)) for j, (lam, m) in enumerate(seq.entries)]


def cmd_det(spec, cfg=None, cache=None):
    """Heat fit, Mellin split and signed determinant as a report list."""
    j_max = cfg.j_max if cfg is not None and cfg.j_max is not None else 64
    seq, coeffs, res = mellin_zeta0(spec, j_max, cache=cache)
    inputs = {"operator": spec.label, "j_max": j_max, "method": res.method.value}
    prov = res.method.value
    return [
        FunctionalReport("zeta(0)", res.zeta0, res.err_estimate, inputs, prov),
        FunctionalReport("zeta'(0)", res.zeta_prime0, res.err_estimate, inputs, prov),
        FunctionalReport("det", res.det, res.det * res.err_estimate, dict(inputs, neg_count=res.neg_count), prov),
    ]


def cmd_verify(suite_name, cfg=None):
    checks = run_suite(suite_name, cfg)
    code = EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL
    return code, checks


def parse_range(text):
    """``start:stop:step`` -> values, with decimal arithmetic so the grid is exact."""
    try:
        start, stop, step = (Decimal(p) for p in text.split(":"))
    except Exception:
        raise UsageError(f"range must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError("range needs step > 0 and stop >= start")
    count = int((stop - start) / step) + 1
    return [float(start + i * step) for i in range(count)]


def _sweep_point(job):
    param, value, target, n, N = job
    if param == "alpha":
        from .conformal import boost_log_factor

        w = boost_log_factor(value, n, N)
        if target == "F0":
            return value, F0(w)
        if n == 2:
            w = volume_normalized(w)
        return value, det_quotient(target, n, w)
    if param == "a":
        return value, classify_leading_form(value).value
    if param == "nu":
        one = AxisymField.constant(n, 1.0, N)
        return value, beckner_ratio(one, one, value, n)
    if param == "t":
        spec = parse_operator(target)
        return value, heat_trace(SpectralSequence(spec, 64), value)
    raise UsageError(f"unknown sweep parameter {param!r}")


SWEEP_DEFAULT_TARGET = {"alpha": "F0", "a": "leading_form", "nu": "beckner", "t": "laplacian:n=2"}


def cmd_sweep(param, values, target=None, n=2, cfg=None, jobs=1):
    """Evaluate ``target`` at each parameter value; rows sorted by parameter."""
    if param not in SWEEP_DEFAULT_TARGET:
        raise UsageError(f"sweep parameter must be one of {sorted(SWEEP_DEFAULT_TARGET)}")
    target = target or SWEEP_DEFAULT_TARGET[param]
    N = cfg.N if cfg is not None else 256
    work = [(param, v, target, n, N) for v in values]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_point, work))
    else:
        rows = [_sweep_point(job) for job in work]
    rows.sort(key=lambda r: r[0])
    return [(param, target, float(v), out if isinstance(out, str) else float(out)) for v, out in rows]


# ------------------------------------------------------------------ argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, default=1)

    p = _Parser(prog="qcurv", description="Spectral invariants and conformal functionals on round spheres.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectra", parents=[common], help="list eigenvalues and multiplicities")
    sp.add_argument("operator", help="e.g. laplacian:n=2 or gjms:n=4,m=4")
    sp.add_argument("--j-max", type=int, default=10)

    dp = sub.add_parser("det", parents=[common], help="zeta(0), zeta'(0) and the determinant")
    dp.add_argument("operator")

    vp = sub.add_parser("verify", parents=[common], help="run a named invariant suite")
    vp.add_argument("suite", choices=list(SUITES) + ["all"])

    wp = sub.add_parser("sweep", parents=[common], help="evaluate a target over a parameter range")
    wp.add_argument("param", choices=sorted(SWEEP_DEFAULT_TARGET))
    wp.add_argument("--range", required=True, dest="range_", metavar="START:STOP:STEP")
    wp.add_argument("--target", help="F0, Y, DiracSq, Paneitz (alpha) or an operator (t)")
    wp.add_argument("--dim", type=int, default=2)
    return p


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        cfg = load_config(args.config, seed=args.seed, format=args.format)
    except UsageError as exc:
        print(f"qcurv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidSpec, OSError) as exc:
        print(f"qcurv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _dispatch(args, cfg)
    except (UsageError, InvalidSpec) as exc:
        print(f"qcurv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QcurvError as exc:
        print(f"qcurv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def _dispatch(args, cfg):
    fmt = cfg.format
    if args.command == "spectra":
        rows = cmd_spectra(parse_operator(args.operator), args.j_max)
        _emit(render_table(["j", "lambda", "multiplicity"], rows, fmt), args.out)
        return EXIT_OK
    if args.command == "det":
        root = cfg.cache_path()
        cache = PartialSumCache(root) if root is not None else None
        reports = cmd_det(parse_operator(args.operator), cfg, cache)
        if cache is not None:
            cache.flush()
        _emit(reports_to_json(reports) if fmt == "json" else reports_to_csv(reports), args.out)
        return EXIT_OK
    if args.command == "verify":
        code, checks = cmd_verify(args.suite, replace(cfg))
        rows = [(c.name, "pass" if c.passed else "fail", c.value, c.bound, c.detail) for c in checks]
        _emit(render_table(["check", "status", "value", "bound", "detail"], rows, fmt), args.out)
        for c in checks:
            print(c.line(), file=sys.stderr)
        return code
    if args.command == "sweep":
        rows = cmd_sweep(args.param, parse_range(args.range_), args.target, args.dim, cfg, args.jobs)
        _emit(render_table(["param", "target", "value", "result"], rows, fmt), args.out)
        return EXIT_OK
    raise UsageError(f"unknown command {args.command!r}")


__all__ = ["cmd_det", "cmd_spectra", "cmd_sweep", "cmd_verify", "main", "parse_operator", "parse_range"]
