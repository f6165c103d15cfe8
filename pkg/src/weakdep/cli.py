"""Command-line front end.

Subcommands: coeffs (coefficient and tail-sum table), decompose (block
sums of a sample path), bound (tail bound over an x grid), verify
(Monte Carlo checks).  Exit codes: 0 all verdicts pass, 1 any check
failed, 2 usage or configuration error.  Reports are written atomically
(temp file + rename) and numbers are rendered with 17 significant digits
so a parse-back reproduces them exactly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from typing import Optional, Sequence

from . import __version__
from .blocks import block_scheme, decompose
from .bounds import BoundParams, tail_bound
from .coefficients import cox_grimmett, gamma_sequence, long_run_variance
from .models import IID, ModelSpec, UniformOnInterval, almost_sure_bound, model_from_json, sample_path
from .verify import (
    DOMINATED,
    VIOLATED,
    MCConfig,
    PiecewiseLinear,
    check_lipschitz_cov,
    check_newman,
    check_quasi_association_counterexample,
    check_tail_domination,
    clt_ks_distance,
    empirical_process_path,
    estimate_gamma_operator,
    fclt_increment_check,
    marginal_transform,
    slln_rate_fit,
)
from .verify import _path_matrix

CHECKS = ("cov", "tail", "newman", "quasi", "slln", "clt", "fclt", "emp")

REPORT_COLUMNS = ("check", "param", "estimate", "se", "bound", "valid", "verdict", "seed", "replicates")


class ConfigError(Exception):
    """Invalid configuration detected before any computation starts."""


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".weakdep-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(records: Sequence[dict], fmt: str, path: Optional[str]) -> None:
    """Write verification records as CSV or JSON.

    CSV columns are exactly check,param,estimate,se,bound,valid,verdict,
    seed,replicates; JSON is the same records as an array.  path None
    writes to stdout.
    """
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for rec in records:
            writer.writerow([_fmt(rec[col]) for col in REPORT_COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([{col: rec[col] for col in REPORT_COLUMNS} for rec in records], indent=2) + "\n"
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    if path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def parse_grid(spec: str) -> list[float]:
    """Parse start:stop:step, endpoints inclusive within 1e-12."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"grid has non-numeric parts: {spec!r}") from None
    if step <= 0 or stop < start:
        raise ConfigError(f"grid needs step > 0 and stop >= start, got {spec!r}")
    out = []
    k = 0
    while True:
        x = start + k * step
        if x > stop + 1e-12:
            break
        out.append(min(x, stop))
        k += 1
    return out


def _load_model(path: str) -> ModelSpec:
    try:
        with open(path) as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read model file: {exc}") from exc
    try:
        return model_from_json(text)
    except ValueError as exc:
        raise ConfigError(f"bad model file {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakdep", description=__doc__)
    parser.add_argument("--version", action="version", version=f"weakdep {__version__}")
    parser.add_argument("--list-checks", action="store_true", help="list verify checks and exit")
    sub = parser.add_subparsers(dest="command")

    p_coeffs = sub.add_parser("coeffs", help="dependence coefficient and tail-sum table")
    p_coeffs.add_argument("--model", required=True)
    p_coeffs.add_argument("--n-max", type=int, default=10)
    p_coeffs.add_argument("--out")

    p_dec = sub.add_parser("decompose", help="block decomposition of one sample path")
    p_dec.add_argument("--model", required=True)
    p_dec.add_argument("--n", type=int, required=True)
    p_dec.add_argument("--p", type=int, required=True)
    p_dec.add_argument("--seed", type=int, default=0)
    p_dec.add_argument("--out")

    p_bound = sub.add_parser("bound", help="tail bound over an x grid")
    p_bound.add_argument("--model", required=True)
    p_bound.add_argument("--n", type=int, default=4096)
    p_bound.add_argument("--theta", type=float, default=0.55)
    p_bound.add_argument("--alpha", type=float, default=2.0)
    p_bound.add_argument("--x-grid", default="0:4000:250")
    p_bound.add_argument("--out")

    p_ver = sub.add_parser("verify", help="Monte Carlo verification checks")
    p_ver.add_argument("--check", required=True, choices=CHECKS)
    p_ver.add_argument("--model", help="model JSON file (required by all checks except quasi uses its law)")
    p_ver.add_argument("--replicates", type=int, default=10_000)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--out")
    p_ver.add_argument("--format", choices=("csv", "json"))
    p_ver.add_argument("--n", type=int)
    p_ver.add_argument("--theta", type=float, default=0.55)
    p_ver.add_argument("--alpha", type=float, default=2.0)
    p_ver.add_argument("--x-grid")
    p_ver.add_argument("--t-grid", default="0.25,0.5,1")
    p_ver.add_argument("--times", default="0.25,0.5,1")
    p_ver.add_argument("--alpha2", type=float, default=1.0)
    p_ver.add_argument("--alpha1-grid", default="1:50:1")
    p_ver.add_argument("--cases", type=int, default=10)
    p_ver.add_argument("--s", type=float, default=0.3)
    p_ver.add_argument("--t", type=float, default=0.7)
    p_ver.add_argument("--n-grid", default="256,512,1024,2048,4096,8192,16384")
    return parser


def _csv_text(header: Sequence[str], rows: Sequence[Sequence], footer: Optional[str] = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if footer is not None:
        text += footer + "\n"
    return text


def _write_or_print(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def _cmd_coeffs(args) -> int:
    model = _load_model(args.model)
    if args.n_max < 1:
        raise ConfigError(f"--n-max must be >= 1, got {args.n_max}")
    gamma = gamma_sequence(model)
    rows = [(k, gamma.gamma(k), cox_grimmett(gamma, k)) for k in range(1, args.n_max + 1)]
    _write_or_print(_csv_text(("k", "gamma", "v"), rows), args.out)
    return 0


def _cmd_decompose(args) -> int:
    model = _load_model(args.model)
    scheme = block_scheme(args.n, args.p)
    path = sample_path(model, args.n, args.seed)
    dec = decompose(path, scheme)
    rows = [(j + 1, y) for j, y in enumerate(dec.blocks)]
    footer = (
        f"# z_odd={_fmt(dec.z_odd)} z_even={_fmt(dec.z_even)} remainder={_fmt(dec.remainder)}"
    )
    _write_or_print(_csv_text(("j", "Y"), rows, footer), args.out)
    return 0


def _cmd_bound(args) -> int:
    model = _load_model(args.model)
    if not 0.5 < args.theta < 1.0:
        raise ConfigError(f"theta must lie in (1/2, 1), got {args.theta}")
    if not args.alpha > 1.0:
        raise ConfigError(f"alpha must exceed 1, got {args.alpha}")
    c = almost_sure_bound(model)
    if c is None:
        raise ConfigError("bound evaluation needs a bounded model")
    sigma2 = long_run_variance(model).sigma2
    p_n = max(1, math.floor(args.n ** args.theta))
    d_n = (4.0 * args.alpha * c * c / sigma2) * args.n ** (2.0 * args.theta - 1.0) * math.log(args.n)
    params = BoundParams(c=c, sigma2=sigma2, p_n=p_n, d_n=d_n, n=args.n)
    v_pn = cox_grimmett(gamma_sequence(model), p_n)
    rows = []
    for x in parse_grid(args.x_grid):
        ev = tail_bound(x, params, v_pn)
        rows.append((x, ev.value, ev.valid))
    _write_or_print(_csv_text(("x", "bound", "valid"), rows), args.out)
    return 0


def _random_pl(rng) -> PiecewiseLinear:
    m = int(rng.integers(0, 3))
    bps = tuple(sorted(rng.uniform(-2.0, 2.0, m))) if m else ()
    slopes = tuple(rng.uniform(-2.0, 2.0, m + 1))
    return PiecewiseLinear(breakpoints=bps, slopes=slopes)


def random_cov_cases(model: ModelSpec, n: int, cases: int, seed: int):
    """Randomized (f, g, I, J) cases with disjoint index sets in 1..n."""
    import numpy as np

    rng = np.random.default_rng([seed, 202])
    out = []
    for _ in range(cases):
        f_spec, g_spec = _random_pl(rng), _random_pl(rng)
        size_i = int(rng.integers(1, 4))
        size_j = int(rng.integers(1, 4))
        perm = rng.permutation(n) + 1
        I = sorted(int(v) for v in perm[:size_i])
        J = sorted(int(v) for v in perm[size_i : size_i + size_j])
        out.append((f_spec, g_spec, I, J))
    return out


def _cmd_verify(args) -> int:
    cfg = MCConfig(replicates=args.replicates, seed=args.seed, error_multiplier=3.0)
    records: list[dict] = []
    check = args.check

    def need_model() -> ModelSpec:
        if not args.model:
            raise ConfigError(f"--check {check} requires --model")
        return _load_model(args.model)

    if check == "cov":
        model = need_model()
        n = args.n or 24
        paths = _path_matrix(model, n, cfg)
        for f_spec, g_spec, I, J in random_cov_cases(model, n, args.cases, args.seed):
            rep = check_lipschitz_cov(model, f_spec, g_spec, I, J, n, cfg, paths=paths)
            records.append(rep.to_record())
    elif check == "tail":
        model = need_model()
        n = args.n or 4096
        if not 0.5 < args.theta < 1.0:
            raise ConfigError(f"theta must lie in (1/2, 1), got {args.theta}")
        scheme = block_scheme(n, max(1, math.floor(n ** args.theta)))
        grid = parse_grid(args.x_grid or "0:4000:250")
        for rep in check_tail_domination(model, scheme, grid, cfg, alpha=args.alpha):
            records.append(rep.to_record())
    elif check == "newman":
        model = need_model()
        n = args.n or 8
        t_grid = [float(v) for v in args.t_grid.split(",") if v]
        for rep in check_newman(model, n, t_grid, cfg):
            records.append(rep.to_record())
    elif check == "quasi":
        model = need_model()
        law = model.law
        if not isinstance(law, UniformOnInterval):
            raise ConfigError("quasi check needs a model with a uniform innovation law")
        grid = parse_grid(args.alpha1_grid)
        report = check_quasi_association_counterexample(grid, args.alpha2, law, cfg)
        records.append(report.to_report(cfg).to_record())
    elif check == "slln":
        model = need_model()
        grid = [int(v) for v in args.n_grid.split(",") if v]
        fit = slln_rate_fit(model, grid, cfg)
        records.append(fit.to_report(cfg).to_record())
    elif check == "clt":
        model = need_model()
        n = args.n or 4096
        records.append(clt_ks_distance(model, n, cfg).to_report(cfg).to_record())
    elif check == "fclt":
        model = need_model()
        n = args.n or 4096
        times = [float(v) for v in args.times.split(",") if v]
        for rep in fclt_increment_check(model, times, n, cfg):
            records.append(rep.to_record())
    elif check == "emp":
        model = need_model()
        n = args.n or 4096
        path = empirical_process_path(model, n, [0.0, args.s, args.t, 1.0], cfg.seed)
        for label, value in (("zeta(0)", path.values[0]), ("zeta(1)", path.values[-1])):
            records.append(
                {
                    "check": "emp",
                    "param": label,
                    "estimate": float(value),
                    "se": 0.0,
                    "bound": 0.0,
                    "valid": True,
                    "verdict": DOMINATED if value == 0.0 else VIOLATED,
                    "seed": cfg.seed,
                    "replicates": cfg.replicates,
                }
            )
        est, se = estimate_gamma_operator(model, args.s, args.t, cfg)
        if isinstance(model, IID):
            target = min(args.s, args.t) - args.s * args.t
            ok = abs(est - target) <= cfg.error_multiplier * se
        else:
            target = float("nan")
            ok = True
        records.append(
            {
                "check": "emp",
                "param": f"gamma({args.s:g},{args.t:g})",
                "estimate": est,
                "se": se,
                "bound": target,
                "valid": True,
                "verdict": DOMINATED if ok else VIOLATED,
                "seed": cfg.seed,
                "replicates": cfg.replicates,
            }
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown check {check!r}")

    fmt = args.format
    if fmt is None:
        fmt = "json" if (args.out or "").endswith(".json") else "csv"
    emit_report(records, fmt, args.out)
    return 1 if any(rec["verdict"] == VIOLATED for rec in records) else 0


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 2 for usage errors
        return int(exc.code or 0)
    if args.list_checks:
        for name in CHECKS:
            print(name)
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.command == "coeffs":
            return _cmd_coeffs(args)
        if args.command == "decompose":
            return _cmd_decompose(args)
        if args.command == "bound":
            return _cmd_bound(args)
        if args.command == "verify":
            return _cmd_verify(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
