"""Command-line front end: ``hypmax <command> [flags]``.

Every command resolves a :class:`RunConfig` from an optional key = value
file (``--config``) overlaid with flags, runs, and writes CSV or JSON.
Output files start with ``#`` header lines recording the version, command
and resolved configuration; JSON documents carry a ``schema`` field.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from ._quadrature import QuadratureConfig
from .errors import HypmaxError

COMMANDS = ("multiplier", "mean", "maximal", "asymptotics", "counterexample",
            "regions", "validate")
SCHEMA_VERSION = 1

# keys a config file may set, with their parsers
_FLOAT_KEYS = {"alpha_re", "alpha_im", "p", "t", "z_r", "rel_tol", "abs_tol"}
_INT_KEYS = {"n", "max_panels", "jacobi_nodes"}
_TOLERANCE_KEYS = ("rel_tol", "abs_tol", "max_panels", "jacobi_nodes")
_GRID_KEYS = {"lgrid", "tgrid", "sweep", "grid", "js"}
_STR_KEYS = {"output_path", "format", "family", "suite", "route", "lemma", "only",
             "classify_p", "classify_alpha"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _GRID_KEYS | _STR_KEYS


class UsageError(HypmaxError):
    """Bad flags, a bad config file or an unwritable output path."""


@dataclass
class RunConfig:
    command: str
    n: int = 2
    alpha_re: float = 0.5
    alpha_im: float = 0.0
    p: float = 4.0
    grids: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output_path: str = "-"
    format: str = "csv"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if int(self.n) != self.n or self.n < 2:
            raise UsageError(f"n must be an integer >= 2, got {self.n}")
        self.n = int(self.n)
        self.format = self.format.lower()
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    def quadrature(self) -> QuadratureConfig:
        try:
            return QuadratureConfig(**self.tolerances)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def resolved(self) -> dict:
        return asdict(self)


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse key = value lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KNOWN_KEYS:
            raise UsageError(f"{source}:{lineno}: unknown key {key!r}")
        if not value:
            raise UsageError(f"{source}:{lineno}: empty value for {key!r}")
        try:
            out[key] = _convert(key, value)
        except ValueError as exc:
            raise UsageError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc
    return out


def _convert(key, value):
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _INT_KEYS:
        v = float(value)
        if v != int(v):
            raise ValueError(f"{value!r} is not an integer")
        return int(v)
    return value


def load_config(path: str | None, command: str = "validate",
                overrides: dict | None = None) -> RunConfig:
    """RunConfig from an optional config file, with ``overrides`` taking precedence."""
    values = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from exc
        values = parse_config_text(text, path)
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    base = {}
    for k in ("n", "alpha_re", "alpha_im", "p", "output_path", "format"):
        if k in values:
            base[k] = values.pop(k)
    tol = {k: values.pop(k) for k in _TOLERANCE_KEYS if k in values}
    grids = {k: values.pop(k) for k in sorted(_GRID_KEYS) if k in values}
    return RunConfig(command=command, grids=grids, tolerances=tol,
                     options=dict(sorted(values.items())), **base)


# ---------------------------------------------------------------- grid parsing

def parse_range(text: str, default_count: int = 5, geometric: bool = False):
    """``a:b`` or ``a:b:k`` as k points; geometric spacing when asked."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"range {text!r} must look like a:b or a:b:k")
    try:
        a, b = float(parts[0]), float(parts[1])
        k = int(parts[2]) if len(parts) == 3 else default_count
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc
    if k < 1:
        raise UsageError("range count must be positive")
    if geometric:
        if a <= 0 or b <= 0:
            raise UsageError("geometric ranges need positive endpoints")
        return np.geomspace(a, b, k)
    return np.linspace(a, b, k)


def _int_range(text: str):
    parts = text.split(":")
    try:
        lo, hi = int(parts[0]), int(parts[-1])
    except ValueError as exc:
        raise UsageError(f"bad integer range {text!r}") from exc
    return np.arange(lo, hi + 1)


# ------------------------------------------------------------------- output

def header_lines(cfg: RunConfig) -> list[str]:
    return [f"hypmax {__version__}", f"command: {cfg.command}",
            "config: " + json.dumps(cfg.resolved(), sort_keys=True)]


def with_header(cfg: RunConfig, body: str) -> str:
    return "".join(f"# {h}\n" for h in header_lines(cfg)) + body


def json_document(cfg: RunConfig, payload: dict) -> str:
    doc = {"schema": f"hypmax.{cfg.command}/{SCHEMA_VERSION}", "version": __version__,
           "config": cfg.resolved()}
    doc.update(payload)
    return json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if hasattr(x, "value"):
        return x.value
    raise TypeError(f"not serialisable: {type(x)}")


def write_output(path: str, text: str, stream=None) -> None:
    if path in (None, "-"):
        (stream or sys.stdout).write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path!r}: {exc.strerror}") from exc


def thread_count() -> int:
    raw = os.environ.get("HYPMAX_THREADS", "1")
    try:
        k = int(raw)
    except ValueError as exc:
        raise UsageError(f"HYPMAX_THREADS must be a positive integer, got {raw!r}") from exc
    if k < 1:
        raise UsageError("HYPMAX_THREADS must be positive")
    return k


# ------------------------------------------------------------------ commands

def _order(cfg):
    from .special import ComplexOrder
    return ComplexOrder(cfg.alpha, cfg.n)


def cmd_multiplier(cfg: RunConfig) -> int:
    from .maximal import MeanOperatorSpec, multiplier_m_alpha_t
    t = float(cfg.options.get("t", 1.0))
    lam = parse_range(cfg.grids.get("lgrid", "0:20:201"))
    m = multiplier_m_alpha_t(lam, MeanOperatorSpec(_order(cfg), t, cfg.quadrature()))
    if cfg.format == "json":
        text = json_document(cfg, {"t": t, "lambda": lam, "re": m.real, "im": m.imag})
    else:
        rows = ["lambda,t,value_re,value_im"]
        rows += [f"{l!r},{t!r},{v.real!r},{v.imag!r}" for l, v in
                 zip(lam.tolist(), m.tolist())]
        text = with_header(cfg, "\n".join(rows) + "\n")
    write_output(cfg.output_path, text)
    return 0


def _bump(n):
    from .acceptance import test_bump
    return test_bump(n)


def cmd_mean(cfg: RunConfig) -> int:
    from .geometry import HyperbolicPoint
    from .maximal import MeanOperatorSpec, spherical_mean_direct, spherical_mean_spectral
    z_r = float(cfg.options.get("z_r", 0.4))
    ts = parse_range(cfg.grids.get("tgrid", "0.5:2:4"))
    order, q = _order(cfg), cfg.quadrature()
    f = _bump(cfg.n)
    z = HyperbolicPoint(math.cosh(z_r), np.r_[math.sinh(z_r), np.zeros(cfg.n - 1)])
    rows, worst = [], 0.0
    for t in ts:
        spec = MeanOperatorSpec(order, float(t), q)
        d = spherical_mean_direct(f, z, spec) if order.alpha.real > 0 else complex("nan")
        s = complex(spherical_mean_spectral(f, spec, [0.0, z_r]).values[1])
        err = float(abs(d - s) / abs(d)) if order.alpha.real > 0 else float("nan")
        if not math.isnan(err):
            worst = max(worst, err)
        rows.append((float(t), d, s, err))
    ok = worst <= 1e-3
    if cfg.format == "json":
        text = json_document(cfg, {"z_r": z_r, "worst_rel_err": worst, "pass": ok,
                                   "rows": [{"t": t, "direct": d, "spectral": s,
                                             "rel_err": e} for t, d, s, e in rows]})
    else:
        out = ["t,z_r,direct_re,direct_im,spectral_re,spectral_im,rel_err"]
        out += [f"{t!r},{z_r!r},{d.real!r},{d.imag!r},{s.real!r},{s.imag!r},{e!r}"
                for t, d, s, e in rows]
        text = with_header(cfg, "\n".join(out) + "\n")
    write_output(cfg.output_path, text)
    return 0 if ok else 1


def cmd_maximal(cfg: RunConfig) -> int:
    from .geometry import HyperbolicPoint
    from .maximal import TGrid, maximal_function
    z_r = float(cfg.options.get("z_r", 0.4))
    spec = cfg.grids.get("tgrid", "0.05:15:1.05")
    try:
        t_min, t_max, gamma = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise UsageError(f"tgrid {spec!r} must be t_min:t_max:gamma") from exc
    tg = TGrid.geometric(t_min, gamma, t_max)
    z = HyperbolicPoint(math.cosh(z_r), np.r_[math.sinh(z_r), np.zeros(cfg.n - 1)])
    res = maximal_function(_bump(cfg.n), z, _order(cfg), tg,
                           route=cfg.options.get("route", "auto"), q=cfg.quadrature())
    if cfg.format == "json":
        text = json_document(cfg, {"z_r": z_r, "value": res.value, "t_at_max": res.t_at_max,
                                   "tgrid": tg.values, "means_re": res.means.real,
                                   "means_im": res.means.imag})
    else:
        text = with_header(cfg, res.to_csv(z_r))
    write_output(cfg.output_path, text)
    return 0


def cmd_asymptotics(cfg: RunConfig) -> int:
    from .asymptotics import (check_c_alpha_decay, check_large_t_reconstruction,
                              check_oscillatory_decay, check_plancherel_density,
                              check_uniform_bound, fit_report,
                              lambda_c_difference)
    order = _order(cfg)
    n, a = cfg.n, cfg.alpha
    lemma = cfg.options.get("lemma", "all")
    reports = []
    if lemma in ("all", "uniform"):
        lg = np.linspace(0.0, 30.0, 61)
        tg = np.linspace(0.1, 8.0, 40)
        rep = check_uniform_bound(order, lg, tg)
        reports.append({"claim": "uniform bound |m| <= C (1+t) e^{-(n-1)t/2}",
                        "parameters": {"n": n, "alpha": a},
                        "calibrated_constant": rep.calibrated_constant,
                        "worst_ratio": rep.worst_ratio,
                        "worst_location": list(rep.worst_location),
                        "pass": rep.worst_ratio <= 1.5 * rep.calibrated_constant})
        dens = check_plancherel_density(n, np.linspace(0.0, 50.0, 101))
        reports.append({"claim": "Plancherel density even and nonnegative",
                        "parameters": {"n": n}, "pass": dens})
    if lemma in ("all", "c-decay"):
        lam = np.geomspace(10.0, 1000.0, 40)
        size = np.abs(lambda_c_difference(order, 0, lam))
        for k in (0, 1, 2):
            claim, params = f"lam c^alpha difference of order {k}", {"n": n, "alpha": a, "k": k}
            diff = np.abs(lambda_c_difference(order, k, lam))
            if k and np.all(diff <= 1e-6 * size):
                # lam c^alpha is constant here (e.g. n = 2, alpha = 1/2): only roundoff left
                reports.append({"claim": claim, "parameters": params, "trivial": True,
                                "max_abs_difference": float(diff.max()), "pass": True})
                continue
            fit = check_c_alpha_decay(order, k, (10.0, 1000.0))
            expected = 1 - (n - 1) / 2 - a.real - k
            reports.append(fit_report(claim, params, expected, fit, 0.1))
    if lemma in ("all", "decay"):
        t = float(cfg.options.get("t", 1.0))
        lo = max(5.0, 1.0 / t)
        fit = check_oscillatory_decay(order, t, (lo, 40.0 * lo))
        reports.append(fit_report("envelope decay of m^alpha_t", {"n": n, "alpha": a, "t": t},
                                  -(a.real + (n - 1) / 2), fit, 0.1))
    if lemma in ("all", "reconstruction"):
        errs = [check_large_t_reconstruction(order, lam, t)
                for t in (2.0, 3.0, 5.0) for lam in (1.0, 5.0, 10.0, 20.0)]
        reports.append({"claim": "large-t reconstruction", "parameters": {"n": n, "alpha": a},
                        "worst_rel_err": max(errs), "pass": max(errs) <= 1e-5})
    if not reports:
        raise UsageError(f"unknown lemma {lemma!r}")
    ok = all(r["pass"] for r in reports)
    write_output(cfg.output_path, json_document(cfg, {"reports": reports, "pass": ok}))
    return 0 if ok else 1


def _sweep_params(family, text):
    from .counterexamples import Family
    if family is Family.G_J:
        return _int_range(text)
    count = 5 if family is Family.H_EPS else 3
    return parse_range(text, default_count=count, geometric=True)


def cmd_counterexample(cfg: RunConfig) -> int:
    from .counterexamples import (CounterexampleSpec, Family, FitScale, fit_exponent,
                                  maximal_lower_bound, theorem_exponent)
    try:
        family = Family(cfg.options.get("family", "h_eps").upper())
    except ValueError as exc:
        raise UsageError(f"unknown family {cfg.options.get('family')!r}") from exc
    defaults = {Family.G_J: "4:10", Family.H_EPS: "1e-1:1e-3", Family.F_DELTA: "1e-2:1e-8"}
    params = _sweep_params(family, cfg.grids.get("sweep", defaults[family]))
    specs = [CounterexampleSpec(family, float(x), cfg.n, cfg.alpha_re, cfg.p) for x in params]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        samples = list(pool.map(maximal_lower_bound, specs))
    summary = {"family": family.value, "n": cfg.n, "alpha": cfg.alpha_re, "p": cfg.p,
               "samples": [asdict(s) for s in samples]}
    if family is Family.F_DELTA:
        ratios = [s.ratio_lower_bound for s in samples]
        norms = [s.fnorm for s in samples]
        summary["strictly_increasing"] = all(b > a for a, b in zip(ratios, ratios[1:]))
        summary["fnorm_spread"] = max(norms) / min(norms) - 1.0
    elif len(samples) >= 3:
        scale = FitScale.LOG2_J if family is Family.G_J else FitScale.LOG_PARAM
        fit = fit_exponent(samples, scale)
        expected = theorem_exponent(family, cfg.n, cfg.alpha_re, cfg.p)
        summary.update({"fit_scale": scale.value, "fitted_slope": fit.slope,
                        "expected_slope": expected, "max_residual": fit.max_residual,
                        # ratio ~ param^{param_exponent}
                        "param_exponent": -fit.slope if scale is FitScale.LOG_PARAM
                        else fit.slope})
    rows = ["family,param,alpha,p,n,ratio_lower_bound,fnorm"]
    rows += [f"{family.value},{s.param!r},{cfg.alpha_re!r},{cfg.p!r},{cfg.n},"
             f"{s.ratio_lower_bound!r},{s.fnorm!r}" for s in samples]
    csv_text = with_header(cfg, "\n".join(rows) + "\n")
    json_text = json_document(cfg, summary)
    if cfg.format == "json":
        write_output(cfg.output_path, json_text)
    else:
        write_output(cfg.output_path, csv_text)
        if cfg.output_path not in (None, "-"):
            sys.stdout.write(json_text)
    return 0


def cmd_regions(cfg: RunConfig) -> int:
    from .regions import RegionQuery, emit_region_csv, verdict_dict
    count = int(cfg.grids.get("grid", "512"))
    if count < 2:
        raise UsageError("grid needs at least 2 intervals")
    grid = np.arange(1, count) / count
    cp, ca = cfg.options.get("classify_p"), cfg.options.get("classify_alpha")
    verdict = None
    if (cp is None) != (ca is None):
        raise UsageError("--classify-p and --classify-alpha go together")
    if cp is not None:
        verdict = verdict_dict(RegionQuery(cfg.n, float(cp), float(ca)))
    if cfg.format == "json":
        from .regions import region_rows
        payload = {"rows": [list(r) for r in region_rows(cfg.n, grid)]}
        if verdict:
            payload["verdict"] = verdict
        write_output(cfg.output_path, json_document(cfg, payload))
    else:
        write_output(cfg.output_path,
                     emit_region_csv(cfg.n, grid, "\n".join(header_lines(cfg))))
        if verdict:
            sys.stdout.write(json.dumps(verdict, sort_keys=True) + "\n")
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    from .acceptance import CHECKS, run_check
    suite = cfg.options.get("suite", "primary")
    if suite != "primary":
        raise UsageError(f"unknown suite {suite!r}; only 'primary' exists")
    only = cfg.options.get("only")
    keys = list(CHECKS) if not only else [k.strip() for k in only.split(",")]
    bad = [k for k in keys if k not in CHECKS]
    if bad:
        raise UsageError(f"unknown check(s) {bad}")
    results = []
    for k in keys:
        r = run_check(k)
        sys.stderr.write(r.line() + "\n")
        results.append(r)
    ok = all(r.passed for r in results)
    write_output(cfg.output_path,
                 json_document(cfg, {"suite": suite, "pass": ok,
                                     "checks": [r.to_json() for r in results]}))
    return 0 if ok else 1


HANDLERS = {
    "multiplier": cmd_multiplier, "mean": cmd_mean, "maximal": cmd_maximal,
    "asymptotics": cmd_asymptotics, "counterexample": cmd_counterexample,
    "regions": cmd_regions, "validate": cmd_validate,
}


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--n", type=int, help="dimension of H^n")
    common.add_argument("--alpha", dest="alpha_re", type=float, help="Re alpha")
    common.add_argument("--alpha-im", dest="alpha_im", type=float, help="Im alpha")
    common.add_argument("--p", type=float, help="Lebesgue exponent")
    common.add_argument("--out", dest="output_path", help="output file ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--max-panels", dest="max_panels", type=int)

    parser = argparse.ArgumentParser(prog="hypmax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hypmax {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("multiplier", parents=[common], help="sample m^alpha_t(lam)")
    p.add_argument("--t", type=float)
    p.add_argument("--lgrid", help="lam range a:b:k")

    p = sub.add_parser("mean", parents=[common], help="direct vs spectral mean")
    p.add_argument("--tgrid", help="t range a:b:k")
    p.add_argument("--z-r", dest="z_r", type=float, help="distance of z from the origin")

    p = sub.add_parser("maximal", parents=[common], help="maximal function on a bump")
    p.add_argument("--tgrid", help="t_min:t_max:gamma geometric grid")
    p.add_argument("--z-r", dest="z_r", type=float)
    p.add_argument("--route", choices=("auto", "direct", "spectral"))

    p = sub.add_parser("asymptotics", parents=[common], help="multiplier asymptotics")
    p.add_argument("--lemma", choices=("all", "uniform", "c-decay", "decay",
                                       "reconstruction"))
    p.add_argument("--t", type=float)

    p = sub.add_parser("counterexample", parents=[common], help="family sweeps and fits")
    p.add_argument("--family", type=str.lower, choices=("f_delta", "g_j", "h_eps"))
    p.add_argument("--sweep", help="a:b or a:b:k (integers j_lo:j_hi for g_j)")

    p = sub.add_parser("regions", parents=[common], help="boundedness map")
    p.add_argument("--grid", help="number of 1/p intervals")
    p.add_argument("--classify-p", dest="classify_p", help="classify this p ('inf' allowed)")
    p.add_argument("--classify-alpha", dest="classify_alpha", help="classify this Re alpha")

    p = sub.add_parser("validate", parents=[common], help="acceptance suite")
    p.add_argument("--suite", choices=("primary",))
    p.add_argument("--only", help="comma-separated check keys")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        thread_count()
        cfg = load_config(args.config, args.command, flags)
        if cfg.output_path not in (None, "-"):
            parent = os.path.dirname(os.path.abspath(cfg.output_path))
            if not os.access(parent, os.W_OK):
                raise UsageError(f"cannot write to {cfg.output_path!r}")
        return HANDLERS[args.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"hypmax: error: {exc}\n")
        return 2
    except (HypmaxError, ValueError) as exc:
        sys.stderr.write(f"hypmax: {args.command} failed: {exc}\n")
        return 2


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
