"""Command-line driver: ``symtanh <command> [flags]``.

Settings resolve as defaults < ``--config`` file < explicit flags.  The config
file is flat YAML whose keys are the long flag names without dashes, e.g.::

    q: 1.0
    lambda: 1.0
    function: sin
    ns: [16, 32, 64]

Every run writes exactly one report (CSV or JSON) and prints a one-line
summary.  Exit status is 2 for an invalid configuration and 1 when ``--strict``
is set and a numerical advisory (or a failed kernel check) occurred.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from . import analysis, checks
from .corpus import get_function
from .errors import Advisory, InsufficientData, SymtanhError
from .fractional import CaputoScheme, FractionalOrder, caputo_left
from .kernel import KERNELS, ActivationParams, KernelEvalPolicy
from .operators import OPERATOR_KINDS, OperatorSpec, apply

COMMANDS = (
    "kernel-check",
    "approximate",
    "voronovskaya",
    "kantorovich-rate",
    "stability",
    "fractional-check",
    "damasclin",
)


@dataclass
class RunConfig:
    command: str = "voronovskaya"
    q: float = 1.0
    lam: float = 1.0
    kind: str = "basic"
    kernel: str = "symmetrized"
    n: int = 64
    ns: tuple = (16, 32, 64, 128, 256, 512, 1024, 2048, 4096)
    quad_weights: tuple = (1 / 3, 1 / 3, 1 / 3)
    inner_points: int = 8
    tol: float = 1e-14
    max_radius: int = 200
    function: str = "sin"
    x: float = 0.3
    N: int = 2
    beta: float = 0.7
    eps: float = 0.1
    alpha: float = 0.5
    anchor: float = 0.0
    deltas: tuple = (0.1, 0.01, 0.001)
    mesh_points: int = 1024
    grading: float = 2.0
    window: Optional[float] = None
    stability_kernel: str = "density"
    out: Optional[str] = None
    format: str = "csv"
    seed: int = 0
    strict: bool = False
    workers: int = 1

    def params(self) -> ActivationParams:
        return ActivationParams(self.q, self.lam)

    def spec(self, n: Optional[int] = None) -> OperatorSpec:
        return OperatorSpec(
            kind=self.kind,
            n=self.n if n is None else n,
            inner_quadrature_points=self.inner_points,
            quad_weights=self.quad_weights,
            policy=KernelEvalPolicy(self.tol, self.max_radius),
            kernel=self.kernel,
        )

    def out_path(self) -> str:
        return self.out or f"{self.command}.{self.format}"


# flag / config-key name -> RunConfig field
_KEYS = {f.name.replace("_", "-"): f.name for f in dataclasses.fields(RunConfig)}
_KEYS["lambda"] = _KEYS.pop("lam")
_FIELD_TO_KEY = {v: k for k, v in _KEYS.items()}
_LIST_FIELDS = {"ns": int, "quad_weights": float, "deltas": float}


class ConfigError(SymtanhError):
    def __init__(self, key: str, message: str):
        super().__init__(f"--{key}: {message}")
        self.key = key


def parse_list(text, kind=float) -> tuple:
    """Parse ``"a,b,c"``; ``"a,b,...,c"`` expands geometrically with ratio ``b/a``."""
    if isinstance(text, (list, tuple)):
        return tuple(kind(v) for v in text)
    parts = [s.strip() for s in str(text).replace("…", "...").split(",") if s.strip()]
    if "..." not in parts:
        return tuple(kind(float(s)) if kind is int else kind(s) for s in parts)
    i = parts.index("...")
    if i < 2 or i != len(parts) - 2:
        raise ValueError("ellipsis form is 'a,b,...,c'")
    head = [float(s) for s in parts[:i]]
    a, b, end = head[-2], head[-1], float(parts[-1])
    ratio = b / a
    if not (ratio > 0 and ratio != 1):
        raise ValueError("ellipsis form needs a geometric ratio b/a > 0 and != 1")
    values = list(head)
    v = b
    while True:
        v = v * ratio
        if (ratio > 1 and v > end * (1 + 1e-9)) or (ratio < 1 and v < end * (1 - 1e-9)):
            break
        values.append(v)
    if not math.isclose(values[-1], end, rel_tol=1e-9):
        raise ValueError(f"{end:g} is not reached by ratio {ratio:g}")
    values[-1] = end
    if kind is int:
        return tuple(int(round(v)) for v in values)
    return tuple(float(f"{v:.15g}") for v in values)


def _coerce(name: str, value):
    if value is None:
        return None
    if name in _LIST_FIELDS:
        return parse_list(value, _LIST_FIELDS[name])
    target = {f.name: f.type for f in dataclasses.fields(RunConfig)}[name]
    if name == "strict":
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    if target in ("int",):
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"expected an integer, got {value!r}")
        return int(value)
    if target in ("float", "Optional[float]"):
        return float(value)
    return str(value)


def validate(cfg: RunConfig) -> None:
    def need(key, cond, msg):
        if not cond:
            raise ConfigError(key, msg)

    need("command", cfg.command in COMMANDS, f"unknown command {cfg.command!r}")
    need("q", math.isfinite(cfg.q) and cfg.q > 0, "must be > 0")
    need("lambda", math.isfinite(cfg.lam) and cfg.lam > 0, "must be > 0")
    need("kind", cfg.kind in OPERATOR_KINDS, f"must be one of {', '.join(OPERATOR_KINDS)}")
    need("kernel", cfg.kernel in KERNELS, f"must be one of {', '.join(KERNELS)}")
    need("stability-kernel", cfg.stability_kernel in KERNELS, f"must be one of {', '.join(KERNELS)}")
    need("n", cfg.n >= 1, "must be >= 1")
    need("ns", len(cfg.ns) >= 1 and all(v >= 1 for v in cfg.ns), "needs positive integers")
    need("ns", all(b > a for a, b in zip(cfg.ns, cfg.ns[1:])), "must be strictly ascending")
    w = cfg.quad_weights
    need("quad-weights", len(w) >= 1 and all(v >= 0 for v in w) and abs(math.fsum(w) - 1) <= 1e-12,
         "must be nonnegative and sum to 1")
    need("inner-points", cfg.inner_points >= 2, "must be >= 2")
    need("tol", 0 < cfg.tol < 1, "must lie in (0, 1)")
    need("max-radius", cfg.max_radius >= 4, "must be >= 4")
    try:
        get_function(cfg.function)
    except KeyError as exc:
        raise ConfigError("function", str(exc.args[0])) from None
    need("x", math.isfinite(cfg.x), "must be finite")
    need("N", 1 <= cfg.N <= 12, "must lie in 1..12")
    need("N", cfg.N <= get_function(cfg.function).n_max, f"{cfg.function} has derivatives up to order "
         f"{get_function(cfg.function).n_max}")
    need("beta", 0 < cfg.beta < 1, "must lie in (0, 1)")
    need("alpha", cfg.alpha > 0 and not float(cfg.alpha).is_integer(), "must be a positive non-integer")
    eps_cap = math.ceil(cfg.alpha) if cfg.command == "damasclin" else cfg.N
    need("eps", 0 < cfg.eps <= eps_cap, f"must lie in (0, {eps_cap}]")
    need("deltas", len(cfg.deltas) >= 1 and all(0 <= d < 0.5 for d in cfg.deltas), "must lie in [0, 0.5)")
    need("mesh-points", cfg.mesh_points >= 16, "must be >= 16")
    need("grading", cfg.grading >= 1, "must be >= 1")
    need("window", cfg.window is None or cfg.window > 0, "must be > 0")
    need("format", cfg.format in ("csv", "json"), "must be csv or json")
    need("seed", cfg.seed >= 0, "must be >= 0")
    need("workers", cfg.workers >= 1, "must be >= 1")
    if cfg.command == "stability":
        need("q", cfg.q == 1.0, "the stability sweep is anchored at q = 1")
    if cfg.command == "kantorovich-rate":
        need("ns", len(cfg.ns) >= 4, "needs at least 4 entries")
    if cfg.command in ("voronovskaya", "kantorovich-rate", "approximate"):
        need("ns", len(cfg.ns) >= 3 or cfg.command == "approximate", "needs at least 3 entries")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symtanh", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat YAML file of flag values")
    parser.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    for key, name in _KEYS.items():
        if name == "command":
            continue
        if name == "strict":
            parser.add_argument("--strict", action="store_const", const=True, default=None,
                                help="exit 1 on numerical advisories")
            continue
        parser.add_argument(f"--{key}", dest=name, default=None, metavar=key.upper().replace("-", "_"))
    return parser


def resolve(argv) -> tuple[RunConfig, bool]:
    """Parse ``argv`` into a validated config and the ``--dump-config`` flag.

    Raises :class:`ConfigError` naming the offending key.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = yaml.safe_load(fh) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError("config", str(exc)) from None
        if not isinstance(loaded, dict):
            raise ConfigError("config", "expected a flat mapping of flag names to values")
        for key, value in loaded.items():
            if key not in _KEYS:
                raise ConfigError("config", f"unknown key {key!r}")
            values[_KEYS[key]] = value
    for name in _KEYS.values():
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    values["command"] = args.command
    kwargs = {}
    for name, value in values.items():
        try:
            kwargs[name] = _coerce(name, value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(_FIELD_TO_KEY[name], str(exc)) from None
    cfg = RunConfig(**kwargs)
    validate(cfg)
    return cfg, bool(args.dump_config)


def dump_config(cfg: RunConfig) -> str:
    data = {}
    for f in dataclasses.fields(RunConfig):
        v = getattr(cfg, f.name)
        data[_FIELD_TO_KEY[f.name]] = list(v) if isinstance(v, tuple) else v
    return yaml.safe_dump(data, sort_keys=False)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class Report:
    columns: list
    rows: list
    footer: dict = field(default_factory=dict)
    headline: str = ""
    failed: bool = False


def _rate(fn, *args):
    try:
        return fn(*args)
    except InsufficientData:
        return math.nan


def _kernel_check(cfg: RunConfig) -> Report:
    results = checks.kernel_property_checks(cfg.params(), KernelEvalPolicy(cfg.tol, cfg.max_radius), seed=cfg.seed)
    rows = [[r.name, r.value, r.mode, r.threshold, "PASS" if r.passed else "FAIL"] for r in results]
    passed = sum(r.passed for r in results)
    return Report(
        ["check", "value", "mode", "threshold", "status"],
        rows,
        {"passed": passed, "total": len(results)},
        f"{passed}/{len(results)} checks passed",
        failed=passed != len(results),
    )


def _approximate(cfg: RunConfig) -> Report:
    p, f = cfg.params(), get_function(cfg.function)
    exact = float(f(cfg.x))

    def one(n):
        v = apply(p, cfg.spec(n), f, cfg.x)
        return [n, v, exact, v - exact]

    rows = analysis._pmap(one, list(cfg.ns), cfg.workers)
    rate = _rate(analysis.rate_fit, [(r[0], r[3]) for r in rows]) if len(rows) >= 3 else math.nan
    return Report(["n", "value", "exact", "error"], rows, {"error_rate": rate}, f"error_rate={rate:.4g}")


def _voronovskaya(cfg: RunConfig) -> Report:
    rep = analysis.expansion_report(
        cfg.params(), cfg.spec(), get_function(cfg.function), cfg.x, cfg.N, cfg.beta, cfg.eps, cfg.ns, cfg.workers
    )
    return Report(
        ["n", "raw_error", "residual"],
        [list(r) for r in rep.rows],
        {"raw_rate": rep.fitted_raw_rate, "residual_rate": rep.fitted_residual_rate, "target_rate": rep.target_rate},
        f"residual_rate={rep.fitted_residual_rate:.4g}",
    )


def _kantorovich_rate(cfg: RunConfig) -> Report:
    rep = analysis.kantorovich_rate_check(
        cfg.params(), get_function(cfg.function), cfg.x, cfg.N, cfg.beta, cfg.eps, cfg.ns, cfg.spec(), cfg.workers
    )
    rows = [[n, raw, res, float(analysis.composite_scale(n, cfg.beta))] for n, raw, res in rep.rows]
    return Report(
        ["n", "raw_error", "residual", "composite_scale"],
        rows,
        {
            "raw_rate": rep.fitted_raw_rate,
            "residual_rate": rep.fitted_residual_rate,
            "composite_raw_slope": rep.composite_raw_slope,
            "composite_residual_slope": rep.composite_residual_slope,
        },
        f"composite_residual_slope={rep.composite_residual_slope:.4g}",
    )


def _stability(cfg: RunConfig) -> Report:
    rep = analysis.stability_sweep(
        cfg.params(), cfg.spec(), get_function(cfg.function), cfg.x, cfg.deltas, cfg.stability_kernel, cfg.workers
    )
    return Report(
        ["delta", "difference"],
        [list(r) for r in rep.rows],
        {"slope_in_delta": rep.fitted_slope_in_delta},
        f"slope_in_delta={rep.fitted_slope_in_delta:.4g}",
    )


def _fractional_check(cfg: RunConfig) -> Report:
    f = get_function(cfg.function)
    order = FractionalOrder(cfg.alpha)
    if cfg.x < cfg.anchor:
        raise ConfigError("x", f"must be >= anchor ({cfg.anchor}) for the left Caputo derivative")
    meshes = []
    m = 32
    while m < cfg.mesh_points:
        meshes.append(m)
        m *= 2
    meshes.append(cfg.mesh_points)
    if f.caputo is not None:
        exact, source = float(f.caputo(cfg.alpha, cfg.anchor, cfg.x)), "closed_form"
    else:
        ref = CaputoScheme(4 * cfg.mesh_points, cfg.grading)
        exact, source = caputo_left(f, order, cfg.anchor, cfg.x, ref), "refined_mesh"
    rows = []
    for m in meshes:
        v = caputo_left(f, order, cfg.anchor, cfg.x, CaputoScheme(m, cfg.grading))
        rows.append([m, v, exact, abs(v - exact)])
    order_fit = _rate(analysis.rate_fit, [(r[0], r[3]) for r in rows]) if len(rows) >= 3 else math.nan
    return Report(
        ["mesh_points", "value", "exact", "abs_error"],
        rows,
        {"observed_order": order_fit, "reference": source},
        f"observed_order={order_fit:.4g}",
    )


def _damasclin(cfg: RunConfig) -> Report:
    p, f = cfg.params(), get_function(cfg.function)
    order = FractionalOrder(cfg.alpha)
    scheme = CaputoScheme(cfg.mesh_points, cfg.grading)
    window = cfg.window if cfg.window is not None else analysis.default_window(p)
    integral = analysis.damasclin_integral(f, order, cfg.x, window, scheme)
    exponent = cfg.beta * (order.N - cfg.eps)
    rows = [[n, integral * float(n) ** (-exponent)] for n in cfg.ns]
    return Report(
        ["n", "correction"],
        rows,
        {"integral": integral, "window": window, "exponent": exponent},
        f"integral={integral:.6g}",
    )


_RUNNERS = {
    "kernel-check": _kernel_check,
    "approximate": _approximate,
    "voronovskaya": _voronovskaya,
    "kantorovich-rate": _kantorovich_rate,
    "stability": _stability,
    "fractional-check": _fractional_check,
    "damasclin": _damasclin,
}


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return "" if v is None else str(v)


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_fmt(v) for v in row])
    for key, value in report.footer.items():
        buf.write(f"# {key},{_fmt(value)}\n")
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def render_json(report: Report, cfg: RunConfig) -> str:
    doc = {
        "command": cfg.command,
        "config": yaml.safe_load(dump_config(cfg)),
        "columns": report.columns,
        "rows": [dict(zip(report.columns, _jsonable(r))) for r in report.rows],
        **{k: _jsonable(v) for k, v in report.footer.items()},
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".symtanh-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: RunConfig) -> int:
    """Execute ``cfg.command``, write its report and return the exit status."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", Advisory)
        report = _RUNNERS[cfg.command](cfg)
    advisories = [w for w in caught if issubclass(w.category, Advisory)]
    text = render_json(report, cfg) if cfg.format == "json" else render_csv(report)
    path = cfg.out_path()
    write_atomic(path, text)
    print(f"{cfg.command}: {len(report.rows)} rows -> {path} ({report.headline})")
    for w in advisories:
        print(f"advisory: {w.category.__name__}: {w.message}", file=sys.stderr)
    if cfg.strict and (advisories or report.failed):
        return 1
    return 0


def main(argv=None) -> int:
    try:
        cfg, dump_only = resolve(argv)
    except ConfigError as exc:
        print(f"symtanh: error: {exc}", file=sys.stderr)
        return 2
    if dump_only:
        sys.stdout.write(dump_config(cfg))
        return 0
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"symtanh: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
