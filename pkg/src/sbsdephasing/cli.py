"""Command-line front end: ``sbs-dephasing <scenario> [flags]``.

Every flag can also be given in a ``--config`` file of ``key = value`` lines
(``#`` starts a comment; keys are flag names without dashes).  Flags win
over the file, the file wins over built-in defaults.  Exit codes: 0 success,
1 usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import closed_forms as cf
from . import indicators as ind
from .oracle import TruncationError, product_indicators
from .quadrature import QuadratureError, QuadSpec
from .spectral import EnvPartition, SpectralDensity, discretize
from .tables import ResultTable

SCENARIOS = ("gamma-curve", "indicators", "nmeasure", "sweep", "reproduce-fig", "oracle-check")
FIG_TAGS = ("nm-vs-s", "nm-vs-beta", "dec-vs-t", "fid-vs-t", "asymptotics-heatmap",
            "cut-timeseries", "onecut-comparison", "twocut-comparison")
SWEEP_PARAMS = ("s", "lambda", "temp", "alpha", "beta", "delta", "sigma")

DEFAULTS = {
    "s": 3.0,
    "lambda": 1.0,
    "temp": 1.0,
    "cut": "uncut",
    "alpha": None,
    "beta": None,
    "delta": None,
    "sigma": None,
    "tmin": 0.0,
    "tmax": None,
    "points": None,
    "method": "quad",
    "rel_tol": 1e-10,
    "abs_tol": 1e-12,
    "modes": 20000,
    "omega_max": None,
    "tolerance": 1e-3,
    "param": None,
    "values": None,
    "jobs": 1,
    "tag": None,
    "out": None,
    "plot": False,
}
_FLOATS = {"s", "lambda", "temp", "alpha", "beta", "delta", "sigma", "tmin", "tmax",
           "rel_tol", "abs_tol", "omega_max", "tolerance"}
_INTS = {"points", "modes", "jobs"}


class UsageError(ValueError):
    """Invalid configuration; reported with exit code 1."""


@dataclass
class RunConfig:
    scenario: str
    params: dict = field(default_factory=dict)
    explicit: frozenset = frozenset()   # keys set by a config file or flag

    def __getitem__(self, key):
        return self.params[key]

    @property
    def sd(self) -> SpectralDensity:
        return SpectralDensity(self["s"], self["lambda"])

    @property
    def quad(self) -> QuadSpec:
        return QuadSpec(rel_tol=self["rel_tol"], abs_tol=self["abs_tol"])

    def partition(self, **override) -> EnvPartition:
        p = {**self.params, **override}
        return build_partition(p["cut"], p["alpha"], p["beta"], p["delta"], p["sigma"], p["lambda"])

    def times(self, default_tmax: float, default_points: int) -> np.ndarray:
        tmax = self["tmax"] if self["tmax"] is not None else default_tmax
        n = self["points"] if self["points"] is not None else default_points
        if n < 2 or not tmax > self["tmin"]:
            raise UsageError("time grid needs points >= 2 and tmax > tmin")
        return np.linspace(self["tmin"], tmax, n)


def build_partition(cut, alpha, beta, delta, sigma, cutoff=1.0) -> EnvPartition:
    """Partition from CLI-style fields; ``sigma`` defaults to ``0.05 * cutoff``."""
    try:
        if cut == "uncut":
            return EnvPartition.uncut()
        if beta is None:
            raise UsageError(f"--beta is required for --cut {cut}")
        if cut == "single":
            return EnvPartition.single_cut(beta)
        lo = alpha
        if delta is not None:
            lo = max(0.0, beta - delta)
        if cut == "window":
            if lo is None:
                raise UsageError("--cut window needs --alpha or --delta")
            return EnvPartition.window(beta, alpha=lo) if lo > 0 else EnvPartition.single_cut(beta)
        if cut == "soft":
            return EnvPartition.soft_window(lo or 0.0, beta, sigma if sigma is not None else 0.05 * cutoff)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"--cut must be uncut, single, window or soft, got {cut!r}")


def parse_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _coerce(key: str, val):
    if val is None:
        return None
    if key not in DEFAULTS:
        raise UsageError(f"unknown configuration key {key!r}")
    try:
        if key in _FLOATS:
            return float(val)
        if key in _INTS:
            return int(val)
        if key == "plot":
            return val if isinstance(val, bool) else str(val).lower() in ("1", "true", "yes", "on")
        if key == "values" and isinstance(val, str):
            return [float(x) for x in val.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {val!r}") from exc
    return val


def resolve_config(scenario: str, file_values: dict, flag_values: dict) -> RunConfig:
    params = dict(DEFAULTS)
    explicit = set()
    for source in (file_values, flag_values):
        for k, v in source.items():
            v = _coerce(k, v)
            if v is not None:
                params[k] = v
                explicit.add(k)
    _validate(scenario, params)
    return RunConfig(scenario, params, frozenset(explicit))


def _validate(scenario, p):
    if scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {scenario!r}")
    for key in ("s", "lambda"):
        if not p[key] > 0:
            raise UsageError(f"{key} must be positive")
    if not p["temp"] >= 0:
        raise UsageError("temp must be >= 0")
    if p["method"] not in ("quad", "closed", "both"):
        raise UsageError("--method must be quad, closed or both")
    if p["method"] != "quad" and (p["cut"] != "uncut" or p["s"] <= 1):
        raise UsageError("closed forms need --cut uncut and s > 1")
    if not p["rel_tol"] > 0 or not p["abs_tol"] >= 0:
        raise UsageError("tolerances must be positive")
    if scenario == "sweep":
        if p["param"] not in SWEEP_PARAMS:
            raise UsageError(f"--param must be one of {SWEEP_PARAMS}")
        if not p["values"]:
            raise UsageError("--values is required for sweep")
    if scenario == "reproduce-fig" and p["tag"] not in FIG_TAGS:
        raise UsageError(f"unknown figure tag {p['tag']!r}; choose from {FIG_TAGS}")
    q = dict(p)
    if scenario == "sweep":
        q[p["param"]] = p["values"][0]          # the swept field may be unset otherwise
    build_partition(q["cut"], q["alpha"], q["beta"], q["delta"], q["sigma"], q["lambda"])


def _metadata(cfg: RunConfig, method: str, **extra) -> dict:
    meta = {"scenario": cfg.scenario, "version": __version__, "method": method}
    for k in sorted(cfg.params):
        if k in ("out", "plot", "jobs", "method"):
            continue
        v = cfg.params[k]
        meta[k] = ",".join(format(x, ".17g") for x in v) if isinstance(v, list) else v
    meta.update(extra)
    return meta


# --- scenarios --------------------------------------------------------------

def run_gamma_curve(cfg: RunConfig) -> ResultTable:
    sd, p = cfg.sd, cfg.partition()
    times = cfg.times(10.0 / cfg["lambda"], 201)
    cols = ["t", "gamma"]
    high = cfg["temp"] > 0
    if high:
        cols.append("gamma_highT")
    table = ResultTable(cols, metadata=_metadata(cfg, "quadrature"))
    g = ind.gamma_rate(sd, p, cfg["temp"], times, spec=cfg.quad)
    gh = ind.gamma_rate_highT(sd, p, cfg["temp"], times, spec=cfg.quad) if high else None
    for i, t in enumerate(times):
        table.add_row(t, g[i], *([gh[i]] if high else []))
    return table


def run_indicators(cfg: RunConfig) -> ResultTable:
    sd, p, T = cfg.sd, cfg.partition(), cfg["temp"]
    times = cfg.times(10.0 / cfg["lambda"], 101)
    method = cfg["method"]
    cols, data = ["t"], []
    if method in ("quad", "both"):
        cols += ["log_dec", "log_fid"]
        data += [ind.log_decoherence(sd, p, T, times, spec=cfg.quad),
                 ind.log_fidelity(sd, p, T, times, spec=cfg.quad)]
    if method in ("closed", "both"):
        sfx = "_closed" if method == "both" else ""
        cols += ["log_dec" + sfx, "log_fid" + sfx]
        data += [np.array([cf.log_decoherence_closed(sd.s, T, sd.cutoff, t) for t in times]),
                 np.array([cf.log_fidelity_closed(sd.s, T, sd.cutoff, t) for t in times])]
    names = {"quad": "quadrature", "closed": "closed_form", "both": "quadrature+closed_form"}
    table = ResultTable(cols, metadata=_metadata(cfg, names[method]))
    for i, t in enumerate(times):
        table.add_row(t, *(d[i] for d in data))
    return table


def _nm_row(sd, p, T, t_max, spec):
    r = ind.non_markovianity(sd, p, T, t_max, spec=spec)
    return r.value, r.extended_value, r.converged, len(r.negative_intervals)


def run_nmeasure(cfg: RunConfig) -> ResultTable:
    tmax = cfg["tmax"] if cfg["tmax"] is not None else ind.NM_HORIZON / cfg["lambda"]
    n, n2, conv, k = _nm_row(cfg.sd, cfg.partition(), cfg["temp"], tmax, cfg.quad)
    table = ResultTable(["N", "N_2tmax", "converged", "negative_intervals"],
                        metadata=_metadata(cfg, "quadrature", horizon=format(tmax, ".17g")))
    table.add_row(n, n2, conv, k)
    return table


def _sweep_point(args):
    params, key, value = args
    params = {**params, key: value}
    sd = SpectralDensity(params["s"], params["lambda"])
    p = build_partition(params["cut"], params["alpha"], params["beta"], params["delta"],
                        params["sigma"], params["lambda"])
    T = params["temp"]
    spec = QuadSpec(rel_tol=params["rel_tol"], abs_tol=params["abs_tol"])
    tmax = params["tmax"] if params["tmax"] is not None else ind.NM_HORIZON / params["lambda"]
    n, n2, conv, _ = _nm_row(sd, p, T, tmax, spec)
    dec = -ind.asymptotic_log_decoherence(sd, p, T, spec=spec)
    fid = -ind.asymptotic_log_fidelity(sd, p, T, spec=spec)
    return value, n, conv, dec, fid


def parallel_map(fn, items, jobs: int):
    """Ordered map; results come back in input order whatever the completion order."""
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def run_sweep(cfg: RunConfig) -> ResultTable:
    key = cfg["param"]
    items = [(cfg.params, key, float(v)) for v in cfg["values"]]
    rows = parallel_map(_sweep_point, items, cfg["jobs"])
    extra = {}
    if any(math.isinf(r[3]) for r in rows):
        extra["divergence"] = "inf marks complete decoherence (non-integrable low-frequency weight)"
    table = ResultTable([key, "N", "converged", "neg_log_dec_inf", "neg_log_fid_inf"],
                        metadata=_metadata(cfg, "quadrature", **extra))
    for r in rows:
        table.add_row(*r)
    return table


def run_oracle_check(cfg: RunConfig) -> ResultTable:
    sd, p, T = cfg.sd, cfg.partition(), cfg["temp"]
    wmax = cfg["omega_max"] if cfg["omega_max"] is not None else 40.0 * cfg["lambda"]
    times = cfg.times(2.0 / cfg["lambda"], 5)
    unobs = discretize(sd, p, "unobserved", cfg["modes"], wmax)
    obs = discretize(sd, p, "observed", cfg["modes"], wmax)
    table = ResultTable(["t", "log_dec_quad", "log_dec_modes", "log_fid_quad", "log_fid_modes", "rel_dev"])
    worst = 0.0
    for t in times:
        qd = ind.log_decoherence(sd, p, T, t, spec=cfg.quad)
        qf = ind.log_fidelity(sd, p, T, t, spec=cfg.quad)
        md = product_indicators(unobs, T, t)[0]
        mf = product_indicators(obs, T, t)[1]
        dev = max(_rel(md, qd), _rel(mf, qf))
        worst = max(worst, dev)
        table.add_row(t, qd, md, qf, mf, dev)
    table.metadata = _metadata(cfg, "oracle", omega_max_resolved=format(wmax, ".17g"),
                               max_rel_dev=format(worst, ".17g"))
    if worst > cfg["tolerance"]:
        table.metadata["status"] = "FAILED"
    return table


def _rel(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(b), 1e-300)


def run(cfg: RunConfig) -> ResultTable:
    """Execute one scenario and write its CSV (and plot) when ``out`` is set."""
    if cfg.scenario == "reproduce-fig":
        from .figures import reproduce_fig
        table = reproduce_fig(cfg["tag"], cfg)
    else:
        table = {
            "gamma-curve": run_gamma_curve,
            "indicators": run_indicators,
            "nmeasure": run_nmeasure,
            "sweep": run_sweep,
            "oracle-check": run_oracle_check,
        }[cfg.scenario](cfg)
    if cfg["out"]:
        path = table.write(cfg["out"])
        if cfg["plot"]:
            from .figures import plot_table
            plot_table(table, path.with_suffix(".png"))
    return table


# --- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--s", type=float, help="Ohmicity")
    p.add_argument("--lambda", dest="lambda", type=float, help="cutoff frequency")
    p.add_argument("--temp", type=float, help="temperature (k_B = 1)")
    p.add_argument("--cut", choices=("uncut", "single", "window", "soft"))
    p.add_argument("--alpha", type=float, help="lower cut frequency")
    p.add_argument("--beta", type=float, help="upper cut frequency")
    p.add_argument("--delta", type=float, help="window width; alpha = beta - delta")
    p.add_argument("--sigma", type=float, help="soft-cut width (default 0.05 * lambda)")
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--method", choices=("quad", "closed", "both"))
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.add_argument("--abs-tol", dest="abs_tol", type=float)
    p.add_argument("--jobs", type=int, help="worker processes for sweeps")
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.add_argument("--plot", action="store_true", default=None, help="also render a PNG next to the CSV")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sbs-dephasing", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="scenario", required=True, parser_class=_Parser)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        _add_common(p)
        if name in ("sweep", "reproduce-fig"):
            p.add_argument("--values", help="comma-separated parameter values (figure x-grid)")
        if name == "sweep":
            p.add_argument("--param", choices=SWEEP_PARAMS)
        if name == "reproduce-fig":
            p.add_argument("tag", choices=FIG_TAGS)
        if name == "oracle-check":
            p.add_argument("--modes", type=int)
            p.add_argument("--omega-max", dest="omega_max", type=float)
            p.add_argument("--tolerance", type=float)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("scenario", "config")}
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        cfg = resolve_config(args.scenario, file_values, flags)
    except UsageError as exc:
        print(f"sbs-dephasing: usage error: {exc}", file=sys.stderr)
        return 1
    try:
        table = run(cfg)
    except (UsageError, ValueError) as exc:      # ValueError: a physical parameter out of domain
        print(f"sbs-dephasing: usage error: {exc}", file=sys.stderr)
        return 1
    except (QuadratureError, TruncationError, FloatingPointError, ArithmeticError) as exc:
        print(f"sbs-dephasing: numerical failure: {exc}", file=sys.stderr)
        return 2
    if not cfg["out"]:
        sys.stdout.write(table.to_csv())
    if table.metadata.get("status") == "FAILED":
        print("sbs-dephasing: oracle deviation above tolerance", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
