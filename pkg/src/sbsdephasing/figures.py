"""Figure recipes: the data behind each standard plot, as CSV plus optional PNG.

Each recipe has built-in defaults; time series run at ``T = cutoff`` and the
two-cut curves at ``s = 4`` with ``delta = 2``.  Any parameter passed
explicitly on the command line or in a config file replaces the recipe
default; ``--values`` replaces the x-grid.

Column schemas
--------------
nm-vs-s              s, N_lambda_<r> for cutoff/T = r in {0.5, 1, 2}
nm-vs-beta           beta, N_single_s4, N_single_s3, N_window_d1_s4, N_window_d2_s4
dec-vs-t             t, neg_log_dec_s<k> for k in {2, 3, 4, 5}
fid-vs-t             t, neg_log_fid_s<k> for k in {2, 3, 4, 5}
asymptotics-heatmap  temp, lambda, neg_log_dec_inf, neg_log_fid_inf (long format)
cut-timeseries       t, neg_log_dec, neg_log_fid
onecut-comparison    beta, N, neg_log_dec_inf, neg_log_fid_inf
twocut-comparison    beta, N, neg_log_dec_inf, neg_log_fid_inf
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from . import indicators as ind
from .cli import FIG_TAGS, RunConfig, UsageError, _metadata, build_partition, parallel_map
from .quadrature import QuadSpec
from .spectral import SpectralDensity
from .tables import ResultTable

LAMBDA_RATIOS = (0.5, 1.0, 2.0)
TIME_S = (2.0, 3.0, 4.0, 5.0)
ONECUT_S = 5.0


def _fmt(x: float) -> str:
    return format(x, "g")


def _pick(cfg: RunConfig, key: str, default):
    return cfg[key] if key in cfg.explicit else default


def _grid(cfg: RunConfig, default) -> np.ndarray:
    return np.asarray(cfg["values"] if "values" in cfg.explicit else default, dtype=float)


def _spec(cfg: RunConfig) -> QuadSpec:
    return cfg.quad


# --- pool workers (module level so they pickle) -----------------------------

def _nm_task(args):
    s, cutoff, T, part, tmax, spec = args
    sd = SpectralDensity(s, cutoff)
    p = build_partition(*part, cutoff)
    horizon = tmax if tmax is not None else ind.NM_HORIZON / cutoff
    return ind.non_markovianity(sd, p, T, horizon, spec=spec).value


def _asym_task(args):
    s, cutoff, T, part, spec = args
    sd = SpectralDensity(s, cutoff)
    p = build_partition(*part, cutoff)
    return (-ind.asymptotic_log_decoherence(sd, p, T, spec=spec),
            -ind.asymptotic_log_fidelity(sd, p, T, spec=spec))


def _single(beta):
    return ("single", None, beta, None, None)


def _window(beta, delta):
    return ("window", None, beta, delta, None)


_UNCUT = ("uncut", None, None, None, None)


# --- recipes ----------------------------------------------------------------

def fig_nm_vs_s(cfg):
    T = _pick(cfg, "temp", 1.0) or 1.0
    svals = _grid(cfg, np.arange(1.5, 6.01, 0.25))
    tmax = _pick(cfg, "tmax", None)
    tasks = [(s, r * T, T, _UNCUT, tmax, _spec(cfg)) for r in LAMBDA_RATIOS for s in svals]
    out = parallel_map(_nm_task, tasks, cfg["jobs"])
    n = len(svals)
    series = {f"N_lambda_{_fmt(r)}": out[i * n:(i + 1) * n] for i, r in enumerate(LAMBDA_RATIOS)}
    return ["s", *series], svals, series, {"temp": T, "lambda_over_T": ",".join(map(_fmt, LAMBDA_RATIOS))}


def fig_nm_vs_beta(cfg):
    cutoff = _pick(cfg, "lambda", 1.0)
    T = _pick(cfg, "temp", cutoff)
    betas = _grid(cfg, np.arange(0.5, 8.01, 0.5)) * cutoff
    tmax = _pick(cfg, "tmax", None)
    curves = {
        "N_single_s4": (4.0, _single),
        "N_single_s3": (3.0, _single),
        "N_window_d1_s4": (4.0, lambda b: _window(b, 1.0 * cutoff)),
        "N_window_d2_s4": (4.0, lambda b: _window(b, 2.0 * cutoff)),
    }
    tasks = [(s, cutoff, T, mk(b), tmax, _spec(cfg)) for s, mk in curves.values() for b in betas]
    out = parallel_map(_nm_task, tasks, cfg["jobs"])
    n = len(betas)
    series = {k: out[i * n:(i + 1) * n] for i, k in enumerate(curves)}
    return ["beta", *series], betas, series, {"lambda": cutoff, "temp": T}


def _time_family(cfg, which):
    cutoff = _pick(cfg, "lambda", 1.0)
    T = _pick(cfg, "temp", cutoff)
    times = _grid(cfg, cfg.times(20.0 / cutoff, 201))
    fn = ind.log_decoherence if which == "dec" else ind.log_fidelity
    p = build_partition(*_UNCUT, cutoff)
    series = {f"neg_log_{which}_s{_fmt(s)}": -fn(SpectralDensity(s, cutoff), p, T, times, spec=_spec(cfg))
              for s in TIME_S}
    return ["t", *series], times, series, {"lambda": cutoff, "temp": T, "s_list": ",".join(map(_fmt, TIME_S))}


def fig_dec_vs_t(cfg):
    return _time_family(cfg, "dec")


def fig_fid_vs_t(cfg):
    return _time_family(cfg, "fid")


def fig_asymptotics_heatmap(cfg):
    s = _pick(cfg, "s", 5.0)
    temps = np.linspace(0.1, 5.0, 15)
    cutoffs = _grid(cfg, np.linspace(0.1, 5.0, 15))
    tasks = [(s, c, T, _UNCUT, _spec(cfg)) for T in temps for c in cutoffs]
    out = parallel_map(_asym_task, tasks, cfg["jobs"])
    table = ResultTable(["temp", "lambda", "neg_log_dec_inf", "neg_log_fid_inf"])
    for (_, c, T, _, _), (d, f) in zip(tasks, out):
        table.add_row(T, c, d, f)
    return table, {"s": s, "layout": "grid"}


def fig_cut_timeseries(cfg):
    cutoff = _pick(cfg, "lambda", 1.0)
    s = _pick(cfg, "s", 3.0)
    T = _pick(cfg, "temp", cutoff)
    beta = _pick(cfg, "beta", 2.0 * cutoff)
    times = _grid(cfg, cfg.times(30.0 / cutoff, 301))
    sd, p = SpectralDensity(s, cutoff), build_partition(*_single(beta), cutoff)
    series = {
        "neg_log_dec": -ind.log_decoherence(sd, p, T, times, spec=_spec(cfg)),
        "neg_log_fid": -ind.log_fidelity(sd, p, T, times, spec=_spec(cfg)),
    }
    return ["t", *series], times, series, {"s": s, "lambda": cutoff, "temp": T, "beta": beta}


def _cut_comparison(cfg, s, make_part, betas, extra):
    cutoff = _pick(cfg, "lambda", 1.0)
    T = _pick(cfg, "temp", cutoff)
    tmax = _pick(cfg, "tmax", None)
    betas = betas * cutoff
    nm = parallel_map(_nm_task, [(s, cutoff, T, make_part(b), tmax, _spec(cfg)) for b in betas], cfg["jobs"])
    asym = parallel_map(_asym_task, [(s, cutoff, T, make_part(b), _spec(cfg)) for b in betas], cfg["jobs"])
    series = {"N": nm, "neg_log_dec_inf": [a[0] for a in asym], "neg_log_fid_inf": [a[1] for a in asym]}
    return ["beta", *series], betas, series, {"s": s, "lambda": cutoff, "temp": T, **extra}


def fig_onecut_comparison(cfg):
    s = _pick(cfg, "s", ONECUT_S)
    return _cut_comparison(cfg, s, _single, _grid(cfg, np.arange(0.5, 8.01, 0.25)), {})


def fig_twocut_comparison(cfg):
    cutoff = _pick(cfg, "lambda", 1.0)
    s = _pick(cfg, "s", 4.0)
    delta = _pick(cfg, "delta", 2.0 * cutoff)
    return _cut_comparison(cfg, s, lambda b: _window(b, delta),
                           _grid(cfg, np.arange(0.5, 10.01, 0.25)), {"delta": delta})


RECIPES = {
    "nm-vs-s": fig_nm_vs_s,
    "nm-vs-beta": fig_nm_vs_beta,
    "dec-vs-t": fig_dec_vs_t,
    "fid-vs-t": fig_fid_vs_t,
    "asymptotics-heatmap": fig_asymptotics_heatmap,
    "cut-timeseries": fig_cut_timeseries,
    "onecut-comparison": fig_onecut_comparison,
    "twocut-comparison": fig_twocut_comparison,
}
assert set(RECIPES) == set(FIG_TAGS)


def reproduce_fig(tag: str, cfg: RunConfig) -> ResultTable:
    """Compute the data table for figure ``tag``."""
    if tag not in RECIPES:
        raise UsageError(f"unknown figure tag {tag!r}; choose from {FIG_TAGS}")
    result = RECIPES[tag](cfg)
    if isinstance(result[0], ResultTable):
        table, used = result
    else:
        cols, x, series, used = result
        table = ResultTable(cols)
        for i, xv in enumerate(x):
            table.add_row(xv, *(series[k][i] for k in cols[1:]))
    extra = {f"figure_{k}": v if isinstance(v, str) else format(v, ".17g") for k, v in used.items()}
    has_inf = any(np.isinf(v) for r in table.rows for v in r)
    if has_inf:
        extra["divergence"] = "inf marks complete decoherence (non-integrable low-frequency weight)"
    table.metadata = _metadata(cfg, "quadrature", figure=tag, **extra)
    return table


def plot_table(table: ResultTable, path) -> Path:
    """Render a table: line plot of every column against the first, or a heatmap for grid layouts."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    data = np.array(table.rows, dtype=float)
    if table.metadata.get("figure_layout") == "grid":
        xs, ys = np.unique(data[:, 1]), np.unique(data[:, 0])
        fig, axes = plt.subplots(1, 2, figsize=(10, 4))
        for ax, k in zip(axes, (2, 3)):
            z = data[:, k].reshape(len(ys), len(xs))
            m = ax.pcolormesh(xs, ys, np.where(np.isfinite(z), z, np.nan), shading="auto")
            ax.set_xlabel(table.columns[1])
            ax.set_ylabel(table.columns[0])
            ax.set_title(table.columns[k])
            fig.colorbar(m, ax=ax)
    else:
        fig, ax = plt.subplots(figsize=(6, 4))
        for k, name in enumerate(table.columns[1:], start=1):
            y = data[:, k]
            ax.plot(data[:, 0], np.where(np.isfinite(y), y, np.nan), label=name)
        ax.set_xlabel(table.columns[0])
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
