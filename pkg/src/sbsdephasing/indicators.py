"""Indicator functions of the pure-dephasing spin-boson model.

For a spectral density ``J``, a partition weight ``u`` and temperature ``T``::

    log|Gamma(t)| = -2 int u coth(w/2T) J(w) (1 - cos wt) / w^2 dw
    log B(t)      = -2 int u tanh(w/2T) J(w) (1 - cos wt) / w^2 dw
    gamma(t)      =    int u coth(w/2T) J(w) sin(wt) / w dw

so that ``gamma = -(1/2) d/dt log|Gamma|``; with this sign a negative
``gamma`` marks non-Markovian evolution.  ``T = 0`` is the exact vacuum
limit, ``coth = tanh = 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np
from scipy import optimize

from .quadrature import DEFAULT_SPEC, QuadSpec, integrate, integrate_oscillatory
from .spectral import EnvPartition, Role, SpectralDensity

Factor = Literal["coth", "tanh", "one"]

# below LAURENT_FRACTION * T the hyperbolic cotangent uses its Laurent series
LAURENT_FRACTION = 1e-3
NM_GRID = 2000
NM_ROOT_TOL = 1e-8
NM_CONVERGENCE = 1e-3
NM_HORIZON = 50.0


def thermal_factor(omega, T: float, factor: Factor):
    """``coth(w/2T)``, ``tanh(w/2T)`` or 1, with the ``T = 0`` limit exact."""
    w = np.asarray(omega, dtype=float)
    if factor == "one" or T == 0:
        return np.ones_like(w)
    with np.errstate(over="ignore"):         # subnormal T: x = inf, tanh saturates correctly
        x = w / (2.0 * T)
    if factor == "tanh":
        return np.tanh(x)
    if factor != "coth":
        raise ValueError(f"unknown thermal factor {factor!r}")
    small = w < LAURENT_FRACTION * T
    with np.errstate(divide="ignore"):
        big = 1.0 / np.tanh(np.where(small, 1.0, x))
        laurent = 1.0 / x + x / 3.0
    return np.where(small, laurent, big)


def _check_T(T: float) -> None:
    if not (T >= 0 and math.isfinite(T)):
        raise ValueError(f"temperature must be finite and >= 0, got {T}")


def _envelope(sd, p, role, T, factor, power):
    def env(w):
        return p.weight(w, role) * thermal_factor(w, T, factor) * sd.scaled_power(w, power)
    return env


def _tail(sd, T, factor, power):
    def bound(W):
        th = 1.0 / math.tanh(W / (2.0 * T)) if (factor == "coth" and T > 0) else 1.0
        return th * sd.moment_tail(power, W)
    return bound


MAX_GRADING = 8
_KERNEL_ORDER = {None: 0, "1-cos": 2, "sin": 1}


def _grading(sd, T, factor, power, kernel) -> int:
    """Head substitution order for an integrand ``~ w**e`` at the origin, ``-1 < e < 0``."""
    e = sd.s + power + _KERNEL_ORDER[kernel]
    if T > 0:
        e += {"coth": -1, "tanh": 1, "one": 0}[factor]
    if e >= 0:
        return 1
    if e <= -1:                                 # not integrable; let the quadrature report it
        return MAX_GRADING
    return min(MAX_GRADING, math.ceil(2.0 / (e + 1.0)))


def _weighted_integral(sd, p, role, T, factor, power, kernel, t, spec):
    """``int u(w) F(w/2T) J(w) w**power K(w t) dw`` over the support of ``u``."""
    env = _envelope(sd, p, role, T, factor, power)
    tail = _tail(sd, T, factor, power)
    bps = p.breakpoints()
    total = err = 0.0
    for lo, hi in p.support(role):
        m = _grading(sd, T, factor, power, kernel) if lo == 0 else 1
        if kernel is None:
            v, e = integrate(env, lo, hi, spec, breakpoints=bps, tail=tail, grading=m)
        else:
            v, e = integrate_oscillatory(env, kernel, t, lo, hi, spec, breakpoints=bps, tail=tail, grading=m)
        total += v
        err += e
    return total, err


def _map_times(fn, t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("times must be >= 0")
    if arr.ndim == 0:
        return fn(float(arr))
    return np.array([fn(float(x)) for x in arr.ravel()]).reshape(arr.shape)


def log_decoherence(sd: SpectralDensity, p: EnvPartition, T: float, t,
                    role: Role = "unobserved", spec: QuadSpec = DEFAULT_SPEC):
    """``log|Gamma(t)|`` from the frequencies weighted for ``role``."""
    _check_T(T)
    return _map_times(
        lambda x: -2.0 * _weighted_integral(sd, p, role, T, "coth", -2.0, "1-cos", x, spec)[0], t)


def log_fidelity(sd: SpectralDensity, p: EnvPartition, T: float, t,
                 role: Role = "observed", spec: QuadSpec = DEFAULT_SPEC):
    """``log B(t)``: generalized overlap of the conditional observed-environment states."""
    _check_T(T)
    return _map_times(
        lambda x: -2.0 * _weighted_integral(sd, p, role, T, "tanh", -2.0, "1-cos", x, spec)[0], t)


def gamma_rate(sd: SpectralDensity, p: EnvPartition, T: float, t,
               role: Role = "unobserved", spec: QuadSpec = DEFAULT_SPEC):
    """Canonical decoherence rate ``gamma(t) = -(1/2) d/dt log|Gamma(t)|``."""
    _check_T(T)
    return _map_times(
        lambda x: _weighted_integral(sd, p, role, T, "coth", -1.0, "sin", x, spec)[0], t)


def gamma_rate_highT(sd: SpectralDensity, p: EnvPartition, T: float, t,
                     role: Role = "unobserved", spec: QuadSpec = DEFAULT_SPEC):
    """Leading high-temperature rate ``2T int u J(w) sin(wt) / w^2 dw``.

    Obtained from ``coth(x) ~ 1/x``; valid for ``T`` well above ``s * cutoff``.
    """
    _check_T(T)
    if T == 0:
        raise ValueError("the high-temperature rate needs T > 0")
    return _map_times(
        lambda x: 2.0 * T * _weighted_integral(sd, p, role, T, "one", -2.0, "sin", x, spec)[0], t)


def _head_length(sd: SpectralDensity, p: EnvPartition, role: Role, T: float) -> float:
    eps = LAURENT_FRACTION * (min(T, sd.cutoff) if T > 0 else sd.cutoff)
    first_hi = p.support(role)[0][1]
    for b in (first_hi, *p.breakpoints()):
        eps = min(eps, 0.5 * b)
    return eps


def _asymptotic(sd, p, role, T, factor, spec):
    """``-2 int u F J / w^2 dw``; ``-inf`` when the origin is non-integrable."""
    _check_T(T)
    s = sd.s
    u0 = p.weight_at_zero(role)
    touches_zero = p.support(role)[0][0] == 0.0 and u0 > 0
    # leading small-w power of F(w) J(w) / w^2
    if T == 0 or factor == "one":
        lead = s - 2.0
    elif factor == "coth":
        lead = s - 3.0
    else:
        lead = s - 1.0
    if touches_zero and lead <= -1.0:
        return -math.inf
    if not touches_zero:
        return -2.0 * _weighted_integral(sd, p, role, T, factor, -2.0, None, 0.0, spec)[0]
    eps = _head_length(sd, p, role, T)
    # exact incomplete-gamma moments of the leading Laurent terms on [0, eps]
    if T == 0 or factor == "one":
        head = sd.moment_head(-2.0, eps)
    elif factor == "coth":
        head = 2.0 * T * sd.moment_head(-3.0, eps) + sd.moment_head(-1.0, eps) / (6.0 * T)
    else:
        head = sd.moment_head(-1.0, eps) / (2.0 * T) - sd.moment_head(1.0, eps) / (24.0 * T**3)
    head *= u0
    env = _envelope(sd, p, role, T, factor, -2.0)
    tail = _tail(sd, T, factor, -2.0)
    body = 0.0
    for lo, hi in p.support(role):
        lo = max(lo, eps)
        if hi > lo:
            body += integrate(env, lo, hi, spec, breakpoints=p.breakpoints(), tail=tail)[0]
    return -2.0 * (head + body)


def asymptotic_log_decoherence(sd: SpectralDensity, p: EnvPartition, T: float,
                               role: Role = "unobserved", spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Long-time limit of ``log|Gamma|``; ``-inf`` signals complete decoherence.

    The cosine term averages out, leaving ``-2 int u coth J / w^2``.  For
    ``T > 0`` this diverges when ``s <= 2`` and the weight reaches ``w = 0``.
    """
    return _asymptotic(sd, p, role, T, "coth", spec)


def asymptotic_log_fidelity(sd: SpectralDensity, p: EnvPartition, T: float,
                            role: Role = "observed", spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Long-time limit of ``log B``; finite for ``s > 0`` at any ``T > 0``."""
    return _asymptotic(sd, p, role, T, "tanh", spec)


@dataclass(frozen=True)
class IndicatorSeries:
    times: np.ndarray
    log_dec: np.ndarray
    log_fid: np.ndarray
    gamma: np.ndarray
    method: str = "quadrature"


def indicator_series(sd: SpectralDensity, p: EnvPartition, T: float, times,
                     method: str = "quadrature", spec: QuadSpec = DEFAULT_SPEC) -> IndicatorSeries:
    """Evaluate ``log|Gamma|``, ``log B`` and ``gamma`` on a time grid.

    ``method="closed_form"`` uses the special-function expressions, available
    for the uncut density with ``s > 1``; ``gamma`` is always from quadrature.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be a strictly increasing 1-d grid")
    if method == "quadrature":
        ld = log_decoherence(sd, p, T, times, spec=spec)
        lf = log_fidelity(sd, p, T, times, spec=spec)
    elif method == "closed_form":
        if p.kind != "uncut":
            raise ValueError("closed forms exist only for the uncut spectral density")
        from . import closed_forms as cf
        ld = np.array([cf.log_decoherence_closed(sd.s, T, sd.cutoff, x) for x in times])
        lf = np.array([cf.log_fidelity_closed(sd.s, T, sd.cutoff, x) for x in times])
    else:
        raise ValueError(f"unknown method {method!r}")
    g = gamma_rate(sd, p, T, times, spec=spec)
    return IndicatorSeries(times, ld, lf, g, method)


@dataclass(frozen=True)
class NMResult:
    """Non-Markovianity ``N = -int_{gamma<0} gamma dt`` on ``[0, t_max]``.

    ``extended_value`` is the same integral up to ``2 t_max``; ``converged``
    is set when the two agree to ``NM_CONVERGENCE`` relative.
    """

    value: float
    negative_intervals: tuple
    t_max: float
    converged: bool
    extended_value: float


def _sign_changes(g: np.ndarray) -> np.ndarray:
    sg = np.sign(g)
    return np.nonzero(sg[1:-1] * sg[2:] < 0)[0] + 1


def non_markovianity(
    sd: SpectralDensity,
    p: EnvPartition,
    T: float,
    t_max: Optional[float] = None,
    *,
    role: Role = "unobserved",
    rate: Optional[Callable] = None,
    n_grid: int = NM_GRID,
    spec: QuadSpec = DEFAULT_SPEC,
) -> NMResult:
    """Integrate the negative lobes of the decoherence rate.

    ``gamma`` is sampled on ``n_grid`` uniform steps over ``[0, t_max]`` and
    continued with the same step to ``2 t_max``; sign changes are refined by
    Brent's method to ``NM_ROOT_TOL / cutoff`` and each negative lobe is
    integrated adaptively.  ``rate`` defaults to :func:`gamma_rate`; pass
    :func:`gamma_rate_highT` for the high-temperature approximation.
    """
    _check_T(T)
    if t_max is None:
        t_max = NM_HORIZON / sd.cutoff
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    rate = gamma_rate if rate is None else rate

    def g(t):
        return rate(sd, p, T, t, role=role, spec=spec)

    h = t_max / n_grid
    times = h * np.arange(2 * n_grid + 1)
    vals = g(times)
    crossings = _sign_changes(vals)
    if crossings.size > 1 and np.min(np.diff(crossings)) < 3:
        # crossings closer than the grid resolves: one pass at half spacing
        mids = times[:-1] + 0.5 * h
        fine_t = np.empty(times.size + mids.size)
        fine_t[0::2], fine_t[1::2] = times, mids
        fine_v = np.empty_like(fine_t)
        fine_v[0::2], fine_v[1::2] = vals, g(mids)
        times, vals = fine_t, fine_v
        crossings = _sign_changes(vals)

    xtol = NM_ROOT_TOL / sd.cutoff
    roots = []
    for i in crossings:
        a, b = times[i - 1] if vals[i] == 0 else times[i], times[i + 1]
        try:
            roots.append(optimize.brentq(g, a, b, xtol=xtol))
        except ValueError:
            warnings.warn(f"unresolved sign change of gamma near t={times[i]:.6g}; "
                          "try a finer grid", RuntimeWarning)
    # each root toggles the sign; gamma > 0 just after t = 0
    intervals, start = [], None
    for r in roots:
        if start is None:
            start = r
        else:
            intervals.append((start, r))
            start = None
    if start is not None:
        intervals.append((start, times[-1]))

    outer = QuadSpec(rel_tol=1e-8, abs_tol=1e-12, max_depth=30)

    def lobe_sum(horizon):
        total = 0.0
        for a, b in intervals:
            b = min(b, horizon)
            if b > a:
                total -= integrate(g, a, b, outer)[0]
        return max(total, 0.0)

    value = lobe_sum(t_max)
    extended = lobe_sum(times[-1])
    if value == 0.0:
        converged = extended == 0.0
    else:
        converged = abs(extended - value) <= NM_CONVERGENCE * value
    in_range = tuple((a, min(b, t_max)) for a, b in intervals if a < t_max)
    return NMResult(value, in_range, float(t_max), bool(converged), extended)
