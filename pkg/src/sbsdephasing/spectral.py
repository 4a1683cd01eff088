"""Ohmic-family spectral densities, environment partitions and mode sampling.

Units are hbar = k_B = 1 throughout.  A spectral density is

    J(w) = w**s * cutoff**(1 - s) * exp(-w / cutoff)

and an :class:`EnvPartition` tells which frequencies belong to the observed
fraction of the environment and which to the unobserved remainder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from scipy import special

ArrayLike = Union[float, np.ndarray]
Role = Literal["observed", "unobserved"]

ROLES = ("observed", "unobserved")
KINDS = ("uncut", "single", "window", "soft")


def _check_role(role: str) -> None:
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")


@dataclass(frozen=True)
class SpectralDensity:
    """Ohmic-family spectral density with Ohmicity ``s`` and ``cutoff``."""

    s: float
    cutoff: float = 1.0

    def __post_init__(self):
        if not (self.s > 0 and math.isfinite(self.s)):
            raise ValueError(f"Ohmicity s must be positive, got {self.s}")
        if not (self.cutoff > 0 and math.isfinite(self.cutoff)):
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")

    def __call__(self, omega: ArrayLike) -> ArrayLike:
        w = np.asarray(omega, dtype=float)
        out = w**self.s * self.cutoff ** (1.0 - self.s) * np.exp(-w / self.cutoff)
        return out if out.ndim else float(out)

    def scaled_power(self, omega: ArrayLike, p: float) -> ArrayLike:
        """Return ``cutoff**(1-s) * w**(s+p) * exp(-w/cutoff)``, i.e. ``J(w) * w**p``."""
        w = np.asarray(omega, dtype=float)
        return w ** (self.s + p) * self.cutoff ** (1.0 - self.s) * np.exp(-w / self.cutoff)

    def moment_tail(self, p: float, lower: float) -> float:
        """Exact ``int_lower^inf J(w) w**p dw``; needs ``s + p > -1`` when ``lower = 0``."""
        a = self.s + p + 1.0
        L = self.cutoff
        x = max(lower, 0.0) / L
        if a > 0:
            return float(L**(p + 2.0) * special.gamma(a) * special.gammaincc(a, x))
        if x == 0:
            raise ValueError("moment diverges at the origin")
        return float(L**(p + 2.0) * _upper_gamma_nonpositive(a, x))

    def moment_head(self, p: float, upper: float) -> float:
        """Exact ``int_0^upper J(w) w**p dw``; requires ``s + p > -1``."""
        a = self.s + p + 1.0
        if a <= 0:
            raise ValueError("moment diverges at the origin")
        L = self.cutoff
        return float(L**(p + 2.0) * special.gamma(a) * special.gammainc(a, upper / L))

    def default_omega_max(self, rel: float = 1e-16) -> float:
        """Frequency beyond which J has dropped below ``rel`` times its peak."""
        peak = self.s * self.cutoff
        jpk = self(peak)
        w = peak + self.cutoff
        while self(w) > rel * jpk:
            w += self.cutoff
        return float(w)


def _upper_gamma_nonpositive(a: float, x: float) -> float:
    """``Gamma(a, x)`` for ``a <= 0 < x``, stepping down from ``a + n`` in ``(0, 1]`` with
    ``Gamma(c, x) = (Gamma(c + 1, x) - x**c exp(-x)) / c`` and ``Gamma(0, x) = E1(x)``."""
    n = int(math.floor(-a)) + 1
    b = a + n                                   # in (0, 1]
    g = special.gamma(b) * special.gammaincc(b, x)
    for k in range(n):
        c = b - 1 - k                           # step from Gamma(c + 1, x) down to Gamma(c, x)
        if c == 0:
            g = special.exp1(x)
            continue
        g = (g - x**c * math.exp(-x)) / c
    return float(g)


def evaluate_J(sd: SpectralDensity, omega: ArrayLike) -> ArrayLike:
    """Spectral density at ``omega``; negative frequencies are rejected."""
    if np.any(np.asarray(omega) < 0):
        raise ValueError("spectral density is defined for omega >= 0 only")
    return sd(omega)


def _logistic(x):
    # 1/(1+exp(-x)) written through tanh: no overflow for large |x|
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass(frozen=True)
class EnvPartition:
    """Split of the frequency axis into observed and unobserved parts.

    kind
        ``"uncut"``: both parts see the full density (two independent copies).
        ``"single"``: observed frequencies are ``[0, beta]``.
        ``"window"``: observed frequencies are ``[alpha, beta]``.
        ``"soft"``: ``[alpha, beta]`` with logistic flanks of width ``sigma``.
        With ``alpha == 0`` the lower flank is dropped, giving a soft single cut.

    Use the constructors :meth:`uncut`, :meth:`single_cut`, :meth:`window`
    and :meth:`soft_window` rather than the raw initializer.
    """

    kind: str = "uncut"
    alpha: float = 0.0
    beta: float = math.inf
    sigma: float = 0.0
    _lower_flank: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "uncut":
            return
        if not self.beta > 0 or not math.isfinite(self.beta):
            raise ValueError(f"cut frequency beta must be positive and finite, got {self.beta}")
        if self.kind == "single" and self.alpha != 0.0:
            raise ValueError("a single cut has alpha = 0")
        if self.alpha < 0 or not self.alpha < self.beta:
            raise ValueError(f"need 0 <= alpha < beta, got alpha={self.alpha}, beta={self.beta}")
        if self.kind == "soft":
            if not self.sigma > 0:
                raise ValueError(f"soft cuts need sigma > 0, got {self.sigma}")
            object.__setattr__(self, "_lower_flank", self.alpha > 0)

    @classmethod
    def uncut(cls) -> "EnvPartition":
        return cls("uncut")

    @classmethod
    def single_cut(cls, beta: float) -> "EnvPartition":
        return cls("single", 0.0, beta)

    @classmethod
    def window(cls, beta: float, delta: float | None = None, *, alpha: float | None = None) -> "EnvPartition":
        """Observed window ``[beta - delta, beta]`` (or ``[alpha, beta]``)."""
        if (delta is None) == (alpha is None):
            raise ValueError("give exactly one of delta or alpha")
        lo = beta - delta if alpha is None else alpha
        return cls("window", lo, beta)

    @classmethod
    def soft_window(cls, alpha: float, beta: float, sigma: float) -> "EnvPartition":
        return cls("soft", alpha, beta, sigma)

    def observed_weight(self, omega: ArrayLike) -> ArrayLike:
        w = np.asarray(omega, dtype=float)
        if self.kind == "uncut":
            out = np.ones_like(w)
        elif self.kind == "single":
            out = (w <= self.beta).astype(float)
        elif self.kind == "window":
            out = ((w >= self.alpha) & (w <= self.beta)).astype(float)
        else:
            out = _logistic((self.beta - w) / self.sigma)
            if self._lower_flank:
                out = out * _logistic((w - self.alpha) / self.sigma)
        return out if out.ndim else float(out)

    def unobserved_weight(self, omega: ArrayLike) -> ArrayLike:
        if self.kind == "uncut":
            w = np.asarray(omega, dtype=float)
            out = np.ones_like(w)
            return out if out.ndim else float(out)
        if self.kind == "soft":
            # complement written without 1 - w to keep the far tails exact
            w = np.asarray(omega, dtype=float)
            out = _logistic((w - self.beta) / self.sigma)
            if self._lower_flank:
                lower = _logistic((self.alpha - w) / self.sigma)
                out = out + lower - out * lower
            return out if np.ndim(out) else float(out)
        return 1.0 - self.observed_weight(omega)

    def weight(self, omega: ArrayLike, role: Role) -> ArrayLike:
        _check_role(role)
        return self.observed_weight(omega) if role == "observed" else self.unobserved_weight(omega)

    def support(self, role: Role) -> list[tuple[float, float]]:
        """Intervals outside which the weight for ``role`` vanishes identically."""
        _check_role(role)
        if self.kind in ("uncut", "soft"):
            return [(0.0, math.inf)]
        if role == "observed":
            return [(self.alpha, self.beta)]
        pieces = [(self.beta, math.inf)]
        if self.alpha > 0:
            pieces.insert(0, (0.0, self.alpha))
        return pieces

    def breakpoints(self) -> tuple[float, ...]:
        """Frequencies where the weight changes abruptly (panel boundaries)."""
        if self.kind == "uncut":
            return ()
        pts = [self.beta]
        if self.alpha > 0:
            pts.insert(0, self.alpha)
        return tuple(pts)

    def weight_at_zero(self, role: Role) -> float:
        return float(self.weight(0.0, role))


def observed_weight(p: EnvPartition, omega: ArrayLike) -> ArrayLike:
    """Observed weight in [0, 1]; 1 everywhere for an uncut environment."""
    return p.observed_weight(omega)


def unobserved_weight(p: EnvPartition, omega: ArrayLike) -> ArrayLike:
    """Unobserved weight; the complement of the observed one except when uncut."""
    return p.unobserved_weight(omega)


@dataclass(frozen=True)
class ModeSet:
    """Discrete oscillators with frequencies ``omega`` and couplings ``g``."""

    omega: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.omega, dtype=float)).copy()
        g = np.atleast_1d(np.asarray(self.g, dtype=float)).copy()
        if w.shape != g.shape or w.ndim != 1:
            raise ValueError("omega and g must be 1-d arrays of equal length")
        if np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise ValueError("mode frequencies must be positive and strictly increasing")
        if np.any(g < 0):
            raise ValueError("couplings must be non-negative")
        w.flags.writeable = False
        g.flags.writeable = False
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "g", g)

    @classmethod
    def empty(cls) -> "ModeSet":
        return cls(np.empty(0), np.empty(0))

    @property
    def count(self) -> int:
        return int(self.omega.size)

    def __len__(self) -> int:
        return self.count

    @property
    def modes(self) -> list[tuple[float, float]]:
        return list(zip(self.omega.tolist(), self.g.tolist()))

    def select(self, idx) -> "ModeSet":
        return ModeSet(self.omega[idx], self.g[idx])


def discretize(
    sd: SpectralDensity,
    p: EnvPartition,
    role: Role,
    n_modes: int,
    omega_max: float | None = None,
) -> ModeSet:
    """Midpoint-rule sampling of ``J * weight`` into ``n_modes`` oscillators.

    Bins of width ``dw = omega_max / n_modes`` are centred on
    ``w_k = (k - 1/2) dw`` and carry ``g_k**2 = J(w_k) weight(w_k) dw / 2``,
    so ``2 * sum_k g_k**2 f(w_k)`` is the midpoint rule for
    ``int J(w) weight(w) f(w) dw``.
    """
    _check_role(role)
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if omega_max is None:
        omega_max = sd.default_omega_max()
    if not omega_max > 0:
        raise ValueError("omega_max must be positive")
    dw = omega_max / n_modes
    w = (np.arange(n_modes) + 0.5) * dw
    g2 = sd(w) * p.weight(w, role) * dw / 2.0
    return ModeSet(w, np.sqrt(g2))
