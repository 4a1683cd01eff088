"""Special-function expressions for the uncut indicator functions.

With ``z = s - 1``, ``a = T / cutoff`` and ``b = a / 2`` the uncut integrals
reduce to Hurwitz zeta functions::

    log|Gamma_vac| = -2 G(z) [1 - cos(z atan(cutoff t)) / (1 + cutoff^2 t^2)^(z/2)]
    log|Gamma_th|  = -4 G(z) a^z [zeta(z, 1+a) - Re zeta(z, 1+a-iTt)]
    log B_th       = -4 G(z) b^z [zeta(z, 1+b) - zeta(z, 1/2+b)
                                  - Re zeta(z, 1+b-iTt/2) + Re zeta(z, 1/2+b-iTt/2)]

and ``log B = log|Gamma_vac| + log B_th``.  They follow from expanding
``coth`` and ``tanh`` in powers of ``exp(-w/T)`` and integrating term by term.
For ``z = 1`` the zeta differences become digamma differences, and for
integer ``z >= 2`` the polygamma form ``zeta(m+1, q) = (-1)^(m+1) psi_m(q) / m!``
is available as an alternative path.
"""
from __future__ import annotations

import math
from typing import Literal

import numpy as np
from scipy import special

Path = Literal["auto", "zeta", "polygamma"]

# B_2, B_4, ..., B_20
_BERNOULLI = [
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510,
    43867 / 798, -174611 / 330,
]
EM_ORDER = 8
_SHIFT_RE = 10.0
_TARGET = 1e-17


def _rising(z: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= z + j
    return out


def _zeta_em(z: float, q: complex) -> complex:
    """Euler-Maclaurin Hurwitz zeta; valid for any real ``z != 1`` and ``Re q > 0``.

    The argument is shifted by an integer ``N`` until ``Re(q + N) >= 10`` and
    the first omitted correction term, inflated by the sector factor
    ``sec(arg)^(z + 2p + 1)``, is below ``1e-17`` relative; the shift grows
    until that bound holds.
    """
    q = complex(q)
    n = max(0, math.ceil(_SHIFT_RE - q.real))
    while True:
        w = q + n
        phi = abs(math.atan2(w.imag, w.real))
        sec = 1.0 / math.cos(phi)
        p = EM_ORDER
        k = 2 * p + 2
        omitted = abs(_BERNOULLI[p] / math.factorial(k) * _rising(z, k - 1)) * abs(w) ** (-z - k + 1)
        scale = abs(w) ** (1 - z) / max(abs(z - 1), 1e-300)
        if omitted * sec ** (z + k - 1) <= _TARGET * max(scale, 1e-300):
            break
        n += max(4, n // 2)
    head = sum((q + j) ** (-z) for j in range(n)) if n else 0j
    logw = np.log(w)
    tail = np.exp((1 - z) * logw) / (z - 1) + 0.5 * np.exp(-z * logw)
    inv_w2 = 1.0 / (w * w)
    term = np.exp(-(z + 1) * logw)          # w^(-z-1)
    for j in range(1, p + 1):
        tail += _BERNOULLI[j - 1] / math.factorial(2 * j) * _rising(z, 2 * j - 1) * term
        term *= inv_w2
    return complex(head + tail)


def hurwitz_zeta(z: float, q: complex) -> complex:
    """``zeta(z, q) = sum_{n>=0} (q + n)^(-z)`` for real ``z > 1`` and ``Re q > 0``.

    Absolute error is below about ``1e-12`` for ``|q| <= 1e6``.
    """
    z = float(z)
    q = complex(q)
    if not z > 1:
        raise ValueError(f"hurwitz_zeta needs z > 1, got {z}")
    if not q.real > 0:
        raise ValueError(f"hurwitz_zeta needs Re q > 0, got {q}")
    return _zeta_em(z, q)


def digamma(q: complex) -> complex:
    """Digamma function for ``Re q > 0`` by upward shift and asymptotic series."""
    q = complex(q)
    if not q.real > 0:
        raise ValueError(f"digamma needs Re q > 0, got {q}")
    n = max(0, math.ceil(_SHIFT_RE - q.real))
    head = sum(1.0 / (q + j) for j in range(n)) if n else 0j
    w = q + n
    inv_w2 = 1.0 / (w * w)
    term = inv_w2
    series = 0j
    for j in range(1, EM_ORDER + 1):
        series += _BERNOULLI[j - 1] / (2 * j) * term
        term *= inv_w2
    return complex(np.log(w) - 0.5 / w - series - head)


def polygamma(m: int, z: complex) -> complex:
    """``psi^(m)(z) = (-1)^(m+1) m! zeta(m + 1, z)``; ``m = 0`` gives the digamma."""
    if int(m) != m or m < 0:
        raise ValueError(f"polygamma order must be a non-negative integer, got {m}")
    m = int(m)
    if m == 0:
        return digamma(z)
    return (-1) ** (m + 1) * math.factorial(m) * hurwitz_zeta(m + 1, z)


def _check_s(s: float) -> None:
    if not s > 1:
        raise ValueError(f"closed forms need s > 1 (s = 1 is covered by quadrature), got {s}")


def log_dec_vacuum(s: float, cutoff: float, t: float) -> float:
    """Zero-temperature ``log|Gamma(t)|`` for the uncut density."""
    _check_s(s)
    z = s - 1.0
    x = cutoff * t
    # 1 - Re (1 - ix)^(-z), arranged to avoid cancellation at small x
    re_w = -0.5 * z * math.log1p(x * x)
    im_w = z * math.atan(x)
    one_minus = -math.expm1(re_w) * math.cos(im_w) + 2.0 * math.sin(0.5 * im_w) ** 2
    return -2.0 * math.gamma(z) * one_minus


def _zeta_diff(z: float, q: complex, shift: complex) -> complex:
    """``zeta(z, q) - zeta(z, q + shift)``, continued through ``z = 1``."""
    if z == 1.0:
        return digamma(q + shift) - digamma(q)
    return _zeta_em(z, q) - _zeta_em(z, q + shift)


def _integer_order(s: float) -> int:
    m = round(s) - 2
    if abs(s - round(s)) > 0 or m < 0:
        raise ValueError(f"the polygamma path needs integer s >= 2, got {s}")
    return m


def _zeta_via_polygamma(m: int, q: complex) -> complex:
    # zeta(m+1, q) = (-1)^(m+1) psi_m(q) / m!
    return (-1) ** (m + 1) * polygamma(m, q) / math.factorial(m)


def _diff(z, q, shift, path, s):
    if path == "polygamma":
        m = _integer_order(s)
        if m == 0:
            return digamma(q + shift) - digamma(q)
        return _zeta_via_polygamma(m, q) - _zeta_via_polygamma(m, q + shift)
    return _zeta_diff(z, q, shift)


def _resolve(path: Path, s: float) -> str:
    if path == "auto":
        return "polygamma" if float(s).is_integer() else "zeta"
    if path not in ("zeta", "polygamma"):
        raise ValueError(f"unknown path {path!r}")
    return path


def log_dec_thermal(s: float, T: float, cutoff: float, t: float, path: Path = "auto") -> float:
    """Thermal part of ``log|Gamma(t)|``; zero at ``T = 0`` and at ``t = 0``."""
    _check_s(s)
    if T < 0:
        raise ValueError("temperature must be >= 0")
    if T == 0 or t == 0:
        return 0.0
    path = _resolve(path, s)
    z = s - 1.0
    a = T / cutoff
    d = _diff(z, 1.0 + a, -1j * T * t, path, s)
    return -4.0 * math.gamma(z) * a**z * d.real


def log_fid_thermal(s: float, T: float, cutoff: float, t: float, path: Path = "auto") -> float:
    """Thermal part of ``log B(t)``, so that ``log B = log_dec_vacuum + log_fid_thermal``."""
    _check_s(s)
    if T < 0:
        raise ValueError("temperature must be >= 0")
    if T == 0 or t == 0:
        return 0.0
    path = _resolve(path, s)
    z = s - 1.0
    b = T / (2.0 * cutoff)
    shift = -0.5j * T * t
    bracket = _diff(z, 1.0 + b, shift, path, s) - _diff(z, 0.5 + b, shift, path, s)
    return -4.0 * math.gamma(z) * b**z * bracket.real


def log_decoherence_closed(s: float, T: float, cutoff: float, t: float, path: Path = "auto") -> float:
    """Uncut ``log|Gamma(t)|`` = vacuum + thermal parts."""
    return log_dec_vacuum(s, cutoff, t) + log_dec_thermal(s, T, cutoff, t, path)


def log_fidelity_closed(s: float, T: float, cutoff: float, t: float, path: Path = "auto") -> float:
    """Uncut ``log B(t)`` = vacuum part of ``log|Gamma|`` + thermal fidelity part."""
    return log_dec_vacuum(s, cutoff, t) + log_fid_thermal(s, T, cutoff, t, path)


def gamma_rate_vacuum(s: float, cutoff: float, t: float) -> float:
    """Zero-temperature uncut rate ``G(s) cutoff sin(s atan(cutoff t)) / (1 + cutoff^2 t^2)^(s/2)``."""
    x = cutoff * t
    return float(special.gamma(s) * cutoff * math.sin(s * math.atan(x)) / (1.0 + x * x) ** (0.5 * s))
