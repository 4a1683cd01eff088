"""Exact finite-environment dynamics used as ground truth.

Each mode evolves conditionally on the qubit pointer state ``n`` (sigma_z
eigenvalue ``+1`` for ``n = 0`` and ``-1`` for ``n = 1``) by the displacement
``D(+-alpha_k(t))`` with

    alpha_k(t) = (g_k / w_k) (1 - exp(i w_k t)),

the global phase being dropped.  This normalization reproduces the
continuum integrals with ``J(w) = 2 sum_k g_k^2 delta(w - w_k)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np
from scipy import linalg, special

from .indicators import thermal_factor
from .spectral import ModeSet

THERMAL_TRACE_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
FOCK_FLOOR = 15
MAX_DIM = 2 * 41**2


class TruncationError(RuntimeError):
    """Fock truncation loses more weight than the tolerance allows."""


def occupation(omega: float, T: float) -> float:
    """Bose occupation ``1 / (exp(w/T) - 1)``; zero at ``T = 0``."""
    if T == 0:
        return 0.0
    return float(1.0 / math.expm1(omega / T))


def thermal_cutoff(nbar: float, tol: float = THERMAL_TRACE_TOL, floor: int = FOCK_FLOOR) -> int:
    """Smallest cutoff keeping truncated thermal weight >= 1 - tol, at least ``floor``."""
    if nbar == 0:
        return floor
    r = nbar / (nbar + 1.0)
    # missing weight beyond cutoff n is r^(n+1)
    n = math.ceil(math.log(tol) / math.log(r)) - 1
    return max(floor, n)


def default_cutoff(nbar: float, alpha_abs2: float = 0.0) -> int:
    """Thermal cutoff plus displacement headroom ``max(10, ceil(4|alpha|^2))``."""
    n = thermal_cutoff(nbar)
    if alpha_abs2 > 0:
        n += max(10, math.ceil(4.0 * alpha_abs2))
    return n


@dataclass(frozen=True)
class ModeState:
    """One thermal oscillator with its qubit coupling."""

    omega: float
    g: float
    T: float
    fock_cutoff: Optional[int] = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("mode frequency must be positive")
        if self.T < 0:
            raise ValueError("temperature must be >= 0")
        if self.fock_cutoff is None:
            amax = 4.0 * (self.g / self.omega) ** 2
            object.__setattr__(self, "fock_cutoff", default_cutoff(self.nbar, amax))

    @property
    def nbar(self) -> float:
        return occupation(self.omega, self.T)

    def alpha(self, t: float) -> complex:
        return displacement(self.omega, self.g, t)


def displacement(omega, g, t):
    """``alpha(t) = (g / w) (1 - exp(i w t))``; broadcasts over mode arrays."""
    return np.asarray(g) / np.asarray(omega) * (1.0 - np.exp(1j * np.asarray(omega) * t))


def _abs2_alpha(omega, g, t):
    # |alpha|^2 = 4 (g/w)^2 sin^2(w t / 2): no cancellation at small w t
    return 4.0 * (np.asarray(g) / np.asarray(omega)) ** 2 * np.sin(0.5 * np.asarray(omega) * t) ** 2


def mode_decoherence_factor(m: ModeState, t: float) -> complex:
    """``Tr[D(2 alpha) rho_th]`` = ``exp(-2 |alpha|^2 coth(w/2T))`` (real for thermal states)."""
    a2 = float(_abs2_alpha(m.omega, m.g, t))
    return complex(math.exp(-2.0 * a2 * float(thermal_factor(m.omega, m.T, "coth"))))


def mode_fidelity(m: ModeState, t: float) -> float:
    """Generalized overlap of the two conditional states, ``exp(-2 |alpha|^2 tanh(w/2T))``."""
    a2 = float(_abs2_alpha(m.omega, m.g, t))
    return math.exp(-2.0 * a2 * float(thermal_factor(m.omega, m.T, "tanh")))


def product_indicators(ms: ModeSet, T: float, t: float) -> tuple[float, float]:
    """``(log|Gamma|, log B)`` of a mode set: sums of per-mode logarithms."""
    if ms.count == 0:
        return 0.0, 0.0
    a2 = _abs2_alpha(ms.omega, ms.g, t)
    ld = -2.0 * float(np.sum(a2 * thermal_factor(ms.omega, T, "coth")))
    lf = -2.0 * float(np.sum(a2 * thermal_factor(ms.omega, T, "tanh")))
    return ld, lf


# --- truncated Fock space -------------------------------------------------

def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def thermal_state(nbar: float, dim: int) -> np.ndarray:
    """Truncated (not renormalized) thermal density matrix."""
    n = np.arange(dim)
    if nbar == 0:
        p = (n == 0).astype(float)
    else:
        p = (nbar / (nbar + 1.0)) ** n / (nbar + 1.0)
    return np.diag(p)


def displacement_operator(alpha: complex, dim: int) -> np.ndarray:
    """Exact matrix elements ``<m|D(alpha)|n>`` for ``m, n < dim``.

    Uses ``<m|D|n> = sqrt(n!/m!) alpha^(m-n) exp(-|alpha|^2/2) L_n^(m-n)(|alpha|^2)``
    for ``m >= n`` and the conjugate-symmetric form otherwise, so truncation
    does not contaminate the retained block.
    """
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    D = np.zeros((dim, dim), dtype=complex)
    if alpha == 0:
        return np.eye(dim, dtype=complex)
    phase = alpha / abs(alpha)
    m_idx, n_idx = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    lo = np.minimum(m_idx, n_idx)
    k = np.abs(m_idx - n_idx)
    lag = special.eval_genlaguerre(lo, k, x)
    logmag = 0.5 * (special.gammaln(lo + 1) - special.gammaln(lo + k + 1)) + k * 0.5 * math.log(x) - 0.5 * x
    mag = np.exp(logmag) * lag
    below = m_idx >= n_idx
    D[below] = (mag * phase**k)[below]
    D[~below] = (mag * (-np.conj(phase)) ** k)[~below]
    return D


def _kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, mats)


def uhlmann_fidelity(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """``Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))``, the nuclear norm of ``sqrt(rho1) sqrt(rho2)``."""
    r1 = _psd_sqrt(rho1)
    r2 = _psd_sqrt(rho2)
    sv = np.linalg.svd(r1 @ r2, compute_uv=False)
    return float(min(1.0, max(0.0, sv.sum())))


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if not np.allclose(rho, rho.conj().T, atol=PSD_TOL):
        raise ValueError("density matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if vals.min() < -PSD_TOL:
        raise ValueError(f"density matrix has eigenvalue {vals.min():.3e} below -{PSD_TOL}")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


@dataclass(frozen=True)
class PartiallyReducedState:
    """Qubit plus observed modes after tracing out the unobserved ones.

    ``matrix`` is ordered qubit-major: block ``(n, m)`` of size ``env_dim``
    is ``c_nm Gamma_nm rho_f^{nm}``.
    """

    matrix: np.ndarray
    modes: ModeSet
    t: float
    T: float
    dims: tuple
    decoherence: complex

    @property
    def env_dim(self) -> int:
        return int(np.prod(self.dims)) if self.dims else 1

    def block(self, n: int, m: int) -> np.ndarray:
        d = self.env_dim
        return self.matrix[n * d:(n + 1) * d, m * d:(m + 1) * d]


def _conditional_states(modes: ModeSet, T: float, t: float, dims):
    """Per-mode ``(D(+a) rho D(+a)^+, D(+a) rho D(-a)^+, ...)`` keyed by (n, m)."""
    out = {(0, 0): [], (0, 1): [], (1, 0): [], (1, 1): []}
    loss = 0.0
    for w, g, d in zip(modes.omega, modes.g, dims):
        a = complex(displacement(w, g, t))
        rho = thermal_state(occupation(w, T), d)
        Dp = displacement_operator(a, d)
        Dm = displacement_operator(-a, d)
        sign = {0: Dp, 1: Dm}
        for key in out:
            out[key].append(sign[key[0]] @ rho @ sign[key[1]].conj().T)
        loss = max(loss, 1.0 - np.trace(out[(0, 0)][-1]).real, 1.0 - np.trace(out[(1, 1)][-1]).real)
    return out, loss


def _mode_dims(modes: ModeSet, T: float, fock_cutoff) -> tuple:
    if fock_cutoff is None:
        return tuple(
            default_cutoff(occupation(w, T), 4.0 * (g / w) ** 2) + 1 for w, g in zip(modes.omega, modes.g))
    if np.ndim(fock_cutoff) == 0:
        return tuple(int(fock_cutoff) + 1 for _ in range(modes.count))
    return tuple(int(c) + 1 for c in fock_cutoff)


def build_partially_reduced_state(
    modes_observed: ModeSet,
    modes_unobserved: ModeSet,
    qubit_init: np.ndarray,
    T: float,
    t: float,
    fock_cutoff=None,
    *,
    max_dim: int = MAX_DIM,
    trace_tol: float = TRACE_TOL,
) -> PartiallyReducedState:
    """Exact partially reduced state at time ``t``.

    The unobserved modes enter only through the decoherence factor
    ``Gamma_01 = prod_k Tr[D(2 alpha_k) rho_th]``.  ``fock_cutoff`` is a
    maximum occupation (scalar or per mode); by default each mode gets its
    thermal cutoff plus headroom for the largest displacement ``2 g / w``.
    Raises :class:`TruncationError` when a conditional state loses more than
    ``trace_tol`` of its weight.
    """
    qubit_init = np.asarray(qubit_init, dtype=complex)
    if qubit_init.shape != (2, 2):
        raise ValueError("qubit_init must be a 2x2 density matrix")
    dims = _mode_dims(modes_observed, T, fock_cutoff)
    env_dim = int(np.prod(dims)) if dims else 1
    if 2 * env_dim > max_dim:
        raise ValueError(f"Hilbert space dimension {2 * env_dim} exceeds the bound {max_dim}")
    states, loss = _conditional_states(modes_observed, T, t, dims)
    if loss > trace_tol:
        raise TruncationError(
            f"truncated conditional state lost weight {loss:.2e}; increase fock_cutoff")
    gamma01 = 1.0 + 0j
    for w, g in zip(modes_unobserved.omega, modes_unobserved.g):
        gamma01 *= mode_decoherence_factor(ModeState(w, g, T, fock_cutoff=0), t)
    rho = np.zeros((2 * env_dim, 2 * env_dim), dtype=complex)
    for (n, m), mats in states.items():
        coeff = qubit_init[n, m]
        if n != m:
            coeff = coeff * (gamma01 if n == 0 else np.conj(gamma01))
        rho[n * env_dim:(n + 1) * env_dim, m * env_dim:(m + 1) * env_dim] = coeff * _kron_all(mats)
    return PartiallyReducedState(rho, modes_observed, float(t), float(T), dims, complex(gamma01))


def validate_state(state: PartiallyReducedState, tol: float = TRACE_TOL) -> dict:
    """Hermiticity defect, trace defect and smallest eigenvalue of the state."""
    rho = state.matrix
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = float(abs(np.trace(rho) - 1.0))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    return {"hermitian": herm, "trace": tr, "min_eig": min_eig,
            "valid": herm <= tol and tr <= tol and min_eig >= -PSD_TOL}


def trace_norm(a: np.ndarray) -> float:
    return float(np.linalg.svd(a, compute_uv=False).sum())


def sbs_diagnostics(state: PartiallyReducedState) -> tuple[float, float]:
    """``(coherence_norm, conditional_overlap)``; both near 0 signal an SBS.

    The coherence norm is the trace norm of the off-diagonal qubit block; the
    overlap is the Uhlmann fidelity of the normalized conditional states of
    the observed modes.
    """
    coh = trace_norm(state.block(0, 1))
    b00, b11 = state.block(0, 0), state.block(1, 1)
    p0, p1 = np.trace(b00).real, np.trace(b11).real
    if p0 <= 0 or p1 <= 0:
        return coh, 0.0
    return coh, uhlmann_fidelity(b00 / p0, b11 / p1)


def _embed(op: np.ndarray, k: int, dims) -> np.ndarray:
    mats = [np.eye(d) for d in dims]
    mats[k] = op
    return _kron_all(mats)


def conditional_hamiltonian(modes: ModeSet, t: float, dims) -> np.ndarray:
    """``H_{S:fE}(t) = sum_n |n><n| (x) sum_k (+-) g_k (a_k^+ e^{iwt} + a_k e^{-iwt})``."""
    env_dim = int(np.prod(dims)) if dims else 1
    Henv = np.zeros((env_dim, env_dim), dtype=complex)
    for k, (w, g) in enumerate(zip(modes.omega, modes.g)):
        a = annihilation(dims[k])
        h = g * (a.conj().T * np.exp(1j * w * t) + a * np.exp(-1j * w * t))
        Henv += _embed(h, k, dims)
    return np.kron(np.diag([1.0, -1.0]), Henv)


def unobserved_rate(modes_unobserved: ModeSet, T: float, t: float) -> float:
    """``gamma(t) = sum_k 2 g_k^2 coth(w_k/2T) sin(w_k t) / w_k``."""
    if modes_unobserved.count == 0:
        return 0.0
    w, g = modes_unobserved.omega, modes_unobserved.g
    return float(np.sum(2.0 * g**2 * thermal_factor(w, T, "coth") * np.sin(w * t) / w))


def master_equation_residual(
    modes_observed: ModeSet,
    modes_unobserved: ModeSet,
    qubit_init: np.ndarray,
    T: float,
    t: float,
    dt: float,
    fock_cutoff=None,
) -> float:
    """Frobenius norm of ``d rho/dt - L_t[rho]`` with ``d rho/dt`` by central difference.

    ``L_t[rho] = -i [H_{S:fE}(t), rho] + gamma(t) (Z rho Z - rho)`` with
    ``Z = sigma_z (x) 1``.  The residual is ``O(dt^2)`` up to truncation error.
    """
    if not 0 < dt < t:
        raise ValueError("need 0 < dt < t")
    build = lambda tau: build_partially_reduced_state(
        modes_observed, modes_unobserved, qubit_init, T, tau, fock_cutoff)
    st = build(t)
    drho = (build(t + dt).matrix - build(t - dt).matrix) / (2.0 * dt)
    H = conditional_hamiltonian(modes_observed, t, st.dims)
    Z = np.kron(np.diag([1.0, -1.0]), np.eye(st.env_dim))
    rho = st.matrix
    rhs = -1j * (H @ rho - rho @ H) + unobserved_rate(modes_unobserved, T, t) * (Z @ rho @ Z - rho)
    return float(np.linalg.norm(drho - rhs))
