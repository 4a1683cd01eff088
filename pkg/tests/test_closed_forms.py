import math

import mpmath as mp
import numpy as np
import pytest

from sbsdephasing import closed_forms as cf
from sbsdephasing.indicators import log_decoherence, log_fidelity
from sbsdephasing.spectral import EnvPartition, SpectralDensity

mp.mp.dps = 30


def test_basel():
    assert cf.hurwitz_zeta(2, 1).real == pytest.approx(math.pi**2 / 6, abs=1e-15)


def test_recurrence():
    lhs = cf.hurwitz_zeta(3, 2.5) - cf.hurwitz_zeta(3, 3.5)
    assert abs(lhs - 2.5**-3) <= 1e-12


def test_zeta_brute_force_series():
    # direct sum of 10^6 terms plus the Euler-Maclaurin remainder of the tail
    q, z, N = 1 + 2j, 3.0, 10**6
    n = np.arange(N)
    partial = np.sum((q + n) ** -z)
    w = q + N
    tail = w ** (1 - z) / (z - 1) + 0.5 * w**-z + z / 12 * w ** (-z - 1)
    assert abs(cf.hurwitz_zeta(z, q) - (partial + tail)) <= 1e-12


@pytest.mark.parametrize("z", [1.5, 2.0, 3.0, 4.7, 6.0])
@pytest.mark.parametrize("q", [0.5, 1 + 2j, 11 - 30j, 2.2 + 400j, 1e-3 + 1j, 50 + 1e5j])
def test_zeta_vs_mpmath(z, q):
    ref = complex(mp.zeta(z, mp.mpc(q.real if isinstance(q, complex) else q,
                                     q.imag if isinstance(q, complex) else 0)))
    got = cf.hurwitz_zeta(z, q)
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_zeta_continuation_below_one():
    # internal continuation is used for z < 1 differences
    for z in (0.3, 0.5, 0.9):
        ref = complex(mp.zeta(z, mp.mpc(1.5, -3)))
        assert abs(cf._zeta_em(z, 1.5 - 3j) - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("z,q", [(1.0, 1.0), (0.5, 1.0), (2.0, 0.0), (2.0, -1 + 1j)])
def test_zeta_domain(z, q):
    with pytest.raises(ValueError):
        cf.hurwitz_zeta(z, q)


@pytest.mark.parametrize("q", [1.0, 0.3, 2 + 5j, 1 + 1e4j])
def test_digamma_vs_mpmath(q):
    ref = complex(mp.digamma(mp.mpc(complex(q).real, complex(q).imag)))
    assert abs(cf.digamma(q) - ref) <= 1e-13 * max(1, abs(ref))


def test_polygamma_values():
    assert cf.polygamma(1, 1).real == pytest.approx(math.pi**2 / 6, abs=1e-14)
    assert cf.polygamma(2, 1).real == pytest.approx(-2 * float(mp.zeta(3)), abs=1e-14)
    z = 0.7 + 0.3j
    assert abs(cf.polygamma(1, z) - cf.polygamma(1, z + 1) - 1 / z**2) <= 1e-12
    with pytest.raises(ValueError):
        cf.polygamma(-1, 1.0)


def test_vacuum_small_t_expansion():
    # log|Gamma_vac| ~ -G(s+1) t^2 for small cutoff * t
    s, t = 3.0, 1e-5
    assert cf.log_dec_vacuum(s, 1.0, t) == pytest.approx(-math.gamma(s + 1) * t * t, rel=1e-8)


def test_vacuum_limit():
    # long-time plateau: -2 G(s-1)
    assert cf.log_dec_vacuum(5.0, 1.0, 1e9) == pytest.approx(-12.0, rel=1e-12)


@pytest.mark.parametrize("s", [2.0, 3.0, 4.0])
def test_paths_agree(s):
    for T in (0.1, 1.0, 10.0):
        for t in (0.1, 5.0):
            a = cf.log_dec_thermal(s, T, 1.0, t, path="zeta")
            b = cf.log_dec_thermal(s, T, 1.0, t, path="polygamma")
            assert a == pytest.approx(b, rel=1e-12)
            a = cf.log_fid_thermal(s, T, 1.0, t, path="zeta")
            b = cf.log_fid_thermal(s, T, 1.0, t, path="polygamma")
            assert a == pytest.approx(b, rel=1e-12)


def test_polygamma_path_requires_integer():
    with pytest.raises(ValueError):
        cf.log_dec_thermal(2.5, 1.0, 1.0, 1.0, path="polygamma")


def test_thermal_parts_vanish():
    assert cf.log_dec_thermal(3.0, 0.0, 1.0, 4.0) == 0.0
    assert cf.log_fid_thermal(3.0, 1.0, 1.0, 0.0) == 0.0


def test_s_domain():
    with pytest.raises(ValueError):
        cf.log_dec_vacuum(1.0, 1.0, 1.0)


@pytest.mark.parametrize("s,T,t", [(2.5, 0.7, 3.0), (3.5, 4.0, 0.3), (1.5, 1.0, 2.0)])
def test_non_integer_s_matches_quadrature(s, T, t):
    sd, p = SpectralDensity(s), EnvPartition.uncut()
    assert cf.log_decoherence_closed(s, T, 1.0, t) == pytest.approx(log_decoherence(sd, p, T, t), rel=1e-8)
    assert cf.log_fidelity_closed(s, T, 1.0, t) == pytest.approx(log_fidelity(sd, p, T, t), rel=1e-8)


def test_gamma_rate_vacuum_zero_at_tan():
    # zero of sin(s atan t): t = tan(pi / s)
    for s in (3.0, 4.0, 5.0):
        assert abs(cf.gamma_rate_vacuum(s, 1.0, math.tan(math.pi / s))) < 1e-14
