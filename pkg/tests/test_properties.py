"""Property-based checks over randomized physical parameters."""
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from sbsdephasing import closed_forms as cf
from sbsdephasing.indicators import log_decoherence, log_fidelity, thermal_factor
from sbsdephasing.oracle import ModeState, mode_decoherence_factor, mode_fidelity, uhlmann_fidelity
from sbsdephasing.spectral import EnvPartition, ModeSet, SpectralDensity
from sbsdephasing.tables import ResultTable, read_csv

SETTINGS = settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])

s_vals = st.floats(0.5, 6.0)
temps = st.floats(0.05, 10.0)
times = st.floats(0.01, 30.0)
partitions = st.one_of(
    st.just(EnvPartition.uncut()),
    st.floats(0.2, 8.0).map(EnvPartition.single_cut),
    st.tuples(st.floats(0.1, 4.0), st.floats(0.2, 4.0)).map(lambda ab: EnvPartition.window(ab[0] + ab[1], alpha=ab[0])),
)


@SETTINGS
@given(s=s_vals, T=temps, t=times, p=partitions)
def test_logs_nonpositive(s, T, t, p):
    sd = SpectralDensity(s)
    assert log_decoherence(sd, p, T, t) <= 0.0
    assert log_fidelity(sd, p, T, t) <= 0.0


@SETTINGS
@given(s=s_vals, T=temps, t=times, p=partitions)
def test_decoherence_below_fidelity_on_same_weight(s, T, t, p):
    # coth >= tanh pointwise, so |Gamma| <= B with identical weight
    sd = SpectralDensity(s)
    ld = log_decoherence(sd, p, T, t, role="observed")
    lf = log_fidelity(sd, p, T, t, role="observed")
    assert ld <= lf * (1 - 1e-9) + 1e-15


@SETTINGS
@given(w=st.floats(1e-6, 50.0), T=st.floats(1e-3, 50.0))
def test_thermal_factor_bounds(w, T):
    c = float(thermal_factor(w, T, "coth"))
    t = float(thermal_factor(w, T, "tanh"))
    assert c >= 1.0 >= t > 0.0
    assert math.isclose(c * t, 1.0, rel_tol=1e-6)


@SETTINGS
@given(w=st.floats(0.1, 5.0), g=st.floats(0.0, 2.0), T=st.floats(0.0, 5.0), t=st.floats(0.0, 20.0))
def test_mode_quantities_periodic_and_ordered(w, g, T, t):
    m = ModeState(w, g, T, fock_cutoff=1)
    period = 2 * math.pi / w
    assert math.isclose(mode_fidelity(m, t + period), mode_fidelity(m, t), rel_tol=1e-7, abs_tol=1e-300)
    assert abs(mode_decoherence_factor(m, t)) <= mode_fidelity(m, t) * (1 + 1e-12)


@SETTINGS
@given(z=st.floats(1.1, 7.0), re=st.floats(0.05, 50.0), im=st.floats(-500.0, 500.0))
def test_zeta_recurrence(z, re, im):
    q = complex(re, im)
    lhs = cf.hurwitz_zeta(z, q) - cf.hurwitz_zeta(z, q + 1)
    rhs = q ** (-z)
    assert abs(lhs - rhs) <= 1e-11 * max(1.0, abs(rhs), abs(cf.hurwitz_zeta(z, q)))


@SETTINGS
@given(z=st.floats(1.1, 7.0), re=st.floats(0.05, 50.0), im=st.floats(0.0, 500.0))
def test_zeta_conjugate_symmetry(z, re, im):
    a = cf.hurwitz_zeta(z, complex(re, im))
    b = cf.hurwitz_zeta(z, complex(re, -im))
    assert abs(a - b.conjugate()) <= 1e-13 * max(1.0, abs(a))


@SETTINGS
@given(s=st.integers(2, 6).map(float), T=st.floats(0.05, 20.0), t=st.floats(0.01, 40.0))
def test_closed_form_paths_agree(s, T, t):
    a = cf.log_decoherence_closed(s, T, 1.0, t, path="zeta")
    b = cf.log_decoherence_closed(s, T, 1.0, t, path="polygamma")
    assert math.isclose(a, b, rel_tol=1e-10, abs_tol=1e-14)


def _random_density(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


@SETTINGS
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_uhlmann_symmetric_and_bounded(seed, n):
    rng = np.random.default_rng(seed)
    r1, r2 = _random_density(rng, n), _random_density(rng, n)
    f12, f21 = uhlmann_fidelity(r1, r2), uhlmann_fidelity(r2, r1)
    assert 0.0 <= f12 <= 1.0
    assert abs(f12 - f21) <= 1e-9
    assert math.isclose(uhlmann_fidelity(r1, r1), 1.0, abs_tol=1e-9)


@SETTINGS
@given(w=st.lists(st.floats(0.01, 100.0), min_size=1, max_size=20, unique=True),
       data=st.data())
def test_modeset_accepts_sorted_positive(w, data):
    w = sorted(w)
    if any(b <= a for a, b in zip(w, w[1:])):
        return
    g = data.draw(st.lists(st.floats(0.0, 3.0), min_size=len(w), max_size=len(w)))
    ms = ModeSet(w, g)
    assert ms.count == len(w)


@SETTINGS
@given(rows=st.lists(st.tuples(st.floats(-1e300, 1e300), st.floats(allow_nan=False)), min_size=1, max_size=10))
def test_csv_roundtrip_exact(tmp_path_factory, rows):
    t = ResultTable(["a", "b"])
    for r in rows:
        t.add_row(*r)
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    back = read_csv(t.write(path))
    assert back.rows == [[a + 0.0, b + 0.0] for a, b in rows]
