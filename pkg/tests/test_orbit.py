import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quartic_geometry.errors import DomainError
from quartic_geometry.model import SystemParams, potential
from quartic_geometry.orbit import (
    action_of_energy,
    classical_metric,
    cmt_numeric,
    energy_of_action,
    integrate_orbit,
    omega_of_action,
    orbit_fourier,
    period_of_energy,
    separatrix_action,
    turning_points,
)
from quartic_geometry.tables import eval_cmt_series

# Independent oracle: scipy.integrate.quad on sqrt(2(E - V)) with brentq
# inversion; period by quad after q = q_plus sin t.
QUAD_E_K1 = 0.5030889310076421  # k=1, lam=0.2, I=0.5
QUAD_OMEGA_K1 = 1.0122851856969313
QUAD_E_DW = -6.7992511066486205  # k=-1, lam=0.2, I=0.5, one well


def test_turning_points():
    qm, qp = turning_points(0.5, SystemParams(1, 1e-12))
    assert (qm, qp) == pytest.approx((-1.0, 1.0), rel=1e-10)
    p = SystemParams(-1, 0.2)
    qm, qp = turning_points(-7.4, p, "right")
    assert 0 < qm < math.sqrt(30) < qp
    assert potential(qm, p) == pytest.approx(-7.4, rel=1e-12)
    assert potential(qp, p) == pytest.approx(-7.4, rel=1e-12)
    lm, lp = turning_points(-7.4, p, "left")
    assert (lm, lp) == pytest.approx((-qp, -qm))
    with pytest.raises(DomainError):
        turning_points(0.1, p, "right")
    with pytest.raises(DomainError):
        turning_points(-7.4, p, None)
    with pytest.raises(DomainError):
        turning_points(-0.1, SystemParams(1, 0.2))


def test_harmonic_action():
    p = SystemParams(4, 1e-12)
    assert action_of_energy(1.0, p) == pytest.approx(0.5, rel=1e-10)
    assert omega_of_action(0.3, p) == pytest.approx(2.0, rel=1e-10)


def test_against_quad_oracle():
    p = SystemParams(1, 0.2)
    assert energy_of_action(0.5, p) == pytest.approx(QUAD_E_K1, rel=1e-12)
    assert omega_of_action(0.5, p) == pytest.approx(QUAD_OMEGA_K1, rel=1e-12)
    assert energy_of_action(0.5, SystemParams(-1, 0.2), "left") == pytest.approx(QUAD_E_DW, rel=1e-12)


def test_first_order_perturbation():
    p = SystemParams(1, 0.2)
    assert energy_of_action(0.5, p) == pytest.approx(0.503125, abs=2e-4)
    assert omega_of_action(0.5, p) == pytest.approx(1.0125, abs=5e-4)


def test_double_well_small_action():
    assert omega_of_action(1e-4, SystemParams(-1, 0.2), "left") == pytest.approx(math.sqrt(2), abs=1e-3)


def test_separatrix():
    p = SystemParams(-1, 0.2)
    assert separatrix_action(p) == pytest.approx(4 / (math.pi * 0.2))
    assert action_of_energy(-1e-10, p, "right") == pytest.approx(separatrix_action(p), rel=1e-4)
    with pytest.raises(DomainError):
        energy_of_action(separatrix_action(p) * 1.01, p, "left")
    with pytest.raises(DomainError):
        separatrix_action(SystemParams(1, 0.2))


def test_orbit_invariants():
    p = SystemParams(-1, 0.2)
    orb = integrate_orbit(0.5, p, "right")
    assert orb.omega * orb.T == pytest.approx(2 * math.pi, rel=1e-15)
    assert orb.samples.min() > 0
    assert orb.energy_drift < 1e-10 * abs(orb.E)
    assert orb.samples[0] == orb.q_minus


def test_harmonic_fourier():
    fd = orbit_fourier(0.5, SystemParams(1, 1e-12))
    assert fd.beta1[0].real == pytest.approx(0.25, abs=1e-10)
    assert fd.beta1[2].real == pytest.approx(-0.125, abs=1e-10)
    assert cmt_numeric(fd).g11 == pytest.approx(0.0078125, rel=1e-9)


def test_selection_and_reality():
    fd = orbit_fourier(0.5, SystemParams(1, 0.2))
    for b in (fd.beta1, fd.beta2):
        assert np.abs(b[1::2]).max() < 1e-12
    fd = orbit_fourier(0.5, SystemParams(-1, 0.2), "left")
    for b in (fd.beta1, fd.beta2):
        scale = np.abs(b).max()
        assert np.abs(b[0::2].imag).max() < 1e-10 * scale
        assert np.abs(b[1::2].real).max() < 1e-10 * scale


def test_tail_decay():
    for p, well in ((SystemParams(1, 0.2), None), (SystemParams(-1, 0.2), "left")):
        fd = orbit_fourier(0.5, p, well)
        assert abs(fd.beta1[-1]) < 1e-10 * abs(fd.beta1[2])


def test_series_agreement():
    g = cmt_numeric(orbit_fourier(0.5, SystemParams(1, 0.05)))
    s = eval_cmt_series("k_positive", 1, 0.05, I=0.5).metric
    assert g.as_tuple() == pytest.approx(s.as_tuple(), rel=1e-3)


def test_left_right_equivalence():
    p = SystemParams(-1, 0.2)
    a = classical_metric(0.5, p, "left").as_tuple()
    b = classical_metric(0.5, p, "right").as_tuple()
    assert np.allclose(a, b, rtol=1e-10, atol=0)


def test_conjugation_and_real_signal():
    orb = integrate_orbit(0.4, SystemParams(0.7, 0.3))
    o1 = 0.5 * orb.samples**2
    full = np.fft.fft(o1) / len(o1)
    assert np.allclose(full[1:33], np.conj(full[-1:-33:-1]), atol=1e-15)


@given(st.floats(0, 2 * math.pi))
def test_origin_invariance(delta):
    fd = orbit_fourier(0.5, SystemParams(-0.8, 0.3), "left")
    a = cmt_numeric(fd).as_tuple()
    b = cmt_numeric(fd.shift_origin(delta)).as_tuple()
    assert np.allclose(a, b, rtol=1e-10, atol=0)


@settings(max_examples=10)
@given(st.floats(0.2, 3.0), st.floats(0.01, 1.0), st.floats(0.05, 2.0))
def test_dE_dI_equals_omega(k, lam, I):
    p = SystemParams(k, lam)
    h = 1e-4 * I
    dE = (energy_of_action(I + h, p) - energy_of_action(I - h, p)) / (2 * h)
    assert dE == pytest.approx(omega_of_action(I, p), rel=1e-6)


@settings(max_examples=10)
@given(st.floats(-2.0, -0.2), st.floats(0.05, 1.0), st.floats(0.05, 0.8))
def test_dE_dI_double_well(k, lam, frac):
    p = SystemParams(k, lam)
    I = frac * separatrix_action(p)
    h = 1e-5 * I
    dE = (energy_of_action(I + h, p, "left") - energy_of_action(I - h, p, "left")) / (2 * h)
    assert dE == pytest.approx(omega_of_action(I, p, "left"), rel=1e-6)


@settings(max_examples=10)
@given(st.floats(0.2, 3.0), st.floats(0.01, 1.0), st.floats(0.05, 2.0))
def test_cmt_psd(k, lam, I):
    g = classical_metric(I, SystemParams(k, lam))
    assert g.g11 >= 0 and g.g22 >= 0 and g.is_psd()


def test_period_positive_and_action_monotone():
    p = SystemParams(-0.5, 0.2)
    es = np.linspace(-1.8, -0.1, 8)
    acts = [action_of_energy(e, p, "left") for e in es]
    assert np.all(np.diff(acts) > 0)
    assert all(period_of_energy(e, p, "left") > 0 for e in es)
