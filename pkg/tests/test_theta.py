import mpmath
import numpy as np
import pytest

from vortexlab.theta import log_theta1, theta1


def _mp(u, r):
    return complex(mpmath.jtheta(1, complex(u), mpmath.exp(-mpmath.pi * r)))


@pytest.mark.parametrize("r", [0.4, 1.0, 2.5])
def test_matches_mpmath(r):
    rng = np.random.default_rng(1)
    us = rng.uniform(-4, 4, 12) + 1j * rng.uniform(-2 * r, 2 * r, 12)
    ours = theta1(us, r)
    ref = np.array([_mp(u, r) for u in us])
    assert np.max(np.abs(ours - ref) / np.maximum(np.abs(ref), 1e-300)) < 1e-12


@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_quasi_periodicity(r):
    u = 0.37 + 0.21j
    q = np.exp(-np.pi * r)
    assert theta1(u + np.pi, r) == pytest.approx(-theta1(u, r), rel=1e-13)
    lhs = theta1(u + 1j * np.pi * r, r)
    rhs = -np.exp(-2j * u) / q * theta1(u, r)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_zeros_on_lattice():
    r = 0.8
    assert abs(theta1(0.0, r)) < 1e-300 or abs(theta1(0.0, r)) == 0.0
    assert np.isneginf(log_theta1(np.array([0.0]), r).real[0])
    assert abs(theta1(np.pi + 1j * np.pi * r, r)) < 1e-12


def test_odd():
    u = np.array([0.2 + 0.3j, 1.7 - 0.4j])
    assert np.allclose(theta1(-u, 1.3), -theta1(u, 1.3), rtol=1e-13)


def test_rejects_bad_modulus():
    with pytest.raises(ValueError):
        log_theta1(0.1, 0.0)
