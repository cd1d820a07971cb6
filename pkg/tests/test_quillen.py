import numpy as np
import pytest

from vortexlab.bundle import DegreeMismatchError
from vortexlab.kahler import FixedSection, norm_G, omega_psi0
from vortexlab.quillen import (
    QUILLEN_PREFACTOR,
    ThetaForms,
    ZeroOneForm,
    b_form,
    kahler_form_F,
    kahler_form_F_full,
    quillen_curvature_value,
    quillen_expansion,
    quillen_pm,
    verify_prequantum_identity,
)
from vortexlab.surface import integrate_two_form, wedge_one_one
from vortexlab.tangent import gauge_project, random_tangent

KINDS = ["unit", "solved", "theta"]


@pytest.mark.parametrize("kind", KINDS)
def test_prequantum_identity(sol2, psi0s, kind, rng):
    for _ in range(6):
        X, Y = random_tangent(sol2, rng), random_tangent(sol2, rng)
        r = verify_prequantum_identity(sol2, psi0s[kind], X, Y)
        assert r.passed and r.defect < 1e-12
        assert r.tag == "quillen" and r.context["psi0"] == kind


@pytest.mark.parametrize("kind", KINDS)
def test_prequantum_identity_projected(sol2, psi0s, kind, rng):
    X = gauge_project(sol2, random_tangent(sol2, rng))
    Y = gauge_project(sol2, random_tangent(sol2, rng))
    assert verify_prequantum_identity(sol2, psi0s[kind], X, Y).defect < 1e-12


@pytest.mark.parametrize("sign", [1, -1])
def test_expansion_oracle(sol2, psi0s, sign, rng):
    X, Y = random_tangent(sol2, rng), random_tangent(sol2, rng)
    for p0 in psi0s.values():
        a = quillen_pm(sol2, p0, X, Y, sign)
        b = quillen_expansion(sol2, p0, X, Y, sign)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_cross_terms_cancel(sol2, psi0s, rng):
    # with beta = 0 on X, both sides reduce to the connection part
    X, Y = random_tangent(sol2, rng), random_tangent(sol2, rng)
    Xa = X.__class__(X.alpha, np.zeros_like(X.beta))
    F = kahler_form_F_full(sol2.surface, X.alpha, Y.alpha)
    for p0 in psi0s.values():
        plus = quillen_pm(sol2, p0, Xa, Y, 1)
        minus = quillen_pm(sol2, p0, Xa, Y, -1)
        assert plus + minus == pytest.approx(2 * F, rel=1e-12)
        assert plus != pytest.approx(minus, rel=1e-6)


def test_two_formulas_for_F(sol2, rng):
    s = sol2.surface
    X, Y = random_tangent(sol2, rng), random_tangent(sol2, rng)
    a = kahler_form_F(s, ZeroOneForm.of(X.alpha), ZeroOneForm.of(Y.alpha))
    b = kahler_form_F_full(s, X.alpha, Y.alpha)
    assert a == pytest.approx(b, rel=1e-12)
    assert quillen_curvature_value(s, ZeroOneForm.of(X.alpha), ZeroOneForm.of(Y.alpha)) == (QUILLEN_PREFACTOR, a)


def test_F_is_antisymmetric(sol2, rng):
    s = sol2.surface
    p, q = ZeroOneForm.of(random_tangent(sol2, rng).alpha), ZeroOneForm.of(random_tangent(sol2, rng).alpha)
    assert kahler_form_F(s, p, q) == pytest.approx(-kahler_form_F(s, q, p), rel=1e-12)


def test_theta_wedge(surf64):
    s = surf64
    th = ThetaForms(s)
    assert np.array_equal(th.wedge().f, s.h2)
    assert np.array_equal(wedge_one_one(th.theta_bar, th.theta).f, -s.h2)
    assert integrate_two_form(s, th.wedge()) == pytest.approx(-2j * s.area)


def test_b_form_degree_check(sol2, psi0s):
    s = sol2.surface
    b_form(s, sol2.psi, psi0s["solved"], sol2.H, degree=2)
    with pytest.raises(DegreeMismatchError):
        b_form(s, sol2.psi, psi0s["unit"], sol2.H, degree=2)


def test_b_form_is_gauge_invariant(sol2, psi0s, rng):
    s = sol2.surface
    chi = rng.standard_normal(s.shape)
    p0 = psi0s["theta"]
    g = np.exp(-1j * chi)
    B = b_form(s, sol2.psi, p0, sol2.H)
    Bg = b_form(s, g * sol2.psi, FixedSection(g * p0.values, p0.degree), sol2.H)
    assert np.allclose(B.c, Bg.c, atol=1e-14)


def test_sign_validation(sol2, psi0s, rng):
    X = random_tangent(sol2, rng)
    with pytest.raises(ValueError):
        quillen_pm(sol2, psi0s["unit"], X, X, 0)


def test_sabotaged_omega_is_detected(sol2, psi0s, rng):
    X, Y = random_tangent(sol2, rng), random_tangent(sol2, rng)

    def wrong(cfg, p0, A, B):
        return -omega_psi0(cfg, p0, A, B)

    r = verify_prequantum_identity(sol2, psi0s["solved"], X, Y, omega_fn=wrong)
    assert not r.passed
    assert norm_G(sol2, X) > 0
