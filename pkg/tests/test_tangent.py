import math

import numpy as np
import pytest

from vortexlab.bundle import Section
from vortexlab.configuration import Configuration, TangentVector
from vortexlab.kahler import complex_structure, metric_G, norm_G
from vortexlab.surface import OneForm
from vortexlab.tangent import (
    apply_complex_structure,
    gauge_project,
    gauge_vector_field,
    gram_matrix,
    linearization_defect,
    orthogonality_battery,
    position_basis,
    projection_defect,
    pushforward,
    random_gauge_generator,
    random_tangent,
    tangent_from_positions,
)


@pytest.fixture(scope="module")
def basis1(sol1):
    return position_basis(sol1)


def test_gauge_directions_solve_linearization(sol1, rng):
    Xz = gauge_vector_field(sol1, random_gauge_generator(sol1.surface, rng))
    assert max(linearization_defect(sol1, Xz)) < 1e-10


def test_gauge_generator_must_be_imaginary(sol1):
    with pytest.raises(ValueError):
        gauge_vector_field(sol1, np.ones(sol1.surface.shape))
    with pytest.raises(ValueError):
        gauge_vector_field(sol1, (1 + 1j) * np.ones(sol1.surface.shape))


def test_projection_removes_gauge_directions(sol1, rng):
    Xz = gauge_vector_field(sol1, random_gauge_generator(sol1.surface, rng))
    assert norm_G(sol1, gauge_project(sol1, Xz)) < 1e-8 * norm_G(sol1, Xz)


def test_projection_is_orthogonal(sol1, rng):
    X = random_tangent(sol1, rng)
    P = gauge_project(sol1, X)
    assert P.gauge_projected
    assert P.projection_defect < 1e-10
    assert orthogonality_battery(sol1, P, rng) < 1e-10
    # the removed part is a gauge direction, so P is the G-nearest point
    assert metric_G(sol1, P, P) <= metric_G(sol1, X, X)


def test_projection_fails_without_higgs_field(sol1):
    cfg = Configuration.of(sol1)
    dead = Configuration(cfg.surface, cfg.H, cfg.connection, Section(np.zeros(cfg.surface.shape), 1))
    with pytest.raises(np.linalg.LinAlgError):
        gauge_project(dead, TangentVector.zero(cfg.surface.shape))


def test_position_tangents_solve_linearization(sol1, basis1):
    for X in basis1:
        assert max(X.linearization_defect) < 1e-8
        assert X.satisfies_linearization


def test_order2_close_to_order4(sol1):
    X2 = tangent_from_positions(sol1, 0, "x", 1e-3, order=2)
    X4 = tangent_from_positions(sol1, 0, "x", 1e-3, order=4)
    assert max(X2.linearization_defect) < 1e-5
    assert norm_G(sol1, X2 - X4) < 1e-5 * norm_G(sol1, X4)


def test_richardson_step_independence(sol1):
    a = tangent_from_positions(sol1, 0, "y", 1e-3, order=4)
    b = tangent_from_positions(sol1, 0, "y", 5e-4, order=4)
    assert norm_G(sol1, a - b) < 1e-8 * norm_G(sol1, a)


def test_translation_tangent_norm_is_4pi(sol1, basis1):
    # regression value: |d/dx|_G^2 = 4 pi for a single vortex, any position
    for X in basis1:
        assert metric_G(sol1, X, X) == pytest.approx(4 * math.pi, rel=1e-8)
    G = gram_matrix(sol1, basis1)
    assert abs(G[0, 1]) < 1e-8


def test_complex_structure_maps_x_to_y(sol1, basis1):
    # I d/dx is the y translation (up to the gauge part removed by projection)
    IX = gauge_project(sol1, apply_complex_structure(basis1[0]))
    assert norm_G(sol1, IX - basis1[1]) < 1e-6 * norm_G(sol1, basis1[1])


def test_I_preserves_tangents_but_not_gauge(sol1, basis1, rng):
    for X in basis1:
        assert max(apply_complex_structure(X, sol1).linearization_defect) < 1e-6
    Xz = gauge_vector_field(sol1, random_gauge_generator(sol1.surface, rng))
    assert linearization_defect(sol1, complex_structure(Xz))[0] > 1e-3


def test_bad_direction(sol1):
    with pytest.raises(ValueError):
        tangent_from_positions(sol1, 0, "z")
    with pytest.raises(ValueError):
        tangent_from_positions(sol1, 0, "x", order=3)


def test_large_eps_warns(sol1, caplog):
    with caplog.at_level("WARNING"):
        tangent_from_positions(sol1, 0, "x", eps=0.8, order=2)
    assert "linearization defect" in caplog.text


def test_pushforward_preserves_alpha(sol1, rng):
    X = random_tangent(sol1, rng)
    chi = random_gauge_generator(sol1.surface, rng).imag
    Y = pushforward(X, chi)
    assert np.array_equal(Y.alpha.p, X.alpha.p)
    assert np.allclose(np.abs(Y.beta), np.abs(X.beta))


def test_two_vortex_gram(sol2):
    B = position_basis(sol2)
    G = gram_matrix(sol2, B)
    assert np.allclose(G, G.T, atol=1e-9 * np.max(np.abs(G)))
    assert np.all(np.linalg.eigvalsh(G) > 0)
    assert projection_defect(sol2, B[0]) < 1e-10


def test_zero_tangent(sol1):
    Z = TangentVector.zero(sol1.surface.shape)
    assert linearization_defect(sol1, Z) == (0.0, 0.0)
    assert isinstance(Z.alpha, OneForm)
