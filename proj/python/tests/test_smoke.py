import math

import numpy as np
import pytest

import entangled_verify as ev


def random_fields(n=8, seed=0):
    rng = np.random.default_rng(seed)
    return [rng.uniform(-1, 1, (n, n)) for _ in range(4)]


def test_phi_superposition():
    assert ev.phi_superposition(0.0) == pytest.approx(0.05, abs=1e-10)
    assert 50.0**20 * ev.phi_superposition(50.0) == pytest.approx(181440.0, rel=0.01)


def test_square_pair_edges():
    assert abs(ev.phi_hat(2.0)) < 1e-10
    assert ev.psi_hat(1.5) > 0.0
    assert ev.psi_hat(0.5) == 0.0


def test_gaussian_pair_residual():
    ts = [2.0**e for e in np.linspace(-2, 2, 9)]
    taus = list(np.linspace(-4, 4, 9))
    assert ev.gaussian_pair_residual(1.0, ts, taus) < 1e-10


def test_trees():
    t = ev.random_convex_tree(3, 4, 0.5)
    assert len(t) >= 1
    assert t.root().k == 0
    assert 0.0 < ev.boundary_ratio(t) <= 144.0
    with pytest.raises(ValueError):
        ev.ConvexTree(ev.DyadicSquare(0, 0, 0), [ev.DyadicSquare(-2, 0, 0)])


def test_box_average_bounded_by_theta_averages():
    F = random_fields()
    a = ev.box_average(F, 2.0, 0.3, -0.2, 0.7)
    assert math.isfinite(a)


def test_forms_agree_on_both_sides():
    F = random_fields(16, 1)
    a = ev.truncated_form(F, 2.0, N=1, steps_per_octave=2)
    b = ev.truncated_form(F, 2.0, N=1, steps_per_octave=2, frequency_side=True)
    assert a == pytest.approx(b, rel=1e-3)


def test_maximal_and_tree_size():
    F = random_fields(16, 2)[0]
    M = ev.quadratic_maximal(F, 2.0)
    assert M.shape == (16, 16)
    assert np.all(M >= np.abs(F) - 1e-12)
    avg = ev.theta_average(F, 2.0, 0.5)
    assert np.all(avg >= 0.0)
    t = ev.random_convex_tree(1, 2, 0.5, ev.DyadicSquare(0, 0, 0))
    assert ev.tree_size(F, 2.0, t) > 0.0


def test_bad_input():
    with pytest.raises(ValueError):
        ev.theta_average(np.zeros((6, 6)), 2.0, 1.0)
    with pytest.raises(ValueError):
        ev.box_average(random_fields()[:3], 2.0, 0.0, 0.0, 1.0)


def test_suites_listed():
    assert "restricted" in ev.suites()
