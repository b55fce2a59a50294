import numpy as np
import pytest

from attnpoints.fitting import FitConfig, fit_points, init_points
from attnpoints.geometry import OrientedBox, contains_exact
from attnpoints.losses import bp_loss, bp_loss_grad

UNIT = OrientedBox.from_params(0.5, 0.5, 1, 1, 0)


def test_default_run_converges():
    trace = fit_points(UNIT)
    assert trace.losses[0] > 0.9
    assert trace.converged
    assert trace.final_loss < 0.05
    assert np.all(contains_exact(trace.points, UNIT) == 1)
    assert len(trace.losses) <= 2000


def test_interior_start_converges_immediately():
    pts = np.array([[0.2, 0.2], [0.5, 0.9], [0.8, 0.4]])
    trace = fit_points(UNIT, FitConfig(n_points=3), points=pts)
    assert trace.losses == [0.0]
    assert trace.converged
    np.testing.assert_array_equal(trace.points, pts)


def test_zero_step_is_a_no_op():
    trace = fit_points(UNIT, FitConfig(step_size=0.0, max_iters=50))
    assert len(trace.losses) == 50
    assert len(set(trace.losses)) == 1
    assert not trace.converged


def test_zero_iterations():
    trace = fit_points(UNIT, FitConfig(max_iters=0))
    assert trace.losses == []
    assert not trace.converged
    assert trace.final_loss == pytest.approx(bp_loss(trace.initial_points, UNIT))


def test_initial_points_lie_in_annulus():
    rng = np.random.default_rng(0)
    box = OrientedBox.from_params(3, -1, 4, 1, 0.3)
    pts = init_points(box, 500, rng)
    r = np.hypot(*(pts - box.center).T)
    assert r.min() >= box.circumradius * (1 - 1e-12)
    assert r.max() <= 3 * box.circumradius * (1 + 1e-12)
    # initial gradients are non-zero for every point outside the box
    outside = contains_exact(pts, box) == 0
    g = bp_loss_grad(pts, box)
    assert np.all(np.hypot(*g[outside].T) > 0)


def test_trace_is_reproducible():
    a = fit_points(UNIT, FitConfig(seed=7))
    b = fit_points(UNIT, FitConfig(seed=7))
    assert a.losses == b.losses
    np.testing.assert_array_equal(a.points, b.points)


@pytest.mark.parametrize("k", [5.0, 10.0, 20.0])
def test_small_steps_never_increase_loss(k):
    box = OrientedBox.from_params(3, -2, 4, 1.5, 0.7)
    for seed in range(100):
        cfg = FitConfig(seed=seed, k=k, step_size=0.01 * box.diagonal, max_iters=300)
        losses = np.array(fit_points(box, cfg).losses)
        assert np.all((losses >= 0) & (losses < 1))
        assert np.all(np.diff(losses) <= 0)


def test_converged_points_are_inside():
    box = OrientedBox.from_params(0, 0, 6, 1, 1.0)
    for seed in range(50):
        trace = fit_points(box, FitConfig(seed=seed))
        if trace.converged:
            assert np.all(contains_exact(trace.points, box) == 1)


def test_negative_seeds_are_valid_and_distinct():
    a = fit_points(UNIT, FitConfig(seed=-3, max_iters=0)).initial_points
    b = fit_points(UNIT, FitConfig(seed=3, max_iters=0)).initial_points
    assert not np.array_equal(a, b)


def test_raw_gradient_mode_runs():
    trace = fit_points(UNIT, FitConfig(normalize=False, max_iters=20))
    assert len(trace.losses) == 20
    assert trace.losses[-1] <= trace.losses[0]


def test_csv_export():
    trace = fit_points(UNIT, FitConfig(max_iters=3, step_size=0.0))
    lines = trace.to_csv().splitlines()
    assert lines[0] == "iteration,loss"
    assert len(lines) == 4
    assert lines[1].startswith("0,")


@pytest.mark.parametrize("kwargs", [
    {"n_points": 0}, {"k": 0.0}, {"max_iters": -1}, {"step_size": -1.0}, {"tolerance": 0.0},
])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        FitConfig(**kwargs)


def test_degenerate_target():
    with pytest.raises(ValueError):
        fit_points(np.zeros((4, 2)))
