import numpy as np
import pytest

from regdual import (
    Schedule,
    ShapeError,
    SolveConfig,
    SpaceSpec,
    check_xu_recursion,
    make_diagonal_linear,
    make_smooth_diagonal,
    run_regularized,
    track_diagnostics,
)
from regdual.operators import MonotoneOperator
from regdual.solver.resolvent import resolvents_at


def test_xu_trivial_sequences():
    rep = check_xu_recursion(np.zeros(5), np.full(4, 0.5), np.zeros(4), np.zeros(4))
    assert rep.ok and rep.checked == 4


def test_xu_single_step():
    assert check_xu_recursion([1.0, 0.4], [0.5], [0.0], [0.0]).ok
    rep = check_xu_recursion([1.0, 0.9], [0.5], [0.0], [0.0])
    assert rep.violations == [1]
    assert rep.max_excess == pytest.approx(0.4)


@pytest.mark.parametrize("args", [
    ([1.0], [], [], []),
    ([1.0, 0.5, 0.2], [0.5], [0.0], [0.0]),
    ([1.0, -0.5], [0.5], [0.0], [0.0]),
    ([1.0, 0.5], [1.0], [0.0], [0.0]),
    ([1.0, 0.5], [0.5], [0.0], [-1.0]),
])
def test_xu_malformed(args):
    with pytest.raises(ShapeError):
        check_xu_recursion(*args)


def _tracked_run(A, x1, n_last, every):
    sp = A.space
    cfg = SolveConfig(sp.point(x1), max_iter=n_last, target_residual=0.0, record_every=every)
    tr = run_regularized(A, Schedule.prototype(), cfg)
    path = resolvents_at(A, tr.column("theta_n"), cfg.x1, 1e-12, indices=tr.column("n"))
    return tr, path


def test_hilbert_tracking_satisfies_xu_recursion():
    # For a diagonal operator x_{n+1} - y_n = (I - l_n (C + t_n)) (x_n - y_n), so
    # a_n = ||x_n - y_n|| obeys a_{n+1} <= r_n a_n + ||y_{n+1} - y_n||.
    sp = SpaceSpec(3)
    c = np.array([1.0, 1.5, 2.0])
    A = make_diagonal_linear(sp, c, [0.5, -0.5, 1.0])
    tr, path = _tracked_run(A, [1.0, 2.0, -1.0], 400, 1)
    xs = np.array(tr.column("x"))
    ys = np.array([r.y.coords for r in path])
    lam = np.array(tr.column("lambda_n"))[:-1]
    theta = np.array(tr.column("theta_n"))[:-1]
    a = np.linalg.norm(xs - ys, axis=1)
    rho = np.max(np.abs(1.0 - lam[:, None] * (c[None, :] + theta[:, None])), axis=1)
    gamma = np.linalg.norm(np.diff(ys, axis=0), axis=1)
    rep = check_xu_recursion(a, 1.0 - rho, np.zeros_like(rho), gamma)
    assert rep.ok, rep.violations[:5]
    # a perturbed trace is caught
    bumped = a.copy()
    bumped[200] += 1e-3
    assert 200 in check_xu_recursion(bumped, 1.0 - rho, np.zeros_like(rho), gamma).violations


def test_track_diagnostics_columns():
    sp = SpaceSpec(2, 3.0, 2.0)
    A = make_smooth_diagonal(sp, [1.0, 2.0])
    tr, path = _tracked_run(A, [1.0, -1.0], 300, 10)
    out = track_diagnostics(tr, A, path)
    for r in out.rows:
        assert r.psi_monitor == pytest.approx(r.step_size, rel=1e-12, abs=1e-300)
        assert r.phi_star is not None and r.phi_track is not None
    assert out.meta["m0_hat"] >= 1.0
    assert out.meta["radius"] > 0
    assert tr.rows[0].phi_track is None  # input trace untouched


def test_track_without_known_zero_or_path():
    sp = SpaceSpec(2)
    A = MonotoneOperator(sp, lambda x: 2.0 * x)
    cfg = SolveConfig(sp.point([1.0, 1.0]), max_iter=50, target_residual=0.0, record_every=10)
    out = track_diagnostics(run_regularized(A, Schedule.prototype(), cfg), A)
    assert all(r.phi_star is None and r.phi_track is None for r in out.rows)
    assert "radius" not in out.meta


def test_misaligned_path_rejected():
    sp = SpaceSpec(2)
    A = make_diagonal_linear(sp, [1.0, 2.0])
    tr, path = _tracked_run(A, [1.0, 1.0], 100, 10)
    with pytest.raises(ShapeError):
        track_diagnostics(tr, A, path[:-1])
    shifted = path[1:] + path[:1]
    with pytest.raises(ShapeError):
        track_diagnostics(tr, A, shifted)


@pytest.mark.parametrize("make", [
    lambda sp: make_diagonal_linear(sp, [1.0, 1.5, 2.0]),
    lambda sp: make_smooth_diagonal(sp, [0.5, 1.0, 2.0]),
])
def test_tracking_trend_hilbert(make):
    A = make(SpaceSpec(3))
    tr, path = _tracked_run(A, [1.0, -2.0, 0.5], 20_000, 100)
    rows = track_diagnostics(tr, A, path).rows
    vals = [r.phi_track for r in rows]
    start = len(vals) // 4
    for k in range(start, len(vals)):
        assert vals[k] <= max(vals[:k]) + 1e-15
    assert vals[-1] <= 1e-3
