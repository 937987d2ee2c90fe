"""Post-hoc diagnostics on run traces."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ShapeError
from ..lyapunov import phi_p_raw
from ..operators import MonotoneOperator
from .engines import RunTrace

__all__ = ["XuReport", "check_xu_recursion", "track_diagnostics", "THETA_MATCH_RTOL"]

XU_TOL = 1e-12
THETA_MATCH_RTOL = 1e-12


@dataclass(frozen=True)
class XuReport:
    violations: list
    max_excess: float
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def check_xu_recursion(a_seq, alpha_seq, sigma_seq, gamma_seq) -> XuReport:
    """Termwise check of ``a_{k+1} <= (1 - alpha_k) a_k + alpha_k sigma_k + gamma_k``.

    ``a_seq`` has one more entry than the coefficient sequences. Returned
    indices point into ``a_seq`` at the offending ``a_{k+1}``.
    ``max_excess`` is the largest ``LHS - RHS`` found (negative when every
    term holds with room to spare).
    """
    a = np.asarray(a_seq, dtype=float)
    alpha = np.asarray(alpha_seq, dtype=float)
    sigma = np.asarray(sigma_seq, dtype=float)
    gamma = np.asarray(gamma_seq, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ShapeError("a_seq must be a 1-D sequence with at least 2 entries")
    m = a.size - 1
    for name, arr in (("alpha", alpha), ("sigma", sigma), ("gamma", gamma)):
        if arr.shape != (m,):
            raise ShapeError(f"{name}_seq must have {m} entries (len(a_seq) - 1), got {arr.shape}")
    if np.any(a < 0):
        raise ShapeError("a_seq must be nonnegative")
    if np.any((alpha <= 0) | (alpha >= 1)):
        raise ShapeError("alpha_seq must lie in (0, 1)")
    if np.any(gamma < 0):
        raise ShapeError("gamma_seq must be nonnegative")
    excess = a[1:] - ((1.0 - alpha) * a[:-1] + alpha * sigma + gamma)
    bad = np.nonzero(excess > XU_TOL)[0] + 1
    return XuReport(bad.tolist(), float(excess.max()), m)


def track_diagnostics(trace: RunTrace, A: MonotoneOperator, path=None) -> RunTrace:
    """Fill the Lyapunov columns of a trace.

    - ``phi_star = phi_p(x*, x_n)`` when A has a known zero;
    - ``phi_track = phi_p(y_n, x_n)`` when ``path`` gives one resolvent per
      row, solved at that row's theta;
    - ``psi_monitor = ||x_n - J^{-1}(J x_n - l_n (A x_n + t_n (J x_n - J x_1)))||``,
      which reproduces ``step_size``.

    ``meta`` gains ``radius = max(phi_p(x*, x1), (4p/q)||x*||^q)`` when a
    zero is known, and ``m0_hat``, the largest
    ``||A x_n + t_n (J x_n - J x_1)||_*`` over the rows, plus one.
    """
    space = A.space
    rows = trace.rows
    if path is not None:
        if len(path) != len(rows):
            raise ShapeError(f"path has {len(path)} points, trace has {len(rows)} rows")
        for r, y in zip(rows, path):
            if not math.isclose(r.theta_n, y.theta, rel_tol=THETA_MATCH_RTOL, abs_tol=0.0):
                raise ShapeError(f"path theta {y.theta!r} does not match row {r.n} theta {r.theta_n!r}")
    zero = A.known_zero
    x1 = trace.x1
    jx1 = space.J(x1)
    m0 = 0.0
    out = []
    # rows of a diverged run may hold values near overflow
    with np.errstate(over="ignore", invalid="ignore"):
        for k, r in enumerate(rows):
            jx = space.J(r.x)
            g = A.evaluate(r.x) + r.theta_n * (jx - jx1)
            m0 = max(m0, space.dual_norm(g))
            psi = space.norm(r.x - space.J_inv(jx - r.lambda_n * g))
            upd = {"psi_monitor": psi}
            if zero is not None:
                upd["phi_star"] = float(phi_p_raw(space, zero, r.x))
            if path is not None:
                upd["phi_track"] = float(phi_p_raw(space, path[k].y.coords, r.x))
            out.append(replace(r, **upd))
    meta = dict(trace.meta)
    meta["m0_hat"] = m0 + 1.0
    if zero is not None:
        meta["radius"] = max(float(phi_p_raw(space, zero, x1)),
                             4.0 * space.p / space.q * space.norm(zero) ** space.q)
    return replace(trace, rows=out, meta=meta)
