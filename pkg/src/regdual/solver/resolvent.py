"""Resolvent solves ``theta (J y - J x1) + A y = 0`` and regularization paths.

The equation is solved with a damped Newton method using a central
finite-difference Jacobian. Along a path the previous solution seeds the
next solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import InvalidInputError, ResolventError, ShapeError
from ..geometry import PrimalPoint
from ..operators import MonotoneOperator
from .schedule import Schedule

__all__ = ["ResolventResult", "solve_resolvent", "regularization_path", "resolvents_at"]

MAX_NEWTON = 50
MIN_STEP = 1e-14
FD_REL_STEP = 1e-6


@dataclass(frozen=True)
class ResolventResult:
    y: PrimalPoint
    theta: float
    residual: float
    newton_iters: int
    n: Optional[int] = None
    err: Optional[float] = None


def _fd_jacobian(F, y, h):
    n = y.size
    jac = np.empty((n, n))
    e = np.zeros(n)
    for i in range(n):
        e[i] = h
        jac[:, i] = (F(y + e) - F(y - e)) / (2.0 * h)
        e[i] = 0.0
    return jac


def _newton(A: MonotoneOperator, theta: float, x1: np.ndarray, y0: np.ndarray, tol: float):
    space = A.space
    J, fn, dual_norm, norm = space.J, A.fn, space.dual_norm, space.norm
    jx1 = J(x1)

    def F(y):
        return theta * (J(y) - jx1) + np.asarray(fn(y), dtype=float)

    y = np.array(y0, dtype=float)
    fy = F(y)
    res = dual_norm(fy)
    it = 0
    while res > tol:
        if it >= MAX_NEWTON:
            raise ResolventError(f"Newton did not reach tol={tol:g} in {MAX_NEWTON} iterations "
                                 f"(residual {res:.3e})", best=y, residual=res)
        jac = _fd_jacobian(F, y, FD_REL_STEP * (1.0 + norm(y)))
        try:
            delta = np.linalg.solve(jac, -fy)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(jac, -fy, rcond=None)[0]
        t = 1.0
        while True:
            if t * norm(delta) < MIN_STEP or not np.all(np.isfinite(delta)):
                raise ResolventError(f"Newton stagnated at residual {res:.3e} (tol={tol:g})",
                                     best=y, residual=res)
            y_try = y + t * delta
            f_try = F(y_try)
            r_try = dual_norm(f_try)
            if r_try <= res:
                break
            t *= 0.5
        y, fy, res = y_try, f_try, r_try
        it += 1
    return y, res, it


def solve_resolvent(A: MonotoneOperator, theta: float, x1: PrimalPoint, tol: float = 1e-10,
                    y0=None) -> ResolventResult:
    """Solve ``theta (J y - J x1) + A y = 0`` for y.

    Parameters
    ----------
    A : MonotoneOperator
    theta : float
        Regularization weight, > 0.
    x1 : PrimalPoint
        Anchor.
    tol : float
        Required dual-norm residual.
    y0 : array, optional
        Initial guess; defaults to the anchor.

    Raises
    ------
    ResolventError
        After 50 Newton iterations, or when backtracking shrinks the step
        below 1e-14, without meeting ``tol``. ``best`` holds the last iterate.
    """
    if not (math.isfinite(theta) and theta > 0):
        raise InvalidInputError(f"theta must be positive, got {theta!r}")
    if not (math.isfinite(tol) and tol > 0):
        raise InvalidInputError(f"tol must be positive, got {tol!r}")
    if not isinstance(x1, PrimalPoint) or x1.space != A.space:
        raise ShapeError("x1 must be a PrimalPoint in the operator's space")
    x1a = np.array(x1.coords)
    start = x1a if y0 is None else np.asarray(y0, dtype=float)
    y, res, it = _newton(A, float(theta), x1a, start, tol)
    err = None if A.known_zero is None else A.space.norm(y - A.known_zero)
    return ResolventResult(PrimalPoint(y, A.space), float(theta), float(res), it, err=err)


def resolvents_at(A: MonotoneOperator, thetas, x1: PrimalPoint, tol: float = 1e-10, indices=None):
    """Continuation over a sequence of theta values, warm-starting each
    solve from the previous solution."""
    out = []
    y_prev = None
    indices = list(indices) if indices is not None else list(range(1, len(thetas) + 1))
    for k, (n, theta) in enumerate(zip(indices, thetas)):
        try:
            r = solve_resolvent(A, float(theta), x1, tol, y0=y_prev)
        except ResolventError as exc:
            exc.index = n
            exc.partial = out
            raise
        out.append(ResolventResult(r.y, r.theta, r.residual, r.newton_iters, n=n, err=r.err))
        y_prev = r.y.coords
    return out


def regularization_path(A: MonotoneOperator, sched: Schedule, x1: PrimalPoint, count: int,
                        tol: float = 1e-10):
    """Resolvents ``y_n`` at ``theta_1, ..., theta_count``.

    As theta decreases to 0 the path approaches a zero of A; with a known
    zero each result carries ``err = ||y_n - x*||``.
    """
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise InvalidInputError(f"count must be a positive integer, got {count!r}")
    if not sched.has_theta:
        raise InvalidInputError("schedule has no theta sequence")
    _, thetas = sched.arrays(int(count))
    return resolvents_at(A, thetas.tolist(), x1, tol)
