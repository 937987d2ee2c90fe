"""Iteration engines for A x = 0.

    regularized     x_{n+1} = J^{-1}(J x_n - l_n (A x_n + t_n (J x_n - J x_1)))
    unregularized   the same update with t_n = 0
    accretive       x_{n+1} = x_n - l_n A x_n - l_n t_n (x_n - x_1)     (Hilbert)
    mann            x_{n+1} = (1 - l_n) x_n + l_n (x_n - A x_n)         (Hilbert)

All four share one loop. Row ``n`` of a trace describes ``x_n`` together
with the ``(lambda_n, theta_n)`` used to leave it, so ``step_size`` on that
row is ``||x_{n+1} - x_n||``; on the final row it is the length of the step
that would be taken next.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..errors import ConfigurationError, DivergenceError, InvalidInputError, ShapeError
from ..geometry import PrimalPoint
from ..lyapunov import phi_p_raw
from ..operators import MonotoneOperator
from .schedule import Schedule

__all__ = [
    "SolveConfig",
    "TraceRow",
    "RunTrace",
    "SCHEMES",
    "run_regularized",
    "run_unregularized",
    "run_accretive_hilbert",
    "run_mann",
    "run_scheme",
]

SCHEMES = ("regularized", "unregularized", "accretive", "mann")
HILBERT_ONLY = ("accretive", "mann")


@dataclass(frozen=True)
class SolveConfig:
    """Run controls. ``max_iter`` is the index of the last iterate that may
    be produced, so at most ``max_iter - 1`` updates are applied."""

    x1: PrimalPoint
    max_iter: int = 1000
    target_residual: float = 1e-10
    record_every: int = 100

    def __post_init__(self):
        if not isinstance(self.x1, PrimalPoint):
            raise InvalidInputError("x1 must be a PrimalPoint")
        for name in ("max_iter", "record_every"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise InvalidInputError(f"{name} must be an integer >= 1, got {v!r}")
        if not (self.target_residual >= 0):
            raise InvalidInputError(f"target_residual must be >= 0, got {self.target_residual!r}")


@dataclass(frozen=True)
class TraceRow:
    n: int
    lambda_n: float
    theta_n: float
    residual: float
    step_size: Optional[float]
    x: np.ndarray = field(repr=False)
    err: Optional[float] = None
    phi_star: Optional[float] = None
    phi_track: Optional[float] = None
    psi_monitor: Optional[float] = None


@dataclass
class RunTrace:
    """Recorded rows plus the final iterate.

    ``iterations_used`` is the index N of ``x_final``; ``stop_reason`` is
    ``"target_residual"``, ``"max_iter"`` or ``"diverged"``.
    """

    scheme: str
    rows: list
    x_final: np.ndarray
    iterations_used: int
    stop_reason: str
    x1: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def final(self) -> TraceRow:
        return self.rows[-1]

    def column(self, name):
        return [getattr(r, name) for r in self.rows]


def _check_compatible(A: MonotoneOperator, cfg: SolveConfig, scheme: str):
    if cfg.x1.space != A.space:
        raise ShapeError(f"x1 lives in {cfg.x1.space}, operator in {A.space}")
    if scheme in HILBERT_ONLY and not A.space.is_hilbert:
        raise ConfigurationError(f"scheme {scheme!r} needs a Hilbert configuration (s = 2, p = 2), "
                                 f"got s = {A.space.s:g}, p = {A.space.p:g}")


def _make_step(scheme, space, x1):
    if space.is_hilbert:
        J = Jinv = None
    else:
        J, Jinv = space.J, space.J_inv
    jx1 = x1 if J is None else J(x1)

    if scheme in ("regularized", "unregularized"):
        if J is None:
            def step(x, ax, lam, theta):
                return x - lam * (ax + theta * (x - jx1))
        else:
            def step(x, ax, lam, theta):
                jx = J(x)
                return Jinv(jx - lam * (ax + theta * (jx - jx1)))
    elif scheme == "accretive":
        def step(x, ax, lam, theta):
            return x - lam * ax - lam * theta * (x - x1)
    elif scheme == "mann":
        def step(x, ax, lam, theta):
            return (1.0 - lam) * x + lam * (x - ax)
    else:
        raise ConfigurationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return step


def _iterate(A: MonotoneOperator, sched: Schedule, cfg: SolveConfig, scheme: str) -> RunTrace:
    _check_compatible(A, cfg, scheme)
    space = A.space
    use_theta = scheme in ("regularized", "accretive")
    if use_theta and not sched.has_theta:
        raise ConfigurationError(f"scheme {scheme!r} needs a theta sequence in the schedule")
    n_max = cfg.max_iter
    lam_arr, theta_arr = sched.arrays(n_max)
    lams = lam_arr.tolist()
    thetas = theta_arr.tolist() if use_theta else [0.0] * n_max

    x1 = np.array(cfg.x1.coords)
    step = _make_step(scheme, space, x1)
    fn = A.fn
    norm, dual_norm = space.norm, space.dual_norm
    zero = A.known_zero
    target = cfg.target_residual
    every = cfg.record_every
    rows = []

    def record(n, x, ax, res, x_next, lam, theta):
        sz = norm(x_next - x)
        row = TraceRow(n=n, lambda_n=lam, theta_n=theta, residual=res,
                       step_size=sz if math.isfinite(sz) else None, x=x.copy())
        if zero is not None:
            row = replace(row, err=norm(x - zero), phi_star=float(phi_p_raw(space, zero, x)))
        rows.append(row)

    def finish(x, n, reason):
        return RunTrace(scheme=scheme, rows=rows, x_final=x, iterations_used=n, stop_reason=reason,
                        x1=x1, meta={"space": space, "operator": A.name})

    x = x1.copy()
    n = 1
    with np.errstate(over="ignore", invalid="ignore"):
        while True:
            ax = np.asarray(fn(x), dtype=float)
            lam, theta = lams[n - 1], thetas[n - 1]
            keep = n == 1 or n % every == 0
            res = dual_norm(ax) if (target > 0 or keep or n == n_max) else None
            done = n == n_max or (res is not None and res <= target)
            x_next = step(x, ax, lam, theta)
            if keep or done:
                record(n, x, ax, res, x_next, lam, theta)
            if done:
                reason = "max_iter" if res > target else "target_residual"
                return finish(x, n, reason)
            if not np.isfinite(x_next).all():
                if not (keep or done):
                    record(n, x, ax, dual_norm(ax), x_next, lam, theta)
                raise DivergenceError(f"{scheme} iterate became non-finite at n = {n + 1}",
                                      finish(x, n, "diverged"))
            x = x_next
            n += 1


def run_regularized(A: MonotoneOperator, sched: Schedule, cfg: SolveConfig) -> RunTrace:
    """Regularized duality-map iteration anchored at ``cfg.x1``.

    The schedule is not validated here; pass it through
    :func:`validate_schedule` first if the convergence conditions matter.
    """
    return _iterate(A, sched, cfg, "regularized")


def run_unregularized(A: MonotoneOperator, sched: Schedule, cfg: SolveConfig) -> RunTrace:
    """``x_{n+1} = J^{-1}(J x_n - lambda_n A x_n)``; any theta is ignored."""
    return _iterate(A, sched, cfg, "unregularized")


def run_accretive_hilbert(A: MonotoneOperator, sched: Schedule, cfg: SolveConfig) -> RunTrace:
    """Regularized scheme written without duality maps; Hilbert spaces only."""
    return _iterate(A, sched, cfg, "accretive")


def run_mann(A: MonotoneOperator, sched: Schedule, cfg: SolveConfig) -> RunTrace:
    """Mann iteration on ``T = I - A``; Hilbert spaces only."""
    return _iterate(A, sched, cfg, "mann")


def run_scheme(scheme: str, A: MonotoneOperator, sched: Schedule, cfg: SolveConfig) -> RunTrace:
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return _iterate(A, sched, cfg, scheme)
