"""Monotone operators A : E -> E* and built-in strongly monotone test cases.

Operators wrap a raw function on coordinate arrays. The built-ins are
everywhere defined and continuous, hence maximal monotone, so the range
condition holds by construction. User-supplied operators are taken on
trust: no numerical check of the range condition is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, ShapeError
from .geometry import DualPoint, PrimalPoint, SpaceSpec, _check
from .lyapunov import sample_ball

__all__ = [
    "MonotoneOperator",
    "OperatorStats",
    "make_diagonal_linear",
    "make_shifted_duality",
    "make_smooth_diagonal",
    "from_j_pseudocontractive",
    "to_j_pseudocontractive",
    "make_j_pseudo_halved",
    "estimate_stats",
]

ZERO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MonotoneOperator:
    """A single-valued operator from l_s^n into its dual.

    Parameters
    ----------
    space : SpaceSpec
    fn : callable
        Maps a coordinate array of length ``space.dim`` to a dual coordinate
        array of the same length.
    claimed_eta : float
        Strong-monotonicity constant eta in
        ``<x-y, Ax-Ay> >= eta ||x-y||^exponent``; 0 means only monotone.
    exponent : float
        Exponent paired with ``claimed_eta``.
    known_zero : array, optional
        A point with ``A(known_zero) = 0``; enables error diagnostics.
    """

    space: SpaceSpec
    fn: Callable[[np.ndarray], np.ndarray]
    claimed_eta: float = 0.0
    exponent: float = 2.0
    known_zero: Optional[np.ndarray] = None
    name: str = "custom"
    degenerate: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.claimed_eta) and self.claimed_eta >= 0):
            raise InvalidParameterError(f"claimed_eta must be >= 0, got {self.claimed_eta!r}")
        probe = np.asarray(self.fn(np.zeros(self.space.dim)), dtype=float)
        if probe.shape != (self.space.dim,):
            raise ShapeError(f"operator returns shape {probe.shape}, expected ({self.space.dim},)")
        if self.known_zero is not None:
            z = np.array(self.known_zero, dtype=float)
            if z.shape != (self.space.dim,):
                raise ShapeError(f"known_zero has shape {z.shape}, expected ({self.space.dim},)")
            z.setflags(write=False)
            object.__setattr__(self, "known_zero", z)
            res = self.space.dual_norm(self.evaluate(z))
            if not res <= ZERO_TOL:
                raise InvalidParameterError(f"known_zero is not a zero: ||A(z)||_* = {res:.3e}")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Apply to a raw coordinate array."""
        return np.asarray(self.fn(x), dtype=float)

    def apply(self, x: PrimalPoint) -> DualPoint:
        _check(x, PrimalPoint)
        if x.space != self.space:
            raise ShapeError(f"point lives in {x.space}, operator in {self.space}")
        return DualPoint(self.evaluate(x.coords), self.space)

    __call__ = apply

    @property
    def zero_point(self) -> Optional[PrimalPoint]:
        return None if self.known_zero is None else PrimalPoint(self.known_zero, self.space)


@dataclass(frozen=True)
class OperatorStats:
    eta_hat: float
    bound_hat: float
    ball_radius: float
    samples: int
    seed: int

    def to_json(self):
        return dict(eta_hat=self.eta_hat, bound_hat=self.bound_hat, ball_radius=self.ball_radius,
                    samples=self.samples, seed=self.seed)


def _positive_coeffs(space, c):
    c = np.array(c, dtype=float).reshape(-1)
    if c.shape != (space.dim,):
        raise ShapeError(f"coefficient array has length {c.size}, expected {space.dim}")
    if not np.all(np.isfinite(c)) or np.any(c <= 0):
        raise InvalidParameterError("all diagonal coefficients must be finite and > 0")
    return c


def _dual_array(space, f, what):
    if isinstance(f, DualPoint):
        f = f.coords
    f = np.zeros(space.dim) if f is None else np.array(f, dtype=float).reshape(-1)
    if f.shape != (space.dim,):
        raise ShapeError(f"{what} has length {f.size}, expected {space.dim}")
    if not np.all(np.isfinite(f)):
        raise InvalidInputError(f"{what} has non-finite entries")
    return f


def make_diagonal_linear(space: SpaceSpec, c, f0=None) -> MonotoneOperator:
    """``A(x)_i = c_i x_i - f0_i`` with zero ``f0 / c``.

    Strongly monotone with ``eta = min(c)`` and exponent 2; for ``s >= 2``
    this holds in the l_s norm because ``||.||_s <= ||.||_2``.
    """
    c = _positive_coeffs(space, c)
    f0 = _dual_array(space, f0, "f0")
    c.setflags(write=False)
    f0.setflags(write=False)

    def fn(x):
        return c * x - f0

    return MonotoneOperator(space, fn, claimed_eta=float(c.min()), exponent=2.0,
                            known_zero=f0 / c, name="diagonal_linear",
                            params={"c": c.tolist(), "f0": f0.tolist()})


def make_shifted_duality(space: SpaceSpec, z) -> MonotoneOperator:
    """``A(x) = J(x) - J(z)``. Monotone with zero ``z``; no eta is claimed."""
    if isinstance(z, PrimalPoint):
        z = z.coords
    z = np.array(z, dtype=float).reshape(-1)
    if z.shape != (space.dim,) or not np.all(np.isfinite(z)):
        raise ShapeError(f"z must be a finite array of length {space.dim}")
    jz = space.J(z)
    jz.setflags(write=False)
    J = space.J

    def fn(x):
        return J(x) - jz

    return MonotoneOperator(space, fn, claimed_eta=0.0, exponent=space.p, known_zero=z,
                            name="shifted_duality", params={"z": z.tolist()})


def make_smooth_diagonal(space: SpaceSpec, c) -> MonotoneOperator:
    """``A(x)_i = c_i x_i + tanh(x_i)``; zero at the origin, ``eta = min(c)``."""
    c = _positive_coeffs(space, c)
    c.setflags(write=False)

    def fn(x):
        return c * x + np.tanh(x)

    return MonotoneOperator(space, fn, claimed_eta=float(c.min()), exponent=2.0,
                            known_zero=np.zeros(space.dim), name="smooth_diagonal",
                            params={"c": c.tolist()})


_PROBES = 4


def _looks_identically_zero(space, fn):
    rng = np.random.default_rng(0)
    pts = [np.zeros(space.dim)] + [rng.uniform(-2, 2, space.dim) for _ in range(_PROBES)]
    return all(np.max(np.abs(fn(x))) <= 1e-14 for x in pts)


def from_j_pseudocontractive(space: SpaceSpec, t_map, known_zero=None, claimed_eta=0.0,
                             exponent=2.0) -> MonotoneOperator:
    """Build ``A = J - T`` from a J-pseudocontractive map ``T : E -> E*``.

    Zeros of A are the J-fixed points of T (``Jv = Tv``), so running the
    regularized iteration on A is the same recursion as the fixed-point
    scheme ``J^{-1}((1-l)Jx + l T x - l t (Jx - Ju))``. If A vanishes at a
    handful of probe points the operator is flagged ``degenerate``.
    """
    J = space.J

    def fn(x):
        tx = np.asarray(t_map(x), dtype=float)
        if tx.shape != x.shape:
            raise ShapeError(f"T returned shape {tx.shape}, expected {x.shape}")
        return J(x) - tx

    degenerate = _looks_identically_zero(space, fn)
    return MonotoneOperator(space, fn, claimed_eta=claimed_eta, exponent=exponent,
                            known_zero=known_zero, name="j_pseudocontractive",
                            degenerate=degenerate)


def to_j_pseudocontractive(A: MonotoneOperator):
    """The map ``T = J - A``; inverse of :func:`from_j_pseudocontractive`."""
    J = A.space.J

    def t_map(x):
        return J(x) - A.evaluate(x)

    return t_map


def make_j_pseudo_halved(space: SpaceSpec, shift=None) -> MonotoneOperator:
    """``T(x) = J(x)/2 + shift`` so that ``A(x) = J(x)/2 - shift``.

    The zero is ``J^{-1}(2 shift)``. In Hilbert space A is 1/2-strongly
    monotone; elsewhere no constant is claimed.
    """
    shift = _dual_array(space, shift, "shift")
    shift.setflags(write=False)
    J = space.J

    def t_map(x):
        return 0.5 * J(x) + shift

    eta = 0.5 if space.is_hilbert else 0.0
    op = from_j_pseudocontractive(space, t_map, known_zero=space.J_inv(2.0 * shift),
                                  claimed_eta=eta, exponent=2.0)
    return MonotoneOperator(space, op.fn, op.claimed_eta, op.exponent, op.known_zero,
                            name="j_pseudo_halved", params={"shift": shift.tolist()})


def estimate_stats(A: MonotoneOperator, ball_radius: float, samples: int, seed: int = 42) -> OperatorStats:
    """Empirical strong-monotonicity constant and operator bound on a ball.

    Draws ``samples`` independent pairs uniformly in the l_s ball of radius
    ``ball_radius``. ``eta_hat`` is the smallest sampled
    ``<x-y, Ax-Ay> / ||x-y||^exponent``; a negative value is reported as is.
    ``bound_hat`` is the largest sampled ``||Ax||_*``.
    """
    if not (math.isfinite(ball_radius) and ball_radius > 0):
        raise InvalidInputError(f"ball_radius must be positive, got {ball_radius!r}")
    if isinstance(samples, bool) or int(samples) != samples or samples < 2:
        raise InvalidInputError(f"samples must be an integer >= 2, got {samples!r}")
    space = A.space
    rng = np.random.default_rng(seed)
    xs = sample_ball(rng, int(samples), space.dim, space.s, ball_radius)
    ys = sample_ball(rng, int(samples), space.dim, space.s, ball_radius)
    eta = math.inf
    bound = 0.0
    for x, y in zip(xs, ys):
        ax, ay = A.evaluate(x), A.evaluate(y)
        bound = max(bound, space.dual_norm(ax), space.dual_norm(ay))
        d = space.norm(x - y)
        if d > 0:
            eta = min(eta, float((x - y) @ (ax - ay)) / d ** A.exponent)
    if not math.isfinite(eta):
        eta = 0.0
    return OperatorStats(float(eta), float(bound), float(ball_radius), int(samples), int(seed))
