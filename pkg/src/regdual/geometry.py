"""Finite-dimensional l_s spaces with generalized duality maps.

A :class:`SpaceSpec` fixes E = l_s^n together with a gauge exponent p. Its
dual E* is l_{s'}^n with 1/s + 1/s' = 1, and the gauge-p duality map

    J(x) = ||x||_s^(p-s) * |x|^(s-1) * sign(x),    J(0) = 0,

is inverted by the gauge-q duality map of the dual space, 1/p + 1/q = 1.

The low-level helpers work on raw arrays along the last axis so that
auditors and samplers can push whole batches through them; the public
point-level functions wrap those helpers with type and shape checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError, ShapeError

__all__ = [
    "SpaceSpec",
    "PrimalPoint",
    "DualPoint",
    "norm_primal",
    "norm_dual",
    "pair",
    "duality_map",
    "inverse_duality_map",
    "modulus_bounds",
    "lp_norm",
    "duality_raw",
]


def _conjugate(r: float) -> float:
    return r / (r - 1.0)


def lp_norm(x, s: float):
    """l_s norm along the last axis.

    Rescales by the largest magnitude first so that very small or very large
    coordinates do not under/overflow in the power sums.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and s == 2.0:
        sq = float(x @ x)
        if 1e-290 < sq < 1e290:
            return math.sqrt(sq)
    a = np.abs(x)
    m = a.max(axis=-1, keepdims=True) if a.shape[-1] else np.zeros(a.shape[:-1] + (1,))
    safe = np.where(m > 0, m, 1.0)
    out = m[..., 0] * np.sum((a / safe) ** s, axis=-1) ** (1.0 / s)
    return float(out) if out.ndim == 0 else out


def duality_raw(x, s: float, p: float) -> np.ndarray:
    """Gauge-p duality map of l_s^n applied along the last axis."""
    x = np.asarray(x, dtype=float)
    if s == 2.0 and p == 2.0:
        return x.copy()
    nrm = np.asarray(lp_norm(x, s))[..., None]
    safe = np.where(nrm > 0, nrm, 1.0)
    if s == 2.0:
        return safe ** (p - 2.0) * x
    ratio = np.abs(x) / safe
    return nrm ** (p - 1.0) * ratio ** (s - 1.0) * np.sign(x)


@dataclass(frozen=True)
class SpaceSpec:
    """The space l_s^dim carrying a gauge-p duality map.

    Parameters
    ----------
    dim : int
        Number of coordinates.
    s : float
        Norm exponent, ``1 < s < inf``.
    p : float
        Gauge exponent of the duality map, ``1 < p < inf``. ``p = 2`` gives
        the normalized duality map.
    """

    dim: int
    s: float = 2.0
    p: float = 2.0

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise InvalidInputError(f"dim must be a positive integer, got {self.dim!r}")
        for name in ("s", "p"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 1.0):
                raise InvalidInputError(f"{name} must be a finite real > 1, got {v!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "p", float(self.p))

    @property
    def s_conj(self) -> float:
        return _conjugate(self.s)

    @property
    def q(self) -> float:
        return _conjugate(self.p)

    @property
    def is_hilbert(self) -> bool:
        return self.s == 2.0 and self.p == 2.0

    @property
    def in_lyapunov_regime(self) -> bool:
        """Whether ``q >= p``, i.e. ``p <= 2``, the regime in which the
        Lyapunov functionals are stated."""
        return self.p <= 2.0

    # raw-array helpers (last axis)
    def norm(self, x):
        return lp_norm(x, self.s)

    def dual_norm(self, f):
        return lp_norm(f, self.s_conj)

    def J(self, x) -> np.ndarray:
        return duality_raw(x, self.s, self.p)

    def J_inv(self, f) -> np.ndarray:
        return duality_raw(f, self.s_conj, self.q)

    def point(self, coords) -> "PrimalPoint":
        return PrimalPoint(coords, self)

    def dual_point(self, coords) -> "DualPoint":
        return DualPoint(coords, self)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.dim)


class _Point:
    side = ""
    __slots__ = ("coords", "space")

    def __init__(self, coords, space: SpaceSpec):
        arr = np.array(coords, dtype=float)
        if arr.ndim != 1:
            raise InvalidInputError(f"{self.side} point must be one-dimensional")
        if arr.shape[0] != space.dim:
            raise ShapeError(f"{self.side} point has {arr.shape[0]} coordinates, space has dim {space.dim}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError(f"{self.side} point has non-finite coordinates")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)
        object.__setattr__(self, "space", space)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __len__(self):
        return self.space.dim

    def __eq__(self, other):
        return (type(other) is type(self) and other.space == self.space
                and np.array_equal(other.coords, self.coords))

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}({self.coords.tolist()}, s={self.space.s:g}, p={self.space.p:g})"


class PrimalPoint(_Point):
    """An element of E = l_s^n."""

    side = "primal"


class DualPoint(_Point):
    """An element of E* = l_{s'}^n."""

    side = "dual"


def _check(obj, cls):
    if not isinstance(obj, cls):
        raise InvalidInputError(f"expected {cls.__name__}, got {type(obj).__name__}")


def _same_space(a: _Point, b: _Point):
    if a.space.dim != b.space.dim:
        raise ShapeError(f"dimension mismatch: {a.space.dim} vs {b.space.dim}")
    if a.space != b.space:
        raise ShapeError(f"points belong to different spaces: {a.space} vs {b.space}")


def norm_primal(x: PrimalPoint) -> float:
    """``||x||_s``."""
    _check(x, PrimalPoint)
    return lp_norm(x.coords, x.space.s)


def norm_dual(f: DualPoint) -> float:
    """``||f||_{s'}``."""
    _check(f, DualPoint)
    return lp_norm(f.coords, f.space.s_conj)


def pair(x: PrimalPoint, f: DualPoint) -> float:
    """Duality pairing ``<x, f> = sum_i x_i f_i``."""
    _check(x, PrimalPoint)
    _check(f, DualPoint)
    _same_space(x, f)
    return float(x.coords @ f.coords)


def duality_map(x: PrimalPoint) -> DualPoint:
    """Gauge-p duality map. Satisfies ``<x, Jx> = ||x||^p`` and
    ``||Jx||_* = ||x||^(p-1)``."""
    _check(x, PrimalPoint)
    return DualPoint(x.space.J(x.coords), x.space)


def inverse_duality_map(f: DualPoint) -> PrimalPoint:
    """Inverse of :func:`duality_map`, the gauge-q duality map of the dual."""
    _check(f, DualPoint)
    return PrimalPoint(f.space.J_inv(f.coords), f.space)


def modulus_bounds(space_exponent: float, arg: float, kind: str) -> float:
    """Closed-form bounds on the moduli of l_r (and L_r) spaces.

    ``kind="smoothness"`` returns the upper bound on rho(tau),
    ``kind="convexity"`` the lower bound on delta(eps) for ``eps`` in (0, 2].
    """
    r = float(space_exponent)
    if not (math.isfinite(r) and r > 1.0):
        raise DomainError(f"space exponent must exceed 1, got {space_exponent!r}")
    t = float(arg)
    if kind == "smoothness":
        if not (math.isfinite(t) and t >= 0.0):
            raise DomainError(f"tau must be a nonnegative real, got {arg!r}")
        return t ** r / r if r < 2.0 else 0.5 * (r - 1.0) * t * t
    if kind == "convexity":
        if not (0.0 < t <= 2.0):
            raise DomainError(f"epsilon must lie in (0, 2], got {arg!r}")
        return t * t / 2.0 ** (r + 1.0) if r < 2.0 else t ** r
    raise DomainError(f"unknown modulus kind {kind!r}; use 'smoothness' or 'convexity'")
