"""Lyapunov functionals phi, phi_p, V_p and randomized inequality auditors.

    phi(x, y)    = ||x||^2 - 2 <x, J_2 y> + ||y||^2
    phi_p(x, y)  = (p/q) ||x||^q - p <x, J_p y> + ||y||^p
    V_p(x, f)    = (p/q) ||x||^q - p <x, f> + ||f||_*^p

Each auditor samples points, evaluates a margin (LHS - RHS oriented so that
a nonnegative margin means the inequality holds) and summarizes violations
in an :class:`AuditReport`. Sampling is done in fixed-size blocks whose
generators are seeded from ``(seed, block index)``, so a report does not
depend on how the blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .geometry import DualPoint, PrimalPoint, SpaceSpec, _check, _same_space, duality_raw, lp_norm

__all__ = [
    "AuditReport",
    "INEQUALITIES",
    "phi",
    "phi_p",
    "v_p",
    "phi_bounds_margin",
    "lemma_ball_margin",
    "vp_shift_margin",
    "three_point_margin",
    "audit_phi_bounds",
    "audit_lemma_ball",
    "audit_vp_shift",
    "audit_three_point",
    "run_audit",
]

VIOLATION_TOL = 1e-12
BLOCK = 4096
COORD_RANGE = 2.0


# -- raw batch formulas -----------------------------------------------------

def phi_raw(space: SpaceSpec, x, y):
    j2 = duality_raw(y, space.s, 2.0)
    nx = np.float64(lp_norm(x, space.s))
    ny = np.float64(lp_norm(y, space.s))
    return nx * nx - 2.0 * np.sum(x * j2, axis=-1) + ny * ny


def phi_p_raw(space: SpaceSpec, x, y):
    p, q = space.p, space.q
    jy = space.J(y)
    return (p / q) * np.power(lp_norm(x, space.s), q) - p * np.sum(x * jy, axis=-1) + np.power(lp_norm(y, space.s), p)


def v_p_raw(space: SpaceSpec, x, f):
    p, q = space.p, space.q
    return (p / q) * np.power(lp_norm(x, space.s), q) - p * np.sum(x * f, axis=-1) + np.power(lp_norm(f, space.s_conj), p)


def _phi_bounds_parts(space, x, y):
    nx, ny = lp_norm(x, space.s), lp_norm(y, space.s)
    val = phi_p_raw(space, x, y)
    lower = np.abs(nx - ny) ** space.p
    upper = (nx + ny) ** space.p
    return val, lower, upper


def phi_bounds_margin(space, x, y):
    """``min(phi_p - (||x||-||y||)^p, (||x||+||y||)^p - phi_p)``.

    The lower bound is read with ``|.|`` so that it is defined for real p.
    """
    val, lower, upper = _phi_bounds_parts(space, x, y)
    return np.minimum(val - lower, upper - val)


def lemma_ball_margin(space, x, y):
    """``||x - y||^p - (phi_p(x, y) - (p/q)||x||^q)``."""
    p, q = space.p, space.q
    rhs = phi_p_raw(space, x, y) - (p / q) * lp_norm(x, space.s) ** q
    return lp_norm(np.asarray(x) - y, space.s) ** p - rhs


def vp_shift_margin(space, x, xs, ys):
    """``V_p(x, x*+y*) - V_p(x, x*) - p <J^{-1}x* - x, y*>``."""
    lhs = v_p_raw(space, x, xs) + space.p * np.sum((space.J_inv(xs) - x) * ys, axis=-1)
    return v_p_raw(space, x, np.asarray(xs) + ys) - lhs


def _three_point_parts(space, x, y, z):
    lhs = phi_p_raw(space, y, x) - phi_p_raw(space, y, z)
    rhs = space.p * np.sum((np.asarray(z) - y) * (space.J(x) - space.J(z)), axis=-1)
    return lhs, rhs


def three_point_margin(space, x, y, z):
    """``phi_p(y, x) - phi_p(y, z) - p <z - y, Jx - Jz>``."""
    lhs, rhs = _three_point_parts(space, x, y, z)
    return lhs - rhs


# -- point-level API --------------------------------------------------------

def phi(x: PrimalPoint, y: PrimalPoint) -> float:
    """Normalized Lyapunov functional; always uses the gauge-2 duality map."""
    _check(x, PrimalPoint)
    _check(y, PrimalPoint)
    _same_space(x, y)
    return float(phi_raw(x.space, x.coords, y.coords))


def phi_p(x: PrimalPoint, y: PrimalPoint) -> float:
    """Generalized Lyapunov functional with the space's gauge exponent."""
    _check(x, PrimalPoint)
    _check(y, PrimalPoint)
    _same_space(x, y)
    return float(phi_p_raw(x.space, x.coords, y.coords))


def v_p(x: PrimalPoint, f: DualPoint) -> float:
    """``V_p(x, f) = (p/q)||x||^q - p <x, f> + ||f||_*^p``.

    Equals ``phi_p(x, J^{-1} f)`` when p = 2. For other gauges the last terms
    differ, since ``||J^{-1} f||^p = ||f||_*^q``.
    """
    _check(x, PrimalPoint)
    _check(f, DualPoint)
    _same_space(x, f)
    return float(v_p_raw(x.space, x.coords, f.coords))


# -- auditing ---------------------------------------------------------------

@dataclass
class AuditReport:
    """Outcome of one randomized inequality audit.

    ``worst_margin`` is the most negative margin among the violating samples
    (0.0 when there are none). ``witness`` always describes the sample with
    the smallest margin, violating or not. ``fixtures`` lists the outcome of
    every force-included sample.
    """

    inequality: str
    samples: int
    violations: int
    worst_margin: float
    witness: dict
    seed: int
    fixtures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "inequality": self.inequality,
            "samples": self.samples,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "witness": self.witness,
            "seed": self.seed,
            "fixtures": self.fixtures,
        }


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))


def _draw(seed, samples, draw_block):
    """Concatenate per-block draws; ``draw_block(rng, m)`` returns a tuple of
    arrays with leading dimension m."""
    parts = []
    for b, start in enumerate(range(0, samples, BLOCK)):
        m = min(BLOCK, samples - start)
        parts.append(draw_block(_block_rng(seed, b), m))
    return tuple(np.concatenate(cols, axis=0) for cols in zip(*parts))


def _cube(rng, m, n):
    return rng.uniform(-COORD_RANGE, COORD_RANGE, size=(m, n))


def sample_ball(rng, m, n, s, radius):
    """Uniform samples from the l_s ball of the given radius.

    Uses generalized-Gaussian coordinates plus an exponential slack variable,
    which yields the uniform law on the l_s^n unit ball.
    """
    g = rng.gamma(1.0 / s, 1.0, size=(m, n)) ** (1.0 / s) * rng.choice([-1.0, 1.0], size=(m, n))
    w = rng.exponential(1.0, size=(m, 1))
    denom = (np.sum(np.abs(g) ** s, axis=1, keepdims=True) + w) ** (1.0 / s)
    return radius * g / denom


def _embed(values, dim):
    out = np.zeros(dim)
    k = min(len(values), dim)
    out[:k] = values[:k]
    return out


def _check_samples(samples):
    if isinstance(samples, bool) or int(samples) != samples or samples < 1:
        raise InvalidInputError(f"samples must be a positive integer, got {samples!r}")
    return int(samples)


def _summarize(name, space, seed, margins, points, fixtures, extra=None):
    margins = np.asarray(margins, dtype=float)
    # NaN margins count as violations: the inequality could not be confirmed
    bad = ~(margins >= -VIOLATION_TOL)
    nviol = int(bad.sum())
    worst = float(np.min(margins[bad])) if nviol else 0.0
    i = int(np.argmin(np.where(np.isnan(margins), -np.inf, margins)))
    witness = {
        "index": i,
        "margin": float(margins[i]),
        "dim": space.dim,
        "s": space.s,
        "p": space.p,
        "seed": seed,
        "block": i // BLOCK,
    }
    for key, arr in points.items():
        witness[key] = np.asarray(arr[i]).tolist()
    if extra:
        witness.update(extra)
    return AuditReport(name, len(margins), nviol, worst, witness, seed, fixtures)


def _fixture_entry(name, margin, **values):
    entry = {"name": name, "margin": float(margin), "violated": bool(margin < -VIOLATION_TOL)}
    for k, v in values.items():
        entry[k] = np.asarray(v).tolist() if isinstance(v, np.ndarray) else float(v)
    return entry


def audit_phi_bounds(space: SpaceSpec, samples: int, seed: int = 42) -> AuditReport:
    """Check ``(||x||-||y||)^p <= phi_p(x, y) <= (||x||+||y||)^p``.

    The first sample is the fixture ``x = y = 0.5 e_1``.
    """
    samples = _check_samples(samples)
    n = space.dim
    x, y = _draw(seed, samples, lambda rng, m: (_cube(rng, m, n), _cube(rng, m, n)))
    fx = _embed([0.5], n)
    x[0], y[0] = fx, fx
    val, lower, upper = _phi_bounds_parts(space, x, y)
    margins = np.minimum(val - lower, upper - val)
    fixtures = [_fixture_entry("x=y=0.5e1", margins[0], x=fx, y=fx, phi_p=val[0],
                               lower=lower[0], upper=upper[0])]
    return _summarize("phi_bounds", space, seed, margins, {"x": x, "y": y}, fixtures)


def audit_lemma_ball(space: SpaceSpec, d: float, samples: int, seed: int = 42) -> AuditReport:
    """Check ``||x-y||^p >= phi_p(x, y) - (p/q)||x||^q`` for x, y uniform in
    the closed l_s ball of radius ``d``."""
    samples = _check_samples(samples)
    if not (math.isfinite(d) and d > 0):
        raise InvalidInputError(f"ball radius must be positive, got {d!r}")
    n, s = space.dim, space.s
    x, y = _draw(seed, samples,
                 lambda rng, m: (sample_ball(rng, m, n, s, d), sample_ball(rng, m, n, s, d)))
    margins = lemma_ball_margin(space, x, y)
    return _summarize("lemma_ball", space, seed, margins, {"x": x, "y": y}, [], {"radius": float(d)})


def audit_vp_shift(space: SpaceSpec, samples: int, seed: int = 42) -> AuditReport:
    """Check ``V_p(x, x*) + p <J^{-1}x* - x, y*> <= V_p(x, x* + y*)``."""
    samples = _check_samples(samples)
    n = space.dim
    x, xs, ys = _draw(seed, samples,
                      lambda rng, m: (_cube(rng, m, n), _cube(rng, m, n), _cube(rng, m, n)))
    margins = vp_shift_margin(space, x, xs, ys)
    return _summarize("vp_shift", space, seed, margins, {"x": x, "x_star": xs, "y_star": ys}, [])


def audit_three_point(space: SpaceSpec, samples: int, seed: int = 42) -> AuditReport:
    """Check ``phi_p(y, x) - phi_p(y, z) >= p <z - y, Jx - Jz>``.

    The first sample is the fixture ``y = e_1, x = 2 e_1, z = 3 e_1``.
    """
    samples = _check_samples(samples)
    n = space.dim
    x, y, z = _draw(seed, samples,
                    lambda rng, m: (_cube(rng, m, n), _cube(rng, m, n), _cube(rng, m, n)))
    x[0], y[0], z[0] = _embed([2.0], n), _embed([1.0], n), _embed([3.0], n)
    lhs, rhs = _three_point_parts(space, x, y, z)
    margins = lhs - rhs
    fixtures = [_fixture_entry("y=e1,x=2e1,z=3e1", margins[0], x=x[0], y=y[0], z=z[0],
                               lhs=lhs[0], rhs=rhs[0])]
    return _summarize("three_point", space, seed, margins, {"x": x, "y": y, "z": z}, fixtures)


INEQUALITIES = ("phi_bounds", "lemma_ball", "vp_shift", "three_point")


def run_audit(space: SpaceSpec, name: str, samples: int, seed: int = 42, radius: float = 1.0):
    """Run one named audit, or all four with ``name="all"``; returns a list."""
    runners = {
        "phi_bounds": lambda: audit_phi_bounds(space, samples, seed),
        "lemma_ball": lambda: audit_lemma_ball(space, radius, samples, seed),
        "vp_shift": lambda: audit_vp_shift(space, samples, seed),
        "three_point": lambda: audit_three_point(space, samples, seed),
    }
    if name == "all":
        return [runners[k]() for k in INEQUALITIES]
    if name not in runners:
        raise KeyError(name)
    return [runners[name]()]
