"""Step-size and regularization schedules (lambda_n, theta_n), n >= 1.

Prototype schedules are ``lambda_n = (n+1)^-a`` and ``theta_n = (n+1)^-b``.
Explicit schedules index user-supplied sequences directly, with
``lambda_n = lam[n-1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ScheduleError, ScheduleRangeError

__all__ = ["Schedule", "ScheduleReport", "schedule_values", "validate_schedule", "CONDITIONS"]

# Human-readable statement of every condition validate_schedule can report.
CONDITIONS = {
    "values_in_unit_interval": "lambda_n and theta_n must lie in (0, 1)",
    "theta_decreasing_to_zero": "theta_n must be decreasing with limit 0",
    "lambda_theta_sum_diverges": "sum of lambda_n * theta_n must diverge",
    "theta_ratio_vanishes": "((theta_{n-1}/theta_n) - 1) / (lambda_n theta_n) must tend to 0",
    "lambda_squared_summable": "sum of lambda_n^2 must converge (needs a > 1/2)",
    "b_less_than_a": "prototype exponents must satisfy 0 < b < a",
    "a_plus_b_below_one": "prototype exponents must satisfy a + b < 1",
    "lambda_sum_diverges": "sum of lambda_n must diverge (needs a <= 1)",
}


@dataclass(frozen=True)
class Schedule:
    """Either prototype exponents ``(a, b)`` or explicit sequences.

    ``b=None`` (or ``theta=None``) means no regularization sequence; such a
    schedule only drives the unregularized schemes.
    """

    a: Optional[float] = None
    b: Optional[float] = None
    lam: Optional[tuple] = None
    theta: Optional[tuple] = None

    def __post_init__(self):
        if self.lam is None:
            if self.a is None:
                raise ScheduleError("a prototype schedule needs exponent a")
            for name in ("a", "b"):
                v = getattr(self, name)
                if v is not None and not (math.isfinite(v) and v > 0):
                    raise ScheduleError(f"exponent {name} must be a positive real, got {v!r}",
                                        ["values_in_unit_interval"])
            return
        if self.a is not None or self.b is not None:
            raise ScheduleError("give either exponents (a, b) or explicit sequences, not both")
        lam = tuple(float(v) for v in self.lam)
        if not lam:
            raise ScheduleError("explicit lambda sequence is empty")
        if not all(0.0 < v < 1.0 for v in lam):
            raise ScheduleError("explicit lambda values must lie in (0, 1)", ["values_in_unit_interval"])
        object.__setattr__(self, "lam", lam)
        if self.theta is not None:
            theta = tuple(float(v) for v in self.theta)
            if len(theta) != len(lam):
                raise ScheduleError(f"theta has {len(theta)} entries, lambda has {len(lam)}")
            if not all(0.0 < v < 1.0 for v in theta):
                raise ScheduleError("explicit theta values must lie in (0, 1)", ["values_in_unit_interval"])
            if any(t1 > t0 for t0, t1 in zip(theta, theta[1:])):
                raise ScheduleError("explicit theta must be nonincreasing", ["theta_decreasing_to_zero"])
            object.__setattr__(self, "theta", theta)

    @classmethod
    def prototype(cls, a=0.6, b=0.3):
        return cls(a=a, b=b)

    @classmethod
    def explicit(cls, lam, theta=None):
        return cls(lam=tuple(lam), theta=None if theta is None else tuple(theta))

    @property
    def is_explicit(self) -> bool:
        return self.lam is not None

    @property
    def has_theta(self) -> bool:
        return self.b is not None if not self.is_explicit else self.theta is not None

    @property
    def length(self) -> Optional[int]:
        return len(self.lam) if self.is_explicit else None

    def arrays(self, n_max: int):
        """``(lambda_1..lambda_n_max, theta_1..theta_n_max)`` as float arrays.

        Theta is all zeros when the schedule has none.
        """
        if self.is_explicit:
            if n_max > len(self.lam):
                raise ScheduleRangeError(f"explicit schedule has {len(self.lam)} entries, {n_max} requested")
            lam = np.array(self.lam[:n_max])
            theta = np.array(self.theta[:n_max]) if self.theta is not None else np.zeros(n_max)
            return lam, theta
        base = np.arange(2, n_max + 2, dtype=float)
        lam = base ** (-self.a)
        theta = base ** (-self.b) if self.b is not None else np.zeros(n_max)
        return lam, theta

    def to_json(self):
        if self.is_explicit:
            out = {"lambda": list(self.lam)}
            if self.theta is not None:
                out["theta"] = list(self.theta)
            return out
        return {"a": self.a, "b": self.b}


def schedule_values(sched: Schedule, n: int):
    """``(lambda_n, theta_n)`` for ``n >= 1``; theta is 0.0 when absent."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"schedule index must be an integer >= 1, got {n!r}")
    n = int(n)
    if sched.is_explicit:
        if n > len(sched.lam):
            raise ScheduleRangeError(f"index {n} is past the end of an explicit schedule of length {len(sched.lam)}")
        theta = sched.theta[n - 1] if sched.theta is not None else 0.0
        return sched.lam[n - 1], theta
    lam = (n + 1.0) ** (-sched.a)
    theta = (n + 1.0) ** (-sched.b) if sched.b is not None else 0.0
    return lam, theta


@dataclass
class ScheduleReport:
    """Per-condition outcome: True, False, or None when not decidable."""

    conditions: dict = field(default_factory=dict)
    regularized: bool = True

    @property
    def valid(self) -> bool:
        return all(v is not False for v in self.conditions.values())

    @property
    def failures(self) -> list:
        return [k for k, v in self.conditions.items() if v is False]

    @property
    def messages(self) -> list:
        return [f"{k}: {CONDITIONS[k]}" for k in self.failures]

    def raise_if_invalid(self):
        if not self.valid:
            raise ScheduleError("schedule rejected; " + "; ".join(self.messages), self.failures)

    def to_json(self):
        return {"valid": self.valid, "conditions": dict(self.conditions), "failures": self.failures}


def _doubling_ratio(terms):
    """Ratio of the partial-sum increment over (H/2, H] to that over
    (H/4, H/2]. Above 1 the tail grows, well below 1 it shrinks
    geometrically; a p-series n^-r gives about 2^(1-r)."""
    h = len(terms)
    late = float(np.sum(terms[h // 2:]))
    early = float(np.sum(terms[h // 4:h // 2]))
    if early == 0.0:
        return math.inf if late > 0 else 0.0
    return late / early


def validate_schedule(sched: Schedule, horizon: int = 10_000, regularized: bool = True) -> ScheduleReport:
    """Check the convergence conditions on a schedule.

    Prototype schedules are decided analytically from ``(a, b)``. Explicit
    sequences are checked numerically over the first ``horizon`` terms:
    pointwise conditions exactly, series conditions with a doubling-ratio
    heuristic. With ``regularized=False`` theta is ignored and only the step
    sizes are checked.
    """
    if isinstance(horizon, bool) or int(horizon) != horizon or horizon < 2:
        raise ValueError(f"horizon must be an integer >= 2, got {horizon!r}")
    report = ScheduleReport(regularized=regularized)
    c = report.conditions
    if not sched.is_explicit:
        a, b = sched.a, sched.b
        c["values_in_unit_interval"] = a > 0 and (b is None or b > 0)
        if not regularized:
            c["lambda_sum_diverges"] = a <= 1.0
            c["lambda_squared_summable"] = a > 0.5
            return report
        if b is None:
            c["theta_decreasing_to_zero"] = False
            return report
        c["theta_decreasing_to_zero"] = b > 0
        c["lambda_theta_sum_diverges"] = a + b <= 1.0
        c["theta_ratio_vanishes"] = a + b < 1.0
        c["lambda_squared_summable"] = a > 0.5
        c["b_less_than_a"] = 0 < b < a
        c["a_plus_b_below_one"] = a + b < 1.0
        return report

    h = min(int(horizon), len(sched.lam))
    lam, theta = sched.arrays(h)
    c["values_in_unit_interval"] = True  # enforced at construction
    enough = h >= 8
    lam_sq = _doubling_ratio(lam * lam) if enough else None
    if not regularized:
        c["lambda_sum_diverges"] = (_doubling_ratio(lam) >= 1.0) if enough else None
        c["lambda_squared_summable"] = (lam_sq < 1.0) if enough else None
        return report
    if sched.theta is None:
        c["theta_decreasing_to_zero"] = False
        return report
    c["theta_decreasing_to_zero"] = bool(np.all(np.diff(theta) < 0))
    if not enough:
        for key in ("lambda_theta_sum_diverges", "theta_ratio_vanishes", "lambda_squared_summable"):
            c[key] = None
        return report
    c["lambda_theta_sum_diverges"] = _doubling_ratio(lam * theta) >= 1.0
    ratio = np.abs((theta[:-1] / theta[1:] - 1.0) / (lam[1:] * theta[1:]))
    q = len(ratio) // 4
    tail, mid = ratio[3 * q:], ratio[q:2 * q]
    c["theta_ratio_vanishes"] = bool(np.max(tail) <= 1e-12 or np.mean(tail) < np.mean(mid))
    c["lambda_squared_summable"] = lam_sq < 1.0
    return report
