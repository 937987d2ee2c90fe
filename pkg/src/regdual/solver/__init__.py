"""Iteration engines, resolvent solves and trace diagnostics."""

from .diagnostics import XuReport, check_xu_recursion, track_diagnostics
from .engines import (SCHEMES, RunTrace, SolveConfig, TraceRow, run_accretive_hilbert, run_mann,
                      run_regularized, run_scheme, run_unregularized)
from .resolvent import ResolventResult, regularization_path, resolvents_at, solve_resolvent
from .schedule import CONDITIONS, Schedule, ScheduleReport, schedule_values, validate_schedule

__all__ = [
    "CONDITIONS", "SCHEMES", "ResolventResult", "RunTrace", "Schedule", "ScheduleReport",
    "SolveConfig", "TraceRow", "XuReport", "check_xu_recursion", "regularization_path",
    "resolvents_at", "run_accretive_hilbert", "run_mann", "run_regularized", "run_scheme",
    "run_unregularized", "schedule_values", "solve_resolvent", "track_diagnostics",
    "validate_schedule",
]
