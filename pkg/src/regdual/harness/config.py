"""Experiment configuration: JSON parsing, validation and object builders.

Layout::

    {
      "space":    {"dim": 2, "s": 2, "gauge_p": 2},
      "operator": {"kind": "diagonal_linear", "params": [1, 2], "shift": [0, 0]},
      "schedule": {"a": 0.6, "b": 0.3}          | {"lambda": [...], "theta": [...]},
      "run":      {"scheme": "regularized", "max_iter": 1000, "target_residual": 1e-10,
                   "record_every": 100, "x1": [1, 1], "seed": 42, "track_path": false},
      "output":   {"csv_path": "trace.csv", "json_path": "summary.json"}
    }

``schedule`` and ``output`` are optional; unknown keys anywhere are errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from ..errors import RegdualError
from ..geometry import SpaceSpec
from ..operators import (make_diagonal_linear, make_j_pseudo_halved, make_shifted_duality,
                         make_smooth_diagonal)
from ..solver.engines import HILBERT_ONLY, SCHEMES, SolveConfig
from ..solver.schedule import Schedule

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "load_preset",
    "preset_names",
    "OPERATOR_KINDS",
]

OPERATOR_KINDS = ("diagonal_linear", "shifted_duality", "smooth_diagonal", "j_pseudo_halved")
DEFAULT_A, DEFAULT_B = 0.6, 0.3
DEFAULT_SEED = 42


class ConfigError(RegdualError, ValueError):
    """Malformed or invalid configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field or None


@dataclass(frozen=True)
class SpaceConfig:
    dim: int
    s: float = 2.0
    gauge_p: float = 2.0


@dataclass(frozen=True)
class OperatorConfig:
    kind: str
    params: tuple = ()
    shift: Optional[tuple] = None


@dataclass(frozen=True)
class ScheduleConfig:
    a: Optional[float] = None
    b: Optional[float] = None
    lam: Optional[tuple] = None
    theta: Optional[tuple] = None


@dataclass(frozen=True)
class RunConfig:
    scheme: str
    max_iter: int
    x1: tuple
    target_residual: float = 1e-10
    record_every: int = 100
    seed: int = DEFAULT_SEED
    track_path: bool = False


@dataclass(frozen=True)
class OutputConfig:
    csv_path: str = "trace.csv"
    json_path: str = "summary.json"


@dataclass(frozen=True)
class ExperimentConfig:
    space: SpaceConfig
    operator: OperatorConfig
    schedule: ScheduleConfig
    run: RunConfig
    output: OutputConfig = field(default_factory=OutputConfig)
    name: str = ""

    def to_json(self) -> dict:
        sched = {"a": self.schedule.a, "b": self.schedule.b} if self.schedule.lam is None else \
            {"lambda": list(self.schedule.lam), **({"theta": list(self.schedule.theta)}
                                                   if self.schedule.theta is not None else {})}
        op = {"kind": self.operator.kind, "params": list(self.operator.params)}
        if self.operator.shift is not None:
            op["shift"] = list(self.operator.shift)
        run = asdict(self.run)
        run["x1"] = list(self.run.x1)
        out = {"space": asdict(self.space), "operator": op, "schedule": sched, "run": run,
               "output": asdict(self.output)}
        if self.name:
            out["name"] = self.name
        return out

    # builders
    def build_space(self) -> SpaceSpec:
        return SpaceSpec(self.space.dim, self.space.s, self.space.gauge_p)

    def build_operator(self, space=None):
        space = space or self.build_space()
        op = self.operator
        if op.kind == "diagonal_linear":
            return make_diagonal_linear(space, op.params, op.shift)
        if op.kind == "shifted_duality":
            return make_shifted_duality(space, op.params)
        if op.kind == "smooth_diagonal":
            return make_smooth_diagonal(space, op.params)
        return make_j_pseudo_halved(space, op.shift)

    def build_schedule(self) -> Schedule:
        sc = self.schedule
        if sc.lam is not None:
            return Schedule.explicit(sc.lam, sc.theta)
        return Schedule.prototype(sc.a, sc.b)

    def build_solve_config(self, space=None) -> SolveConfig:
        space = space or self.build_space()
        return SolveConfig(space.point(self.run.x1), max_iter=self.run.max_iter,
                           target_residual=self.run.target_residual,
                           record_every=self.run.record_every)


# -- validation helpers -----------------------------------------------------

def _obj(d, where, required, optional):
    if not isinstance(d, dict):
        raise ConfigError("must be a JSON object", where)
    unknown = sorted(set(d) - set(required) - set(optional))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown}", where)
    for k in required:
        if k not in d:
            raise ConfigError("missing required key", f"{where}.{k}" if where else k)
    return d


def _real(v, where, lo=None, lo_open=True, hi=None):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {v!r}", where)
    v = float(v)
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise ConfigError(f"must be {'>' if lo_open else '>='} {lo:g}, got {v:g}", where)
    if hi is not None and v > hi:
        raise ConfigError(f"must be <= {hi:g}, got {v:g}", where)
    return v


def _int(v, where, lo=1):
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise ConfigError(f"expected an integer >= {lo}, got {v!r}", where)
    return v


def _array(v, where, length=None):
    if not isinstance(v, list):
        raise ConfigError("expected an array of numbers", where)
    vals = tuple(_real(x, f"{where}[{i}]") for i, x in enumerate(v))
    if length is not None and len(vals) != length:
        raise ConfigError(f"length {len(vals)} does not match space.dim = {length}", where)
    return vals


def _from_dict(d: dict) -> ExperimentConfig:
    _obj(d, "", ("space", "operator", "run"), ("schedule", "output", "name"))

    sp = _obj(d["space"], "space", ("dim",), ("s", "gauge_p"))
    dim = _int(sp["dim"], "space.dim")
    space = SpaceConfig(dim, _real(sp.get("s", 2.0), "space.s", lo=1.0),
                        _real(sp.get("gauge_p", 2.0), "space.gauge_p", lo=1.0))

    op = _obj(d["operator"], "operator", ("kind",), ("params", "shift"))
    kind = op["kind"]
    if kind not in OPERATOR_KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {list(OPERATOR_KINDS)}", "operator.kind")
    if kind == "j_pseudo_halved":
        params = _array(op.get("params", []), "operator.params")
        if params:
            raise ConfigError("j_pseudo_halved takes no params; use operator.shift", "operator.params")
    else:
        if "params" not in op:
            raise ConfigError("missing required key", "operator.params")
        params = _array(op["params"], "operator.params", dim)
        if kind in ("diagonal_linear", "smooth_diagonal") and min(params) <= 0:
            raise ConfigError("diagonal coefficients must be > 0", "operator.params")
    shift = None
    if "shift" in op:
        if kind in ("shifted_duality", "smooth_diagonal"):
            raise ConfigError(f"{kind} does not take a shift", "operator.shift")
        shift = _array(op["shift"], "operator.shift", dim)
    operator = OperatorConfig(kind, params, shift)

    sc = d.get("schedule", {})
    if isinstance(sc, dict) and ("lambda" in sc or "theta" in sc):
        _obj(sc, "schedule", ("lambda",), ("theta",))
        lam = _array(sc["lambda"], "schedule.lambda")
        theta = _array(sc["theta"], "schedule.theta") if "theta" in sc else None
        if not lam:
            raise ConfigError("must not be empty", "schedule.lambda")
        if any(not 0 < v < 1 for v in lam):
            raise ConfigError("values must lie in (0, 1)", "schedule.lambda")
        if theta is not None:
            if len(theta) != len(lam):
                raise ConfigError("must have the same length as schedule.lambda", "schedule.theta")
            if any(not 0 < v < 1 for v in theta):
                raise ConfigError("values must lie in (0, 1)", "schedule.theta")
            if any(b > a for a, b in zip(theta, theta[1:])):
                raise ConfigError("must be nonincreasing", "schedule.theta")
        schedule = ScheduleConfig(lam=lam, theta=theta)
    else:
        _obj(sc, "schedule", (), ("a", "b"))
        b = sc.get("b", DEFAULT_B)
        schedule = ScheduleConfig(_real(sc.get("a", DEFAULT_A), "schedule.a", lo=0.0),
                                  None if b is None else _real(b, "schedule.b", lo=0.0))

    rn = _obj(d["run"], "run", ("scheme", "max_iter", "x1"),
              ("target_residual", "record_every", "seed", "track_path"))
    scheme = rn["scheme"]
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; expected one of {list(SCHEMES)}", "run.scheme")
    if scheme in HILBERT_ONLY and not (space.s == 2.0 and space.gauge_p == 2.0):
        raise ConfigError(f"scheme {scheme!r} requires s = 2 and gauge_p = 2", "run.scheme")
    track = rn.get("track_path", False)
    if not isinstance(track, bool):
        raise ConfigError("expected true or false", "run.track_path")
    run = RunConfig(
        scheme=scheme,
        max_iter=_int(rn["max_iter"], "run.max_iter"),
        x1=_array(rn["x1"], "run.x1", dim),
        target_residual=_real(rn.get("target_residual", 1e-10), "run.target_residual", lo=0.0, lo_open=False),
        record_every=_int(rn.get("record_every", 100), "run.record_every"),
        seed=_int(rn.get("seed", DEFAULT_SEED), "run.seed", lo=0),
        track_path=track,
    )
    if scheme in ("regularized", "accretive") and schedule.lam is None and schedule.b is None:
        raise ConfigError(f"scheme {scheme!r} needs theta (schedule.b)", "schedule.b")
    if scheme in ("regularized", "accretive") and schedule.lam is not None and schedule.theta is None:
        raise ConfigError(f"scheme {scheme!r} needs schedule.theta", "schedule.theta")
    if schedule.lam is not None and len(schedule.lam) < run.max_iter:
        raise ConfigError(f"explicit schedule has {len(schedule.lam)} entries, run.max_iter is {run.max_iter}",
                          "schedule.lambda")
    if track and not (schedule.theta is not None or (schedule.lam is None and schedule.b is not None)):
        raise ConfigError("path tracking needs a theta sequence", "run.track_path")

    out = _obj(d.get("output", {}), "output", (), ("csv_path", "json_path"))
    for k in ("csv_path", "json_path"):
        if k in out and (not isinstance(out[k], str) or not out[k]):
            raise ConfigError("expected a non-empty string", f"output.{k}")
    output = OutputConfig(**out)

    name = d.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("expected a string", "name")
    cfg = ExperimentConfig(space, operator, schedule, run, output, name)
    try:
        cfg.build_operator()
    except RegdualError as exc:
        raise ConfigError(str(exc), "operator") from exc
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment configuration."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return _from_dict(d)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def preset_names():
    files = resources.files(__package__).joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def load_preset(name: str) -> ExperimentConfig:
    if name not in preset_names():
        raise ConfigError(f"unknown preset {name!r}; available: {preset_names()}", "preset")
    text = resources.files(__package__).joinpath("presets", f"{name}.json").read_text(encoding="utf-8")
    return parse_config(text)
