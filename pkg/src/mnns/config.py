"""Experiment configuration: TOML input, validation, solver assembly.

A run file names one command plus a table of knobs for it. Validation is
strict and front-loaded so a bad file fails before any compute starts,
with the offending key (and axis, for exponent vectors) in the message.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Mapping, Optional

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .errors import ConfigError, MnnsError
from .exponents import INF, MixedExponents
from . import suites

COMMANDS = (
    "verify-young",
    "verify-decay",
    "verify-riesz",
    "verify-bilinear",
    "scaling-check",
    "solve",
    "local-solve",
    "aniso-demo",
)

_SEEDED = {
    "verify-young",
    "verify-decay",
    "verify-riesz",
    "verify-bilinear",
    "scaling-check",
}


def parse_exponents(values, name: str) -> MixedExponents:
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{name} must be a non-empty array of exponents")
    out = []
    for k, v in enumerate(values, start=1):
        if isinstance(v, str):
            if v.lower() not in ("inf", "infinity"):
                raise ConfigError(
                    f"{name}[{k}] is {v!r}; strings other than 'inf' "
                    "are not exponents"
                )
            out.append(INF)
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name}[{k}] must be a number or 'inf'")
        else:
            out.append(float(v))
    try:
        return MixedExponents(tuple(out))
    except MnnsError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _require_number(params, key, default, low=None, high=None, integer=False):
    value = params.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if integer:
        if int(value) != value:
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        value = int(value)
    else:
        value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite, got {value!r}")
    if low is not None and value < low:
        raise ConfigError(f"{key} must be at least {low}, got {value}")
    if high is not None and value > high:
        raise ConfigError(f"{key} must be at most {high}, got {value}")
    return value


def _require_dims(params, allowed, default):
    dims = params.get("dims", list(default))
    if not isinstance(dims, list) or not dims:
        raise ConfigError("dims must be a non-empty array")
    out = []
    for d in dims:
        if isinstance(d, bool) or not isinstance(d, int) or d not in allowed:
            raise ConfigError(
                f"dims entries must come from {sorted(allowed)}, got {d!r}"
            )
        out.append(d)
    if len(set(out)) != len(out):
        raise ConfigError("dims entries must be distinct")
    return tuple(out)


def build_solver_config(params: Mapping) -> "SolverConfig":
    from .mild import SolverConfig

    p = parse_exponents(params.get("p", list(suites.SOLVE_P)), "p")
    q = parse_exponents(params.get("q", list(suites.SOLVE_Q)), "q")
    horizon = _require_number(params, "horizon", suites.SOLVE_HORIZON, low=1e-12)
    nodes = _require_number(params, "nodes", suites.SOLVE_NODES, low=2, integer=True)
    quad = _require_number(
        params, "quad_nodes", suites.SOLVE_QUAD_NODES, low=1, integer=True
    )
    tol = _require_number(params, "picard_tol", suites.SOLVE_PICARD_TOL, low=0.0)
    max_iter = _require_number(
        params, "max_iter", suites.SOLVE_MAX_ITER, low=1, integer=True
    )
    span = _require_number(params, "mesh_span", suites.SOLVE_MESH_SPAN, low=2.0)
    guard = params.get("smallness_guard", False)
    if not isinstance(guard, bool):
        raise ConfigError("smallness_guard must be a boolean")
    try:
        return SolverConfig(
            p=p,
            q=q,
            T=horizon,
            nodes=nodes,
            quad_nodes=quad,
            picard_tol=tol,
            max_iter=max_iter,
            smallness_guard=guard,
            mesh_span=span,
        )
    except MnnsError as exc:
        raise ConfigError(str(exc)) from exc


def _validate_solve(params, local: bool) -> None:
    cfg = build_solver_config(params)
    if cfg.p.n != 3:
        raise ConfigError(
            "the built-in vortex initial data needs exactly three axes, "
            f"got {cfg.p.n}"
        )
    _require_number(params, "amplitude", suites.SOLVE_AMPLITUDE, low=1e-300)
    size = _require_number(params, "grid_size", suites.SOLVE_GRID[0], low=4, integer=True)
    if size % 2:
        raise ConfigError(f"grid_size must be even, got {size}")
    _require_number(params, "half_width", suites.SOLVE_GRID[1], low=1e-12)
    if local:
        _require_number(params, "max_halvings", 60, low=1, integer=True)
    else:
        compare = params.get("compare_oracle", True)
        if not isinstance(compare, bool):
            raise ConfigError("compare_oracle must be a boolean")
        _require_number(
            params, "oracle_steps", suites.SOLVE_ORACLE_STEPS, low=1, integer=True
        )


_ALLOWED_KEYS = {
    "verify-young": {"cases_per_dim", "dims", "tolerance"},
    "verify-decay": {"pairs", "dims", "tolerance"},
    "verify-riesz": {"fields", "identity_tol", "probe_budget"},
    "verify-bilinear": {"budget"},
    "scaling-check": {"cases_per_dim", "dims", "tolerance"},
    "solve": {
        "p", "q", "horizon", "nodes", "quad_nodes", "picard_tol", "max_iter",
        "mesh_span", "smallness_guard", "amplitude", "grid_size", "half_width",
        "compare_oracle", "oracle_steps",
    },
    "local-solve": {
        "p", "q", "horizon", "nodes", "quad_nodes", "picard_tol", "max_iter",
        "mesh_span", "smallness_guard", "amplitude", "grid_size", "half_width",
        "max_halvings",
    },
    "aniso-demo": set(),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One parsed run file: a command, a seed, and its parameter table."""

    command: str
    seed: int
    params: Mapping
    digest: str
    path: Optional[str] = None

    @classmethod
    def from_text(cls, text: str, path: Optional[str] = None) -> "ExperimentConfig":
        raw = text.encode("utf-8")
        digest = hashlib.sha256(raw).hexdigest()
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"not valid TOML: {exc}") from exc
        command = data.get("command")
        if command not in COMMANDS:
            raise ConfigError(
                f"command must be one of {', '.join(COMMANDS)}; got {command!r}"
            )
        seed = data.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
        params = data.get(command, {})
        if not isinstance(params, dict):
            raise ConfigError(f"[{command}] must be a table")
        known = {"command", "seed", command}
        for key in data:
            if key not in known:
                raise ConfigError(f"unrecognized top-level key {key!r}")
        return cls(command=command, seed=seed, params=params, digest=digest, path=path)

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, path=path)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        if seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {seed}")
        return ExperimentConfig(
            command=self.command,
            seed=seed,
            params=self.params,
            digest=self.digest,
            path=self.path,
        )

    def validate(self) -> None:
        allowed = _ALLOWED_KEYS[self.command]
        for key in self.params:
            if key not in allowed:
                raise ConfigError(
                    f"[{self.command}] does not accept key {key!r}"
                )
        p = self.params
        if self.command == "verify-young":
            _require_number(p, "cases_per_dim", 100, low=1, integer=True)
            _require_dims(p, {1, 2, 3}, (1, 2, 3))
            _require_number(p, "tolerance", suites.YOUNG_TOLERANCE, low=0.0)
        elif self.command == "verify-decay":
            pairs = _require_number(p, "pairs", 20, low=1, integer=True)
            dims = _require_dims(p, {2, 3}, (2, 3))
            if pairs < len(dims):
                raise ConfigError(
                    f"pairs={pairs} cannot cover {len(dims)} dims"
                )
            _require_number(p, "tolerance", suites.DECAY_TOLERANCE, low=0.0)
        elif self.command == "verify-riesz":
            _require_number(p, "fields", 100, low=2, integer=True)
            _require_number(p, "identity_tol", suites.RIESZ_IDENTITY_TOL, low=0.0)
            _require_number(p, "probe_budget", suites.RIESZ_PROBE_BUDGET, low=0.0)
        elif self.command == "verify-bilinear":
            _require_number(p, "budget", suites.BILINEAR_BUDGET, low=0.0)
        elif self.command == "scaling-check":
            _require_number(p, "cases_per_dim", 20, low=1, integer=True)
            _require_dims(p, {1, 2, 3}, (1, 2, 3))
            _require_number(p, "tolerance", suites.SCALING_TOLERANCE, low=0.0)
        elif self.command == "solve":
            _validate_solve(p, local=False)
        elif self.command == "local-solve":
            _validate_solve(p, local=True)
