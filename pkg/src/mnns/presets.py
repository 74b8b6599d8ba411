"""Canned run configurations, emitted as TOML text.

Each preset is a complete config file: pipe it to disk, then feed it back
through `run --config`. Values mirror the suite defaults so a preset run
reproduces the benchmark numbers exactly.
"""

from __future__ import annotations

from . import suites
from .errors import ConfigError

_SOLVE_COMMON = """\
grid_size = {grid}
half_width = {half!r}
p = [3.0, 3.0, 3.0]
q = [6.0, 6.0, 6.0]
horizon = {horizon!r}
nodes = {nodes}
quad_nodes = {quad}
picard_tol = {tol!r}
max_iter = {max_iter}
mesh_span = {span!r}
"""


def _tg_small() -> str:
    body = _SOLVE_COMMON.format(
        grid=suites.SOLVE_GRID[0],
        half=suites.SOLVE_GRID[1],
        horizon=suites.SOLVE_HORIZON,
        nodes=suites.SOLVE_NODES,
        quad=suites.SOLVE_QUAD_NODES,
        tol=suites.SOLVE_PICARD_TOL,
        max_iter=suites.SOLVE_MAX_ITER,
        span=suites.SOLVE_MESH_SPAN,
    )
    return (
        "# Small-amplitude vortex data on a three-axis torus: one global\n"
        "# Picard solve plus a cross-check against the time stepper.\n"
        "# Runs in a few minutes on one core.\n"
        'command = "solve"\n'
        "seed = 0\n"
        "\n"
        "[solve]\n"
        f"amplitude = {suites.SOLVE_AMPLITUDE!r}\n"
        + body
        + "compare_oracle = true\n"
        f"oracle_steps = {suites.SOLVE_ORACLE_STEPS}\n"
    )


def _tg_large_local() -> str:
    body = _SOLVE_COMMON.format(
        grid=suites.SOLVE_GRID[0],
        half=suites.SOLVE_GRID[1],
        horizon=suites.SOLVE_HORIZON,
        nodes=suites.SOLVE_NODES,
        quad=suites.SOLVE_QUAD_NODES,
        tol=suites.SOLVE_PICARD_TOL,
        max_iter=suites.LOCAL_MAX_ITER,
        span=suites.SOLVE_MESH_SPAN,
    )
    return (
        "# The same vortex data scaled far past the smallness threshold:\n"
        "# the horizon is halved until contraction holds, then the short-\n"
        "# time solution is built there. Runs in a few minutes on one core.\n"
        'command = "local-solve"\n'
        "seed = 0\n"
        "\n"
        "[local-solve]\n"
        f"amplitude = {suites.SOLVE_AMPLITUDE * suites.LOCAL_FACTOR!r}\n"
        + body
        + "max_halvings = 60\n"
    )


def _aniso_demo() -> str:
    return (
        "# Growth curves of a two-rate tail profile: the mixed norm with a\n"
        "# large first exponent saturates as the box widens while the plain\n"
        "# norm with the same outer exponent keeps growing. Runs in seconds.\n"
        'command = "aniso-demo"\n'
        "seed = 0\n"
    )


def _decay_matrix() -> str:
    return (
        "# Random exponent pairs on power-law data: fitted heat-flow decay\n"
        "# slopes against the predicted rates, plain and gradient. Runs in\n"
        "# about a minute on one core.\n"
        'command = "verify-decay"\n'
        "seed = 0\n"
        "\n"
        "[verify-decay]\n"
        "pairs = 20\n"
        "dims = [2, 3]\n"
        f"tolerance = {suites.DECAY_TOLERANCE!r}\n"
    )


PRESETS = {
    "tg2d-small": _tg_small,
    "tg2d-large-local": _tg_large_local,
    "aniso-demo": _aniso_demo,
    "decay-matrix": _decay_matrix,
}


def preset_text(name: str) -> str:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; known presets: {known}")
    return PRESETS[name]()
