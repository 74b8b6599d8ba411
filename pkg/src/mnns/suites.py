"""Verification suites shared by the command-line runner and the test gate.

Every suite is a pure function of its seed and knobs, returning a
JSON-ready report dict: {"command", "seed", "cases", "summary", "passed"}.
Grid choices and tolerances live here as constants so the CLI and the
acceptance tests exercise byte-identical configurations.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .convolution import young_ratio
from .exponents import INF, MixedExponents
from .grid import ScalarField, TensorGrid, VectorField
from .heat import continuity_at_zero, measure_decay
from .mild import (
    SolverConfig,
    Trajectory,
    bilinear_probe,
    local_solve,
    picard_solve,
    time_mesh,
    xspace_norm,
    y_shape_constant,
)
from .norms import mixed_norm, scaling_ratio
from .oracle import timestep_oracle
from .sampling import (
    anisotropic_tail_field,
    critical_exponents,
    decay_exponent_pair,
    gaussian_bump,
    rng_from_seed,
    separable_power_field,
    taylor_green_2d,
    taylor_green_3d,
    young_exponent_triple,
)
from .spectral import (
    leray_project,
    pressure_from_velocity,
    pressure_poisson_reference,
    random_band_limited,
    riesz_boundedness_probe,
    riesz_transform,
    spectral_divergence,
)

# Truncated grids (size per axis, half width) for whole-space work.
YOUNG_GRIDS = {1: (1024, 10.0), 2: (160, 8.0), 3: (48, 6.0)}
YOUNG_TOLERANCE = 5e-3

DECAY_GRIDS = {2: (256, 16.0), 3: (80, 10.0)}
DECAY_TIMES = {
    2: tuple(np.geomspace(0.25, 4.0, 7)),
    3: tuple(np.geomspace(0.25, 2.0, 6)),
}
DECAY_TOLERANCE = 0.05

RIESZ_GRIDS = {2: (64, math.pi), 3: (32, math.pi)}
RIESZ_IDENTITY_TOL = 1e-10
RIESZ_PROBE_BUDGET = 10.0
RIESZ_PROBE_EXPONENTS = {2: (3.0, 3.0), 3: (3.0, 3.0, 3.0)}

SCALING_GRIDS = {1: (1024, 8.0), 2: (128, 8.0), 3: (64, 7.0)}
SCALING_TOLERANCE = 1e-3
# Reciprocal-exponent window for the scaling draws: wide enough to be
# interesting, narrow enough that |f|^p stays resolved after rescaling.
SCALING_RECIP_LOW = 0.18
SCALING_RECIP_HIGH = 0.65

CONTINUITY_GRID = (960, 12.0)
CONTINUITY_SHARPNESS = 0.1
CONTINUITY_AMPLITUDE = 0.5
CONTINUITY_LIMIT = 1e-3

# Mild-solver benchmark: three-axis torus, critical p, delta = 1/2.
SOLVE_GRID = (32, math.pi)
SOLVE_P = (3.0, 3.0, 3.0)
SOLVE_Q = (6.0, 6.0, 6.0)
SOLVE_AMPLITUDE = 1.0
SOLVE_HORIZON = 1.0
SOLVE_NODES = 16
SOLVE_QUAD_NODES = 24
SOLVE_MESH_SPAN = 256.0
SOLVE_PICARD_TOL = 1e-6
SOLVE_MAX_ITER = 10
SOLVE_ORACLE_STEPS = 200
SOLVE_ORACLE_TOL = 1e-3

LOCAL_FACTOR = 50.0
LOCAL_MAX_ITER = 20

BILINEAR_BUDGET = 5.0
BILINEAR_NODES = 8

ANISO_EXPONENTS = (8.0, 16.0 / 7.0, 16.0 / 7.0)
ANISO_POWERS = (0.25, 1.5)
ANISO_SPACING = 0.5
ANISO_HALF_WIDTHS = (4.0, 8.0, 16.0, 32.0)


def _exp_strings(p: MixedExponents) -> list:
    return [("inf" if x == INF else repr(float(x))) for x in p]


def _grid(n: int, size: int, half: float, periodic: bool = False) -> TensorGrid:
    return TensorGrid((size,) * n, (half,) * n, periodic=periodic)


def young_suite(
    seed: int,
    cases_per_dim: int = 100,
    dims: Sequence[int] = (1, 2, 3),
    tolerance: float = YOUNG_TOLERANCE,
) -> dict:
    """Random convolution triples against the mixed-norm product bound."""
    rng = rng_from_seed(seed)
    cases = []
    worst = 0.0
    for n in dims:
        size, half = YOUNG_GRIDS[n]
        grid = _grid(n, size, half)
        for idx in range(cases_per_dim):
            p, q, r = young_exponent_triple(rng, n)
            f = gaussian_bump(grid, rng)
            g = gaussian_bump(grid, rng)
            ratio = young_ratio(f, g, p, q, r)
            worst = max(worst, ratio)
            cases.append(
                {
                    "n": n,
                    "case": idx,
                    "p": _exp_strings(p),
                    "q": _exp_strings(q),
                    "r": _exp_strings(r),
                    "ratio": ratio,
                    "pass": ratio <= 1.0 + tolerance,
                }
            )
    passed = all(c["pass"] for c in cases)
    return {
        "command": "verify-young",
        "seed": seed,
        "cases": cases,
        "summary": {"max_ratio": worst, "tolerance": tolerance},
        "passed": passed,
    }


def decay_suite(
    seed: int,
    pairs: int = 20,
    dims: Sequence[int] = (2, 3),
    tolerance: float = DECAY_TOLERANCE,
) -> dict:
    """Heat-flow decay slopes for random exponent pairs on power-law data."""
    rng = rng_from_seed(seed)
    dims = tuple(dims)
    share = {n: pairs // len(dims) for n in dims}
    share[dims[0]] += pairs - sum(share.values())
    cases = []
    worst = 0.0
    for n in dims:
        size, half = DECAY_GRIDS[n]
        grid = _grid(n, size, half)
        times = DECAY_TIMES[n]
        for idx in range(share[n]):
            p, q = decay_exponent_pair(rng, n)
            u0 = separable_power_field(grid, [1.0 / qk for qk in q])
            plain = measure_decay(u0, p, q, times)
            grad = measure_decay(u0, p, q, times, with_derivative=True)
            err_plain = abs(plain.fitted_slope - plain.predicted_slope)
            err_grad = abs(grad.fitted_slope - grad.predicted_slope)
            worst = max(worst, err_plain, err_grad)
            cases.append(
                {
                    "n": n,
                    "case": idx,
                    "p": _exp_strings(p),
                    "q": _exp_strings(q),
                    "fitted_slope": plain.fitted_slope,
                    "predicted_slope": plain.predicted_slope,
                    "fitted_gradient_slope": grad.fitted_slope,
                    "predicted_gradient_slope": grad.predicted_slope,
                    "pass": err_plain <= tolerance and err_grad <= tolerance,
                }
            )
    passed = all(c["pass"] for c in cases)
    return {
        "command": "verify-decay",
        "seed": seed,
        "cases": cases,
        "summary": {"max_slope_error": worst, "tolerance": tolerance},
        "passed": passed,
    }


def riesz_suite(
    seed: int,
    fields: int = 100,
    identity_tol: float = RIESZ_IDENTITY_TOL,
    probe_budget: float = RIESZ_PROBE_BUDGET,
) -> dict:
    """Multiplier identities and the empirical boundedness ratio."""
    rng = rng_from_seed(seed)
    split = {2: (fields * 3) // 5, 3: fields - (fields * 3) // 5}
    cases = []
    probe_fields = {2: [], 3: []}
    worst = 0.0
    for n, count in split.items():
        size, half = RIESZ_GRIDS[n]
        grid = _grid(n, size, half, periodic=True)
        for idx in range(count):
            f = random_band_limited(grid, rng, zero_mean=False)
            v = random_band_limited(grid, rng, components=n, zero_mean=False)
            pv = leray_project(v)
            ppv = leray_project(pv)
            e_idem = (ppv - pv).max_abs()
            e_div = spectral_divergence(pv).max_abs()
            acc = f.samples - f.samples.mean()
            for j in range(1, n + 1):
                acc = acc + riesz_transform(riesz_transform(f, j), j).samples
            e_riesz = float(np.max(np.abs(acc)))
            worst = max(worst, e_idem, e_div, e_riesz)
            probe_fields[n].append(f)
            cases.append(
                {
                    "n": n,
                    "case": idx,
                    "idempotence_error": e_idem,
                    "divergence_error": e_div,
                    "riesz_algebra_error": e_riesz,
                    "pass": max(e_idem, e_div, e_riesz) <= identity_tol,
                }
            )
    probe_ratios = {}
    for n, fs in probe_fields.items():
        if fs:
            p = MixedExponents(RIESZ_PROBE_EXPONENTS[n])
            probe_ratios[str(n)] = riesz_boundedness_probe(fs, p)
    max_probe = max(probe_ratios.values()) if probe_ratios else 0.0
    passed = all(c["pass"] for c in cases) and max_probe <= probe_budget
    return {
        "command": "verify-riesz",
        "seed": seed,
        "cases": cases,
        "summary": {
            "max_identity_error": worst,
            "identity_tolerance": identity_tol,
            "boundedness_ratios": probe_ratios,
            "boundedness_budget": probe_budget,
        },
        "passed": passed,
    }


def scaling_suite(
    seed: int,
    cases_per_dim: int = 20,
    dims: Sequence[int] = (1, 2, 3),
    tolerance: float = SCALING_TOLERANCE,
) -> dict:
    """Norm behavior under u -> lam u(lam x) against the exact power law."""
    rng = rng_from_seed(seed)
    cases = []
    worst = 0.0
    for n in dims:
        size, half = SCALING_GRIDS[n]
        grid = _grid(n, size, half)
        lo, hi = SCALING_RECIP_LOW, SCALING_RECIP_HIGH
        for idx in range(cases_per_dim):
            if idx % 2 == 0 and n > 1:
                p = critical_exponents(rng, n, low=lo, high=hi)
            elif idx % 2 == 0:
                p = MixedExponents((1.0,))
            else:
                p = MixedExponents(
                    tuple(1.0 / rng.uniform(lo, hi) for _ in range(n))
                )
            lam = 2.0 if idx % 4 < 2 else 0.5
            f = gaussian_bump(
                grid, rng, center_span=0.1, sharpness=(0.6, 1.0)
            )
            measured = scaling_ratio(f, lam, p)
            expected = lam ** (1.0 - p.criticality_sum())
            err = abs(measured - expected)
            worst = max(worst, err)
            cases.append(
                {
                    "n": n,
                    "case": idx,
                    "p": _exp_strings(p),
                    "lambda": lam,
                    "critical": p.is_critical(),
                    "measured": measured,
                    "expected": expected,
                    "pass": err <= tolerance,
                }
            )
    passed = all(c["pass"] for c in cases)
    return {
        "command": "scaling-check",
        "seed": seed,
        "cases": cases,
        "summary": {"max_error": worst, "tolerance": tolerance},
        "passed": passed,
    }


def continuity_suite() -> dict:
    """Smooth-data heat-flow continuity at t -> 0 (deterministic preset)."""
    size, half = CONTINUITY_GRID
    grid = _grid(2, size, half)
    c = CONTINUITY_SHARPNESS
    amp = CONTINUITY_AMPLITUDE

    def profile(x1, x2):
        return amp * np.exp(-c * (np.square(x1) + np.square(x2)))

    u0 = ScalarField.from_profile(grid, profile)
    ts = [2.0 ** -k for k in range(1, 11)]
    p = MixedExponents((2.0, 2.0))
    values = continuity_at_zero(u0, p, ts)
    passed = values[-1] <= CONTINUITY_LIMIT and values[-1] <= values[-4]
    return {
        "command": "continuity-check",
        "seed": None,
        "cases": [
            {"t": t, "difference_norm": v} for t, v in zip(ts, values)
        ],
        "summary": {"final_value": values[-1], "limit": CONTINUITY_LIMIT},
        "passed": passed,
    }


def _solver_config(
    horizon: float = SOLVE_HORIZON,
    nodes: int = SOLVE_NODES,
    max_iter: int = SOLVE_MAX_ITER,
) -> SolverConfig:
    return SolverConfig(
        p=MixedExponents(SOLVE_P),
        q=MixedExponents(SOLVE_Q),
        T=horizon,
        nodes=nodes,
        quad_nodes=SOLVE_QUAD_NODES,
        picard_tol=SOLVE_PICARD_TOL,
        max_iter=max_iter,
        mesh_span=SOLVE_MESH_SPAN,
    )


def _solve_data(amplitude: float, grid_spec=None) -> VectorField:
    size, half = grid_spec if grid_spec is not None else SOLVE_GRID
    grid = _grid(3, size, half, periodic=True)
    return taylor_green_3d(grid, amplitude=amplitude)


def _rel_l2(a: VectorField, b: VectorField) -> float:
    num = 0.0
    den = 0.0
    for ca, cb in zip(a.components, b.components):
        num += float(np.sum(np.square(ca.samples - cb.samples)))
        den += float(np.sum(np.square(cb.samples)))
    return math.sqrt(num / den) if den > 0.0 else 0.0


def solve_suite(
    amplitude: float = SOLVE_AMPLITUDE,
    compare_oracle: bool = True,
    cfg: SolverConfig = None,
    grid_spec=None,
    oracle_steps: int = SOLVE_ORACLE_STEPS,
) -> dict:
    """Small-data Picard run, checked against the independent time stepper."""
    if cfg is None:
        cfg = _solver_config()
    a0 = _solve_data(amplitude, grid_spec)
    traj, cert = picard_solve(a0, cfg)
    u0_traj = Trajectory.from_heat_flow(a0, time_mesh(cfg), cfg.delta)
    u0_x = xspace_norm(u0_traj, cfg)
    x_norm = xspace_norm(traj, cfg)
    cases = []
    max_rel = 0.0
    if compare_oracle:
        reference = timestep_oracle(
            a0,
            cfg.T,
            oracle_steps,
            record_times=traj.times,
            delta=cfg.delta,
        )
        for t, mild_state, oracle_state in zip(
            traj.times, traj.states, reference.states
        ):
            rel = _rel_l2(mild_state, oracle_state)
            max_rel = max(max_rel, rel)
            cases.append(
                {"t": t, "relative_l2": rel, "pass": rel <= SOLVE_ORACLE_TOL}
            )
    smallness_ok = x_norm <= 2.0 * u0_x + 1e-6
    residual_ok = cert.residual_x_norm <= 2.0 * cfg.picard_tol
    passed = (
        cert.converged
        and cert.iterations <= cfg.max_iter
        and cert.product <= 0.5
        and residual_ok
        and smallness_ok
        and (not compare_oracle or max_rel <= SOLVE_ORACLE_TOL)
    )
    return {
        "command": "solve",
        "seed": None,
        "cases": cases,
        "summary": {
            "amplitude": amplitude,
            "certificate": cert.to_dict(),
            "u0_x_norm": u0_x,
            "solution_x_norm": x_norm,
            "max_relative_l2": max_rel,
            "oracle_tolerance": SOLVE_ORACLE_TOL,
            "smallness_ok": smallness_ok,
            "residual_ok": residual_ok,
        },
        "passed": passed,
        "_trajectory": traj,
        "_certificate": cert,
        "_config": cfg,
    }


def local_suite(
    amplitude: float = SOLVE_AMPLITUDE * LOCAL_FACTOR,
    cfg: SolverConfig = None,
    grid_spec=None,
    max_halvings: int = 60,
) -> dict:
    """Large-data branch: shrink the horizon, then contract on it."""
    if cfg is None:
        cfg = _solver_config(max_iter=LOCAL_MAX_ITER)
    a0 = _solve_data(amplitude, grid_spec)
    traj, cert, t0 = local_solve(a0, cfg, max_halvings=max_halvings)
    n0 = y_shape_constant(traj, cfg.with_horizon(t0), a0)
    residual_ok = cert.residual_x_norm <= 2.0 * cfg.picard_tol
    passed = cert.converged and t0 > 0.0 and residual_ok
    return {
        "command": "local-solve",
        "seed": None,
        "cases": [
            {
                "t0": t0,
                "converged": cert.converged,
                "iterations": cert.iterations,
                "residual_x_norm": cert.residual_x_norm,
            }
        ],
        "summary": {
            "amplitude": amplitude,
            "t0": t0,
            "certificate": cert.to_dict(),
            "y_shape_constant": n0,
            "residual_ok": residual_ok,
        },
        "passed": passed,
        "_trajectory": traj,
        "_certificate": cert,
        "_config": cfg.with_horizon(t0),
    }


def bilinear_suite(seed: int, budget: float = BILINEAR_BUDGET) -> dict:
    """Duhamel-output norms against the weighted-integral bound."""
    rng = rng_from_seed(seed)
    size, half = SOLVE_GRID
    grid = _grid(3, size, half, periodic=True)
    cfg = _solver_config(nodes=BILINEAR_NODES)
    times = time_mesh(cfg)
    fields = []
    for _ in range(2):
        w = random_band_limited(grid, rng, components=3)
        fields.append(leray_project(w))
    u = Trajectory.from_heat_flow(fields[0], times, cfg.delta)
    v = Trajectory.from_heat_flow(fields[1], times, cfg.delta)
    ones = (1.0, 1.0, 1.0)
    x_alpha = tuple(pk / qk for pk, qk in zip(SOLVE_P, SOLVE_Q))
    specs = [
        ("unit-splits", u, v, ones, ones, ones),
        ("gradient-instance", u, v, ones, ones, (1.5, 1.5, 1.5)),
        ("x-space-instance", u, v, x_alpha, ones, x_alpha),
        ("mixed-splits", u, v, (1.2, 0.8, 1.0), (0.7, 1.1, 0.9), ones),
        ("self-pairing", u, u, ones, ones, ones),
    ]
    cases = []
    worst = 0.0
    for name, uu, vv, alpha, beta, gamma in specs:
        result = bilinear_probe(uu, vv, cfg, alpha, beta, gamma)
        grad_max = result["max_gradient_ratio"]
        top = max(
            result["max_ratio"], grad_max if grad_max is not None else 0.0
        )
        worst = max(worst, top)
        cases.append(
            {
                "name": name,
                "alpha": list(alpha),
                "beta": list(beta),
                "gamma": list(gamma),
                "max_ratio": result["max_ratio"],
                "max_gradient_ratio": grad_max,
                "pass": top <= budget,
            }
        )
    passed = all(c["pass"] for c in cases)
    return {
        "command": "verify-bilinear",
        "seed": seed,
        "cases": cases,
        "summary": {"max_ratio": worst, "budget": budget},
        "passed": passed,
    }


def pressure_suite(tolerance: float = 1e-8) -> dict:
    """Two-axis vortex pressure against the closed form and a Poisson solve."""
    grid = _grid(2, 64, math.pi, periodic=True)
    x1, x2 = grid.coordinate_arrays()
    cases = []
    for variant, sign in (("cos_sin", -0.25), ("sin_cos", 0.25)):
        u = taylor_green_2d(grid, variant=variant)
        p = pressure_from_velocity(u)
        closed = sign * (np.cos(2 * x1) + np.cos(2 * x2))
        closed = closed - closed.mean()
        e_closed = float(np.max(np.abs(p.samples - closed)))
        p_ref = pressure_poisson_reference(u)
        e_cross = (p - p_ref).max_abs()
        cases.append(
            {
                "variant": variant,
                "closed_form_error": e_closed,
                "poisson_cross_error": e_cross,
                "pass": max(e_closed, e_cross) <= tolerance,
            }
        )
    passed = all(c["pass"] for c in cases)
    return {
        "command": "pressure-check",
        "seed": None,
        "cases": cases,
        "summary": {"tolerance": tolerance},
        "passed": passed,
    }


def aniso_suite() -> dict:
    """Mixed-versus-plain norm growth for a two-rate tail profile.

    The mixed norm saturates as the domain widens while the plain norm with
    the same outer exponent keeps growing: the fast-decay axes rescue mixed
    membership but are invisible to the unmixed norm.
    """
    a, b = ANISO_POWERS
    p_mixed = MixedExponents(ANISO_EXPONENTS)
    p_plain = MixedExponents.uniform(ANISO_EXPONENTS[1], 3)
    cases = []
    prev = None
    mixed_growths = []
    plain_growths = []
    for half in ANISO_HALF_WIDTHS:
        size = int(round(2.0 * half / ANISO_SPACING))
        grid = _grid(3, size, half)
        f = anisotropic_tail_field(grid, a, b)
        m = float(mixed_norm(f, p_mixed))
        s = float(mixed_norm(f, p_plain))
        if prev is not None:
            mixed_growths.append(m / prev[0])
            plain_growths.append(s / prev[1])
        prev = (m, s)
        cases.append(
            {"half_width": half, "mixed_norm": m, "plain_norm": s}
        )
    saturated = mixed_growths[-1] <= 1.02
    growing = min(plain_growths) >= 1.08
    return {
        "command": "aniso-demo",
        "seed": None,
        "cases": cases,
        "summary": {
            "tail_powers": [a, b],
            "mixed_exponents": _exp_strings(p_mixed),
            "plain_exponent": repr(float(ANISO_EXPONENTS[1])),
            "mixed_growth_per_doubling": mixed_growths,
            "plain_growth_per_doubling": plain_growths,
            "mixed_saturated": saturated,
            "plain_growing": growing,
        },
        "passed": saturated and growing,
    }
