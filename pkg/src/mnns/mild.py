"""Mild-solution machinery for the velocity equation on a torus.

The integral formulation u = u0 + G(u,u), with u0 the heat flow of the
data and

    G(u,v)(t) = -int_0^t e^{Delta (t-s)} P[(u(s).grad) v(s)] ds,

is solved by Picard iteration in a weighted space whose norm controls
t^{(1-delta)/2} ||u||_{L_q} and t^{1/2} ||grad u||_{L_p}. Exponents are
critical (sum 1/p_k = 1) with p_k > 2, which is only possible for n >= 3.
"""

from __future__ import annotations

import bisect
import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    ConfigError,
    ConvergenceError,
    ExponentError,
    FieldError,
    GuardError,
)
from .exponents import INF, MixedExponents
from .fieldio import read_components, read_field, write_components, write_field
from .grid import ScalarField, TensorGrid, VectorField
from .norms import aggregate_norm
from .spectral import (
    _fftn,
    _ifftn,
    _xi_squared,
    heat_propagate,
    leray_project,
    spectral_divergence,
    vector_gradient,
    wavenumbers,
)

DIV_FREE_TOL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    """Exponents, horizon, and discretization knobs for the mild solver."""

    p: MixedExponents
    q: MixedExponents
    T: float = 1.0
    nodes: int = 16
    quad_nodes: int = 24
    picard_tol: float = 1e-6
    max_iter: int = 10
    smallness_guard: bool = False
    mesh_span: float = 1024.0

    def __post_init__(self) -> None:
        n = self.p.n
        if self.q.n != n:
            raise ConfigError(
                f"p has {n} axes but q has {self.q.n}; they must match"
            )
        for k, (pk, qk) in enumerate(zip(self.p, self.q), start=1):
            if pk == INF or not pk > 2.0:
                raise ConfigError(
                    f"axis {k}: p_k must lie in (2, inf), got {pk:g}"
                )
            if qk == INF or qk < pk:
                raise ConfigError(
                    f"axis {k}: q_k must lie in [p_k, inf), got q={qk:g}, p={pk:g}"
                )
        drift = abs(self.p.criticality_sum() - 1.0)
        if drift > 1e-12:
            msg = f"sum of 1/p_k must equal 1 (off by {drift:.3e})"
            if n == 2:
                msg += (
                    "; with every p_k > 2 no two-axis exponent vector can be "
                    "critical, so n = 2 is outside this solver's scope"
                )
            raise ConfigError(msg)
        if not (0.1 <= self.delta <= 0.9):
            raise ConfigError(
                f"delta = sum 1/q_k = {self.delta:g} outside [0.1, 0.9]; "
                f"quadrature weights degenerate"
            )
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise ConfigError(f"horizon T must be positive, got {self.T!r}")
        if self.nodes < 2:
            raise ConfigError(f"need at least 2 time nodes, got {self.nodes}")
        if self.quad_nodes < 1:
            raise ConfigError(
                f"need at least 1 quadrature node, got {self.quad_nodes}"
            )
        if not self.picard_tol > 0.0:
            raise ConfigError(f"picard_tol must be positive, got {self.picard_tol!r}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}")
        if not self.mesh_span > 1.0:
            raise ConfigError(f"mesh_span must exceed 1, got {self.mesh_span!r}")

    @property
    def delta(self) -> float:
        return self.q.criticality_sum()

    def with_horizon(self, T: float) -> "SolverConfig":
        return SolverConfig(
            self.p,
            self.q,
            T,
            self.nodes,
            self.quad_nodes,
            self.picard_tol,
            self.max_iter,
            self.smallness_guard,
            self.mesh_span,
        )


def time_mesh(cfg: SolverConfig) -> tuple:
    """Geometric nodes t_i = T * span^{-(M-i)/(M-1)}, i = 1..M; t_M = T."""
    M = cfg.nodes
    return tuple(
        cfg.T * cfg.mesh_span ** (-(M - i) / (M - 1)) for i in range(1, M + 1)
    )


def _check_div_free(state: VectorField, where: str) -> None:
    top = state.max_abs()
    div = spectral_divergence(state).max_abs()
    if div > DIV_FREE_TOL * max(1.0, top):
        raise FieldError(
            f"{where}: spectral divergence residue {div:.3e} exceeds "
            f"{DIV_FREE_TOL:g}"
        )


@dataclass(frozen=True)
class Trajectory:
    """Velocity states on a graded time mesh, with spectral gradients.

    gradient_states[i] holds, for node i, a tuple per component of the n
    partial derivatives (d_1 u_c, ..., d_n u_c). The initial field rides
    along so the trajectory can be evaluated below its first node.
    """

    grid: TensorGrid
    times: tuple
    states: tuple
    gradient_states: tuple
    initial: VectorField
    delta: float

    def __post_init__(self) -> None:
        self.grid.require_periodic("trajectory storage")
        ts = self.times
        if not ts:
            raise FieldError("trajectory needs at least one time node")
        if any(not (t > 0.0 and math.isfinite(t)) for t in ts):
            raise FieldError("trajectory times must be positive and finite")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise FieldError("trajectory times must increase strictly")
        if len(self.states) != len(ts) or len(self.gradient_states) != len(ts):
            raise FieldError("states, gradients, and times must align")
        if not (0.0 < self.delta < 1.0):
            raise FieldError(f"delta must lie in (0,1), got {self.delta!r}")
        self.initial.grid.require_same(self.grid)
        for i, state in enumerate(self.states):
            state.grid.require_same(self.grid)
            _check_div_free(state, f"node {i + 1}")

    @classmethod
    def build(
        cls,
        initial: VectorField,
        times: Sequence[float],
        states: Sequence[VectorField],
        delta: float,
    ) -> "Trajectory":
        return cls(
            initial.grid,
            tuple(float(t) for t in times),
            tuple(states),
            tuple(vector_gradient(s) for s in states),
            initial,
            delta,
        )

    @classmethod
    def from_heat_flow(
        cls, initial: VectorField, times: Sequence[float], delta: float
    ) -> "Trajectory":
        states = [heat_propagate(initial, float(t)) for t in times]
        return cls.build(initial, times, states, delta)

    @property
    def node_count(self) -> int:
        return len(self.times)

    @cached_property
    def _initial_hats(self) -> tuple:
        return tuple(_fftn(c.samples) for c in self.initial.components)

    @cached_property
    def _full_spectrum_sq(self) -> np.ndarray:
        return _xi_squared(self.grid, zero_nyquist=False)

    def _initial_flow(self, s: float) -> VectorField:
        damp = np.exp(-self._full_spectrum_sq * s)
        return VectorField.from_component_samples(
            self.grid, [_ifftn(damp * hat).real.copy() for hat in self._initial_hats]
        )

    @cached_property
    def _initial_is_zero(self) -> bool:
        return self.initial.max_abs() == 0.0

    @cached_property
    def _flow_corrections(self) -> tuple:
        """Per node: state minus the bare heat flow of the initial field."""
        if self._initial_is_zero:
            return tuple(self.states)
        return tuple(
            state - self._initial_flow(t)
            for t, state in zip(self.times, self.states)
        )

    def state_at(self, s: float) -> VectorField:
        """Evaluate the trajectory at any s in (0, t_M].

        The state splits as (heat flow of the initial field) plus a
        correction; the flow part is evaluated exactly and only the
        correction is interpolated, linearly in log t between nodes and
        linearly down to zero below the first node. A trajectory that is
        exactly the heat flow of its initial field therefore evaluates
        exactly at every s.
        """
        t_last = self.times[-1]
        if not (0.0 < s <= t_last * (1.0 + 1e-12)):
            raise FieldError(
                f"evaluation time {s:g} outside the node range (0, {t_last:g}]"
            )
        s = min(s, t_last)
        t1 = self.times[0]
        if s < t1:
            correction = self._flow_corrections[0] * (s / t1)
        else:
            i = bisect.bisect_left(self.times, s)
            if (
                i < len(self.times)
                and abs(self.times[i] - s) <= 1e-12 * self.times[i]
            ):
                return self.states[i]
            a, b = i - 1, i
            ta, tb = self.times[a], self.times[b]
            theta = (math.log(s) - math.log(ta)) / (math.log(tb) - math.log(ta))
            correction = (
                self._flow_corrections[a] * (1.0 - theta)
                + self._flow_corrections[b] * theta
            )
        if self._initial_is_zero:
            return correction
        return self._initial_flow(s) + correction


def _state_norm(state: VectorField, p: MixedExponents) -> float:
    return aggregate_norm(state.components, p)


def _gradient_norm(grads: Sequence, p: MixedExponents) -> float:
    flat = [g for row in grads for g in row]
    return aggregate_norm(flat, p)


def xspace_norm(traj: Trajectory, cfg: SolverConfig) -> float:
    """max over nodes of t^{(1-delta)/2} ||u||_{L_q} + t^{1/2} ||grad u||_{L_p}."""
    if traj.grid.n != cfg.p.n:
        raise ExponentError("trajectory dimension does not match the exponents")
    d = cfg.delta
    best = 0.0
    for t, state, grads in zip(traj.times, traj.states, traj.gradient_states):
        val = t ** ((1.0 - d) / 2.0) * _state_norm(state, cfg.q)
        val += t ** 0.5 * _gradient_norm(grads, cfg.p)
        best = max(best, val)
    return best


def yspace_norm(traj: Trajectory, cfg: SolverConfig) -> float:
    """max over nodes of ||u||_{L_p} + t^{1/2} ||grad u||_{L_p}."""
    if traj.grid.n != cfg.p.n:
        raise ExponentError("trajectory dimension does not match the exponents")
    best = 0.0
    for t, state, grads in zip(traj.times, traj.states, traj.gradient_states):
        val = _state_norm(state, cfg.p) + t ** 0.5 * _gradient_norm(grads, cfg.p)
        best = max(best, val)
    return best


def nonlinear_term(u: VectorField, v_grad: Sequence) -> VectorField:
    """F(u, v) = P[(u . grad) v] from u and the gradient rows of v."""
    grid = u.grid
    grid.require_periodic("convective term")
    if len(v_grad) != grid.n:
        raise FieldError("gradient rows must match the dimension")
    comps = []
    for row in v_grad:
        acc = np.zeros(grid.numpy_shape)
        for uj, dj in zip(u.components, row):
            dj.grid.require_same(grid)
            acc = acc + uj.samples * dj.samples
        comps.append(acc)
    return leray_project(VectorField.from_component_samples(grid, comps))


def _duhamel_abscissae(t: float, delta: float, K: int) -> list:
    """Midpoint quadrature for int_0^t, split at t/2.

    The lower half is graded toward 0 with exponent 2/delta (flattens the
    s^{-1+delta/2} weight); the upper half is graded toward t with a square
    root (flattens (t-s)^{-1/2}). Returns (s, weight) pairs.
    """
    out = []
    g = 2.0 / delta
    half = t / 2.0
    for j in range(1, K + 1):
        tau = (j - 0.5) / K
        out.append((half * tau ** g, half * g * tau ** (g - 1.0) / K))
    for j in range(1, K + 1):
        tau = (j - 0.5) / K
        out.append((t - half * tau * tau, t * tau / K))
    return out


def duhamel_bilinear(
    u: Trajectory, v: Trajectory, t: float, cfg: SolverConfig
) -> VectorField:
    """G(u, v)(t) = -int_0^t e^{Delta (t-s)} P[(u(s).grad) v(s)] ds.

    Graded midpoint quadrature split at t/2; states at off-node s come from
    trajectory interpolation, with gradients of the interpolated state taken
    spectrally on the fly. The projection and heat factor act in spectral
    space, with one inverse transform per component at the end; the result
    is identical to composing nonlinear_term and heat_propagate term by
    term.
    """
    if not (0.0 < t <= cfg.T * (1.0 + 1e-12)):
        raise FieldError(f"target time {t:g} outside (0, T={cfg.T:g}]")
    u.grid.require_same(v.grid)
    if u.times != v.times:
        raise FieldError("trajectories must share their time nodes")
    grid = u.grid
    n = grid.n
    xs = wavenumbers(grid, zero_nyquist=True)
    sq = _xi_squared(grid, zero_nyquist=True)
    safe = np.where(sq > 0.0, sq, 1.0)
    full_sq = _xi_squared(grid, zero_nyquist=False)
    acc = [np.zeros(grid.numpy_shape, dtype=complex) for _ in range(n)]
    for s, w in _duhamel_abscissae(min(t, cfg.T), cfg.delta, cfg.quad_nodes):
        us = u.state_at(s)
        vs = us if u is v else v.state_at(s)
        conv_hats = []
        for comp in vs.components:
            hat = _fftn(comp.samples)
            conv = np.zeros(grid.numpy_shape)
            for j in range(n):
                conv = conv + us.components[j].samples * _ifftn(
                    1j * xs[j] * hat
                ).real
            conv_hats.append(_fftn(conv))
        dot = np.zeros(grid.numpy_shape, dtype=complex)
        for j in range(n):
            dot = dot + xs[j] * conv_hats[j]
        damp = np.exp(-full_sq * (t - s))
        for i in range(n):
            projected = conv_hats[i] - np.where(sq > 0.0, xs[i] * dot / safe, 0.0)
            acc[i] = acc[i] - w * damp * projected
    comps = [_ifftn(a).real.copy() for a in acc]
    return VectorField.from_component_samples(grid, comps)


def _gt_states(u: Trajectory, v: Trajectory, cfg: SolverConfig) -> list:
    return [duhamel_bilinear(u, v, t, cfg) for t in u.times]


@dataclass(frozen=True)
class ContractionCertificate:
    """Measured contraction data for one Picard run.

    product = 4 * N2 * ||u0||_X is the smallness quantity; the fixed point
    argument goes through when it is below 1.
    """

    u0_x_norm: float
    bilinear_constant_estimate: float
    linear_constant_estimate: float
    product: float
    satisfied: bool
    iteration_ratios: tuple
    converged: bool
    iterations: int
    residual_x_norm: float

    def to_dict(self) -> dict:
        return {
            "u0_x_norm": self.u0_x_norm,
            "bilinear_constant_estimate": self.bilinear_constant_estimate,
            "linear_constant_estimate": self.linear_constant_estimate,
            "product": self.product,
            "satisfied": self.satisfied,
            "iteration_ratios": list(self.iteration_ratios),
            "converged": self.converged,
            "iterations": self.iterations,
            "residual_x_norm": self.residual_x_norm,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ContractionCertificate":
        raw = json.loads(text)
        return cls(
            raw["u0_x_norm"],
            raw["bilinear_constant_estimate"],
            raw["linear_constant_estimate"],
            raw["product"],
            raw["satisfied"],
            tuple(raw["iteration_ratios"]),
            raw["converged"],
            raw["iterations"],
            raw["residual_x_norm"],
        )


def _prepare_data(a0: VectorField) -> VectorField:
    a0.grid.require_periodic("mild solve")
    top = a0.max_abs()
    div = spectral_divergence(a0).max_abs()
    if div > DIV_FREE_TOL * max(1.0, top):
        warnings.warn(
            f"initial data has divergence residue {div:.3e}; projecting",
            stacklevel=3,
        )
        return leray_project(a0)
    return a0


def picard_solve(a0: VectorField, cfg: SolverConfig) -> tuple:
    """Iterate u^{m+1} = u0 + G(u^m, u^m) from the heat flow of a0.

    Returns (Trajectory, ContractionCertificate). Non-convergence within
    max_iter is not an exception: the partial trajectory comes back with
    converged=False on the certificate. The bilinear constant N2 is the
    largest observed ratio ||G(u,u)||_X / ||u||_X^2 across the run; the
    certificate product is 4 N2 ||u0||_X.
    """
    a0 = _prepare_data(a0)
    times = time_mesh(cfg)
    d = cfg.delta
    zero = VectorField.zeros(a0.grid)
    u0_traj = Trajectory.from_heat_flow(a0, times, d)
    u0_x = xspace_norm(u0_traj, cfg)
    a0_norm = _state_norm(a0, cfg.p)
    n1 = u0_x / a0_norm if a0_norm > 0.0 else 0.0

    current = u0_traj
    n2 = 0.0
    ratios = []
    prev_diff = None
    converged = False
    iterations = 0
    for _ in range(cfg.max_iter):
        iterations += 1
        g_states = _gt_states(current, current, cfg)
        cur_x = xspace_norm(current, cfg)
        if cur_x > 0.0:
            g_x = xspace_norm(Trajectory.build(zero, times, g_states, d), cfg)
            n2 = max(n2, g_x / (cur_x * cur_x))
        if cfg.smallness_guard and 4.0 * n2 * u0_x >= 1.0:
            raise GuardError(
                f"smallness guard: 4 N2 ||u0||_X = {4.0 * n2 * u0_x:.3f} >= 1"
            )
        nxt = Trajectory.build(
            a0, times, [s0 + g for s0, g in zip(u0_traj.states, g_states)], d
        )
        diff_states = [b - a for a, b in zip(current.states, nxt.states)]
        diff = xspace_norm(Trajectory.build(zero, times, diff_states, d), cfg)
        if prev_diff is not None and prev_diff > 0.0:
            ratios.append(diff / prev_diff)
        prev_diff = diff
        current = nxt
        if diff <= cfg.picard_tol:
            converged = True
            break

    res_states = [
        s - s0 - g
        for s, s0, g in zip(
            current.states, u0_traj.states, _gt_states(current, current, cfg)
        )
    ]
    residual = xspace_norm(Trajectory.build(zero, times, res_states, d), cfg)
    product = 4.0 * n2 * u0_x
    cert = ContractionCertificate(
        u0_x_norm=u0_x,
        bilinear_constant_estimate=n2,
        linear_constant_estimate=n1,
        product=product,
        satisfied=product < 1.0,
        iteration_ratios=tuple(ratios),
        converged=converged,
        iterations=iterations,
        residual_x_norm=residual,
    )
    return current, cert


def y_shape_constant(traj: Trajectory, cfg: SolverConfig, a0: VectorField) -> float:
    """N0 with ||u||_Y = N0 (||a0||_p + ||a0||_p^2), measured on the run."""
    base = _state_norm(a0, cfg.p)
    denom = base + base * base
    if denom == 0.0:
        return 0.0
    return yspace_norm(traj, cfg) / denom


def local_solve(
    a0: VectorField,
    cfg: SolverConfig,
    max_halvings: int = 60,
    margin: float = 0.4,
) -> tuple:
    """Shrink the horizon until the heat flow is small, then run Picard.

    The bilinear constant is measured once from the heat flow at the full
    horizon; the threshold is lambda0 = 1 / (4 N2). The horizon then halves
    until the heat flow's X-norm over (0, T0] drops below margin * lambda0
    and the Picard iteration converges there. At the bare threshold the
    contraction ratio approaches 1 and the iteration count diverges, so
    the default margin lands well inside the contraction region; margin=1
    recovers the bare threshold. Returns (Trajectory,
    ContractionCertificate, T0).
    """
    if not (0.0 < margin <= 1.0):
        raise ConfigError(f"margin must lie in (0, 1], got {margin!r}")
    a0 = _prepare_data(a0)
    zero = VectorField.zeros(a0.grid)
    times = time_mesh(cfg)
    u0_traj = Trajectory.from_heat_flow(a0, times, cfg.delta)
    u0_x = xspace_norm(u0_traj, cfg)
    if u0_x == 0.0:
        traj, cert = picard_solve(a0, cfg)
        return traj, cert, cfg.T
    g_traj = Trajectory.build(
        zero, times, _gt_states(u0_traj, u0_traj, cfg), cfg.delta
    )
    n2 = xspace_norm(g_traj, cfg) / (u0_x * u0_x)
    lam0 = math.inf if n2 == 0.0 else 1.0 / (4.0 * n2)

    T0 = cfg.T
    for _ in range(max_halvings + 1):
        trial = cfg.with_horizon(T0)
        flow = Trajectory.from_heat_flow(a0, time_mesh(trial), trial.delta)
        if xspace_norm(flow, trial) < margin * lam0:
            traj, cert = picard_solve(a0, trial)
            if cert.converged:
                return traj, cert, T0
        T0 /= 2.0
    raise ConvergenceError(
        f"no horizon above T = {T0:g} made the heat flow small; "
        f"data too rough for this grid"
    )


def _weighted_time_integral(
    norms_of_s, t: float, exponent: float, delta: float, K: int
) -> float:
    """int_0^t (t-s)^{-exponent} phi(s) ds by graded midpoint quadrature.

    The upper-half grading uses the substitution s = t - (t/2) tau^{1/(1-e)}
    so the endpoint weight is absorbed exactly for any exponent e < 1.
    """
    if exponent >= 1.0:
        raise ExponentError(f"time-weight exponent {exponent:g} is not integrable")
    total = 0.0
    g = 2.0 / delta
    half = t / 2.0
    for j in range(1, K + 1):
        tau = (j - 0.5) / K
        s = half * tau ** g
        w = half * g * tau ** (g - 1.0) / K
        total += w * (t - s) ** (-exponent) * norms_of_s(s)
    # Upper half under s = t - (t/2) tau^r with r = 1/(1-e): the Jacobian
    # cancels the weight algebraically, leaving a constant factor. Never
    # form (t-s) by subtraction here; for e near 1 it underflows to zero.
    r = 1.0 / (1.0 - exponent)
    w_const = half ** (1.0 - exponent) * r / K
    for j in range(1, K + 1):
        tau = (j - 0.5) / K
        s = t - half * tau ** r
        total += w_const * norms_of_s(s)
    return total


def bilinear_probe(
    u: Trajectory,
    v: Trajectory,
    cfg: SolverConfig,
    alpha: Sequence[float],
    beta: Sequence[float],
    gamma: Sequence[float],
) -> dict:
    """Measure ||G(u,v)(t)||_{L_{p/gamma}} against the weighted time integral
    of ||u(s)||_{L_{p/alpha}} ||grad v(s)||_{L_{p/beta}}, per target time.

    Ratios are reported for the plain estimate (weight exponent
    (a+b-c)/2 with a = sum alpha_k/p_k and so on) and, when integrable, the
    gradient variant (exponent (1+a+b-c)/2 against ||grad G||). A zero
    integral gives ratio 0 by convention.
    """
    n = cfg.p.n
    for name, split in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        if len(split) != n:
            raise ExponentError(f"{name} must have {n} entries")
        if any(not s > 0.0 for s in split):
            raise ExponentError(f"{name} entries must be positive")
    for k in range(n):
        if not gamma[k] <= alpha[k] + beta[k]:
            raise ExponentError(f"axis {k + 1}: need gamma_k <= alpha_k + beta_k")
        if not alpha[k] + beta[k] < cfg.p[k]:
            raise ExponentError(f"axis {k + 1}: need alpha_k + beta_k < p_k")
    p_alpha = cfg.p.scaled(alpha)
    p_beta = cfg.p.scaled(beta)
    p_gamma = cfg.p.scaled(gamma)
    a_bar = sum(a / pk for a, pk in zip(alpha, cfg.p))
    b_bar = sum(b / pk for b, pk in zip(beta, cfg.p))
    c_bar = sum(c / pk for c, pk in zip(gamma, cfg.p))
    e1 = (a_bar + b_bar - c_bar) / 2.0
    e2 = (1.0 + a_bar + b_bar - c_bar) / 2.0

    def integrand(s: float) -> float:
        us = u.state_at(s)
        vs = us if u is v else v.state_at(s)
        return _state_norm(us, p_alpha) * _gradient_norm(
            vector_gradient(vs), p_beta
        )

    times = list(u.times)
    ratios = []
    grad_ratios = []
    for t in times:
        g = duhamel_bilinear(u, v, t, cfg)
        rhs = _weighted_time_integral(integrand, t, e1, cfg.delta, cfg.quad_nodes)
        lhs = _state_norm(g, p_gamma)
        ratios.append(lhs / rhs if rhs > 0.0 else 0.0)
        if e2 < 1.0:
            rhs2 = _weighted_time_integral(
                integrand, t, e2, cfg.delta, cfg.quad_nodes
            )
            lhs2 = _gradient_norm(vector_gradient(g), p_gamma)
            grad_ratios.append(lhs2 / rhs2 if rhs2 > 0.0 else 0.0)
    return {
        "times": times,
        "ratios": ratios,
        "max_ratio": max(ratios) if ratios else 0.0,
        "gradient_ratios": grad_ratios,
        "max_gradient_ratio": max(grad_ratios) if grad_ratios else None,
    }


def save_trajectory(
    traj: Trajectory, directory: Union[str, Path], cfg: Optional[SolverConfig] = None
) -> None:
    """Write meta.json, initial.mnf, and per-node state/gradient files."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    meta = {
        "delta": traj.delta,
        "times": list(traj.times),
        "grid": {
            "shape": list(traj.grid.shape),
            "half_widths": list(traj.grid.half_widths),
        },
        "nodes": traj.node_count,
        "exponents": None
        if cfg is None
        else {"p": [str(x) for x in cfg.p], "q": [str(x) for x in cfg.q]},
    }
    (root / "meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2))
    write_field(traj.initial, root / "initial.mnf")
    for i, (state, grads) in enumerate(zip(traj.states, traj.gradient_states), 1):
        write_field(state, root / f"state_{i:04d}.mnf")
        write_components([g for row in grads for g in row], root / f"gradient_{i:04d}.mnf")


def load_trajectory(directory: Union[str, Path]) -> Trajectory:
    root = Path(directory)
    meta = json.loads((root / "meta.json").read_text())
    times = meta["times"]
    initial = read_field(root / "initial.mnf", periodic=True)
    grid = initial.grid
    n = grid.n
    states = []
    grads = []
    for i in range(1, len(times) + 1):
        states.append(read_field(root / f"state_{i:04d}.mnf", periodic=True))
        flat = read_components(root / f"gradient_{i:04d}.mnf", periodic=True)
        grads.append(
            tuple(tuple(flat[c * n + j] for j in range(n)) for c in range(n))
        )
    return Trajectory(
        grid,
        tuple(float(t) for t in times),
        tuple(states),
        tuple(grads),
        initial,
        float(meta["delta"]),
    )
