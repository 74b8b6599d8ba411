"""Independent pseudo-spectral time stepper for the velocity equation.

Exists to cross-check the Picard mild solver by a completely different
discretization: exact integrating-factor treatment of the viscous term,
explicit third-order strong-stability-preserving Runge-Kutta on the
projected convective term, and 2/3-rule dealiasing of products.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
import scipy.fft as sfft

from .errors import CflError, FieldError
from .grid import TensorGrid, VectorField
from .mild import Trajectory, _prepare_data
from .spectral import _fftn, _ifftn, _xi_squared, wavenumbers

# Largest exponent fed to the one forward integrating factor; products are
# dealiased first so this bounds exp growth on the retained band only.
_MAX_FORWARD_EXPONENT = 600.0


def _dealias_mask(grid: TensorGrid) -> np.ndarray:
    mask = np.ones(grid.numpy_shape, dtype=bool)
    for k in range(1, grid.n + 1):
        m = grid.shape[k - 1]
        j = np.rint(sfft.fftfreq(m) * m).astype(int)
        shape = [1] * grid.n
        shape[grid.numpy_axis(k)] = m
        mask &= np.abs(j).reshape(shape) < m / 3.0
    return mask


def timestep_oracle(
    a0: VectorField,
    T: float,
    steps: int,
    record_times: Optional[Sequence[float]] = None,
    delta: float = 0.5,
) -> Trajectory:
    """March the velocity field to time T and record states along the way.

    The base step is T/steps; recording times are merged into the step
    sequence so every requested time is landed on exactly. Each step checks
    the advective CFL number dt * max|u| / min(h) <= 1 and refuses beyond
    it. Returns a Trajectory holding the recorded states (all step times
    when record_times is omitted).
    """
    if not (T > 0.0 and math.isfinite(T)):
        raise FieldError(f"horizon must be positive and finite, got {T!r}")
    if steps < 1:
        raise FieldError(f"need at least one step, got {steps}")
    a0 = _prepare_data(a0)
    grid = a0.grid
    n = grid.n
    hmin = min(grid.spacing(k) for k in range(1, n + 1))

    if record_times is None:
        record = [T * i / steps for i in range(1, steps + 1)]
    else:
        record = [float(t) for t in record_times]
        if sorted(record) != record or len(set(record)) != len(record):
            raise FieldError("record times must be strictly increasing")
        if record and (record[0] <= 0.0 or record[-1] > T * (1.0 + 1e-12)):
            raise FieldError("record times must lie in (0, T]")

    # Step endpoints: the uniform grid merged with the recording times.
    points = sorted(set(T * i / steps for i in range(steps + 1)) | set(record))
    merged = [points[0]]
    for t in points[1:]:
        if t - merged[-1] > 1e-12 * max(1.0, T):
            merged.append(t)
        else:
            merged[-1] = t
    if merged[0] != 0.0:
        merged.insert(0, 0.0)

    xs = wavenumbers(grid, zero_nyquist=True)
    sq = _xi_squared(grid, zero_nyquist=True)
    safe = np.where(sq > 0.0, sq, 1.0)
    a_sym = _xi_squared(grid, zero_nyquist=False)
    mask = _dealias_mask(grid)
    a_retained = float(np.max(a_sym[mask]))

    def nonlinear(hats: list) -> tuple:
        phys = [_ifftn(h).real for h in hats]
        top = max(float(np.max(np.abs(u))) for u in phys)
        conv_hats = []
        for hat in hats:
            conv = np.zeros(grid.numpy_shape)
            for j in range(n):
                conv = conv + phys[j] * _ifftn(1j * xs[j] * hat).real
            ch = _fftn(conv)
            ch[~mask] = 0.0
            conv_hats.append(ch)
        dot = np.zeros(grid.numpy_shape, dtype=complex)
        for j in range(n):
            dot = dot + xs[j] * conv_hats[j]
        out = []
        for i in range(n):
            out.append(
                -(conv_hats[i] - np.where(sq > 0.0, xs[i] * dot / safe, 0.0))
            )
        return out, top

    hats = [_fftn(c.samples) for c in a0.components]
    recorded = {}
    tol = 1e-12 * max(1.0, T)
    targets = list(record)

    for t_lo, t_hi in zip(merged, merged[1:]):
        dt = t_hi - t_lo
        if a_retained * dt / 2.0 > _MAX_FORWARD_EXPONENT:
            raise CflError(
                f"step {dt:g} too large for the grid's viscous range "
                f"(exponent {a_retained * dt / 2.0:.0f})"
            )
        n0, top = nonlinear(hats)
        if dt * top / hmin > 1.0:
            raise CflError(
                f"advective CFL {dt * top / hmin:.2f} > 1 at t={t_lo:g}; "
                f"increase steps"
            )
        e_full = np.exp(-a_sym * dt)
        e_half = np.exp(-a_sym * dt / 2.0)
        e_half_fwd = np.where(mask, np.exp(np.minimum(a_sym * dt / 2.0, 709.0)), 0.0)
        u1 = [e_full * (h + dt * k) for h, k in zip(hats, n0)]
        n1, _ = nonlinear(u1)
        u2 = [
            e_half * (h + 0.25 * dt * k0) + 0.25 * dt * e_half_fwd * k1
            for h, k0, k1 in zip(hats, n0, n1)
        ]
        n2, _ = nonlinear(u2)
        hats = [
            (1.0 / 3.0) * e_full * h
            + (2.0 / 3.0) * e_half * (h2 + dt * k2)
            for h, h2, k2 in zip(hats, u2, n2)
        ]
        while targets and abs(targets[0] - t_hi) <= tol:
            recorded[targets.pop(0)] = [
                _ifftn(h).real.copy() for h in hats
            ]

    if targets:
        raise FieldError(f"internal stepping missed record times {targets!r}")
    states = [
        VectorField.from_component_samples(grid, recorded[t]) for t in record
    ]
    return Trajectory.build(a0, record, states, delta)
