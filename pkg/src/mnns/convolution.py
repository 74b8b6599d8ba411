"""Zero-padded grid convolution and the Young inequality checker.

The discrete convolution is linear (never circular): both fields are
zero-padded to at least twice the sample count per axis, multiplied in
Fourier space, and the window matching the original node positions is
extracted. The node layout -L + i*h makes that window start exactly at index
m/2 of the full convolution, with the rectangle-rule weight prod_k h_k
restoring the continuum scaling.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .errors import ExponentError, TailMassError
from .exponents import MixedExponents, reciprocal
from .grid import ScalarField
from .norms import mixed_norm


def _check_tail(f: ScalarField, tail_limit: float, name: str) -> None:
    for k, frac in enumerate(f.boundary_fraction(), start=1):
        if frac > tail_limit:
            raise TailMassError(
                f"{name}: boundary mass fraction {frac:.3e} on axis {k} exceeds "
                f"{tail_limit:.1e}; the truncated domain is too small for a "
                f"faithful convolution"
            )


def convolve(f: ScalarField, g: ScalarField, tail_limit: float = 1e-6) -> ScalarField:
    """FFT convolution approximating the whole-space (f*g)(x)."""
    f.grid.require_same(g.grid, "convolution")
    f.grid.require_truncated("zero-padded convolution")
    _check_tail(f, tail_limit, "left operand")
    _check_tail(g, tail_limit, "right operand")
    full = fftconvolve(f.samples, g.samples, mode="full")
    window = []
    for k in range(1, f.grid.n + 1):
        m = f.grid.shape[k - 1]
        start = m // 2
        window.append(slice(start, start + m))
    window.reverse()  # numpy axis order: axis n first
    values = full[tuple(window)] * f.grid.cell_volume
    return ScalarField(f.grid, values)


def young_ratio(
    f: ScalarField,
    g: ScalarField,
    p: MixedExponents,
    q: MixedExponents,
    r: MixedExponents,
    tail_limit: float = 1e-6,
) -> float:
    """Measured ratio ||f*g||_p / (||f||_q ||g||_r).

    Requires the per-axis identity 1/p_k + 1 = 1/q_k + 1/r_k; the continuum
    ratio is <= 1 (Young's inequality in mixed norm). A zero denominator
    returns 0 by convention.
    """
    if not (p.n == q.n == r.n == f.grid.n):
        raise ExponentError("exponent vectors and grid must share the axis count")
    for k, (pk, qk, rk) in enumerate(zip(p, q, r), start=1):
        lhs = reciprocal(pk) + 1.0
        rhs = reciprocal(qk) + reciprocal(rk)
        if abs(lhs - rhs) > 1e-12:
            raise ExponentError(
                f"axis {k}: Young identity 1/p + 1 = 1/q + 1/r violated "
                f"({lhs:.15g} vs {rhs:.15g})"
            )
    den = float(mixed_norm(f, q)) * float(mixed_norm(g, r))
    if den == 0.0:
        return 0.0
    num = float(mixed_norm(convolve(f, g, tail_limit), p))
    return num / den
