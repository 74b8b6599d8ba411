"""Iterated mixed Lebesgue norms and ratio checkers.

The norm integrates axis 1 innermost with exponent p_1 (rectangle rule,
weight h_1), raises to p_2/p_1, integrates axis 2, and so on; the outermost
stage takes the 1/p_n root. An inf exponent turns that stage into a max over
the axis. Each stage is scaled by its running maximum before the power law is
applied, which keeps huge exponents overflow-free and makes homogeneity exact
to rounding.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DomainEscapeError, ExponentError, FieldError, GridError
from .exponents import INF, MixedExponents, reciprocal
from .grid import ScalarField, VectorField


class NormValue(float):
    """A nonnegative norm value carrying an advisory truncation witness.

    ``tail_fraction`` is the per-axis fraction of the integrand's mass in the
    outermost two sample slabs; large values mean the truncated domain is
    eating the field's tails and the norm underestimates the whole-space one.
    """

    tail_fraction: tuple[float, ...]

    def __new__(cls, value: float, tail_fraction: tuple[float, ...] = ()) -> "NormValue":
        obj = super().__new__(cls, value)
        obj.tail_fraction = tail_fraction
        return obj


def _reduce_stage(acc: np.ndarray, p_k: float, h: float) -> np.ndarray:
    if p_k == INF:
        return acc.max(axis=-1)
    amax = acc.max(axis=-1, keepdims=True)
    safe = np.where(amax > 0.0, amax, 1.0)
    inner = np.sum((acc / safe) ** p_k, axis=-1) * h
    return np.squeeze(amax, axis=-1) * inner ** (1.0 / p_k)


def mixed_norm(f: ScalarField, p: MixedExponents) -> NormValue:
    """Iterated-quadrature mixed norm of a scalar field.

    Returns 0 iff the field is identically 0 on the grid. The result is a
    float subclass whose ``tail_fraction`` attribute records the advisory
    boundary-mass estimate.
    """
    grid = f.grid
    if p.n != grid.n:
        raise ExponentError(
            f"exponent vector has {p.n} axes but the grid has {grid.n}"
        )
    tail = f.boundary_fraction()
    acc = np.abs(f.samples)
    for k in range(1, grid.n + 1):
        acc = _reduce_stage(acc, p[k - 1], grid.spacing(k))
    return NormValue(float(acc), tail)


def plain_lp_norm(f: ScalarField, p_scalar: float) -> NormValue:
    """The usual L_p norm; implemented as mixed_norm with equal exponents."""
    p_scalar = float(p_scalar)
    if math.isnan(p_scalar) or p_scalar < 1.0:
        raise ExponentError(f"plain exponent {p_scalar!r} is outside [1, inf]")
    return mixed_norm(f, MixedExponents.uniform(p_scalar, f.grid.n))


def aggregate_norm(fields: Iterable[ScalarField], p: MixedExponents) -> float:
    """Norm of a multi-component field: max of the component norms.

    Componentwise max is this package's aggregation convention for vector and
    gradient fields (Euclidean-pointwise aggregation would be an equally
    consistent alternative; one had to be fixed).
    """
    best = 0.0
    for f in fields:
        best = max(best, float(mixed_norm(f, p)))
    return best


def vector_norm(v: VectorField, p: MixedExponents) -> float:
    return aggregate_norm(v.components, p)


def _rescaled(f: ScalarField, lam: float, escape_tol: float) -> ScalarField:
    grid = f.grid
    if f.profile is not None:
        base = f.profile
        return ScalarField.from_profile(
            grid, lambda *coords: lam * base(*(lam * c for c in coords))
        )
    if lam > 1.0:
        worst = max(f.boundary_fraction())
        if worst > escape_tol:
            raise DomainEscapeError(
                f"rescaled support escapes the sampled domain: boundary mass "
                f"fraction {worst:.3e} exceeds {escape_tol:.1e} at lambda={lam:g}"
            )
    pts = tuple(grid.axis_coordinates(k) for k in range(grid.n, 0, -1))
    interp = RegularGridInterpolator(
        pts, f.samples, method="linear", bounds_error=False, fill_value=0.0
    )
    mesh = np.meshgrid(*(lam * c for c in pts), indexing="ij")
    query = np.stack([m.ravel() for m in mesh], axis=-1)
    values = lam * interp(query).reshape(grid.numpy_shape)
    return ScalarField(grid, values)


def scaling_ratio(
    f: ScalarField, lam: float, p: MixedExponents, escape_tol: float = 1e-6
) -> float:
    """Norm ratio of lambda*f(lambda .) to f on the same grid.

    Uses the registered closed form when the field has one, multilinear
    interpolation (zero fill) otherwise. For an analytic field the continuum
    ratio is lambda^(1 - sum 1/p_k); it is 1 at critical exponents.
    """
    lam = float(lam)
    if not math.isfinite(lam) or lam <= 0.0:
        raise ExponentError(f"scaling factor must be positive and finite, got {lam!r}")
    num = float(mixed_norm(_rescaled(f, lam, escape_tol), p))
    den = float(mixed_norm(f, p))
    if den == 0.0:
        return 0.0
    return num / den


def mixed_holder_ratio(
    f: ScalarField,
    g: ScalarField,
    p: MixedExponents,
    alpha: Sequence[float],
    beta: Sequence[float],
) -> float:
    """Measured ratio ||fg||_{p/(a+b)} / (||f||_{p/a} ||g||_{p/b}).

    The continuum value is <= 1 by axiswise Hoelder. Splits must satisfy
    0 < a_k, b_k <= 1 and a_k + b_k <= p_k.
    """
    f.grid.require_same(g.grid, "mixed Hoelder ratio")
    if p.n != f.grid.n:
        raise ExponentError(f"exponent vector has {p.n} axes but the grid has {f.grid.n}")
    if len(alpha) != p.n or len(beta) != p.n:
        raise ExponentError("split length does not match axis count")
    for k, (a, b, pk) in enumerate(zip(alpha, beta, p), start=1):
        a, b = float(a), float(b)
        if not (0.0 < a <= 1.0) or not (0.0 < b <= 1.0):
            raise ExponentError(f"axis {k}: splits must lie in (0, 1], got {a!r}, {b!r}")
        if pk != INF and a + b > pk + 1e-12:
            raise ExponentError(f"axis {k}: split sum {a + b:g} exceeds exponent {pk:g}")
    product = ScalarField(f.grid, f.samples * g.samples)
    num = float(mixed_norm(product, p.scaled([a + b for a, b in zip(alpha, beta)])))
    den = float(mixed_norm(f, p.scaled(alpha))) * float(mixed_norm(g, p.scaled(beta)))
    if den == 0.0:
        return 0.0
    return num / den
