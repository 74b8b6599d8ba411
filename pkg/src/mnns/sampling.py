"""Seeded random inputs for the verification suites.

All randomness flows through numpy's PCG64 generator with its default
stream constants, so a seed fully determines every suite. Fields meant for
norm and convolution work carry analytic profiles where one exists, which
lets the rescaling code resample them exactly.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .errors import ExponentError
from .exponents import INF, MixedExponents
from .grid import ScalarField, TensorGrid, VectorField


def rng_from_seed(seed: int) -> np.random.Generator:
    """The one sanctioned generator: PCG64 behind the numpy Generator API."""
    return np.random.Generator(np.random.PCG64(seed))


def _recip_to_exponent(r: float) -> float:
    return INF if r < 1e-12 else 1.0 / r


def young_exponent_triple(
    rng: np.random.Generator, n: int
) -> tuple:
    """Draw (p, q, r) with 1/p_k + 1 = 1/q_k + 1/r_k on every axis.

    Per axis: 1/q_k = a, 1/r_k = b with b >= 1 - a, so 1/p_k = a + b - 1
    lands in [0, 1]. Endpoints (a = 0, b = 1, a + b = 1) are drawn with
    positive probability so the sup-norm cases get exercised.
    """
    ps, qs, rs = [], [], []
    for _ in range(n):
        roll = rng.random()
        if roll < 0.15:
            a = 0.0
        elif roll < 0.30:
            a = 1.0
        else:
            a = rng.uniform(0.0, 1.0)
        roll = rng.random()
        if roll < 0.15:
            b = 1.0
        elif roll < 0.30:
            b = 1.0 - a
        else:
            b = rng.uniform(1.0 - a, 1.0)
        qs.append(_recip_to_exponent(a))
        rs.append(_recip_to_exponent(b))
        ps.append(_recip_to_exponent(a + b - 1.0))
    return (
        MixedExponents(tuple(ps)),
        MixedExponents(tuple(qs)),
        MixedExponents(tuple(rs)),
    )


def decay_exponent_pair(rng: np.random.Generator, n: int) -> tuple:
    """Draw (p, q) with a strict per-axis reciprocal gap.

    1/p_k in [0.05, 0.4] and 1/q_k - 1/p_k in [0.25, 0.55], so q_k < p_k
    everywhere, 1/q_k stays at or below 0.95, and the measured decay law is
    driven by a genuine integrability mismatch on every axis.
    """
    ps, qs = [], []
    for _ in range(n):
        rp = rng.uniform(0.05, 0.4)
        gap = rng.uniform(0.25, 0.55)
        ps.append(1.0 / rp)
        qs.append(1.0 / (rp + gap))
    return MixedExponents(tuple(ps)), MixedExponents(tuple(qs))


def critical_exponents(
    rng: np.random.Generator,
    n: int,
    low: float = 0.05,
    high: float = 0.95,
) -> MixedExponents:
    """Draw p with sum 1/p_k = 1, each reciprocal kept inside (low, high)."""
    if n == 1:
        return MixedExponents((1.0,))
    if not (0.0 < low < high < 1.0) or n * low >= 1.0 or n * high <= 1.0:
        raise ExponentError(
            f"reciprocal bounds ({low}, {high}) cannot sum to 1 over {n} axes"
        )
    while True:
        recips = rng.dirichlet(np.full(n, 2.0))
        if np.all(recips > low) and np.all(recips < high):
            break
    recips = recips / recips.sum()
    return MixedExponents(tuple(1.0 / r for r in recips))


def gaussian_bump(
    grid: TensorGrid,
    rng: np.random.Generator,
    center_span: float = 0.2,
    sharpness: tuple = (0.8, 2.5),
    amplitude: tuple = (0.2, 5.0),
) -> ScalarField:
    """Random separable Gaussian bump with an attached analytic profile.

    Centers stay within center_span * L_k of the origin and widths are kept
    narrow enough that the tails are negligible at the boundary.
    """
    n = grid.n
    centers = tuple(
        float(rng.uniform(-center_span, center_span) * grid.half_widths[k])
        for k in range(n)
    )
    cs = tuple(float(rng.uniform(*sharpness)) for _ in range(n))
    amp = float(np.exp(rng.uniform(math.log(amplitude[0]), math.log(amplitude[1]))))

    def profile(*coords):
        out = amp
        for x, mu, c in zip(coords, centers, cs):
            out = out * np.exp(-c * np.square(x - mu))
        return out

    return ScalarField.from_profile(grid, profile)


def separable_power_field(grid: TensorGrid, gammas: Sequence[float]) -> ScalarField:
    """Cell-averaged samples of prod_k |x_k|^{-gamma_k}, gamma_k < 1.

    Point sampling would miss the origin cell's mass entirely (or hit the
    singularity); averaging the exact antiderivative over each cell keeps
    the discrete norms faithful to the continuum ones.
    """
    if len(gammas) != grid.n:
        raise ExponentError("one exponent per axis required")
    axes = []
    for k in range(1, grid.n + 1):
        g = float(gammas[k - 1])
        if not 0.0 < g < 1.0:
            raise ExponentError(
                f"axis {k}: power {g!r} outside (0, 1); cell averages diverge"
            )
        x = grid.axis_coordinates(k)
        h = grid.spacing(k)
        lo, hi = x - h / 2.0, x + h / 2.0

        def anti(s, g=g):
            return np.sign(s) * np.abs(s) ** (1.0 - g) / (1.0 - g)

        axes.append((anti(hi) - anti(lo)) / h)
    samples = axes[0]
    for arr in axes[1:]:
        samples = np.multiply.outer(arr, samples)
    return ScalarField(grid, np.ascontiguousarray(samples))


def box_indicator(grid: TensorGrid, widths: Sequence[float]) -> ScalarField:
    """Indicator of the half-open box prod_k [0, a_k)."""
    if len(widths) != grid.n:
        raise ExponentError("one width per axis required")

    def profile(*coords):
        out = np.ones(np.broadcast(*coords).shape)
        for x, a in zip(coords, widths):
            out = out * ((x >= 0.0) & (x < a))
        return out

    return ScalarField.from_profile(grid, profile)


def taylor_green_2d(
    grid: TensorGrid, amplitude: float = 1.0, variant: str = "cos_sin"
) -> VectorField:
    """The single-vortex stationary-shape field on a two-axis torus.

    cos_sin: (cos k1 x1 sin k2 x2, -(k1/k2) sin k1 x1 cos k2 x2);
    sin_cos swaps the trig pattern. Both are divergence-free; they differ
    in the sign of the recovered pressure.
    """
    if grid.n != 2:
        raise ExponentError("two axes required")
    grid.require_periodic("vortex field")
    k1 = math.pi / grid.half_widths[0]
    k2 = math.pi / grid.half_widths[1]
    if variant == "cos_sin":
        u1 = lambda x1, x2: amplitude * np.cos(k1 * x1) * np.sin(k2 * x2)
        u2 = lambda x1, x2: -amplitude * (k1 / k2) * np.sin(k1 * x1) * np.cos(
            k2 * x2
        )
    elif variant == "sin_cos":
        u1 = lambda x1, x2: amplitude * np.sin(k1 * x1) * np.cos(k2 * x2)
        u2 = lambda x1, x2: -amplitude * (k1 / k2) * np.cos(k1 * x1) * np.sin(
            k2 * x2
        )
    else:
        raise ExponentError(f"unknown vortex variant {variant!r}")
    return VectorField.from_profiles(grid, (u1, u2))


def taylor_green_3d(grid: TensorGrid, amplitude: float = 1.0) -> VectorField:
    """Divergence-free three-axis vortex with an active convective term.

    (cos k1 x1 sin k2 x2 sin k3 x3, -(k1/k2) sin cos sin, 0).
    """
    if grid.n != 3:
        raise ExponentError("three axes required")
    grid.require_periodic("vortex field")
    k1 = math.pi / grid.half_widths[0]
    k2 = math.pi / grid.half_widths[1]
    k3 = math.pi / grid.half_widths[2]
    u1 = lambda x1, x2, x3: (
        amplitude * np.cos(k1 * x1) * np.sin(k2 * x2) * np.sin(k3 * x3)
    )
    u2 = lambda x1, x2, x3: (
        -amplitude * (k1 / k2) * np.sin(k1 * x1) * np.cos(k2 * x2) * np.sin(k3 * x3)
    )
    u3 = lambda x1, x2, x3: np.zeros(np.broadcast(x1, x2, x3).shape)
    return VectorField.from_profiles(grid, (u1, u2, u3))


def anisotropic_tail_field(
    grid: TensorGrid, a: float, b: float
) -> ScalarField:
    """Smooth bounded field decaying like |x_1|^{-a} |x'|^{-b}.

    (1 + x_1^2)^{-a/2} (1 + |x'|^2)^{-b/2} with x' the remaining axes; the
    two decay rates are deliberately different so mixed norms and plain
    norms disagree about membership.
    """
    if grid.n < 2:
        raise ExponentError("at least two axes required")

    def profile(*coords):
        head = (1.0 + np.square(coords[0])) ** (-a / 2.0)
        rest = np.zeros(np.broadcast(*coords[1:]).shape)
        for x in coords[1:]:
            rest = rest + np.square(x)
        return head * (1.0 + rest) ** (-b / 2.0)

    return ScalarField.from_profile(grid, profile)
