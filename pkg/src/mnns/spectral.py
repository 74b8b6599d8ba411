"""Fourier multiplier operators on periodic grids.

Riesz transforms, the Helmholtz-Leray projection, spectral derivatives,
pressure recovery, and the periodic heat multiplier. Frequencies on axis k
are the integers -m_k/2 .. m_k/2 - 1 scaled by pi/L_k.

Convention for odd multipliers (anything carrying a bare factor of xi_j):
the unmatched -m_k/2 Nyquist frequency is zeroed first, so real fields map
to real fields. Even multipliers such as the heat factor exp(-|xi|^2 t) use
the full frequency set.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.fft as sfft

from .errors import ExponentError, FieldError
from .exponents import INF, MixedExponents
from .grid import ScalarField, TensorGrid, VectorField
from .norms import mixed_norm

Field = Union[ScalarField, VectorField]


def fft_workers() -> int:
    """Worker count for FFT calls, capped by the MNNS_THREADS variable."""
    raw = os.environ.get("MNNS_THREADS", "").strip()
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise FieldError(f"MNNS_THREADS must be an integer, got {raw!r}")
    if workers < 1:
        raise FieldError(f"MNNS_THREADS must be at least 1, got {workers}")
    return workers


def _fftn(samples: np.ndarray) -> np.ndarray:
    return sfft.fftn(samples, workers=fft_workers())


def _ifftn(coeffs: np.ndarray) -> np.ndarray:
    return sfft.ifftn(coeffs, workers=fft_workers())


def wavenumbers(grid: TensorGrid, zero_nyquist: bool) -> list[np.ndarray]:
    """Per-axis angular frequencies, shaped to broadcast over sample arrays.

    Entry k-1 carries xi_k = (pi/L_k) * j along its own numpy axis. With
    zero_nyquist the unpaired j = -m_k/2 column is zeroed.
    """
    out = []
    for k in range(1, grid.n + 1):
        m = grid.shape[k - 1]
        xi = 2.0 * math.pi * sfft.fftfreq(m, d=grid.spacing(k))
        if zero_nyquist:
            xi[m // 2] = 0.0
        shape = [1] * grid.n
        shape[grid.numpy_axis(k)] = m
        out.append(xi.reshape(shape))
    return out


def _xi_squared(grid: TensorGrid, zero_nyquist: bool) -> np.ndarray:
    xs = wavenumbers(grid, zero_nyquist)
    total = np.zeros(grid.numpy_shape)
    for xi in xs:
        total = total + np.square(xi)
    return total


@dataclass(frozen=True)
class SpectralField:
    """DFT coefficients of a sampled field, one block per component."""

    grid: TensorGrid
    coefficients: tuple
    vector: bool

    def __post_init__(self) -> None:
        self.grid.require_periodic("spectral representation")
        if not self.coefficients:
            raise FieldError("spectral field needs at least one component")
        for c in self.coefficients:
            if c.shape != self.grid.numpy_shape:
                raise FieldError("coefficient block does not match the grid")

    @classmethod
    def from_field(cls, field: Field) -> "SpectralField":
        if isinstance(field, VectorField):
            return cls(
                field.grid,
                tuple(_fftn(c.samples) for c in field.components),
                True,
            )
        return cls(field.grid, (_fftn(field.samples),), False)

    def to_field(self, imag_tol: float = 1e-10) -> Field:
        sampled = []
        for c in self.coefficients:
            z = _ifftn(c)
            top = float(np.max(np.abs(z.imag)))
            scale = max(1.0, float(np.max(np.abs(z.real))))
            if top > imag_tol * scale:
                raise FieldError(
                    f"inverse transform left imaginary residue {top:.3e}"
                )
            sampled.append(z.real.copy())
        if self.vector:
            return VectorField.from_component_samples(self.grid, sampled)
        return ScalarField(self.grid, sampled[0])

    def conjugate_symmetry_defect(self) -> float:
        worst = 0.0
        for c in self.coefficients:
            flipped = np.conj(c[tuple(np.s_[::-1] for _ in c.shape)])
            flipped = np.roll(flipped, shift=1, axis=tuple(range(c.ndim)))
            scale = max(1.0, float(np.max(np.abs(c))))
            worst = max(worst, float(np.max(np.abs(c - flipped))) / scale)
        return worst


def _check_axis(grid: TensorGrid, j: int) -> None:
    if not 1 <= j <= grid.n:
        raise FieldError(f"axis {j} out of range for n={grid.n}")


def riesz_transform(f: ScalarField, j: int) -> ScalarField:
    """Multiplier -i xi_j / |xi|; the zero mode is annihilated."""
    f.grid.require_periodic("Riesz transform")
    _check_axis(f.grid, j)
    xs = wavenumbers(f.grid, zero_nyquist=True)
    norm = np.sqrt(_xi_squared(f.grid, zero_nyquist=True))
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = np.where(norm > 0.0, -1j * xs[j - 1] / np.where(norm > 0, norm, 1.0), 0.0)
    out = _ifftn(mult * _fftn(f.samples))
    return ScalarField(f.grid, out.real.copy())


def spectral_gradient(f: ScalarField, j: int) -> ScalarField:
    """Spectral partial derivative i xi_j, Nyquist zeroed."""
    f.grid.require_periodic("spectral derivative")
    _check_axis(f.grid, j)
    xi = wavenumbers(f.grid, zero_nyquist=True)[j - 1]
    out = _ifftn(1j * xi * _fftn(f.samples))
    return ScalarField(f.grid, out.real.copy())


def vector_gradient(v: VectorField) -> tuple:
    """All n^2 spectral derivatives, laid out as rows (d_1 u_i .. d_n u_i).

    One forward transform per component, shared across its n derivatives.
    """
    v.grid.require_periodic("spectral derivative")
    xs = wavenumbers(v.grid, zero_nyquist=True)
    rows = []
    for c in v.components:
        hat = _fftn(c.samples)
        rows.append(
            tuple(
                ScalarField(v.grid, _ifftn(1j * xi * hat).real.copy())
                for xi in xs
            )
        )
    return tuple(rows)


def spectral_divergence(v: VectorField) -> ScalarField:
    """sum_j i xi_j v_j-hat, inverse transformed."""
    v.grid.require_periodic("spectral divergence")
    xs = wavenumbers(v.grid, zero_nyquist=True)
    acc = np.zeros(v.grid.numpy_shape, dtype=complex)
    for j, comp in enumerate(v.components, start=1):
        acc = acc + 1j * xs[j - 1] * _fftn(comp.samples)
    return ScalarField(v.grid, _ifftn(acc).real.copy())


def leray_project(v: VectorField) -> VectorField:
    """Projection onto divergence-free fields: delta_jk - xi_j xi_k / |xi|^2.

    The zero mode (and any mode killed by Nyquist hygiene) passes through
    unchanged; constants are divergence-free.
    """
    v.grid.require_periodic("Leray projection")
    xs = wavenumbers(v.grid, zero_nyquist=True)
    sq = _xi_squared(v.grid, zero_nyquist=True)
    safe = np.where(sq > 0.0, sq, 1.0)
    hats = [_fftn(c.samples) for c in v.components]
    dot = np.zeros(v.grid.numpy_shape, dtype=complex)
    for xi, hat in zip(xs, hats):
        dot = dot + xi * hat
    out = []
    for xi, hat in zip(xs, hats):
        projected = hat - np.where(sq > 0.0, xi * dot / safe, 0.0)
        out.append(_ifftn(projected).real.copy())
    return VectorField.from_component_samples(v.grid, out)


def heat_propagate(u0: Field, t: float) -> Field:
    """Periodic heat flow: multiply coefficients by exp(-|xi|^2 t)."""
    if not math.isfinite(t) or t < 0.0:
        raise FieldError(f"propagation time must be nonnegative, got {t!r}")
    if isinstance(u0, VectorField):
        return VectorField(u0.grid, tuple(heat_propagate(c, t) for c in u0.components))
    u0.grid.require_periodic("heat multiplier")
    if t == 0.0:
        return u0
    damp = np.exp(-_xi_squared(u0.grid, zero_nyquist=False) * t)
    out = _ifftn(damp * _fftn(u0.samples))
    return ScalarField(u0.grid, out.real.copy())


def pressure_from_velocity(u: VectorField) -> ScalarField:
    """P = sum_ij R_i R_j (u_i u_j), with zero mean."""
    u.grid.require_periodic("pressure recovery")
    xs = wavenumbers(u.grid, zero_nyquist=True)
    sq = _xi_squared(u.grid, zero_nyquist=True)
    safe = np.where(sq > 0.0, sq, 1.0)
    acc = np.zeros(u.grid.numpy_shape, dtype=complex)
    n = u.grid.n
    for i in range(n):
        for j in range(n):
            prod_hat = _fftn(u.components[i].samples * u.components[j].samples)
            acc = acc + np.where(sq > 0.0, -xs[i] * xs[j] / safe, 0.0) * prod_hat
    samples = _ifftn(acc).real
    samples = samples - samples.mean()
    return ScalarField(u.grid, samples.copy())


def pressure_poisson_reference(u: VectorField) -> ScalarField:
    """Independent pressure: assemble S = sum_ij d_i d_j (u_i u_j) by two
    physical-space derivative passes, then invert -Delta P = -S spectrally.

    Exists purely to cross-check pressure_from_velocity by a different route.
    """
    u.grid.require_periodic("pressure recovery")
    n = u.grid.n
    source = ScalarField.zeros(u.grid)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            prod = ScalarField(
                u.grid,
                u.components[i - 1].samples * u.components[j - 1].samples,
            )
            source = source + spectral_gradient(spectral_gradient(prod, j), i)
    sq = _xi_squared(u.grid, zero_nyquist=True)
    safe = np.where(sq > 0.0, sq, 1.0)
    hat = np.where(sq > 0.0, _fftn(source.samples) / safe, 0.0)
    samples = _ifftn(hat).real
    samples = samples - samples.mean()
    return ScalarField(u.grid, samples.copy())


def riesz_boundedness_probe(
    test_set: Sequence[ScalarField], p: MixedExponents
) -> float:
    """max_j max_f ||R_j f||_p / ||f||_p over the test set.

    An empirical witness that the transforms are bounded for exponents
    strictly inside (1, inf); zero fields are skipped.
    """
    for k, pk in enumerate(p, start=1):
        if pk == INF or not pk > 1.0:
            raise ExponentError(
                f"axis {k}: boundedness probe needs p_k in (1, inf), got {pk:g}"
            )
    worst = 0.0
    for f in test_set:
        denom = float(mixed_norm(f, p))
        if denom == 0.0:
            continue
        for j in range(1, f.grid.n + 1):
            ratio = float(mixed_norm(riesz_transform(f, j), p)) / denom
            worst = max(worst, ratio)
    return worst


def random_band_limited(
    grid: TensorGrid,
    rng: np.random.Generator,
    band: float = 1.0 / 3.0,
    components: int = 1,
    zero_mean: bool = True,
) -> Field:
    """Real random field with spectrum confined to |j_k| < band * m_k.

    White noise is transformed, masked to the low band, and brought back;
    each component is scaled to unit max amplitude. Band-limiting keeps the
    multiplier identities exact to roundoff in tests.
    """
    grid.require_periodic("band-limited sampling")
    if not 0.0 < band <= 0.5:
        raise FieldError(f"band must lie in (0, 0.5], got {band!r}")
    mask = np.ones(grid.numpy_shape, dtype=bool)
    for k in range(1, grid.n + 1):
        m = grid.shape[k - 1]
        j = np.rint(sfft.fftfreq(m) * m).astype(int)
        shape = [1] * grid.n
        shape[grid.numpy_axis(k)] = m
        mask &= np.abs(j).reshape(shape) < band * m
    fields = []
    for _ in range(components):
        noise = rng.standard_normal(grid.numpy_shape)
        hat = _fftn(noise)
        hat[~mask] = 0.0
        if zero_mean:
            hat[(0,) * grid.n] = 0.0
        samples = _ifftn(hat).real
        top = float(np.max(np.abs(samples)))
        if top > 0.0:
            samples = samples / top
        fields.append(samples.copy())
    if components == 1:
        return ScalarField(grid, fields[0])
    if components != grid.n:
        raise FieldError(
            f"components must be 1 or n={grid.n}, got {components}"
        )
    return VectorField.from_component_samples(grid, fields)
