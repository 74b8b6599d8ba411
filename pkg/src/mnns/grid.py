"""Anisotropic tensor-product grids and immutable sampled fields.

Axis numbering follows the integration order: axis 1 is the innermost
quadrature axis. Samples are stored row-major with axis n slowest, so axis k
varies along numpy dimension ``n - k`` (axis 1 is the last numpy axis).

Sample i on axis k sits at ``-L_k + i * h_k`` with ``h_k = 2 L_k / m_k``.
The same node layout serves both regimes: on a periodic grid it is the
standard DFT layout with period ``2 L_k``; on a truncated grid each node
carries rectangle-rule weight ``h_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import FieldError, GridError

Profile = Callable[..., np.ndarray]


@dataclass(frozen=True)
class TensorGrid:
    """Uniform anisotropic grid on the box prod_k [-L_k, L_k)."""

    shape: tuple[int, ...]
    half_widths: tuple[float, ...]
    periodic: bool = False

    def __post_init__(self) -> None:
        shape = tuple(int(m) for m in self.shape)
        widths = tuple(float(L) for L in self.half_widths)
        if not shape:
            raise GridError("grid needs at least one axis")
        if len(shape) != len(widths):
            raise GridError(
                f"{len(shape)} sample counts but {len(widths)} half-widths"
            )
        for k, (m, L) in enumerate(zip(shape, widths), start=1):
            if m < 4 or m % 2 != 0:
                raise GridError(f"axis {k}: sample count must be even and >= 4, got {m}")
            if not math.isfinite(L) or L <= 0.0:
                raise GridError(f"axis {k}: half-width must be positive and finite, got {L!r}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "half_widths", widths)

    @property
    def n(self) -> int:
        return len(self.shape)

    @property
    def numpy_shape(self) -> tuple[int, ...]:
        return self.shape[::-1]

    def numpy_axis(self, k: int) -> int:
        """Numpy dimension holding axis k (1-based)."""
        if not 1 <= k <= self.n:
            raise GridError(f"axis {k} out of range for an n={self.n} grid")
        return self.n - k

    def spacing(self, k: int) -> float:
        return 2.0 * self.half_widths[k - 1] / self.shape[k - 1]

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(self.spacing(k) for k in range(1, self.n + 1))

    @property
    def cell_volume(self) -> float:
        vol = 1.0
        for h in self.spacings:
            vol *= h
        return vol

    def axis_coordinates(self, k: int) -> np.ndarray:
        L = self.half_widths[k - 1]
        m = self.shape[k - 1]
        return -L + self.spacing(k) * np.arange(m)

    def coordinate_arrays(self) -> tuple[np.ndarray, ...]:
        """Per-axis coordinates broadcastable to the sample array shape."""
        out = []
        for k in range(1, self.n + 1):
            c = self.axis_coordinates(k)
            shape = [1] * self.n
            shape[self.numpy_axis(k)] = c.size
            out.append(c.reshape(shape))
        return tuple(out)

    def require_same(self, other: "TensorGrid", what: str = "operation") -> None:
        if self != other:
            raise GridError(f"{what}: grids differ ({self} vs {other})")

    def require_periodic(self, what: str) -> None:
        if not self.periodic:
            raise GridError(f"{what} needs a periodic grid")

    def require_truncated(self, what: str) -> None:
        if self.periodic:
            raise GridError(f"{what} is a truncated-domain operation, not periodic")

    def __str__(self) -> str:
        kind = "periodic" if self.periodic else "truncated"
        dims = "x".join(str(m) for m in self.shape)
        return f"<{kind} grid {dims}, L={self.half_widths}>"


def _frozen_samples(samples: np.ndarray, grid: TensorGrid) -> np.ndarray:
    arr = np.array(samples, dtype=np.float64, copy=True)
    if arr.shape != grid.numpy_shape:
        raise FieldError(
            f"sample array shape {arr.shape} does not match grid layout "
            f"{grid.numpy_shape} (axis n slowest)"
        )
    if not np.all(np.isfinite(arr)):
        raise FieldError("field contains non-finite samples")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Immutable real samples on a TensorGrid, with an optional closed form.

    ``profile``, when present, is a vectorized callable of the n broadcast
    coordinate arrays that reproduces the samples; rescaling operations use
    it for exact re-evaluation.
    """

    grid: TensorGrid
    samples: np.ndarray
    profile: Optional[Profile] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", _frozen_samples(self.samples, self.grid))

    @classmethod
    def from_profile(
        cls, grid: TensorGrid, fn: Profile, keep_profile: bool = True
    ) -> "ScalarField":
        values = np.broadcast_to(fn(*grid.coordinate_arrays()), grid.numpy_shape)
        return cls(grid, np.asarray(values, dtype=np.float64), fn if keep_profile else None)

    @classmethod
    def zeros(cls, grid: TensorGrid) -> "ScalarField":
        return cls(grid, np.zeros(grid.numpy_shape))

    def with_samples(self, samples: np.ndarray) -> "ScalarField":
        return ScalarField(self.grid, samples)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def mass(self) -> float:
        return float(self.samples.sum() * self.grid.cell_volume)

    def boundary_fraction(self) -> tuple[float, ...]:
        """Per-axis fraction of the |f| mass in the outermost two slabs.

        Advisory truncation-error witness; meaningful on truncated grids.
        """
        a = np.abs(self.samples)
        total = float(a.sum())
        out = []
        for k in range(1, self.grid.n + 1):
            if total == 0.0:
                out.append(0.0)
                continue
            ax = self.grid.numpy_axis(k)
            sl_lo = [slice(None)] * self.grid.n
            sl_lo[ax] = slice(0, 2)
            sl_hi = [slice(None)] * self.grid.n
            sl_hi[ax] = slice(-2, None)
            shell = float(a[tuple(sl_lo)].sum() + a[tuple(sl_hi)].sum())
            out.append(shell / total)
        return tuple(out)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        self.grid.require_same(other.grid, "field addition")
        return ScalarField(self.grid, self.samples + other.samples)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        self.grid.require_same(other.grid, "field subtraction")
        return ScalarField(self.grid, self.samples - other.samples)

    def __mul__(self, c: float) -> "ScalarField":
        c = float(c)
        prof = None
        if self.profile is not None:
            base = self.profile
            prof = lambda *coords: c * base(*coords)
        return ScalarField(self.grid, self.samples * c, prof)

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return self * -1.0


@dataclass(frozen=True, eq=False)
class VectorField:
    """n ScalarField components sharing one grid."""

    grid: TensorGrid
    components: tuple[ScalarField, ...]

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if len(comps) != self.grid.n:
            raise FieldError(
                f"vector field needs {self.grid.n} components, got {len(comps)}"
            )
        for i, c in enumerate(comps, start=1):
            if c.grid != self.grid:
                raise FieldError(f"component {i} lives on a different grid")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_profiles(
        cls, grid: TensorGrid, fns: Sequence[Profile], keep_profile: bool = True
    ) -> "VectorField":
        comps = tuple(ScalarField.from_profile(grid, fn, keep_profile) for fn in fns)
        return cls(grid, comps)

    @classmethod
    def from_component_samples(cls, grid: TensorGrid, arrays: Sequence[np.ndarray]) -> "VectorField":
        return cls(grid, tuple(ScalarField(grid, a) for a in arrays))

    @classmethod
    def zeros(cls, grid: TensorGrid) -> "VectorField":
        return cls(grid, tuple(ScalarField.zeros(grid) for _ in range(grid.n)))

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> ScalarField:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        self.grid.require_same(other.grid, "field addition")
        return VectorField(
            self.grid, tuple(a + b for a, b in zip(self.components, other.components))
        )

    def __sub__(self, other: "VectorField") -> "VectorField":
        self.grid.require_same(other.grid, "field subtraction")
        return VectorField(
            self.grid, tuple(a - b for a, b in zip(self.components, other.components))
        )

    def __mul__(self, c: float) -> "VectorField":
        return VectorField(self.grid, tuple(comp * c for comp in self.components))

    __rmul__ = __mul__
