"""Exponent vectors for iterated Lebesgue norms.

An exponent vector assigns one integrability exponent per axis, innermost
axis first. The value ``math.inf`` is the tagged "sup over this axis" marker;
it never enters power-law arithmetic, the norm evaluator branches on it
instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ExponentError

INF = math.inf


def reciprocal(p: float) -> float:
    """1/p with the convention 1/inf = 0."""
    return 0.0 if p == INF else 1.0 / p


@dataclass(frozen=True)
class MixedExponents:
    """One exponent per axis, each in [1, inf]; axis 1 first."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        try:
            values = tuple(float(v) for v in self.values)
        except TypeError:
            raise ExponentError(f"expected a sequence of exponents, got {self.values!r}")
        if not values:
            raise ExponentError("need at least one exponent")
        for k, v in enumerate(values, start=1):
            if math.isnan(v) or v < 1.0:
                raise ExponentError(f"axis {k}: exponent {v!r} is outside [1, inf]")
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls, p: float, n: int) -> "MixedExponents":
        return cls((p,) * n)

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    @property
    def all_finite(self) -> bool:
        return all(v != INF for v in self.values)

    def criticality_sum(self) -> float:
        """Sum of reciprocals in axis order (inf contributes 0).

        Accumulated left to right so the result is deterministic and
        order-dependent on the axis order, as documented.
        """
        total = 0.0
        for v in self.values:
            total += reciprocal(v)
        return total

    def is_critical(self, tol: float = 1e-12) -> bool:
        return abs(self.criticality_sum() - 1.0) <= tol

    def scaled(self, factors: Sequence[float]) -> "MixedExponents":
        """Per-axis exponents p_k / c_k, with p_k/0 = inf and inf/c = inf."""
        if len(factors) != self.n:
            raise ExponentError(
                f"split has {len(factors)} entries for {self.n} axes"
            )
        out = []
        for k, (p, c) in enumerate(zip(self.values, factors), start=1):
            c = float(c)
            if c < 0.0:
                raise ExponentError(f"axis {k}: negative split {c!r}")
            if c == 0.0 or p == INF:
                out.append(INF)
            else:
                out.append(p / c)
        return MixedExponents(tuple(out))

    def __str__(self) -> str:
        parts = ", ".join("inf" if v == INF else f"{v:g}" for v in self.values)
        return f"({parts})"
