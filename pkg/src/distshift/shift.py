"""Distributional shift (DS) and relative distributional shift (RDS).

DS measures how strongly a distribution's mass is concentrated away from
the highest bin: 0 when everything sits in the right-most bin, 1 when
everything sits in the left-most. It is computed from the normalized sum
of exponentiated cumulative totals,

    DS = (sum_i (F_i / n)**z - 1) / (k - 1)

with z = 1 (linear), a caller-chosen z, or the bin-dependent default
z = (k + 1) / k. RDS is the signed difference DS(F2) - DS(F1).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .distributions import (
    CumulativeDistribution,
    FrequencyDistribution,
    ValidationError,
    cumulate,
)


class ShiftMode(enum.Enum):
    LINEAR = "linear"  # z = 1
    FIXED = "fixed"  # z supplied by the caller
    BIN_DEPENDENT = "bin_dependent"  # z = (k + 1) / k


@dataclass(frozen=True)
class ShiftExponent:
    """Exponent applied to cumulative totals before normalization."""

    z: float
    mode: ShiftMode

    def __post_init__(self):
        if not self.z > 0:
            raise ValidationError(f"exponent must be positive, got {self.z}")

    @classmethod
    def linear(cls) -> "ShiftExponent":
        return cls(1.0, ShiftMode.LINEAR)

    @classmethod
    def fixed(cls, z: float) -> "ShiftExponent":
        return cls(float(z), ShiftMode.FIXED)

    @classmethod
    def bin_dependent(cls, k: int) -> "ShiftExponent":
        return cls((k + 1) / k, ShiftMode.BIN_DEPENDENT)


@dataclass(frozen=True)
class ShiftValue:
    """A computed shift value together with the inputs that scale it."""

    ds: float
    z_used: float
    n: int
    k: int


Distribution = FrequencyDistribution | CumulativeDistribution


def _as_cumulative(dist: Distribution) -> CumulativeDistribution:
    if isinstance(dist, CumulativeDistribution):
        return dist
    if isinstance(dist, FrequencyDistribution):
        return cumulate(dist)
    raise TypeError(
        f"expected FrequencyDistribution or CumulativeDistribution, got {type(dist).__name__}"
    )


def ds_linear(dist: Distribution) -> ShiftValue:
    """Linear shift: (sum(F)/n - 1) / (k - 1), computed exactly in integers."""
    F = _as_cumulative(dist)
    n, k = F.n, F.k
    value = (sum(F.totals) - n) / (n * (k - 1))
    return ShiftValue(ds=value, z_used=1.0, n=n, k=k)


def ds_with_exponent(dist: Distribution, z: float) -> ShiftValue:
    """Shift with an explicit exponent z > 0.

    The sum is accumulated as sum((F_i/n)**z) with compensated summation,
    which avoids overflow at large n and keeps the result exactly rounded.
    The [0, 1] range is guaranteed for z >= 1; values of z in (0, 1) are
    accepted for experimentation.
    """
    z = float(z)
    if not z > 0:
        raise ValidationError(f"exponent must be positive, got {z}")
    F = _as_cumulative(dist)
    n, k = F.n, F.k
    total = math.fsum((t / n) ** z for t in F.totals)
    return ShiftValue(ds=(total - 1.0) / (k - 1), z_used=z, n=n, k=k)


def ds(dist: Distribution) -> ShiftValue:
    """Shift with the bin-dependent default exponent z = (k + 1) / k."""
    F = _as_cumulative(dist)
    return ds_with_exponent(F, (F.k + 1) / F.k)


def rds(dist1: Distribution, dist2: Distribution, *, allow_unequal_k: bool = False) -> float:
    """Relative shift DS(F2) - DS(F1), each side using the default exponent.

    Positive values mean the first distribution is shifted right of the
    second. The two distributions may have different n. Unequal k is
    rejected unless ``allow_unequal_k`` is set; that comparison is exposed
    for exploration but is not validated.
    """
    F1 = _as_cumulative(dist1)
    F2 = _as_cumulative(dist2)
    if F1.k != F2.k and not allow_unequal_k:
        raise ValidationError(
            f"bin counts differ (k={F1.k} vs k={F2.k}); "
            "pass allow_unequal_k=True to compare anyway"
        )
    return ds(F2).ds - ds(F1).ds
