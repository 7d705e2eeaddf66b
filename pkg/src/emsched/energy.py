"""Energy/duration tradeoff curves.

Every curve maps a task's total running time ``d`` to the energy it consumes
and is convex and non-increasing in ``d``.  Four families are supported:

* :class:`PowerLaw` -- speed scaling, ``w**alpha / d**(alpha - 1)``
* :class:`AffineReciprocal` -- ``a + b / d``
* :class:`PiecewiseLinear` -- a convex table of ``(duration, energy)`` points,
  constant beyond the last point and infinite before the first
* :class:`Constant` -- ``c`` regardless of duration
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import BudgetUnachievable, InstanceError

#: Shortest duration any task may be given.
D_MIN = 1e-9


def _check_duration(d: float) -> None:
    if not d > 0:
        raise ValueError(f"duration must be positive, got {d!r}")


@dataclass(frozen=True)
class PowerLaw:
    work: float
    alpha: float

    def __post_init__(self):
        if not (self.work > 0 and math.isfinite(self.work)):
            raise InstanceError(f"powerlaw work must be positive, got {self.work!r}")
        if not (self.alpha > 1 and math.isfinite(self.alpha)):
            raise InstanceError(f"powerlaw alpha must exceed 1, got {self.alpha!r}")

    @property
    def infimum(self) -> float:
        return 0.0

    attains_infimum = False
    smooth = True

    def value(self, d: float) -> float:
        return self.work ** self.alpha / d ** (self.alpha - 1.0)

    def derivative(self, d: float) -> float:
        return (1.0 - self.alpha) * self.work ** self.alpha / d ** self.alpha

    def second_derivative(self, d: float) -> float:
        a = self.alpha
        return a * (a - 1.0) * self.work ** a / d ** (a + 1.0)

    def inverse(self, e: float) -> float:
        return (self.work ** self.alpha / e) ** (1.0 / (self.alpha - 1.0))

    def scaled(self, gamma: float) -> "PowerLaw":
        """Same energies at durations stretched by ``gamma``."""
        return PowerLaw(self.work * gamma ** ((self.alpha - 1.0) / self.alpha), self.alpha)

    def to_dict(self) -> dict:
        return {"kind": "powerlaw", "work": self.work, "alpha": self.alpha}


@dataclass(frozen=True)
class AffineReciprocal:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise InstanceError(f"affine_reciprocal needs a, b >= 0, got a={self.a!r}, b={self.b!r}")

    @property
    def infimum(self) -> float:
        return self.a

    @property
    def attains_infimum(self) -> bool:
        return self.b == 0

    @property
    def smooth(self) -> bool:
        return self.b > 0

    def value(self, d: float) -> float:
        return self.a + self.b / d

    def derivative(self, d: float) -> float:
        return -self.b / (d * d)

    def second_derivative(self, d: float) -> float:
        return 2.0 * self.b / (d * d * d)

    def inverse(self, e: float) -> float:
        if self.b == 0:
            return D_MIN
        return self.b / (e - self.a)

    def to_dict(self) -> dict:
        return {"kind": "affine_reciprocal", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise InstanceError(f"constant energy must be >= 0, got {self.c!r}")

    @property
    def infimum(self) -> float:
        return self.c

    attains_infimum = True
    smooth = False

    def value(self, d: float) -> float:
        return self.c

    def derivative(self, d: float) -> float:
        return 0.0

    def second_derivative(self, d: float) -> float:
        return 0.0

    def inverse(self, e: float) -> float:
        return D_MIN

    def to_dict(self) -> dict:
        return {"kind": "constant", "c": self.c}


@dataclass(frozen=True)
class PiecewiseLinear:
    """Convex chain through ``points``; +inf below the first duration."""

    points: tuple

    def __post_init__(self):
        pts = tuple((float(d), float(e)) for d, e in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise InstanceError("piecewise energy table is empty")
        for d, e in pts:
            if not (d > 0 and e >= 0 and math.isfinite(d) and math.isfinite(e)):
                raise InstanceError(f"piecewise point ({d}, {e}) needs d > 0 and e >= 0")
        ds = [d for d, _ in pts]
        es = [e for _, e in pts]
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise InstanceError("piecewise durations must be strictly increasing")
        if any(b > a for a, b in zip(es, es[1:])):
            raise InstanceError("energy function not non-increasing")
        slopes = self.slopes
        # the constant tail has slope 0, which is >= every (non-positive) slope
        if any(s2 < s1 - 1e-12 * max(1.0, abs(s1)) for s1, s2 in zip(slopes, slopes[1:])):
            raise InstanceError("energy function not convex")

    @property
    def slopes(self) -> list[float]:
        p = self.points
        return [(e2 - e1) / (d2 - d1) for (d1, e1), (d2, e2) in zip(p, p[1:])]

    @property
    def first_duration(self) -> float:
        return self.points[0][0]

    @property
    def infimum(self) -> float:
        return self.points[-1][1]

    attains_infimum = True
    smooth = False

    def value(self, d: float) -> float:
        if d < self.points[0][0]:
            return math.inf
        ds, es = zip(*self.points)
        return float(np.interp(d, ds, es))

    def derivative(self, d: float) -> float:
        """Right derivative."""
        for (d1, _), (d2, _), s in zip(self.points, self.points[1:], self.slopes):
            if d1 <= d < d2:
                return s
        return 0.0

    def second_derivative(self, d: float) -> float:
        return 0.0

    def inverse(self, e: float) -> float:
        pts = self.points
        if e >= pts[0][1]:
            return pts[0][0]
        for (d1, e1), (d2, e2) in zip(pts, pts[1:]):
            if e2 <= e:
                return d1 + (e1 - e) / (e1 - e2) * (d2 - d1)
        return pts[-1][0]

    def epigraph(self) -> list[tuple[float, float]]:
        """Affine pieces ``(slope, intercept)`` whose maximum equals the curve on its domain."""
        pieces = [(s, e1 - s * d1) for (d1, e1), s in zip(self.points, self.slopes)]
        pieces.append((0.0, self.points[-1][1]))
        return pieces

    def to_dict(self) -> dict:
        return {"kind": "piecewise", "points": [list(p) for p in self.points]}


EnergyFunction = Union[PowerLaw, AffineReciprocal, PiecewiseLinear, Constant]


def evaluate_energy(f: EnergyFunction, d: float) -> float:
    """Energy consumed by a task running for a total of ``d`` time units."""
    _check_duration(d)
    return f.value(d)


def invert_energy(f: EnergyFunction, e: float) -> float:
    """Shortest duration whose energy does not exceed ``e``.

    Raises
    ------
    BudgetUnachievable
        If ``e`` lies below the curve's infimum (or at it, when the infimum is
        only approached as ``d`` grows without bound).
    """
    inf = f.infimum
    if e < inf or (e == inf and not f.attains_infimum):
        raise BudgetUnachievable(f"energy {e!r} is below the infimum {inf!r} of {f.to_dict()}")
    return f.inverse(e)


def duration_floor(f: EnergyFunction) -> float:
    """Smallest duration at which ``f`` is finite."""
    if isinstance(f, PiecewiseLinear):
        return max(D_MIN, f.first_duration)
    return D_MIN


def energy_from_dict(spec: dict) -> EnergyFunction:
    kind = spec.get("kind")
    try:
        if kind == "powerlaw":
            return PowerLaw(float(spec["work"]), float(spec["alpha"]))
        if kind == "affine_reciprocal":
            return AffineReciprocal(float(spec["a"]), float(spec["b"]))
        if kind == "piecewise":
            return PiecewiseLinear(tuple(tuple(p) for p in spec["points"]))
        if kind == "constant":
            return Constant(float(spec["c"]))
    except KeyError as exc:
        raise InstanceError(f"energy kind {kind!r} is missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(f"bad energy parameters for kind {kind!r}: {exc}") from None
    raise InstanceError(f"unknown energy kind {kind!r}")


def shape_violation(f: EnergyFunction, samples: int = 64) -> str | None:
    """Sample ``f`` for monotonicity and midpoint convexity.

    Returns a description of the first violation found, or ``None``.
    """
    lo = duration_floor(f)
    if isinstance(f, PiecewiseLinear):
        hi = 2.0 * f.points[-1][0]
    else:
        hi = max(1e3, 1e3 * lo)
    ds = np.geomspace(max(lo, 1e-6), hi, samples)
    vals = [f.value(float(d)) for d in ds]
    for (d1, v1), (d2, v2) in zip(zip(ds, vals), zip(ds[1:], vals[1:])):
        if v2 > v1 * (1 + 1e-12) + 1e-15:
            return f"energy function not non-increasing near d={d1:g}"
        mid = f.value(0.5 * (d1 + d2))
        if mid > 0.5 * (v1 + v2) * (1 + 1e-12) + 1e-15:
            return f"energy function not convex near d={d1:g}"
    return None
