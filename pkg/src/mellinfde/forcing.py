"""Compactly supported forcing terms.

Every forcing is a callable vanishing identically beyond t_max and finite
on (0, t_max]. `breakpoints` lists the points where the function or its
derivative jumps (the support edge included) so quadrature can align
panel edges there; `is_zero` lets callers short-circuit the transform and
strip analysis for an identically zero drive.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

__all__ = [
    "Forcing",
    "MonomialPulse",
    "SampledForcing",
    "SinePulse",
    "StepPulse",
    "make_forcing",
]


@dataclass(frozen=True)
class Forcing:
    """Base type: amplitude times a unit shape supported on (0, t_max]."""

    t_max: float
    amplitude: float = 1.0

    kind: ClassVar[str] = "abstract"

    def __post_init__(self) -> None:
        if not (np.isfinite(self.t_max) and self.t_max > 0.0):
            raise ValueError(f"{self.kind}: t_max must be positive")
        if not np.isfinite(self.amplitude):
            raise ValueError(f"{self.kind}: amplitude must be finite")

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.t_max,)

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0

    def unit(self) -> "Forcing":
        """Amplitude-1 copy; lets callers factor the scalar out of quadrature
        so scaling the forcing scales results exactly."""
        return dataclasses.replace(self, amplitude=1.0)

    def _shape(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        tv = np.atleast_1d(t_arr)
        out = np.where((tv >= 0.0) & (tv <= self.t_max),
                       self.amplitude * self._shape(tv), 0.0)
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class SinePulse(Forcing):
    """amplitude * sin(t) on [0, t_max], zero beyond."""

    t_max: float = 2.0 * np.pi

    kind: ClassVar[str] = "sine-pulse"

    def _shape(self, t: np.ndarray) -> np.ndarray:
        return np.sin(t)


@dataclass(frozen=True)
class StepPulse(Forcing):
    """amplitude on [0, t_max], zero beyond."""

    kind: ClassVar[str] = "step-pulse"

    def _shape(self, t: np.ndarray) -> np.ndarray:
        return np.ones_like(t)


@dataclass(frozen=True)
class MonomialPulse(Forcing):
    """amplitude * t^mu on (0, t_max], zero beyond; mu > -1 keeps it integrable."""

    mu: float = 1.0

    kind: ClassVar[str] = "monomial-pulse"

    def __post_init__(self) -> None:
        super().__post_init__()
        if not (np.isfinite(self.mu) and self.mu > -1.0):
            raise ValueError("monomial-pulse: mu must be a finite number > -1")

    def _shape(self, t: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(t > 0.0, t, 1.0) ** self.mu * (t > 0.0)


@dataclass(frozen=True)
class SampledForcing(Forcing):
    """Linear interpolation through (times, values), zero beyond the last knot.

    The segment from the origin to the first knot interpolates from (0, 0),
    keeping the function continuous and power-law fittable at small t.
    """

    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    kind: ClassVar[str] = "sampled"

    def __init__(self, times, values, amplitude: float = 1.0):
        times = tuple(float(x) for x in times)
        values = tuple(float(x) for x in values)
        if len(times) < 1 or len(times) != len(values):
            raise ValueError("sampled: need equally many times and values")
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
            raise ValueError("sampled: times must be positive and strictly increasing")
        if not all(np.isfinite(v) for v in values):
            raise ValueError("sampled: values must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "t_max", times[-1])
        object.__setattr__(self, "amplitude", float(amplitude))
        Forcing.__post_init__(self)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.times

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0 or all(v == 0.0 for v in self.values)

    def unit(self) -> "SampledForcing":
        return SampledForcing(self.times, self.values, 1.0)

    def _shape(self, t: np.ndarray) -> np.ndarray:
        xp = np.concatenate([[0.0], self.times])
        fp = np.concatenate([[0.0], self.values])
        return np.interp(t, xp, fp, left=0.0, right=0.0)


_KINDS = {
    SinePulse.kind: SinePulse,
    StepPulse.kind: StepPulse,
    MonomialPulse.kind: MonomialPulse,
    SampledForcing.kind: SampledForcing,
}


def make_forcing(kind: str, **params) -> Forcing:
    """Construct a forcing by kind name; unknown kinds and params raise."""
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise ValueError(
            f"unknown forcing kind {kind!r}; expected one of {sorted(_KINDS)}"
        ) from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise ValueError(f"forcing kind {kind!r}: {exc}") from None
