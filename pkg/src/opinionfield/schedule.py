"""Piecewise-linear time schedules, shared by the decay alpha(s) and the
multiplier path lambda(s)."""

from __future__ import annotations

import numpy as np

__all__ = ["PiecewiseLinear", "as_schedule"]


class PiecewiseLinear:
    """Linear interpolation through (times, values) breakpoints.

    Outside the table the schedule extends flat; the rate uses the
    right-hand slope (left-hand at the final breakpoint).
    """

    def __init__(self, times, values):
        t = np.asarray(times, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.shape != v.shape:
            raise ValueError("schedule needs matching 1-d times and values, len >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("schedule breakpoints must be strictly increasing")
        self.times = t
        self.values = v

    def value(self, s: float) -> float:
        return float(np.interp(s, self.times, self.values))

    def rate(self, s: float) -> float:
        t = self.times
        if s >= t[-1]:
            idx = t.size - 2
        else:
            idx = int(np.searchsorted(t, s, side="right") - 1)
            idx = max(idx, 0)
        dv = self.values[idx + 1] - self.values[idx]
        return float(dv / (t[idx + 1] - t[idx]))

    def increment(self, s: float, eps: float) -> float:
        return self.value(s + eps) - self.value(s)


class _Constant:
    def __init__(self, c: float):
        self.c = float(c)

    def value(self, s: float) -> float:
        return self.c

    def rate(self, s: float) -> float:
        return 0.0

    def increment(self, s: float, eps: float) -> float:
        return 0.0


def as_schedule(spec):
    """Coerce a constant, (times, values) pair, or schedule into a schedule."""
    if isinstance(spec, (PiecewiseLinear, _Constant)):
        return spec
    if isinstance(spec, (int, float)):
        return _Constant(spec)
    times, values = spec
    return PiecewiseLinear(times, values)
