"""Oscillating test nonlinearity: nonnegative triangular spikes between plateaus.

Stage m has a peak b_m, where F(b_m) = q_m b_m^2, followed by a plateau
[b_m, c_m] on which f = 0, with c_m = q_m b_m so that F(c_m) = c_m^2 / q_m.
The spike of stage m is the symmetric triangle on [s_m, b_m] with
b_m = (1 + width) s_m; its area makes F continuous.  With q_m -> infinity
the quotient F(t)/t^2 has liminf 0 (plateau ends) and limsup +infinity
(peaks), both at infinity (``direction="infinity"``, stages grow) and at
zero (``direction="zero"``, stages shrink toward 0).

f is even, so F is odd and max_{|x|<=t} F(x) = F(t) for t >= 0.

The construction is scale invariant: the falling-edge slope of every spike
is 4 q_m (1 + width)^2 / width^2 regardless of b_m, which keeps Newton
residuals near machine precision relative to the local scale.
"""

from __future__ import annotations

import threading

import numpy as np

from .errors import ConfigError
from .nonlinearity import ComponentFunction

__all__ = ["SpikeTrain"]

MAX_STAGES = 400
SCALE_FLOOR = 1e-250
SCALE_CEILING = 1e250


class SpikeTrain:
    """Lazily generated spike train; stages are created on first use.

    Parameters
    ----------
    first_peak : float
        b_1, the peak of the first stage (the lowest stage for
        ``direction="infinity"``, the highest for ``direction="zero"``).
    direction : {"infinity", "zero"}
    base, growth : float
        Peak quotient q_m = base + growth * m.
    width : float
        Spike width relative to its start: b_m = (1 + width) s_m.
    """

    def __init__(self, first_peak=1e-4, direction="infinity", base=10.0, growth=2.0, width=1.0):
        if not first_peak > 0:
            raise ConfigError("first_peak must be positive")
        if direction not in ("infinity", "zero"):
            raise ConfigError(f"direction must be 'infinity' or 'zero', got {direction!r}")
        if not (base + growth > 1.0 and growth >= 0 and width > 0):
            raise ConfigError("need base + growth > 1, growth >= 0 and width > 0")
        self.first_peak = float(first_peak)
        self.direction = direction
        self.base = float(base)
        self.growth = float(growth)
        self.width = float(width)
        self._peaks = []  # stage order: m = 1, 2, ...
        self._lock = threading.Lock()
        self._arrays = None
        self._extend(3)

    def quotient(self, m):
        """q_m: F(b_m) / b_m^2; the plateau-end quotient is 1 / q_m."""
        return self.base + self.growth * m

    # -- stage bookkeeping ----------------------------------------------------

    def _extend(self, count):
        with self._lock:
            if len(self._peaks) >= count:
                return
            peaks = list(self._peaks)
            if not peaks:
                peaks.append(self.first_peak)
            while len(peaks) < count:
                m = len(peaks)  # index of the last stage (1-based)
                b = peaks[-1]
                if self.direction == "infinity":
                    peaks.append((1.0 + self.width) * self.quotient(m) * b)
                else:
                    peaks.append(b / ((1.0 + self.width) * self.quotient(m + 1)))
            self._peaks = peaks
            self._arrays = self._build_arrays(peaks)

    def _build_arrays(self, peaks):
        m = np.arange(1, len(peaks) + 1, dtype=float)
        b = np.asarray(peaks)
        q = self.base + self.growth * m
        s = b / (1.0 + self.width)
        f_peak = q * b * b
        if self.direction == "infinity":
            f_start = np.concatenate([[0.0], f_peak[:-1]])
            order = slice(None)
        else:
            # below stage m sits stage m+1; the deepest generated stage gets the
            # value its (not yet generated) successor would provide
            q_next = self.base + self.growth * (m + 1)
            b_next = b / ((1.0 + self.width) * q_next)
            f_start = q_next * b_next * b_next
            order = slice(None, None, -1)
        return {
            "start": s[order].copy(),
            "peak": b[order].copy(),
            "plateau_end": (q * b)[order].copy(),
            "f_start": f_start[order].copy(),
            "area": (f_peak - f_start)[order].copy(),
            "f_peak": f_peak[order].copy(),
        }

    def _cover(self, t_abs):
        """Make sure stages exist around every magnitude in ``t_abs``."""
        nonzero = t_abs[(t_abs > SCALE_FLOOR) & np.isfinite(t_abs)]
        if nonzero.size == 0:
            return
        while len(self._peaks) < MAX_STAGES:
            arr = self._arrays
            if self.direction == "infinity":
                if arr["plateau_end"][-1] >= min(nonzero.max(), SCALE_CEILING):
                    return
            elif arr["start"][0] <= nonzero.min():
                return
            self._extend(len(self._peaks) + 4)

    def stages(self, count):
        """First ``count`` stages in stage order as (start, peak, plateau_end)."""
        self._extend(count)
        arr = self._arrays
        idx = range(count) if self.direction == "infinity" else range(len(self._peaks) - 1, len(self._peaks) - 1 - count, -1)
        return [(float(arr["start"][i]), float(arr["peak"][i]), float(arr["plateau_end"][i])) for i in idx]

    def peaks(self, count):
        return [st[1] for st in self.stages(count)]

    def plateau_ends(self, count):
        return [st[2] for st in self.stages(count)]

    # -- evaluation ----------------------------------------------------------

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        ta = np.abs(t)
        self._cover(np.atleast_1d(ta))
        arr = self._arrays
        idx = np.searchsorted(arr["start"], ta, side="right") - 1
        below = idx < 0
        idx = np.clip(idx, 0, len(arr["start"]) - 1)
        return t, ta, idx, below, arr

    def _spike_parts(self, ta, idx, arr):
        s = arr["start"][idx]
        b = arr["peak"][idx]
        w = b - s
        half = 0.5 * w
        height = 2.0 * arr["area"][idx] / w
        x = ta - s
        in_spike = (x >= 0) & (ta <= b)
        return s, b, w, half, height, x, in_spike

    def f(self, t):
        t, ta, idx, below, arr = self._locate(t)
        _, _, w, half, height, x, in_spike = self._spike_parts(ta, idx, arr)
        tri = height * (1.0 - np.abs(x - half) / half)
        out = np.where(in_spike & ~below, np.maximum(tri, 0.0), 0.0)
        return float(out) if out.ndim == 0 else out

    def F(self, t):
        t, ta, idx, below, arr = self._locate(t)
        _, b, w, half, height, x, in_spike = self._spike_parts(ta, idx, arr)
        rising = height * x * x / (2.0 * half)
        falling = arr["area"][idx] - height * (w - x) ** 2 / (2.0 * half)
        partial = np.where(x <= half, rising, falling)
        val = np.where(in_spike, arr["f_start"][idx] + partial, arr["f_peak"][idx])
        val = np.where(below, self._below(ta), val)
        out = np.sign(t) * val
        return float(out) if out.ndim == 0 else out

    def _below(self, ta):
        # infinity: f = 0 under the first spike; zero: only reached under the
        # numerical floor, where F is far below double resolution anyway
        return np.zeros_like(ta)

    def df(self, t):
        t, ta, idx, below, arr = self._locate(t)
        _, _, w, half, height, x, in_spike = self._spike_parts(ta, idx, arr)
        slope = np.where(x < half, height / half, -height / half)
        out = np.where(in_spike & ~below, slope * np.sign(t), 0.0)
        return float(out) if out.ndim == 0 else out

    def component(self):
        return ComponentFunction(self.f, primitive=self.F, derivative=self.df, source=self,
                                 name=f"spike_train({self.direction}, b1={self.first_peak:g})")

    def __repr__(self):
        return (f"SpikeTrain(first_peak={self.first_peak!r}, direction={self.direction!r}, "
                f"base={self.base!r}, growth={self.growth!r}, width={self.width!r})")
