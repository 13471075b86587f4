"""
Curves given by samples [[t, x, y], ...].

A quintic interpolating spline supplies positions; derivative jets are
estimated with 5-point central differences and flagged `estimated`.
"""

import numpy as np
from scipy.interpolate import make_interp_spline

from ..models import CurveJet
from .base import CurveParameterError, ParamCurve

# Central 5-point stencils (offsets -2..2) for derivative orders 1..4.
_STENCILS = {
    1: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    2: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    3: np.array([-1.0, 2.0, 0.0, -2.0, 1.0]) / 2.0,
    4: np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
}
_OFFSETS = np.arange(-2, 3, dtype=float)


class SampledCurve(ParamCurve):
    MIN_SAMPLES = 8

    def __init__(self, samples: np.ndarray, closed: bool, label: str = "sampled"):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 3:
            raise CurveParameterError(label, "samples must be rows of [t, x, y]")
        if len(samples) < self.MIN_SAMPLES:
            raise CurveParameterError(label, f"need at least {self.MIN_SAMPLES} samples, got {len(samples)}")
        if not np.all(np.isfinite(samples)):
            raise CurveParameterError(label, "samples must be finite")
        t = samples[:, 0]
        if np.any(np.diff(t) <= 0):
            raise CurveParameterError(label, "sample parameters must be strictly increasing")

        xy = samples[:, 1:]
        if closed:
            gap = np.hypot(*(xy[-1] - xy[0]))
            step = float(np.median(np.diff(t)))
            if gap > 1e-12 * max(1.0, float(np.abs(xy).max())):
                t = np.append(t, t[-1] + step)
                xy = np.vstack([xy, xy[:1]])
            else:
                xy = xy.copy()
                xy[-1] = xy[0]
            self._spline = make_interp_spline(t, xy, k=5, bc_type="periodic")
        else:
            self._spline = make_interp_spline(t, xy, k=5)

        super().__init__((t[0], t[-1]), closed, label)
        span = t[-1] - t[0]
        base = max(1e-4, span * 1e-5)
        # difference step per derivative order; orders 3 and 4 need wider steps
        self._steps = {1: base, 2: base, 3: max(base, span * 2e-3), 4: max(base, span * 5e-3)}

    @property
    def estimated(self) -> bool:
        return True

    def _at(self, ts: np.ndarray) -> np.ndarray:
        if self.closed:
            t0 = self.domain[0]
            ts = t0 + (ts - t0) % self.span
        return self._spline(ts)

    def _estimate(self, t: float, order: int) -> np.ndarray:
        h = self._steps[order]
        values = self._at(t + h * _OFFSETS)
        return _STENCILS[order] @ values / h ** order

    def _jet(self, t: float) -> CurveJet:
        x = self._at(np.array([t]))[0]
        d = [self._estimate(t, k) for k in range(1, 5)]
        return CurveJet(t, x, d[0], d[1], d[2], d[3], estimated=True)

    def positions(self, ts: np.ndarray) -> np.ndarray:
        return self._at(np.asarray(ts, dtype=float))
