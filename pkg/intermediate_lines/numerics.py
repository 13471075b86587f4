"""
Finite-difference helpers: 7-point central stencils and Richardson extrapolation.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

# order -> (weights on offsets -3..3, denominator, accuracy order)
STENCILS_7: dict[int, tuple[np.ndarray, float, int]] = {
    1: (np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]), 60.0, 6),
    2: (np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]), 180.0, 6),
    3: (np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]), 8.0, 4),
    4: (np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]), 6.0, 4),
}
_OFFSETS_7 = np.arange(-3, 4, dtype=float)


def central_derivative(f: Callable[[float], float], x: float, order: int, h: float) -> float:
    weights, denom, _ = STENCILS_7[order]
    values = np.array([f(x + k * h) for k in _OFFSETS_7])
    return float(weights @ values / (denom * h ** order))


@dataclass
class RichardsonEstimate:
    value: float
    coarse: float
    fine: float
    order: int

    @property
    def disagreement(self) -> float:
        """Relative gap between the finest raw level and the extrapolated value."""
        return abs(self.value - self.fine) / max(abs(self.value), 1e-300)


def richardson_derivative(f: Callable[[float], float], x: float, order: int, h: float) -> RichardsonEstimate:
    """Two-level Richardson extrapolation of a 7-point central derivative."""
    _, _, accuracy = STENCILS_7[order]
    coarse = central_derivative(f, x, order, h)
    fine = central_derivative(f, x, order, h / 2)
    factor = 2.0 ** accuracy
    value = (factor * fine - coarse) / (factor - 1.0)
    return RichardsonEstimate(value, coarse, fine, order)
