"""
Affine maps of the plane and their action on curves.
"""

from dataclasses import dataclass

import numpy as np

from ..models import CurveJet
from .base import CurveError, ParamCurve


class SingularMapError(CurveError):
    def __init__(self, det: float):
        self.det = det
        super().__init__(f"affine map is singular (det = {det:.3e})")


@dataclass(frozen=True)
class AffineMap:
    """x -> linear @ x + translation."""
    linear: np.ndarray
    translation: np.ndarray

    SINGULAR_TOL = 1e-14

    def __post_init__(self):
        object.__setattr__(self, "linear", np.asarray(self.linear, dtype=float).reshape(2, 2))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float).reshape(2))
        if abs(self.det) <= self.SINGULAR_TOL * max(1.0, float(np.abs(self.linear).max()) ** 2):
            raise SingularMapError(self.det)

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(np.eye(2), np.zeros(2))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def inverse(self) -> "AffineMap":
        inv = np.linalg.inv(self.linear)
        return AffineMap(inv, -inv @ self.translation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map a point or an (N, 2) array of points."""
        return np.asarray(points, dtype=float) @ self.linear.T + self.translation

    def apply_vector(self, vectors: np.ndarray) -> np.ndarray:
        return np.asarray(vectors, dtype=float) @ self.linear.T

    def apply_jet(self, jet: CurveJet) -> CurveJet:
        A = self.linear
        return CurveJet(
            jet.t,
            A @ jet.x + self.translation,
            A @ jet.d1,
            A @ jet.d2,
            A @ jet.d3,
            A @ jet.d4,
            estimated=jet.estimated,
        )


class TransformedCurve(ParamCurve):
    """Image of a curve under an affine map; jets map exactly."""

    def __init__(self, base: ParamCurve, affine: AffineMap):
        super().__init__(base.domain, base.closed, f"{base.label}_affine")
        self.base = base
        self.affine = affine

    @property
    def estimated(self) -> bool:
        return self.base.estimated

    def _jet(self, t: float) -> CurveJet:
        return self.affine.apply_jet(self.base.jet(t))

    def positions(self, ts: np.ndarray) -> np.ndarray:
        return self.affine.apply(self.base.positions(ts))

    def derivatives(self, ts: np.ndarray, order: int) -> np.ndarray:
        if order == 0:
            return self.positions(ts)
        return self.affine.apply_vector(self.base.derivatives(ts, order))
