"""
Abstract base class for parametrised plane curves.
"""

from abc import ABC, abstractmethod
from functools import cached_property

import numpy as np

from ..errors import InputError
from ..models import CurveJet


class CurveError(InputError):
    """Base class for curve construction and evaluation errors."""
    pass


class UnknownCurveError(CurveError):
    def __init__(self, name: str, known: list[str]):
        self.name = name
        super().__init__(f"Unknown curve '{name}'. Known curves: {', '.join(sorted(known))}")


class CurveParameterError(CurveError):
    def __init__(self, curve: str, message: str):
        self.curve = curve
        super().__init__(f"[{curve}] {message}")


class ParameterOutOfDomainError(CurveError):
    def __init__(self, curve: str, t: float, domain: tuple[float, float]):
        self.curve = curve
        self.t = t
        self.domain = domain
        super().__init__(f"[{curve}] parameter {t} outside domain [{domain[0]}, {domain[1]}]")


class ParamCurve(ABC):
    """
    A smooth plane curve t -> gamma(t) with a jet evaluator up to order 4.

    Subclasses implement _jet() for a parameter already reduced to the domain.
    Instances are immutable after construction and may be evaluated from
    several threads at once.
    """

    SCALE_SAMPLES = 512

    def __init__(self, domain: tuple[float, float], closed: bool, label: str):
        t0, t1 = float(domain[0]), float(domain[1])
        if not t1 > t0:
            raise CurveParameterError(label, f"empty domain [{t0}, {t1}]")
        self._domain = (t0, t1)
        self._closed = bool(closed)
        self._label = label

    @property
    def domain(self) -> tuple[float, float]:
        return self._domain

    @property
    def closed(self) -> bool:
        return self._closed

    @property
    def label(self) -> str:
        return self._label

    @property
    def span(self) -> float:
        return self._domain[1] - self._domain[0]

    @property
    def period(self) -> float | None:
        return self.span if self._closed else None

    @property
    def estimated(self) -> bool:
        """True when jets come from finite differences rather than exact formulas."""
        return False

    def reduce(self, t: float) -> float:
        """Map t into [t0, t1) for closed curves; check the domain for arcs."""
        t0, t1 = self._domain
        if self._closed:
            r = t0 + (t - t0) % self.span
            return t0 if r >= t1 else r
        if t < t0 or t > t1:
            raise ParameterOutOfDomainError(self._label, t, self._domain)
        return t

    def jet(self, t: float) -> CurveJet:
        return self._jet(self.reduce(float(t)))

    def position(self, t: float) -> np.ndarray:
        return self.jet(t).x

    def positions(self, ts: np.ndarray) -> np.ndarray:
        """Positions at many parameters, shape (N, 2)."""
        return np.array([self.position(t) for t in np.asarray(ts, dtype=float)])

    def derivatives(self, ts: np.ndarray, order: int) -> np.ndarray:
        """Derivative vectors of the given order at many parameters, shape (N, 2)."""
        return np.array([self.jet(t).derivative(order) for t in np.asarray(ts, dtype=float)])

    def sample_parameters(self, n: int) -> np.ndarray:
        t0, t1 = self._domain
        return np.linspace(t0, t1, n, endpoint=not self._closed)

    @cached_property
    def scale(self) -> float:
        """Bounding-box diagonal, the length unit for every tolerance."""
        pts = self.positions(self.sample_parameters(self.SCALE_SAMPLES))
        extent = pts.max(axis=0) - pts.min(axis=0)
        return float(np.hypot(*extent)) or 1.0

    def check_periodicity(self, tol: float = 1e-8) -> list[str]:
        """Compare position, d1 and d2 at both domain ends of a closed curve."""
        if not self._closed:
            return []
        t0, t1 = self._domain
        start, end = self._jet(t0), self._jet(t1)
        errors = []
        for name in ("x", "d1", "d2"):
            a, b = getattr(start, name), getattr(end, name)
            gap = float(np.max(np.abs(a - b)))
            if gap > tol * max(1.0, float(np.max(np.abs(a)))):
                errors.append(f"{name} differs by {gap:.3e} across the period")
        return errors

    @abstractmethod
    def _jet(self, t: float) -> CurveJet:
        pass

    def __repr__(self) -> str:
        kind = "closed" if self._closed else "arc"
        return f"{type(self).__name__}({self._label!r}, {kind}, domain={self._domain})"
