"""
中间线包络的核心数据模型 - Core data models for the intermediate-lines envelope toolkit.

Vectors are numpy arrays of shape (2,). Covectors are stored the same way and
act on vectors through the dual pairing (dot product).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np

from .errors import InputError


def cbrt(value: float) -> float:
    """Signed real cube root."""
    return float(np.cbrt(value))


def bracket(u: np.ndarray, v: np.ndarray) -> float:
    """Determinant [u, v] of two plane vectors."""
    return float(u[0] * v[1] - u[1] * v[0])


class Tag(str, Enum):
    """包络分支标签"""
    AEIL = "AEIL"
    IPTL = "IPTL"
    CTL = "CTL"
    EVOLUTE = "EVOLUTE"


class SingularityClass(str, Enum):
    """包络分支在一点处的局部类型"""
    REGULAR = "Regular"
    ORDINARY_CUSP = "OrdinaryCusp"
    CUSP34 = "Cusp34"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class CurveJet:
    """Position and derivatives up to order 4 at one parameter value."""
    t: float
    x: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray
    estimated: bool = False

    REGULAR_TOL = 1e-12

    @property
    def regular(self) -> bool:
        return float(np.hypot(*self.d1)) > self.REGULAR_TOL

    @property
    def kappa(self) -> float:
        """Bracket curvature [d1, d2] (not normalised by |d1|^3)."""
        return bracket(self.d1, self.d2)

    def derivative(self, order: int) -> np.ndarray:
        if order == 0:
            return self.x
        return (self.d1, self.d2, self.d3, self.d4)[order - 1]


@dataclass(frozen=True)
class AffineFrame:
    """Affine-differential apparatus at one regular, non-inflectional point."""
    t: float
    kappa: float
    kappa_t: float
    kappa_tt: float
    tangent_affine: np.ndarray
    normal_affine: np.ndarray
    mu: float


@dataclass(frozen=True)
class ConormalCovector:
    """Covector vanishing on the tangent and equal to 1 on the affine normal."""
    n: np.ndarray
    t: float

    def __call__(self, u: np.ndarray) -> float:
        return float(self.n[0] * u[0] + self.n[1] * u[1])


@dataclass(frozen=True)
class ConormalDecomp:
    """Coefficients of nu1', nu2' in the basis {nu1, nu2}."""
    a: float
    b: float
    a_bar: float
    b_bar: float


@dataclass(frozen=True)
class AlphaParam:
    """Family parameter alpha and its companion lambda = ((1-alpha)/alpha)^(1/3)."""
    alpha: float
    lam: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "lam", cbrt((1.0 - self.alpha) / self.alpha))

    @property
    def is_mid(self) -> bool:
        return self.alpha == 0.5

    def swapped(self) -> "AlphaParam":
        return AlphaParam(1.0 - self.alpha)


@dataclass
class PairBranch:
    """A traced branch of the pairing locus or of the parallel-tangent locus."""
    kind: Literal["transversal", "parallel"]
    points: np.ndarray  # shape (N, 2), columns t and s
    closed: bool
    residuals: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class LineEq:
    """Line l1*x + l2*y + l3 = 0."""
    l1: float
    l2: float
    l3: float

    def __call__(self, point: np.ndarray) -> float:
        return self.l1 * float(point[0]) + self.l2 * float(point[1]) + self.l3

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.l1, self.l2, self.l3])

    def normalized(self) -> "LineEq":
        """Scale to l1^2 + l2^2 = 1."""
        norm = float(np.hypot(self.l1, self.l2))
        if norm == 0.0:
            raise InputError("line has vanishing normal (l1, l2) = (0, 0)")
        return LineEq(self.l1 / norm, self.l2 / norm, self.l3 / norm)

    @classmethod
    def through(cls, point: np.ndarray, normal: np.ndarray) -> "LineEq":
        return cls(float(normal[0]), float(normal[1]), -float(normal @ point))

    def validate(self) -> list[str]:
        errors = []
        if self.l1 == 0.0 and self.l2 == 0.0:
            errors.append("(l1, l2) must not both vanish")
        if not np.all(np.isfinite(self.coefficients)):
            errors.append("line coefficients must be finite")
        return errors


@dataclass
class EnvelopePoint:
    """包络点及其来源参数对"""
    X: np.ndarray
    source: tuple[float, float]
    alpha: float
    tag: Tag
    online_residual: float = float("nan")
    detm_residual: float = float("nan")


@dataclass
class CuspMarker:
    """包络折线上检测到的奇点"""
    index: int
    klass: SingularityClass
    point: np.ndarray
    source: tuple[float, float]
    witness: dict[str, float] = field(default_factory=dict)


@dataclass
class EnvelopeBranch:
    """
    Ordered polyline of envelope points with singularity markers.

    closed marks a loop whose last point connects back to the first; pairs is
    the traced parameter branch the points were evaluated on, and contacts
    the (t, s) pairs where that branch crosses the parallel-tangent locus.
    """
    tag: Tag
    points: list[EnvelopePoint] = field(default_factory=list)
    cusp_markers: list[CuspMarker] = field(default_factory=list)
    breaks: list[int] = field(default_factory=list)
    branch_id: int = 0
    oracle_distance: float | None = None
    closed: bool = False
    pairs: PairBranch | None = None
    contacts: list[tuple[float, float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def xy(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, 2))
        return np.array([p.X for p in self.points], dtype=float)

    def sources(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, 2))
        return np.array([p.source for p in self.points], dtype=float)

    def segments(self) -> list[np.ndarray]:
        """Split the polyline at its breaks."""
        xy = self.xy()
        cuts = [0] + [b + 1 for b in sorted(self.breaks)] + [len(xy)]
        return [xy[a:b] for a, b in zip(cuts[:-1], cuts[1:]) if b - a > 0]


@dataclass
class MongeJetPair:
    """
    Local normal form of two points of a curve.

    p1 = (t, t^2/2 + a3 t^3 + a4 t^4 + a5 t^5), or (t, a3 t^3 + a4 t^4 + a5 t^5)
    when p1_inflection is set; p2 = (s, b0 + b1 s + ... + b5 s^5).
    """
    a3: float = 0.0
    a4: float = 0.0
    a5: float = 0.0
    b0: float = 1.0
    b1: float = 0.0
    b2: float = 0.0
    b3: float = 0.0
    b4: float = 0.0
    b5: float = 0.0
    alpha: float = 0.5
    p1_inflection: bool = False

    def validate(self) -> list[str]:
        """Hard invariants. Violations make the pair unusable."""
        errors = []
        values = [self.a3, self.a4, self.a5, self.b0, self.b1, self.b2,
                  self.b3, self.b4, self.b5, self.alpha]
        if not all(np.isfinite(values)):
            errors.append("all coefficients must be finite")
        if not self.b0 > 0:
            errors.append(f"b0 must be positive, got {self.b0}")
        if not 0.0 < self.alpha < 1.0:
            errors.append(f"alpha must lie in (0, 1), got {self.alpha}")
        return errors

    def soft_warnings(self) -> list[str]:
        """Assumptions the classifiers rely on but do not enforce."""
        warnings = []
        if not self.p1_inflection and self.a3 <= 0:
            warnings.append(f"a3 > 0 assumed, got {self.a3}")
        if self.b1 != 0.0 and not self.b1 ** 2 - self.b0 > 0:
            warnings.append(f"b1^2 - b0 > 0 assumed, got {self.b1 ** 2 - self.b0}")
        return warnings

    def p1_coefficients(self) -> list[float]:
        """Power coefficients of the p1 graph, constant term first."""
        quad = 0.0 if self.p1_inflection else 0.5
        return [0.0, 0.0, quad, self.a3, self.a4, self.a5]

    def p2_coefficients(self) -> list[float]:
        return [self.b0, self.b1, self.b2, self.b3, self.b4, self.b5]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SingularityVerdict:
    klass: SingularityClass
    witness: dict[str, float] = field(default_factory=dict)
    versal: bool | None = None
    warnings: list[str] = field(default_factory=list)
    inflection_order: int | None = None

    def to_dict(self) -> dict:
        result = {
            "klass": self.klass.value,
            "witness": self.witness,
            "versal": self.versal,
            "warnings": self.warnings,
        }
        if self.inflection_order is not None:
            result["inflection_order"] = self.inflection_order
        return result


@dataclass
class TransitionEvent:
    """A change in the cusp count of one envelope component as alpha varies."""
    alpha_star: float
    kind: Literal["cusp_birth", "cusp_death"]
    tag: Tag
    location: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "alpha_star": self.alpha_star,
            "kind": self.kind,
            "tag": self.tag.value,
            "location": list(self.location),
        }
