"""
Analytic curves with exact derivative jets.
"""

from math import factorial, pi

import numpy as np
from numpy.polynomial import Polynomial

from ..models import CurveJet
from .base import CurveParameterError, ParamCurve


class TrigCurve(ParamCurve):
    """
    Curve whose coordinates are finite sums of A*cos(w*t + phi).

    The k-th derivative of A*cos(w*t + phi) is A*w^k*cos(w*t + phi + k*pi/2),
    so jets of any order are exact.
    """

    def __init__(
        self,
        x_terms: list[tuple[float, float, float]],
        y_terms: list[tuple[float, float, float]],
        domain: tuple[float, float],
        closed: bool,
        label: str,
    ):
        super().__init__(domain, closed, label)
        self._terms = (
            np.array(x_terms, dtype=float).reshape(-1, 3),
            np.array(y_terms, dtype=float).reshape(-1, 3),
        )
        errors = self.check_periodicity()
        if errors:
            raise CurveParameterError(label, f"closed curve is not periodic: {'; '.join(errors)}")

    def _coordinate(self, terms: np.ndarray, t: np.ndarray, order: int) -> np.ndarray:
        amp, omega, phase = terms[:, 0], terms[:, 1], terms[:, 2]
        arg = np.multiply.outer(t, omega) + phase + order * pi / 2
        return (amp * omega ** order * np.cos(arg)).sum(axis=-1)

    def _vector(self, t, order: int) -> np.ndarray:
        xs, ys = self._terms
        return np.stack([self._coordinate(xs, t, order), self._coordinate(ys, t, order)], axis=-1)

    def _jet(self, t: float) -> CurveJet:
        v = self._vector(np.array([t]), 0)[0]
        d = [self._vector(np.array([t]), k)[0] for k in range(1, 5)]
        return CurveJet(t, v, d[0], d[1], d[2], d[3])

    def positions(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if self.closed:
            t0 = self.domain[0]
            ts = t0 + (ts - t0) % self.span
        return self._vector(ts, 0)

    def derivatives(self, ts: np.ndarray, order: int) -> np.ndarray:
        return self._vector(np.asarray(ts, dtype=float), order)


class PolyGraph(ParamCurve):
    """Open graph arc t -> (t, sum c_k t^k) with raw power coefficients."""

    def __init__(self, coeffs: list[float], domain: tuple[float, float] = (-1.0, 1.0), label: str = "poly_graph"):
        super().__init__(domain, False, label)
        self._poly = Polynomial(np.asarray(coeffs, dtype=float))
        self._derivs = [self._poly.deriv(k) for k in range(1, 5)]

    @property
    def coefficients(self) -> np.ndarray:
        return self._poly.coef.copy()

    def _jet(self, t: float) -> CurveJet:
        x = np.array([t, self._poly(t)])
        d1 = np.array([1.0, self._derivs[0](t)])
        rest = [np.array([0.0, p(t)]) for p in self._derivs[1:]]
        return CurveJet(t, x, d1, *rest)

    def positions(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.stack([ts, self._poly(ts)], axis=-1)

    def derivatives(self, ts: np.ndarray, order: int) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if order == 0:
            return self.positions(ts)
        first = np.ones_like(ts) if order == 1 else np.zeros_like(ts)
        return np.stack([first, self._derivs[order - 1](ts)], axis=-1)


def _params(name: str, params: list[float] | None, defaults: list[float]) -> list[float]:
    params = list(params or [])
    if len(params) > len(defaults):
        raise CurveParameterError(name, f"takes at most {len(defaults)} parameters, got {len(params)}")
    values = [float(p) for p in params] + defaults[len(params):]
    if not all(np.isfinite(values)):
        raise CurveParameterError(name, "parameters must be finite")
    return values


def circle(params: list[float] | None = None) -> ParamCurve:
    (r,) = _params("circle", params, [1.0])
    if r <= 0:
        raise CurveParameterError("circle", f"radius must be positive, got {r}")
    return TrigCurve([(r, 1.0, 0.0)], [(r, 1.0, -pi / 2)], (0.0, 2 * pi), True, "circle")


def ellipse(params: list[float] | None = None) -> ParamCurve:
    a, b = _params("ellipse", params, [2.0, 1.0])
    if a <= 0 or b <= 0:
        raise CurveParameterError("ellipse", f"axes must be positive, got a={a}, b={b}")
    return TrigCurve([(a, 1.0, 0.0)], [(b, 1.0, -pi / 2)], (0.0, 2 * pi), True, "ellipse")


def bean(params: list[float] | None = None) -> ParamCurve:
    """gamma(t) = (eps cos(2 pi t) + cos(pi t), eps sin(2 pi t + phase) + sin(pi t)), t in [0, 2]."""
    eps, phase = _params("bean", params, [0.1, 1.0])
    return TrigCurve(
        [(eps, 2 * pi, 0.0), (1.0, pi, 0.0)],
        [(eps, 2 * pi, phase - pi / 2), (1.0, pi, -pi / 2)],
        (0.0, 2.0),
        True,
        "bean",
    )


def parabola_arc(params: list[float] | None = None) -> ParamCurve:
    """(t, c t^2) on [-w, w]; defaults c = 1/2, w = 1."""
    c, w = _params("parabola_arc", params, [0.5, 1.0])
    if c == 0 or w <= 0:
        raise CurveParameterError("parabola_arc", "needs c != 0 and a positive half width")
    return PolyGraph([0.0, 0.0, c], (-w, w), "parabola_arc")


def monge_arc(params: list[float] | None = None) -> ParamCurve:
    """
    Graph of f(t) = a2 t^2/2 + a3 t^3/6 + a4 t^4/24 + a5 t^5/120 on [-w, w].

    Coefficients are the derivatives of f at the origin. Parameters are
    [a2, a3, a4, a5, w] with defaults [1, 0, 0, 0, 1].
    """
    a2, a3, a4, a5, w = _params("monge_arc", params, [1.0, 0.0, 0.0, 0.0, 1.0])
    if w <= 0:
        raise CurveParameterError("monge_arc", f"half width must be positive, got {w}")
    coeffs = [0.0, 0.0] + [a / factorial(k) for k, a in zip(range(2, 6), (a2, a3, a4, a5))]
    return PolyGraph(coeffs, (-w, w), "monge_arc")


def poly_graph(coeffs: list[float], domain: tuple[float, float] = (-1.0, 1.0)) -> ParamCurve:
    return PolyGraph(coeffs, domain)
