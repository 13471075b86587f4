"""
Affine differential invariants of a plane curve at a point.

All formulas work in an arbitrary regular parametrisation. With
kappa = [g', g''] the affine arc length satisfies ds/dt = kappa^(1/3);
fractional powers use the signed real cube root so curves with kappa < 0
segments are handled.
"""

import logging

import numpy as np

from .curves import ParamCurve
from .errors import DenominatorDegenerate, NumericalError
from .models import AffineFrame, ConormalCovector, ConormalDecomp, CurveJet, bracket, cbrt

logger = logging.getLogger(__name__)

INFLECTION_TOL = 1e-9
PARALLEL_TOL = 1e-6


class InflectionError(NumericalError):
    """The bracket curvature vanishes; conormals and affine frames are undefined."""

    def __init__(self, t: float, kappa: float, threshold: float):
        self.t = t
        self.kappa = kappa
        self.threshold = threshold
        super().__init__(f"inflection at t={t:.12g}: |kappa|={abs(kappa):.3e} < {threshold:.3e}")


class ParallelTangentsError(NumericalError):
    def __init__(self, t: float, s: float, value: float):
        self.t = t
        self.s = s
        self.value = value
        super().__init__(f"tangents at t={t:.12g} and s={s:.12g} are parallel ([g1', g2'] = {value:.3e})")


def _checked_kappa(jet: CurveJet, scale: float) -> float:
    kappa = jet.kappa
    threshold = INFLECTION_TOL * scale ** 3
    if jet.estimated:
        threshold *= 10
    if not jet.regular or abs(kappa) < threshold:
        raise InflectionError(jet.t, kappa, threshold)
    return kappa


def affine_frame(jet: CurveJet, scale: float = 1.0) -> AffineFrame:
    """
    Affine tangent, affine normal and affine curvature at a jet.

    xi = kappa^(-2/3) g'' - (1/3) kappa_t kappa^(-5/3) g'
    mu = (3 kappa kappa_tt - 5 kappa_t^2 + 9 kappa [g'', g''']) kappa^(-8/3) / 9

    Raises:
        InflectionError: if |kappa| is below 1e-9 * scale^3
    """
    kappa = _checked_kappa(jet, scale)
    kappa_t = bracket(jet.d1, jet.d3)
    kappa_tt = bracket(jet.d1, jet.d4) + bracket(jet.d2, jet.d3)
    c = cbrt(kappa)
    tangent = jet.d1 / c
    normal = jet.d2 / c ** 2 - kappa_t * jet.d1 / (3 * c ** 5)
    mu = (3 * kappa * kappa_tt - 5 * kappa_t ** 2 + 9 * kappa * bracket(jet.d2, jet.d3)) / (9 * c ** 8)
    return AffineFrame(jet.t, kappa, kappa_t, kappa_tt, tangent, normal, mu)


def conormal(jet: CurveJet, scale: float = 1.0) -> ConormalCovector:
    """nu(U) = [g', U] / kappa^(1/3)."""
    c = cbrt(_checked_kappa(jet, scale))
    return ConormalCovector(np.array([-jet.d1[1], jet.d1[0]]) / c, jet.t)


def conormal_derivative(jet: CurveJet, scale: float = 1.0) -> ConormalCovector:
    """nu'(U) = [g'', U] kappa^(-1/3) - (1/3) kappa_t kappa^(-4/3) [g', U]."""
    kappa = _checked_kappa(jet, scale)
    kappa_t = bracket(jet.d1, jet.d3)
    c = cbrt(kappa)
    rot1 = np.array([-jet.d1[1], jet.d1[0]])
    rot2 = np.array([-jet.d2[1], jet.d2[0]])
    return ConormalCovector(rot2 / c - kappa_t * rot1 / (3 * c ** 4), jet.t)


def tangents_parallel(jet1: CurveJet, jet2: CurveJet, tol: float = PARALLEL_TOL) -> bool:
    w = bracket(jet1.d1, jet2.d1)
    return abs(w) < tol * float(np.hypot(*jet1.d1) * np.hypot(*jet2.d1))


def conormal_decomp(jet1: CurveJet, jet2: CurveJet, scale: float = 1.0) -> ConormalDecomp:
    """
    Coefficients with nu1' = a nu1 + b nu2 and nu2' = a_bar nu1 + b_bar nu2.

    Raises:
        ParallelTangentsError: if the tangents at the two jets are parallel
        InflectionError: if either jet is inflectional
    """
    if tangents_parallel(jet1, jet2):
        raise ParallelTangentsError(jet1.t, jet2.t, bracket(jet1.d1, jet2.d1))
    nu1, nu2 = conormal(jet1, scale), conormal(jet2, scale)
    dnu1, dnu2 = conormal_derivative(jet1, scale), conormal_derivative(jet2, scale)
    g1, g2 = jet1.d1, jet2.d1
    return ConormalDecomp(
        a=dnu1(g2) / nu1(g2),
        b=dnu1(g1) / nu2(g1),
        a_bar=dnu2(g2) / nu1(g2),
        b_bar=dnu2(g1) / nu2(g1),
    )


def affine_evolute_point(jet: CurveJet, scale: float = 1.0, mu_tol: float = 1e-9) -> np.ndarray:
    """
    Centre of affine curvature gamma + xi / mu.

    Raises:
        DenominatorDegenerate: where mu vanishes (affine inflection, point at infinity)
    """
    frame = affine_frame(jet, scale)
    threshold = mu_tol / scale ** (4 / 3)
    if abs(frame.mu) < threshold:
        raise DenominatorDegenerate("affine evolute", frame.mu, threshold)
    return jet.x + frame.normal_affine / frame.mu


def invariant_table(curve: ParamCurve, n: int) -> list[dict[str, float]]:
    """Per-point rows t, x, y, kappa, mu, xi_x, xi_y; NaN where the point is an inflection."""
    rows = []
    scale = curve.scale
    for t in curve.sample_parameters(n):
        jet = curve.jet(t)
        try:
            frame = affine_frame(jet, scale)
            mu, xi = frame.mu, frame.normal_affine
        except InflectionError as e:
            logger.debug("skipping affine frame: %s", e)
            mu, xi = float("nan"), np.array([np.nan, np.nan])
        rows.append({
            "t": float(t),
            "x": float(jet.x[0]),
            "y": float(jet.x[1]),
            "kappa": jet.kappa,
            "mu": float(mu),
            "xi_x": float(xi[0]),
            "xi_y": float(xi[1]),
        })
    return rows
