"""
中间线包络的奇点 - Singularities of the envelope of intermediate lines.

Analytic classifiers work on the local normal form of two points
(MongeJetPair): p1 = (t, t^2/2 + a3 t^3 + ...) and p2 = (s, b0 + b1 s + ...).
Numeric tools scan sampled envelope branches for cusps, estimate the
A_k type of the line family at a point and sweep alpha for cusp births.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .curves import ParamCurve, PolyGraph
from .errors import InputError, InvariantViolation, NumericalError
from .event_tracker import GapTracker
from .envelope import EnvelopeOptions, build_envelope, nearest_distances, smooth_line
from .models import (
    CuspMarker,
    EnvelopeBranch,
    EnvelopePoint,
    MongeJetPair,
    SingularityClass,
    SingularityVerdict,
    Tag,
    TransitionEvent,
    bracket,
)
from .numerics import richardson_derivative
from .pair_locus import NoBranchFound, RefinementFailed, as_alpha, parallel_pairs, solve_partner

logger = logging.getLogger(__name__)

EQUALITY_TOL = 1e-9
SPEED_FRACTION = 0.05
MIN_SIDE_POINTS = 6
SINE_TOL = 1e-4
STALL_RATIO = 0.02
VANISHING_TOL = 1e-6
RICHARDSON_AGREEMENT = 0.10


class PreconditionViolated(InputError):
    def __init__(self, operation: str, message: str, witness: dict | None = None):
        self.operation = operation
        self.witness = witness or {}
        super().__init__(f"{operation}: {message}")


class MongeInvariantError(InvariantViolation):
    pass


class InsufficientResolution(NumericalError):
    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"speed minimum at index {index} is not isolated: {message}")


class InsufficientPrecision(NumericalError):
    def __init__(self, order: int, coarse: float, fine: float, value: float):
        self.order = order
        super().__init__(
            f"derivative of order {order} unstable under Richardson extrapolation "
            f"(h: {coarse:.6e}, h/2: {fine:.6e}, extrapolated: {value:.6e})"
        )


def _vanishes(value: float, reference: float = 1.0, tol: float = EQUALITY_TOL) -> bool:
    return abs(value) <= tol * max(1.0, abs(reference))


def _checked(m: MongeJetPair) -> list[str]:
    errors = m.validate()
    if errors:
        raise MongeInvariantError(errors)
    return m.soft_warnings()


# Analytic classifiers

def nonparallel_b3_critical(m: MongeJetPair) -> float:
    """Value of b3 at which the AEIL of a non-parallel pair stops being regular."""
    a, a3, b0, b1 = m.alpha, m.a3, m.b0, m.b1
    numerator = (a - 1) * (-6 * a * a3 * b0 * b1 ** 2 + 4 * a * a3 * b0 ** 2 - 3 * a * b1 ** 3 - 2 * a3 * b0 ** 2)
    denominator = 2 * a * b0 * (6 * a * a3 * b0 * b1 + 3 * a * b1 ** 2 + 2 * a * b0 - b0)
    return numerator / denominator if denominator != 0.0 else float("nan")


def classify_nonparallel(m: MongeJetPair, tol: float = EQUALITY_TOL) -> SingularityVerdict:
    """
    Regularity of the AEIL at a non-parallel pair.

    Requires the solvability condition b2 = (alpha - 1) / (2 alpha), i.e. the
    factor B(0, 0) = 8 (2 alpha b2 - alpha + 1) b0^3 of det(M) vanishes; with
    p1 inflectional the condition is B(0, 0) = 16 alpha b0^3 b2 = 0 instead.

    Raises:
        MongeInvariantError: if b0 <= 0 or alpha is outside (0, 1)
        PreconditionViolated: if the tangents are parallel or B(0, 0) != 0
    """
    warnings = _checked(m)
    a, b0, b1 = m.alpha, m.b0, m.b1
    if _vanishes(b1, tol=tol):
        raise PreconditionViolated("classify_nonparallel", "tangents are parallel (b1 = 0)", {"b1": b1})

    if m.p1_inflection:
        B00 = 16 * a * b0 ** 3 * m.b2
        witness = {"B00": B00, "b3": m.b3, "ab_product": 36 * a * m.b3 ** 2 * b0 ** 4 / (b1 ** 5 * (a - 1) ** 2)}
        if not _vanishes(B00, b0 ** 3, tol):
            raise PreconditionViolated("classify_nonparallel", "no local envelope branch (B(0,0) != 0)", witness)
        klass = SingularityClass.DEGENERATE if _vanishes(m.b3, tol=tol) else SingularityClass.REGULAR
        return SingularityVerdict(klass, witness, warnings=warnings)

    B00 = 8 * (2 * a * m.b2 - a + 1) * b0 ** 3
    critical = nonparallel_b3_critical(m)
    witness = {
        "B00": B00,
        "alpha_gap": a - b0 / b1 ** 2,
        "b3_critical": critical,
        "b3_gap": m.b3 - critical,
    }
    if not _vanishes(B00, b0 ** 3, tol):
        raise PreconditionViolated("classify_nonparallel", "no local envelope branch (B(0,0) != 0)", witness)
    slope_den = (a - 1) * (2 * m.a3 * b0 + b1)
    if slope_den != 0.0:
        witness["t_slope"] = (2 * a * b0 * m.b3 + b1 * (a - 1)) / slope_den

    if _vanishes(witness["alpha_gap"], tol=tol):
        klass = SingularityClass.DEGENERATE
    elif np.isfinite(critical) and _vanishes(witness["b3_gap"], critical, tol):
        klass = SingularityClass.ORDINARY_CUSP
    else:
        klass = SingularityClass.REGULAR
    return SingularityVerdict(klass, witness, warnings=warnings)


def parallel_thresholds(alpha: float, a3: float, a4: float) -> dict[str, float]:
    """Critical b2, b3, b4 for the IPTL of a parallel pair."""
    r = alpha / (alpha - 1)
    return {"b2_critical": r / 2, "b3_critical": r ** 2 * a3, "b4_critical": r ** 3 * a4}


def classify_parallel(m: MongeJetPair, tol: float = EQUALITY_TOL) -> SingularityVerdict:
    """
    Regular / ordinary cusp / (3,4)-cusp of the IPTL at a parallel pair.

    Raises:
        PreconditionViolated: if b1 != 0 or p1 is inflectional
    """
    warnings = _checked(m)
    if not _vanishes(m.b1, tol=tol):
        raise PreconditionViolated("classify_parallel", "tangents are not parallel (b1 != 0)", {"b1": m.b1})
    if m.p1_inflection:
        raise PreconditionViolated("classify_parallel", "p1 is inflectional; use classify_parallel_inflection")
    critical = parallel_thresholds(m.alpha, m.a3, m.a4)
    witness = {
        "q2": m.b2 - critical["b2_critical"],
        "q3": m.b3 - critical["b3_critical"],
        "q4": m.b4 - critical["b4_critical"],
        **critical,
    }
    if not _vanishes(witness["q2"], critical["b2_critical"], tol):
        klass = SingularityClass.REGULAR
    elif not _vanishes(witness["q3"], critical["b3_critical"], tol):
        klass = SingularityClass.ORDINARY_CUSP
    elif not _vanishes(witness["q4"], critical["b4_critical"], tol):
        klass = SingularityClass.CUSP34
    else:
        klass = SingularityClass.DEGENERATE
    return SingularityVerdict(klass, witness, warnings=warnings)


def classify_parallel_inflection(m: MongeJetPair, tol: float = EQUALITY_TOL) -> SingularityVerdict:
    """
    IPTL through M at a parallel pair where p1 is an inflection.

    The IPTL is regular at the origin. For b2 != 0 it reads
    ((1 - alpha) t + ..., alpha b0 + a3 (1 - alpha) t^3 + ...), so its
    inflection order mirrors that of p1 (1 for a cubic, 2 for a quintic
    leading term).

    Raises:
        PreconditionViolated: if p1 is not inflectional or b1 != 0
    """
    warnings = _checked(m)
    if not m.p1_inflection:
        raise PreconditionViolated("classify_parallel_inflection", "p1 must be an inflection")
    if not _vanishes(m.b1, tol=tol):
        raise PreconditionViolated("classify_parallel_inflection", "tangents are not parallel (b1 != 0)", {"b1": m.b1})
    a = m.alpha
    witness = {"through_x": 0.0, "through_y": a * m.b0}
    order = None
    if not _vanishes(m.b2, tol=tol):
        witness["cubic"] = m.a3 * (1 - a)
        witness["quintic"] = m.a5 * (1 - a)
        if not _vanishes(m.a3, tol=tol):
            order = 1
        elif _vanishes(m.a4, tol=tol) and not _vanishes(m.a5, tol=tol):
            order = 2
    else:
        # both points inflectional; leading terms come from the 1-jets of h1, h2 in alpha
        witness["h1_jet"] = m.a3 - 2 * (2 * m.a3 + m.b3) * a
        witness["h2_jet"] = m.a3 ** 3 - 3 * m.a3 ** 2 * (2 * m.a3 - m.b3) * a
        if not _vanishes(m.b3, tol=tol) and not _vanishes(m.a3, tol=tol):
            order = 1
    return SingularityVerdict(SingularityClass.REGULAR, witness, warnings=warnings, inflection_order=order)


def a2_jets(alpha: float, b0: float, b1: float, a3: float, a4: float = 0.0, a5: float = 0.0) -> MongeJetPair:
    """Complete a non-parallel jet pair to an A2 point: b2 and b3 at their critical values."""
    m = MongeJetPair(a3=a3, a4=a4, a5=a5, b0=b0, b1=b1, b2=(alpha - 1) / (2 * alpha), alpha=alpha)
    m.b3 = nonparallel_b3_critical(m)
    return m


def versality_matrix(m: MongeJetPair) -> np.ndarray:
    """First-order coefficients (m11, m12, m13) of F_x, F_y, F_alpha at an A2 point."""
    a, a3, b1 = m.alpha, m.a3, m.b1
    denominator = 2 * (3 * a * a3 * b1 + a + 1)
    if _vanishes(denominator):
        raise PreconditionViolated("versality_check", "versality coefficients are singular", {"denominator": denominator})
    common = 6 * a ** 2 * a3 * b1 + 5 * a - 1
    m11 = -a * b1 ** 2 * common / denominator
    m12 = b1 * common / denominator
    m13 = a * b1 ** 3 * (
        36 * a ** 3 * a3 ** 2 * b1 ** 2 * (a - 1) + 12 * a ** 3 * a3 * b1 + 9 * a ** 2 * a3 * b1
        - 24 * a * a3 * b1 + a ** 2 + 2 * a - 5
    ) / denominator
    return np.array([m11, m12, m13])


def versality_report(m: MongeJetPair, tol: float = EQUALITY_TOL) -> dict:
    """
    Rank test and closed-form criterion a3 != -(5 alpha - 1) / (6 alpha^2 b1) side by side.

    The rank is taken over the spatial coefficients (m11, m12); m13 is reported.

    Raises:
        PreconditionViolated: if m is not an A2 point of the non-parallel family
    """
    verdict = classify_nonparallel(m, tol)
    if verdict.klass is not SingularityClass.ORDINARY_CUSP:
        raise PreconditionViolated("versality_check", f"not an A2 point ({verdict.klass.value})", verdict.witness)
    row = versality_matrix(m)
    rank = int(np.linalg.matrix_rank(row[None, :2], tol=tol))
    critical = -(5 * m.alpha - 1) / (6 * m.alpha ** 2 * m.b1)
    return {
        "m11": float(row[0]),
        "m12": float(row[1]),
        "m13": float(row[2]),
        "rank": rank,
        "a3_critical": critical,
        "closed_form_versal": not _vanishes(m.a3 - critical, critical, tol),
        "rank_versal": rank == 1,
    }


def versality_check(m: MongeJetPair, tol: float = EQUALITY_TOL) -> bool:
    """
    Versality of the line family at an A2 point.

    Raises:
        PreconditionViolated: if m is not an A2 point
        InsufficientPrecision: if the rank test and the closed form disagree
    """
    report = versality_report(m, tol)
    if report["rank_versal"] != report["closed_form_versal"]:
        logger.warning("versality criteria disagree: %s", report)
        raise InsufficientPrecision(1, report["m11"], report["m12"], report["a3_critical"])
    return report["rank_versal"]


# Numeric cusp detection

def _parameter(branch_sources: np.ndarray, closing: bool = False) -> np.ndarray:
    """
    Cumulative arclength of the source pairs; the index when sources do not move.

    With closing set the last entry of the returned steps links the final
    pair back to the first and takes the median step, since the sources of
    a closed branch jump by a period there.
    """
    steps = np.hypot(*np.diff(branch_sources, axis=0).T)
    if closing and len(steps):
        steps = np.append(steps, np.median(steps))
    if len(steps) and np.all(steps > 0):
        return steps if closing else np.concatenate([[0.0], np.cumsum(steps)])
    return np.ones(len(steps)) if closing else np.arange(len(branch_sources), dtype=float)


def _classify_window(sigma: np.ndarray, xy: np.ndarray, centre: int, tol: float) -> tuple[SingularityClass, dict, np.ndarray, int] | None:
    """Fit the window around centre; None when the speed does not stall there."""
    lo, hi = centre - MIN_SIDE_POINTS, centre + MIN_SIDE_POINTS + 1
    local = sigma[lo:hi] - sigma[centre]
    width = float(np.abs(local).max())
    u = local / width
    origin = xy[centre]
    px = np.polynomial.Polynomial.fit(u, xy[lo:hi, 0] - origin[0], 5, domain=[-1, 1], window=[-1, 1])
    py = np.polynomial.Polynomial.fit(u, xy[lo:hi, 1] - origin[1], 5, domain=[-1, 1], window=[-1, 1])
    dx, dy = px.deriv(), py.deriv()
    step = max(abs(u[MIN_SIDE_POINTS - 1]), abs(u[MIN_SIDE_POINTS + 1]))
    found = minimize_scalar(lambda v: dx(v) ** 2 + dy(v) ** 2, bounds=(-step, step), method="bounded",
                            options={"xatol": 1e-10})
    us = float(found.x)
    around = max(float(np.hypot(dx(us - step), dy(us - step))), float(np.hypot(dx(us + step), dy(us + step))))
    stall = float(np.hypot(dx(us), dy(us))) / around if around > 0 else 0.0
    if stall > STALL_RATIO:
        return None
    taylor = {k: np.array([px.deriv(k)(us), py.deriv(k)(us)]) / math.factorial(k) for k in (1, 2, 3, 4)}
    reference = max(np.hypot(*taylor[k]) for k in (2, 3, 4)) or 1.0
    sine23 = abs(bracket(taylor[2], taylor[3])) / reference ** 2
    sine34 = abs(bracket(taylor[3], taylor[4])) / reference ** 2
    witness = {"sine23": sine23, "sine34": sine34, "u_star": us, "window": width, "stall": stall}
    if sine23 > tol:
        klass = SingularityClass.ORDINARY_CUSP
    elif sine34 > tol:
        klass = SingularityClass.CUSP34
    else:
        klass = SingularityClass.DEGENERATE
    point = origin + np.array([px(us), py(us)])
    nearest = centre + int(np.argmin(np.abs(u - us))) - MIN_SIDE_POINTS
    return klass, witness, point, nearest


def _pieces(branch: EnvelopeBranch) -> list[tuple[np.ndarray, np.ndarray, np.ndarray, range]]:
    """
    Scan pieces of a branch as (index map, xy, sigma, candidate positions).

    An open piece maps to itself. A closed branch without breaks is padded
    periodically so that points near the seam get a full fit window.
    """
    xy_all, sources_all = branch.xy(), branch.sources()
    n = len(xy_all)
    if branch.closed and not branch.breaks and n > 2 * MIN_SIDE_POINTS + 2:
        pad = MIN_SIDE_POINTS + 1
        index = np.arange(-pad, n + pad) % n
        cyclic = _parameter(sources_all, closing=True)
        sigma = np.concatenate([[0.0], np.cumsum(cyclic[index[:-1]])])
        return [(index, xy_all[index], sigma, range(pad, n + pad))]
    pieces = []
    cuts = [0] + [b + 1 for b in sorted(branch.breaks)] + [n]
    for start, stop in zip(cuts[:-1], cuts[1:]):
        if stop - start < 3:
            continue
        index = np.arange(start, stop)
        pieces.append((index, xy_all[start:stop], _parameter(sources_all[start:stop]), range(0, stop - start)))
    return pieces


def numeric_cusp_scan(
    branch: EnvelopeBranch,
    tol: float = SINE_TOL,
    tracker: GapTracker | None = None,
    alpha: float | None = None,
    strict: bool = False,
) -> list[CuspMarker]:
    """
    Mark cusps of a sampled envelope branch.

    Candidates are strict local minima of the discrete speed |dX/dsigma| below
    5% of the median speed, sigma being the arclength of the source pairs. A
    degree-5 fit over six points on either side locates the minimum and gives
    the derivatives. The fitted speed must stall there, dropping below 2% of
    its value one sample away; a mere dip is a regular point. Then
    [X'', X'''] != 0 marks an ordinary cusp, otherwise [X''', X''''] != 0 marks
    a (3,4)-cusp.

    Candidates the fit window cannot resolve are skipped and recorded in
    tracker while the remaining markers are kept. With strict set the first such
    candidate raises instead.

    Raises:
        InsufficientResolution: in strict mode, for the first unresolved candidate
    """
    sources_all = branch.sources()
    markers: list[CuspMarker] = []

    def unresolved(position: int, message: str) -> None:
        error = InsufficientResolution(position, message)
        if strict:
            raise error
        logger.warning("branch %d (%s): %s", branch.branch_id, branch.tag.value, error)
        if tracker is not None:
            tracker.record("insufficient_resolution", branch.tag.value, str(error), alpha,
                           tuple(float(v) for v in sources_all[position]))

    for index, xy, sigma, allowed in _pieces(branch):
        speed = np.hypot(*(xy[2:] - xy[:-2]).T) / (sigma[2:] - sigma[:-2])
        median = float(np.median(speed))
        if median == 0.0:
            continue
        interior = np.arange(1, len(speed) - 1)
        low = speed[interior] < SPEED_FRACTION * median
        is_min = (speed[interior] < speed[interior - 1]) & (speed[interior] < speed[interior + 1])
        plateau = (speed[interior] == speed[interior - 1]) | (speed[interior] == speed[interior + 1])
        flat = plateau & low & (speed[interior] <= np.minimum(speed[interior - 1], speed[interior + 1]))
        minima = [int(c) for c in interior[is_min & low] + 1]
        for position in interior[flat] + 1:
            if int(position) in allowed:
                unresolved(int(index[position]), "flat speed minimum")
        crowded = {c for a, b in zip(minima[:-1], minima[1:]) if b - a <= MIN_SIDE_POINTS for c in (a, b)}
        candidates = [c for c in minima if c in allowed]
        for position in candidates:
            if position in crowded:
                unresolved(int(index[position]), "neighbouring candidate within the fit window")
                continue
            if position < MIN_SIDE_POINTS or position + MIN_SIDE_POINTS >= len(xy):
                unresolved(int(index[position]), "too close to the end of the branch")
                continue
            fitted = _classify_window(sigma, xy, position, tol)
            if fitted is None:
                logger.debug("speed dip at index %d does not stall; regular point", int(index[position]))
                continue
            klass, witness, point, nearest = fitted
            witness["speed_ratio"] = float(speed[position - 1] / median)
            at = int(index[nearest])
            markers.append(CuspMarker(at, klass, point, tuple(sources_all[at]), witness))
    markers.sort(key=lambda m: m.index)
    return markers


def scan_branches(branches: list[EnvelopeBranch], tracker: GapTracker | None = None, alpha: float | None = None) -> None:
    """Fill cusp markers of AEIL and IPTL branches in place; unresolved candidates are recorded as gaps."""
    for branch in branches:
        if branch.tag not in (Tag.AEIL, Tag.IPTL):
            continue
        branch.cusp_markers = numeric_cusp_scan(branch, tracker=tracker, alpha=alpha)


def cusp_inventory(branches: list[EnvelopeBranch]) -> dict[str, dict]:
    """Cusp count and (t, s) locations per tag."""
    inventory = {tag.value: {"count": 0, "locations": []} for tag in (Tag.AEIL, Tag.IPTL)}
    for branch in branches:
        if branch.tag.value not in inventory:
            continue
        entry = inventory[branch.tag.value]
        entry["count"] += len(branch.cusp_markers)
        entry["locations"] += [list(map(float, marker.source)) for marker in branch.cusp_markers]
    return inventory


# Family type

def family_type(
    curve: ParamCurve,
    X0: np.ndarray,
    alpha: float,
    t0: float,
    s_of_t,
    other: ParamCurve | None = None,
    step: float | None = None,
) -> str:
    """
    A_k type of f(t) = F(X0, t, s(t)) at t0 along a branch chart.

    Derivatives come from two-level Richardson extrapolation of 7-point
    central differences; values below 1e-6 * scale count as zero.

    Returns:
        "A1", "A2", "A3" or "higher"

    Raises:
        PreconditionViolated: if f'(t0) does not vanish (X0 is not on the envelope)
        InsufficientPrecision: if a non-vanishing derivative is unstable under extrapolation
    """
    alpha = as_alpha(alpha)
    X0 = np.asarray(X0, dtype=float)
    second = other or curve
    scale = max(curve.scale, second.scale)
    h = step if step is not None else 5e-3 * curve.span
    threshold = VANISHING_TOL * scale

    def f(t: float) -> float:
        return smooth_line(curve, t, s_of_t(t), alpha, other)(X0)

    values = {}
    for order in (1, 2, 3, 4):
        estimate = richardson_derivative(f, t0, order, h)
        vanishes = abs(estimate.value) <= threshold
        if not vanishes and estimate.disagreement > RICHARDSON_AGREEMENT:
            raise InsufficientPrecision(order, estimate.coarse, estimate.fine, estimate.value)
        values[order] = estimate.value
        if order == 1:
            if not vanishes:
                raise PreconditionViolated("family_type", "f'(t0) does not vanish", {"f1": estimate.value})
            continue
        if not vanishes:
            logger.debug("family derivatives at t0=%g: %s", t0, values)
            return f"A{order - 1}"
    return "higher"


# Realising jet pairs as arcs

def monge_arcs(m: MongeJetPair, half_width: float = 1.0) -> tuple[PolyGraph, PolyGraph]:
    """The two points of a jet pair as open polynomial arcs p1(t), p2(s)."""
    domain = (-half_width, half_width)
    return PolyGraph(m.p1_coefficients(), domain, "p1"), PolyGraph(m.p2_coefficients(), domain, "p2")


def parallel_chart(m: MongeJetPair):
    """t -> s(t) along the parallel-tangent locus of the realised arcs through (0, 0)."""
    p1, p2 = monge_arcs(m)
    r = m.alpha / (m.alpha - 1)

    def s_of_t(t: float) -> float:
        return solve_partner(p1, t, t / (2 * m.b2) if m.b2 else t / r, None, p2, tol=1e-12)

    return s_of_t


def realize_iptl(m: MongeJetPair, half_width: float = 0.04, n: int = 81) -> EnvelopeBranch:
    """
    Sample the IPTL of a parallel jet pair over s in [-half_width, half_width].

    For each s the partner t on p1 with parallel tangent is found by
    continuation from t(0) = 0; the IPTL point is M = (1 - alpha) p1(t) + alpha p2(s).
    """
    warnings = _checked(m)
    if warnings:
        logger.debug("realising jet pair with soft warnings: %s", warnings)
    if m.p1_inflection or not _vanishes(m.b1):
        raise PreconditionViolated("realize_iptl", "needs a parallel pair with p1 not inflectional")
    p1, p2 = monge_arcs(m)
    a = m.alpha
    s_values = np.linspace(-half_width, half_width, n)
    centre = int(np.argmin(np.abs(s_values)))
    t_values = np.empty(n)
    t_values[centre] = 0.0
    for direction in (1, -1):
        prev, prev2 = 0.0, None
        k = centre + direction
        while 0 <= k < n:
            # t = 2 b2 s + O(s^2) from f'(t) = g'(s); secant predictor afterwards
            guess = 2 * m.b2 * s_values[k] if prev2 is None else 2 * prev - prev2
            try:
                t_values[k] = solve_partner(p2, s_values[k], guess, None, p1, tol=1e-12)
            except RefinementFailed as e:
                raise NumericalError(f"realize_iptl: {e}") from e
            prev2, prev = prev, t_values[k]
            k += direction
    points = []
    for t, s in zip(t_values, s_values):
        X = (1 - a) * p1.position(t) + a * p2.position(s)
        points.append(EnvelopePoint(X, (float(t), float(s)), a, Tag.IPTL, 0.0))
    return EnvelopeBranch(Tag.IPTL, points)


# Components and alpha sweep

def disjointness_report(branches: list[EnvelopeBranch], alpha: float | None = None) -> float:
    """Minimum distance between AEIL and IPTL points; +inf when either is empty."""
    aeil = [b.xy() for b in branches if b.tag is Tag.AEIL and len(b)]
    iptl = [b.xy() for b in branches if b.tag is Tag.IPTL and len(b)]
    if not aeil or not iptl:
        return float("inf")
    distance = float(nearest_distances(np.vstack(aeil), np.vstack(iptl)).min())
    logger.debug("alpha=%s: AEIL-IPTL distance %.6e", alpha, distance)
    return distance


def default_alpha_grid(points: int = 99) -> list[float]:
    """Uniform grid of (0, 1) without 1/2."""
    grid = np.linspace(0.0, 1.0, points + 2)[1:-1]
    return [round(float(a), 12) for a in grid if abs(a - 0.5) > 1e-12]


@dataclass
class SweepResult:
    """α 扫描结果：转变事件与各 α 的尖点清单"""
    events: list[TransitionEvent] = field(default_factory=list)
    inventory: list[dict] = field(default_factory=list)


def _inventory_at(curve: ParamCurve, alpha: float, options: EnvelopeOptions) -> dict[str, dict]:
    branches = build_envelope(curve, alpha, options)
    scan_branches(branches, options.tracker, alpha)
    return cusp_inventory(branches)


def sweep_report(
    curve: ParamCurve,
    alphas: list[float] | None = None,
    options: EnvelopeOptions | None = None,
    bisect_tol: float = 1e-4,
    workers: int = 1,
) -> SweepResult:
    """
    Cusp inventories over an alpha grid and the bisected alphas where counts change.

    Parallel pairs do not depend on alpha and are traced once.
    """
    if not curve.closed:
        raise InputError(f"[{curve.label}] alpha sweep requires a closed curve")
    alphas = sorted(default_alpha_grid() if alphas is None else [float(a) for a in alphas])
    options = replace(options or EnvelopeOptions(), compute_detm=False, oracle=False)
    if options.parallel is None:
        try:
            options.parallel = parallel_pairs(curve, options.grid_n, tol_refine=options.tol_refine)
        except NoBranchFound as e:
            logger.warning("[%s] %s", curve.label, e)
            options.parallel = []

    def inventory(alpha: float) -> dict[str, dict]:
        return _inventory_at(curve, alpha, options)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            inventories = list(pool.map(inventory, alphas))
    else:
        inventories = [inventory(a) for a in alphas]

    result = SweepResult(inventory=[
        {"alpha": a, "tag": tag, "count": inv[tag]["count"], "locations": inv[tag]["locations"]}
        for a, inv in zip(alphas, inventories) for tag in sorted(inv)
    ])
    for (lo, inv_lo), (hi, inv_hi) in zip(zip(alphas[:-1], inventories[:-1]), zip(alphas[1:], inventories[1:])):
        for tag in sorted(inv_lo):
            if inv_lo[tag]["count"] == inv_hi[tag]["count"]:
                continue
            event = _bisect(inventory, tag, lo, hi, inv_lo, inv_hi, bisect_tol)
            result.events.append(event)
    result.events.sort(key=lambda e: (e.alpha_star, e.tag.value))
    return result


def _bisect(inventory, tag: str, lo: float, hi: float, inv_lo: dict, inv_hi: dict, tol: float) -> TransitionEvent:
    count_lo = inv_lo[tag]["count"]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if abs(mid - 0.5) < 1e-9:
            mid += 0.25 * (hi - lo)
        inv_mid = inventory(mid)
        if inv_mid[tag]["count"] == count_lo:
            lo, inv_lo = mid, inv_mid
        else:
            hi, inv_hi = mid, inv_mid
    richer = inv_hi if inv_hi[tag]["count"] > inv_lo[tag]["count"] else inv_lo
    locations = richer[tag]["locations"]
    location = tuple(locations[0]) if locations else (float("nan"), float("nan"))
    kind = "cusp_birth" if inv_hi[tag]["count"] > inv_lo[tag]["count"] else "cusp_death"
    return TransitionEvent(round(0.5 * (lo + hi), 12), kind, Tag(tag), location)


def alpha_sweep(
    curve: ParamCurve,
    alphas: list[float] | None = None,
    options: EnvelopeOptions | None = None,
    bisect_tol: float = 1e-4,
    workers: int = 1,
) -> list[TransitionEvent]:
    """Cusp birth and death events of AEIL and IPTL as alpha varies, ordered by alpha then tag."""
    return sweep_report(curve, alphas, options, bisect_tol, workers).events
