"""
中间线及其包络 - Intermediate lines and the envelope of intermediate lines.

For two points p1 = gamma(t), p2 = gamma(s) and alpha in (0, 1), the
intermediate line passes through M = (1 - alpha) p1 + alpha p2 and the
intersection R of the tangent lines at p1 and p2. Its envelope splits into

- AEIL: pairs with transversal tangents on the pairing locus G = 0,
- IPTL: pairs with parallel tangents (the point is M itself),
- CTL: coincident pairs, the curve itself for alpha != 1/2 and the affine
  evolute for alpha = 1/2.
"""

import logging
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .affine import (
    InflectionError,
    ParallelTangentsError,
    affine_evolute_point,
    affine_frame,
    conormal,
    conormal_decomp,
    tangents_parallel,
)
from .curves import ParamCurve
from .errors import DenominatorDegenerate, InputError, NumericalError
from .event_tracker import GapTracker
from .models import AlphaParam, EnvelopeBranch, EnvelopePoint, LineEq, PairBranch, Tag, bracket, cbrt
from .pair_locus import DegenerateResidual, NoBranchFound, as_alpha, parallel_pairs, parallel_residual, trace_locus

logger = logging.getLogger(__name__)

DENOMINATOR_TOL = 1e-12
PAIRING_TOL = 1e-8
PARALLEL_RESIDUAL_TOL = 1e-6
JUMP_FACTOR = 10.0


class PairingViolated(NumericalError):
    def __init__(self, t: float, s: float, residual: float, threshold: float):
        self.t = t
        self.s = s
        self.residual = residual
        super().__init__(f"(t, s)=({t:.12g}, {s:.12g}) is off the pairing locus: |G|={residual:.3e} > {threshold:.3e}")


class NotParallel(NumericalError):
    def __init__(self, t: float, s: float, residual: float):
        self.t = t
        self.s = s
        self.residual = residual
        super().__init__(f"tangents at t={t:.12g} and s={s:.12g} are not parallel (P={residual:.3e})")


class ConsecutiveParallel(NumericalError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"lines {index} and {index + 1} are parallel; no intersection")


@dataclass
class _Pair:
    """Jets and derived quantities shared by every construction at one pair."""
    alpha: AlphaParam
    t: float
    s: float
    x1: np.ndarray
    x2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    scale: float
    jets: tuple = field(repr=False, default=())

    @property
    def chord(self) -> np.ndarray:
        return self.x2 - self.x1

    @property
    def midpoint(self) -> np.ndarray:
        return (1 - self.alpha.alpha) * self.x1 + self.alpha.alpha * self.x2


def _pair(curve: ParamCurve, t: float, s: float, alpha, other: ParamCurve | None) -> _Pair:
    second = other or curve
    j1, j2 = curve.jet(t), second.jet(s)
    return _Pair(as_alpha(alpha), float(t), float(s), j1.x, j2.x, j1.d1, j2.d1,
                 max(curve.scale, second.scale), (j1, j2))


def _rot(v: np.ndarray) -> np.ndarray:
    """Covector U -> [v, U] as a normal vector."""
    return np.array([-v[1], v[0]])


def _conormal_line(pair: _Pair) -> LineEq:
    """(1 - alpha) nu2(C) nu1(X - M) + alpha nu1(C) nu2(X - M) = 0."""
    j1, j2 = pair.jets
    nu1, nu2 = conormal(j1, pair.scale), conormal(j2, pair.scale)
    C = pair.chord
    a = pair.alpha.alpha
    normal = (1 - a) * nu2(C) * nu1.n + a * nu1(C) * nu2.n
    return LineEq.through(pair.midpoint, normal)


def intermediate_line(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
    other: ParamCurve | None = None,
) -> LineEq:
    """
    Intermediate line of the pair (t, s).

    - coincident points: the tangent line, or the affine normal line when alpha = 1/2;
    - parallel tangents: the line through M parallel to both tangents;
    - otherwise the line through M and the tangent intersection R.

    Raises:
        InflectionError: when the conormals are undefined in the transversal case
    """
    pair = _pair(curve, t, s, alpha, other)
    if np.allclose(pair.x1, pair.x2, rtol=0.0, atol=1e-14 * pair.scale):
        if pair.alpha.is_mid:
            xi = affine_frame(pair.jets[0], pair.scale).normal_affine
            return LineEq.through(pair.x1, _rot(xi))
        return LineEq.through(pair.x1, _rot(pair.g1))
    if tangents_parallel(*pair.jets):
        return LineEq.through(pair.midpoint, _rot(pair.g1))
    line = _conormal_line(pair)
    if np.hypot(line.l1, line.l2) < 1e-14 * pair.scale:
        # conormal normal vanished; fall back to the two-point construction
        w = bracket(pair.g1, pair.g2)
        R = pair.x1 + bracket(pair.chord, pair.g2) / w * pair.g1
        return LineEq.through(pair.midpoint, _rot(R - pair.midpoint))
    return line


def smooth_line(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
    other: ParamCurve | None = None,
) -> LineEq:
    """Conormal form of the intermediate line, normalised; smooth through parallel pairs."""
    return _conormal_line(_pair(curve, t, s, alpha, other)).normalized()


def _online(point: np.ndarray, curve: ParamCurve, t: float, s: float, alpha, other) -> float:
    try:
        return abs(intermediate_line(curve, t, s, alpha, other).normalized()(point))
    except NumericalError:
        return float("nan")


def envelope_point_closed_form(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
    other: ParamCurve | None = None,
) -> EnvelopePoint:
    """
    AEIL point of a pair on the pairing locus.

    X - M = (alpha nu1(C) / D) ((1 - alpha) nu2(C) g1 - (alpha nu1(C) nu2(g1) / nu1(g2)) g2)
    with D = alpha nu2(g1) nu1(C) + b nu2(C)^2 and b from the conormal decomposition.

    Raises:
        PairingViolated: if |G| exceeds 1e-8 of its term magnitudes
        ParallelTangentsError: if the tangents are parallel
        DenominatorDegenerate: if the envelope point is at infinity
    """
    pair = _pair(curve, t, s, alpha, other)
    j1, j2 = pair.jets
    a, lam = pair.alpha.alpha, pair.alpha.lam
    nu1, nu2 = conormal(j1, pair.scale), conormal(j2, pair.scale)
    C = pair.chord
    n1C, n2C = nu1(C), nu2(C)
    G = n1C + lam * n2C
    threshold = PAIRING_TOL * (abs(n1C) + lam * abs(n2C))
    if abs(G) > threshold:
        raise PairingViolated(t, s, abs(G), threshold)
    b = conormal_decomp(j1, j2, pair.scale).b
    first, second = a * nu2(pair.g1) * n1C, b * n2C ** 2
    D = first + second
    limit = DENOMINATOR_TOL * (abs(first) + abs(second))
    if abs(D) <= limit:
        raise DenominatorDegenerate("closed-form envelope point", D, limit)
    direction = (1 - a) * n2C * pair.g1 - (a * n1C * nu2(pair.g1) / nu1(pair.g2)) * pair.g2
    X = pair.midpoint + (a * n1C / D) * direction
    return EnvelopePoint(X, (pair.t, pair.s), a, Tag.AEIL, _online(X, curve, t, s, pair.alpha, other))


def _affine_tangents(pair: _Pair) -> tuple[np.ndarray, np.ndarray]:
    j1, j2 = pair.jets
    for jet in (j1, j2):
        conormal(jet, pair.scale)  # raises on inflections
    return pair.g1 / cbrt(j1.kappa), pair.g2 / cbrt(j2.kappa)


def envelope_point_affine_form(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
    other: ParamCurve | None = None,
) -> EnvelopePoint:
    """
    AEIL point from affine arc-length tangents:
    X - M = (alpha lam [g2, C][g2, g1] / (alpha lam [g2, g1]^2 + [g2, C])) ((1 - alpha) g1 - alpha lam g2).
    """
    pair = _pair(curve, t, s, alpha, other)
    a, lam = pair.alpha.alpha, pair.alpha.lam
    if tangents_parallel(*pair.jets):
        raise ParallelTangentsError(t, s, bracket(pair.g1, pair.g2))
    g1, g2 = _affine_tangents(pair)
    C = pair.chord
    k, w21 = bracket(g2, C), bracket(g2, g1)
    first, second = a * lam * w21 ** 2, k
    D = first + second
    limit = DENOMINATOR_TOL * (abs(first) + abs(second))
    if abs(D) <= limit:
        raise DenominatorDegenerate("affine-form envelope point", D, limit)
    X = pair.midpoint + (a * lam * k * w21 / D) * ((1 - a) * g1 - a * lam * g2)
    return EnvelopePoint(X, (pair.t, pair.s), a, Tag.AEIL, _online(X, curve, t, s, pair.alpha, other))


def aess_point(curve: ParamCurve, t: float, s: float, other: ParamCurve | None = None) -> EnvelopePoint:
    """
    Affine envelope symmetry set point (alpha = 1/2):
    X - M = (1/2) ([g2, p1 - p2][g1, g2] / (-2 [g2, p1 - p2] + [g1, g2]^2)) (g1 - g2).
    """
    pair = _pair(curve, t, s, 0.5, other)
    if tangents_parallel(*pair.jets):
        raise ParallelTangentsError(t, s, bracket(pair.g1, pair.g2))
    g1, g2 = _affine_tangents(pair)
    k, w = bracket(g2, pair.x1 - pair.x2), bracket(g1, g2)
    D = -2 * k + w ** 2
    limit = DENOMINATOR_TOL * (2 * abs(k) + w ** 2)
    if abs(D) <= limit:
        raise DenominatorDegenerate("AESS point", D, limit)
    X = pair.midpoint + 0.5 * (k * w / D) * (g1 - g2)
    return EnvelopePoint(X, (pair.t, pair.s), 0.5, Tag.AEIL, _online(X, curve, t, s, pair.alpha, other))


def iptl_point(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
    other: ParamCurve | None = None,
) -> EnvelopePoint:
    """
    IPTL point of a parallel pair: the intermediate point M itself.

    Raises:
        NotParallel: if the tangents at t and s are not parallel, or t = s on one curve
    """
    pair = _pair(curve, t, s, alpha, other)
    P = bracket(pair.g1, pair.g2)
    coincident = other is None and np.allclose(pair.x1, pair.x2, rtol=0.0, atol=1e-12 * pair.scale)
    if coincident or abs(P) > PARALLEL_RESIDUAL_TOL * np.hypot(*pair.g1) * np.hypot(*pair.g2):
        raise NotParallel(t, s, P)
    X = pair.midpoint
    return EnvelopePoint(X, (pair.t, pair.s), pair.alpha.alpha, Tag.IPTL,
                         abs(LineEq.through(X, _rot(pair.g1)).normalized()(X)))


def affine_evolute(curve: ParamCurve, n: int, tracker: GapTracker | None = None) -> EnvelopeBranch:
    """
    Affine evolute gamma + xi / mu sampled at n parameters.

    The polyline is broken where mu vanishes or changes sign (the evolute runs
    off to infinity there) and at inflections.
    """
    branch = EnvelopeBranch(Tag.EVOLUTE)
    scale = curve.scale
    last_mu_sign = 0.0
    for t in curve.sample_parameters(n):
        jet = curve.jet(t)
        try:
            X = affine_evolute_point(jet, scale)
            mu_sign = np.sign(affine_frame(jet, scale).mu)
        except (DenominatorDegenerate, InflectionError) as e:
            if tracker is not None:
                tracker.record("evolute_asymptote", Tag.EVOLUTE.value, str(e), 0.5, (t, t))
            if branch.points and (not branch.breaks or branch.breaks[-1] != len(branch.points) - 1):
                branch.breaks.append(len(branch.points) - 1)
            last_mu_sign = 0.0
            continue
        if branch.points and last_mu_sign and mu_sign != last_mu_sign:
            branch.breaks.append(len(branch.points) - 1)
        last_mu_sign = mu_sign
        branch.points.append(EnvelopePoint(X, (float(t), float(t)), 0.5, Tag.EVOLUTE, 0.0))
    return branch


def ctl(curve: ParamCurve, alpha: AlphaParam | float, n: int = 256, tracker: GapTracker | None = None) -> EnvelopeBranch:
    """Coincident-tangent component: the curve itself, or the affine evolute when alpha = 1/2."""
    alpha = as_alpha(alpha)
    if alpha.is_mid:
        return affine_evolute(curve, n, tracker)
    ts = curve.sample_parameters(n)
    xy = curve.positions(ts)
    points = [EnvelopePoint(X, (float(t), float(t)), alpha.alpha, Tag.CTL, 0.0) for t, X in zip(ts, xy)]
    return EnvelopeBranch(Tag.CTL, points, closed=curve.closed)


def limit_slope(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
) -> float:
    """
    Slope A(s, t) of the intermediate line in the local graph frame at t.

    The frame is rotated so the tangent at t is horizontal; in it the curve is
    a graph y = f(x) near t with f'(t) = 0. At s = t the value is defined by
    continuity: f'(t) = 0 for alpha != 1/2 and the slope of the affine normal
    for alpha = 1/2.

    Raises:
        DenominatorDegenerate: if the formula's denominator vanishes for s != t
    """
    alpha = as_alpha(alpha)
    a = alpha.alpha
    j1 = curve.jet(t)
    angle = np.arctan2(j1.d1[1], j1.d1[0])
    rotation = np.array([[np.cos(angle), np.sin(angle)], [-np.sin(angle), np.cos(angle)]])

    def graph(jet) -> tuple[float, float]:
        d1 = rotation @ jet.d1
        return d1[1] / d1[0], jet.kappa / d1[0] ** 3

    f1, f1pp = graph(j1)
    if s == t:
        if not alpha.is_mid:
            return f1
        xi = rotation @ affine_frame(j1, curve.scale).normal_affine
        return xi[1] / xi[0]
    f2, f2pp = graph(curve.jet(s))
    c2 = cbrt(a * f2pp)
    c1 = cbrt((1 - a) * f1pp)
    first, second = (1 - a) * c2, a * c1
    denominator = first - second
    limit = DENOMINATOR_TOL * (abs(first) + abs(second))
    if abs(denominator) <= limit:
        raise DenominatorDegenerate("limit slope", denominator, limit)
    return ((1 - a) * f1 * c2 - a * f2 * c1) / denominator


def discriminant_check(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
    other: ParamCurve | None = None,
    h: float | None = None,
) -> float:
    """
    det of the matrix with rows (l1, l2, l3), d/ds of it and d/dt of it.

    Lines are normalised to l1^2 + l2^2 = 1 before differencing; derivatives
    are central differences with step 1e-5 * period.
    """
    alpha = as_alpha(alpha)
    second = other or curve
    if h is None:
        h = 1e-5 * max(curve.span, second.span)

    def coeffs(tt: float, ss: float) -> np.ndarray:
        return smooth_line(curve, tt, ss, alpha, other).coefficients

    row = coeffs(t, s)
    d_s = (coeffs(t, s + h) - coeffs(t, s - h)) / (2 * h)
    d_t = (coeffs(t + h, s) - coeffs(t - h, s)) / (2 * h)
    return float(np.linalg.det(np.vstack([row, d_s, d_t])))


def oracle_envelope(
    lines: list[LineEq],
    strict: bool = False,
    skipped: list[int] | None = None,
) -> list[np.ndarray]:
    """
    Intersections of consecutive lines of a sampled family.

    Parallel consecutive pairs are skipped (their index appended to `skipped`)
    or, in strict mode, raise ConsecutiveParallel.
    """
    points = []
    for i, (first, second) in enumerate(zip(lines[:-1], lines[1:])):
        A = np.array([[first.l1, first.l2], [second.l1, second.l2]])
        det = np.linalg.det(A)
        if abs(det) <= 1e-12 * np.hypot(first.l1, first.l2) * np.hypot(second.l1, second.l2):
            if strict:
                raise ConsecutiveParallel(i)
            if skipped is not None:
                skipped.append(i)
            continue
        points.append(np.linalg.solve(A, -np.array([first.l3, second.l3])))
    return points


def nearest_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point of a to the nearest point of b."""
    a, b = np.asarray(a, dtype=float).reshape(-1, 2), np.asarray(b, dtype=float).reshape(-1, 2)
    if len(a) == 0:
        return np.empty(0)
    if len(b) == 0:
        return np.full(len(a), np.inf)
    return cKDTree(b).query(a)[0]


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance of two finite point sets."""
    if len(a) == 0 and len(b) == 0:
        return 0.0
    return float(max(nearest_distances(a, b).max(initial=0.0), nearest_distances(b, a).max(initial=0.0)))


@dataclass
class EnvelopeOptions:
    """Knobs of build_envelope."""
    grid_n: int = 256
    samples: int = 256
    tol_refine: float = 1e-10
    online_tol: float = 1e-8
    detm_tol: float = 1e-6
    compute_detm: bool = True
    oracle: bool = True
    tracker: GapTracker | None = None
    parallel: list[PairBranch] | None = None

    def validate(self) -> list[str]:
        errors = []
        if self.grid_n < 64:
            errors.append(f"grid_n must be at least 64, got {self.grid_n}")
        if self.samples < 8:
            errors.append(f"samples must be at least 8, got {self.samples}")
        for name in ("tol_refine", "online_tol", "detm_tol"):
            if not getattr(self, name) > 0:
                errors.append(f"{name} must be positive")
        return errors


def parallel_crossings(
    curve: ParamCurve,
    pairs: PairBranch,
    other: ParamCurve | None = None,
) -> list[tuple[float, float]]:
    """
    Pairs where a traced pairing-locus branch crosses the parallel-tangent locus.

    Along G = 0 the AEIL point tends to the intermediate point M as the
    tangents become parallel, so each crossing is a point the AEIL shares
    with the IPTL. Locations are interpolated linearly in P between the two
    traced pairs that bracket the sign change.
    """
    points = np.asarray(pairs.points, dtype=float)
    if len(points) < 2:
        return []
    values = np.array([parallel_residual(curve, t, s, other) for t, s in points])
    links = [(i, i + 1) for i in range(len(points) - 1)]
    if pairs.closed:
        links.append((len(points) - 1, 0))
    crossings: list[tuple[float, float]] = []
    for i, j in links:
        if values[i] == 0.0:
            crossings.append((float(points[i][0]), float(points[i][1])))
            continue
        if values[i] * values[j] >= 0.0:
            continue
        if j == i + 1:
            w = values[i] / (values[i] - values[j])
            t, s = points[i] + w * (points[j] - points[i])
        else:
            # closing link; the ends differ by whole periods in unwrapped coordinates
            t, s = points[i] if abs(values[i]) <= abs(values[j]) else points[j]
        crossings.append((float(t), float(s)))
    return crossings


def _assemble(
    curve: ParamCurve,
    alpha: AlphaParam,
    pairs: PairBranch,
    tag: Tag,
    options: EnvelopeOptions,
) -> EnvelopeBranch:
    tracker = options.tracker
    branch = EnvelopeBranch(tag, pairs=pairs)
    lines: list[LineEq] = []
    evaluate = envelope_point_closed_form if tag is Tag.AEIL else iptl_point

    def flag(kind: str, message: str, t: float, s: float) -> None:
        logger.debug("[%s] alpha=%g: %s", curve.label, alpha.alpha, message)
        if tracker is not None:
            tracker.record(kind, tag.value, message, alpha.alpha, (t, s))

    for t, s in pairs.points:
        try:
            point = evaluate(curve, t, s, alpha)
        except NumericalError as e:
            flag(re.sub(r"(?<!^)(?=[A-Z])", "_", type(e).__name__).lower(), str(e), t, s)
            if branch.points and (not branch.breaks or branch.breaks[-1] != len(branch.points) - 1):
                branch.breaks.append(len(branch.points) - 1)
            continue
        if branch.points and len(branch.points) - 1 not in branch.breaks:
            if np.hypot(*(point.X - branch.points[-1].X)) > JUMP_FACTOR * curve.scale:
                branch.breaks.append(len(branch.points) - 1)
        size = max(curve.scale, float(np.hypot(*point.X)))
        if point.online_residual > options.online_tol * size:
            flag("online_residual", f"(t, s)=({t:.12g}, {s:.12g}): point is {point.online_residual:.3e} off its line", t, s)
        if options.compute_detm:
            point.detm_residual = abs(discriminant_check(curve, t, s, alpha))
            if point.detm_residual > options.detm_tol * size:
                flag("detm_residual", f"(t, s)=({t:.12g}, {s:.12g}): |det M|={point.detm_residual:.3e}", t, s)
        branch.points.append(point)
        if options.oracle:
            lines.append(intermediate_line(curve, t, s, alpha))
    branch.closed = pairs.closed and not branch.breaks and len(branch.points) == len(pairs.points)
    if tag is Tag.AEIL:
        branch.contacts = parallel_crossings(curve, pairs)
    if options.oracle and len(lines) >= 2:
        oracle = oracle_envelope(lines)
        finite = [p for p in oracle if np.all(np.isfinite(p)) and np.hypot(*p) < 1e6 * curve.scale]
        if finite and branch.points:
            branch.oracle_distance = float(nearest_distances(np.array(finite), branch.xy()).max())
    return branch


def build_envelope(
    curve: ParamCurve,
    alpha: AlphaParam | float,
    options: EnvelopeOptions | None = None,
) -> list[EnvelopeBranch]:
    """
    AEIL, IPTL and CTL branches of a closed curve for one alpha.

    Failures of single points or whole branches are recorded in
    options.tracker and never abort the build.
    """
    alpha = as_alpha(alpha)
    options = options or EnvelopeOptions()
    errors = options.validate()
    if errors:
        raise InputError(f"Invalid envelope options: {'; '.join(errors)}")
    tracker = options.tracker
    branches: list[EnvelopeBranch] = []

    try:
        transversal = trace_locus(curve, alpha, options.grid_n, tol_refine=options.tol_refine)
    except NoBranchFound:
        logger.info("[%s] alpha=%g: no transversal pairs, AEIL empty", curve.label, alpha.alpha)
        transversal = []
    except DegenerateResidual as e:
        logger.warning("[%s] alpha=%g: %s", curve.label, alpha.alpha, e)
        if tracker is not None:
            tracker.record("degenerate_residual", Tag.AEIL.value, str(e), alpha.alpha)
        transversal = []
    for pairs in transversal:
        branch = _assemble(curve, alpha, pairs, Tag.AEIL, options)
        if branch.points:
            branches.append(branch)

    parallel = options.parallel
    if parallel is None:
        try:
            parallel = parallel_pairs(curve, options.grid_n, tol_refine=options.tol_refine)
        except NoBranchFound as e:
            logger.warning("[%s] %s", curve.label, e)
            if tracker is not None:
                tracker.record("no_branch", Tag.IPTL.value, str(e), alpha.alpha)
            parallel = []
    for pairs in parallel:
        branch = _assemble(curve, alpha, pairs, Tag.IPTL, options)
        if branch.points:
            branches.append(branch)

    branches.append(ctl(curve, alpha, options.samples, tracker))
    for k, branch in enumerate(branches):
        branch.branch_id = k

    # at alpha = 1/2 the AESS meets the MPTL at shared cusps; elsewhere a contact is reported
    contacts = [(b.branch_id, pair) for b in branches if b.tag is Tag.AEIL for pair in b.contacts]
    if contacts and not alpha.is_mid:
        logger.warning("[%s] alpha=%g: AEIL meets IPTL at %d parallel pair(s)",
                       curve.label, alpha.alpha, len(contacts))
        if tracker is not None:
            for branch_id, (t, s) in contacts:
                tracker.record("components_touch", Tag.AEIL.value,
                               f"AEIL branch {branch_id} crosses the parallel-tangent locus at "
                               f"(t, s)=({t:.12g}, {s:.12g})", alpha.alpha, (t, s))
    return branches
