"""
Parameter pairs (t, s) contributing to the envelope of intermediate lines.

Two loci live on the (t, s) torus of a closed curve (or on the rectangle of
two arcs):

- the pairing locus G = nu1(C) + lambda nu2(C) = 0 with C = gamma(s) - gamma(t),
  whose pairs have transversal tangents and yield AEIL points;
- the parallel-tangent locus P = [gamma'(t), gamma'(s)] = 0, yielding IPTL points.

Both are traced by marching squares on a sampled grid, linked into polylines
and refined to machine precision by Newton's method in s.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .affine import INFLECTION_TOL, PARALLEL_TOL, conormal, conormal_derivative
from .curves import ParamCurve, ParameterOutOfDomainError
from .errors import InputError, NumericalError
from .models import AlphaParam, PairBranch, bracket

logger = logging.getLogger(__name__)

DIAGONAL_BAND_CELLS = 8
DEGENERATE_FRACTION = 0.25
DEGENERATE_TOL = 1e-10
MIN_BRANCH_POINTS = 3


class NoBranchFound(NumericalError):
    def __init__(self, curve: str, what: str):
        self.curve = curve
        super().__init__(f"[{curve}] no {what} branch found")


class DegenerateResidual(NumericalError):
    """The residual vanishes on an open region; every pair is a solution."""

    def __init__(self, curve: str, fraction: float):
        self.curve = curve
        self.fraction = fraction
        super().__init__(f"[{curve}] pairing residual vanishes on {fraction:.0%} of the grid")


class RefinementFailed(NumericalError):
    def __init__(self, t: float, s_guess: float, residual: float):
        self.t = t
        self.s_guess = s_guess
        self.residual = residual
        super().__init__(f"no partner found for t={t:.12g} near s={s_guess:.12g} (|residual|={residual:.3e})")


def as_alpha(alpha: AlphaParam | float) -> AlphaParam:
    return alpha if isinstance(alpha, AlphaParam) else AlphaParam(float(alpha))


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def pairing_residual(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
    other: ParamCurve | None = None,
) -> float:
    """G(t, s) = nu1(C) + lambda nu2(C), C = gamma(s) - gamma(t)."""
    alpha = as_alpha(alpha)
    second = other or curve
    scale = max(curve.scale, second.scale)
    j1, j2 = curve.jet(t), second.jet(s)
    C = j2.x - j1.x
    return conormal(j1, scale)(C) + alpha.lam * conormal(j2, scale)(C)


def pairing_residual_affine(
    curve: ParamCurve,
    t: float,
    s: float,
    alpha: AlphaParam | float,
    other: ParamCurve | None = None,
) -> float:
    """[g1_s + lambda g2_s, C] with g_s the affine arc-length tangents."""
    alpha = as_alpha(alpha)
    second = other or curve
    j1, j2 = curve.jet(t), second.jet(s)
    for jet in (j1, j2):
        conormal(jet, max(curve.scale, second.scale))  # raises on inflections
    tangent1 = j1.d1 / np.cbrt(j1.kappa)
    tangent2 = j2.d1 / np.cbrt(j2.kappa)
    return bracket(tangent1 + alpha.lam * tangent2, j2.x - j1.x)


def parallel_residual(curve: ParamCurve, t: float, s: float, other: ParamCurve | None = None) -> float:
    """P(t, s) = [gamma'(t), gamma'(s)]."""
    return bracket(curve.jet(t).d1, (other or curve).jet(s).d1)


@dataclass
class _NodeData:
    """Positions and derivative data of one curve at many parameters."""
    x: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    c: np.ndarray
    kappa_t: np.ndarray
    inflection: np.ndarray

    @classmethod
    def sample(cls, curve: ParamCurve, ts: np.ndarray, scale: float) -> "_NodeData":
        x = curve.derivatives(ts, 0)
        d1 = curve.derivatives(ts, 1)
        d2 = curve.derivatives(ts, 2)
        d3 = curve.derivatives(ts, 3)
        kappa = _cross(d1, d2)
        threshold = INFLECTION_TOL * scale ** 3 * (10 if curve.estimated else 1)
        return cls(x, d1, d2, np.cbrt(kappa), _cross(d1, d3), np.abs(kappa) < threshold)


class _Residual:
    """Vectorised residual with its s-derivative for one of the two loci."""

    def __init__(self, curve: ParamCurve, other: ParamCurve | None, alpha: AlphaParam | None):
        self.curve = curve
        self.other = other or curve
        self.alpha = alpha
        self.scale = max(curve.scale, self.other.scale)

    @property
    def kind(self) -> str:
        return "parallel" if self.alpha is None else "transversal"

    def grid(self, t_nodes: np.ndarray, s_nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Residual on the node grid, NaN where undefined; also the nu1(C) magnitudes."""
        a = _NodeData.sample(self.curve, t_nodes, self.scale)
        b = _NodeData.sample(self.other, s_nodes, self.scale)
        d1_t, d1_s = a.d1[:, None, :], b.d1[None, :, :]
        if self.alpha is None:
            values = _cross(d1_t, d1_s)
            return values, np.abs(values)
        C = b.x[None, :, :] - a.x[:, None, :]
        nu1 = _cross(d1_t, C) / a.c[:, None]
        nu2 = _cross(d1_s, C) / b.c[None, :]
        values = nu1 + self.alpha.lam * nu2
        w = _cross(d1_t, d1_s)
        norms = np.hypot(*a.d1.T)[:, None] * np.hypot(*b.d1.T)[None, :]
        undefined = (a.inflection[:, None] | b.inflection[None, :]) | (np.abs(w) < PARALLEL_TOL * norms)
        values = np.where(undefined, np.nan, values)
        return values, np.abs(nu1)

    def at(self, t: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Residual and its s-derivative at paired parameter arrays."""
        a = _NodeData.sample(self.curve, t, self.scale)
        b = _NodeData.sample(self.other, s, self.scale)
        if self.alpha is None:
            return _cross(a.d1, b.d1), _cross(a.d1, b.d2)
        C = b.x - a.x
        value = _cross(a.d1, C) / a.c + self.alpha.lam * _cross(b.d1, C) / b.c
        dnu2 = _cross(b.d2, C) / b.c - b.kappa_t * _cross(b.d1, C) / (3 * b.c ** 4)
        deriv = _cross(a.d1, b.d1) / a.c + self.alpha.lam * dnu2
        return value, deriv

    def scalar(self, t: float, s: float) -> float:
        return float(self.at(np.array([t]), np.array([s]))[0][0])



def _newton(residual: _Residual, t: np.ndarray, s: np.ndarray, iterations: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised Newton iteration in s at fixed t; open arcs keep s inside their domain."""
    s = s.copy()
    other = residual.other
    lo, hi = other.domain
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(iterations):
            value, deriv = residual.at(t, s)
            step = np.where(np.isfinite(value / deriv), value / deriv, 0.0)
            s = s - step
            if not other.closed:
                s = np.clip(s, lo, hi)
            if np.all(np.abs(step) < 1e-15 * max(1.0, other.span)):
                break
        value, _ = residual.at(t, s)
    return s, value


def solve_partner(
    curve: ParamCurve,
    t: float,
    s_guess: float,
    alpha: AlphaParam | float | None = None,
    other: ParamCurve | None = None,
    tol: float = 1e-10,
    bracket_s: tuple[float, float] | None = None,
) -> float:
    """
    Solve G(t, s) = 0 (or P(t, s) = 0 when alpha is None) for s near s_guess.

    Newton's method first; when it fails and a sign-changing bracket is given,
    brentq on the bracket.

    Raises:
        RefinementFailed: if neither method reaches |residual| < tol
    """
    residual = _Residual(curve, other, None if alpha is None else as_alpha(alpha))
    try:
        s_arr, value = _newton(residual, np.array([float(t)]), np.array([float(s_guess)]))
        s, val = float(s_arr[0]), float(value[0])
    except ParameterOutOfDomainError:
        s, val = s_guess, float("inf")
    if np.isfinite(val) and abs(val) < tol:
        return s
    if bracket_s is not None:
        f = lambda u: residual.scalar(t, u)
        lo, hi = bracket_s
        if f(lo) * f(hi) <= 0:
            return float(brentq(f, lo, hi, xtol=1e-15))
    raise RefinementFailed(t, s_guess, abs(val))


@dataclass
class _Grid:
    t: np.ndarray
    s: np.ndarray
    dt: float
    ds: float
    periodic: bool


def _grid(curve: ParamCurve, other: ParamCurve | None, grid_n: int) -> _Grid:
    """Node parameters. The s nodes sit half a step off the t nodes so symmetric loci fall between nodes."""
    t0, t1 = curve.domain
    if other is None and curve.closed:
        h = curve.span / grid_n
        return _Grid(t0 + h * np.arange(grid_n), t0 + h * (np.arange(grid_n) + 0.5), h, h, True)
    second = other or curve
    s0, s1 = second.domain
    hs = (s1 - s0) / grid_n
    t_nodes = np.linspace(t0, t1, grid_n)
    return _Grid(t_nodes, s0 + hs * (np.arange(grid_n) + 0.5), t_nodes[1] - t_nodes[0], hs, False)


def _band_mask(grid: _Grid, span: float) -> np.ndarray:
    """Nodes within the diagonal exclusion band |t - s| < 8 grid steps."""
    delta = grid.s[None, :] - grid.t[:, None]
    if grid.periodic:
        delta = (delta + span / 2) % span - span / 2
    return np.abs(delta) < DIAGONAL_BAND_CELLS * span / len(grid.t)


def _march(values: np.ndarray, periodic: bool) -> tuple[dict, list[tuple]]:
    """
    Marching squares over the node grid.

    Returns the crossed edges keyed ('t', i, j) for the edge from node (i, j)
    to (i+1, j) and ('s', i, j) for (i, j) to (i, j+1), each mapped to the
    interpolation fraction along the edge, plus the segments joining edge
    keys inside a cell. Cells with an undefined corner are skipped.
    """
    n_t, n_s = values.shape
    sign = values >= 0
    crossings: dict[tuple, float] = {}
    segments: list[tuple] = []

    def edge(kind: str, i: int, j: int) -> tuple | None:
        i2, j2 = ((i + 1) % n_t, j) if kind == "t" else (i, (j + 1) % n_s)
        if sign[i, j] == sign[i2, j2]:
            return None
        key = (kind, i, j)
        if key not in crossings:
            va, vb = values[i, j], values[i2, j2]
            crossings[key] = float(va / (va - vb))
        return key

    cells_t = n_t if periodic else n_t - 1
    cells_s = n_s if periodic else n_s - 1
    ii, jj = np.meshgrid(np.arange(cells_t), np.arange(cells_s), indexing="ij")
    ip, jp = (ii + 1) % n_t, (jj + 1) % n_s
    corners = np.stack([values[ii, jj], values[ip, jj], values[ip, jp], values[ii, jp]])
    valid = np.all(np.isfinite(corners), axis=0)
    corner_sign = corners >= 0
    mixed = valid & np.any(corner_sign, axis=0) & ~np.all(corner_sign, axis=0)

    for i, j in zip(*np.nonzero(mixed)):
        i, j = int(i), int(j)
        bottom = edge("t", i, j)
        right = edge("s", (i + 1) % n_t, j)
        top = edge("t", i, (j + 1) % n_s)
        left = edge("s", i, j)
        crossed = [e for e in (bottom, right, top, left) if e is not None]
        if len(crossed) == 2:
            segments.append((crossed[0], crossed[1]))
        elif len(crossed) == 4:
            # saddle: the centre value decides which corners connect
            centre = corners[:, i, j].mean()
            if (centre >= 0) == sign[i, j]:
                segments += [(bottom, right), (top, left)]
            else:
                segments += [(bottom, left), (top, right)]
    return crossings, segments


def _link(segments: list[tuple]) -> list[tuple[list[tuple], bool]]:
    """Chain segments sharing edge keys into polylines; returns (keys, closed)."""
    neighbours: dict[tuple, list[tuple]] = defaultdict(list)
    for a, b in segments:
        neighbours[a].append(b)
        neighbours[b].append(a)

    seen: set[tuple] = set()
    chains = []

    def walk(start: tuple) -> list[tuple]:
        chain, node = [start], start
        seen.add(start)
        while True:
            nxt = [k for k in neighbours[node] if k not in seen]
            if not nxt:
                return chain
            node = nxt[0]
            seen.add(node)
            chain.append(node)

    for key in sorted(k for k in neighbours if len(neighbours[k]) == 1):
        if key not in seen:
            chains.append((walk(key), False))
    for key in sorted(neighbours):
        if key not in seen:
            chain = walk(key)
            closed = len(chain) > 2 and chain[0] in neighbours[chain[-1]]
            chains.append((chain, closed))
    return chains


def _refine_chain(
    residual: _Residual,
    keys: list[tuple],
    crossings: dict,
    grid: _Grid,
    tol: float,
) -> tuple[np.ndarray, np.ndarray]:
    t0 = np.empty(len(keys))
    s0 = np.empty(len(keys))
    for k, (kind, i, j) in enumerate(keys):
        frac = crossings[(kind, i, j)]
        if kind == "t":
            t0[k], s0[k] = grid.t[i] + frac * grid.dt, grid.s[j]
        else:
            t0[k], s0[k] = grid.t[i], grid.s[j] + frac * grid.ds

    s_new, value = _newton(residual, t0, s0)
    t_new = t0.copy()
    bad = ~(np.isfinite(value) & (np.abs(value) < tol) & (np.abs(s_new - s0) < 2 * grid.ds))
    for k in np.nonzero(bad)[0]:
        kind, i, j = keys[k]
        try:
            if kind == "s":
                f = lambda u: residual.scalar(t0[k], u)
                s_new[k] = brentq(f, grid.s[j], grid.s[j] + grid.ds, xtol=1e-15)
            else:
                f = lambda u: residual.scalar(u, s0[k])
                s_new[k] = s0[k]
                t_new[k] = brentq(f, grid.t[i], grid.t[i] + grid.dt, xtol=1e-15)
        except (ValueError, ParameterOutOfDomainError):
            logger.debug("edge refinement failed at %s", keys[k])
            s_new[k], t_new[k] = np.nan, np.nan
    keep = np.isfinite(s_new) & np.isfinite(t_new)
    points = np.column_stack([t_new[keep], s_new[keep]])
    residuals = residual.at(points[:, 0], points[:, 1])[0] if len(points) else np.empty(0)
    return points, residuals


def _unwrap(points: np.ndarray, periods: tuple[float | None, float | None]) -> np.ndarray:
    points = points.copy()
    for col, period in enumerate(periods):
        if period is not None:
            points[:, col] = np.unwrap(points[:, col], period=period)
    return points


def _orient(
    points: np.ndarray,
    residuals: np.ndarray,
    closed: bool,
    periods: tuple[float | None, float | None],
    origins: tuple[float, float],
) -> tuple[np.ndarray, np.ndarray]:
    """Start closed loops at their smallest t, unwrap across periods and make t increase along the branch."""
    t_period = periods[0]
    if closed:
        t_reduced = points[:, 0] if t_period is None else (points[:, 0] - origins[0]) % t_period
        start = int(np.argmin(t_reduced))
        points, residuals = np.roll(points, -start, axis=0), np.roll(residuals, -start)
    points = _unwrap(points, periods)
    if closed:
        net = points[-1, 0] - points[0, 0]
        wraps = t_period is not None and abs(net) > t_period / 2
        backwards = net < 0 if wraps else points[1, 0] < points[0, 0]
        if backwards:
            order = np.concatenate([[0], np.arange(len(points) - 1, 0, -1)])
            points, residuals = _unwrap(points[order], periods), residuals[order]
    elif points[-1, 0] < points[0, 0]:
        points, residuals = points[::-1].copy(), residuals[::-1].copy()
    for col, period in enumerate(periods):
        if period is not None:
            points[:, col] -= np.floor((points[0, col] - origins[col]) / period) * period
    return points, residuals


def _trace(residual: _Residual, grid_n: int, tol: float) -> list[PairBranch]:
    curve, other = residual.curve, residual.other
    two_arc = other is not curve
    if grid_n < 8:
        raise InputError(f"grid_n must be at least 8, got {grid_n}")
    grid = _grid(curve, other if two_arc else None, grid_n)
    values, nu1_mag = residual.grid(grid.t, grid.s)
    if not two_arc:
        values = np.where(_band_mask(grid, curve.span), np.nan, values)

    finite = np.isfinite(values)
    if residual.alpha is not None and finite.any():
        reference = max(float(nu1_mag[finite].max()), 1e-300)
        fraction = float(np.mean(np.abs(values[finite]) <= DEGENERATE_TOL * reference))
        if fraction > DEGENERATE_FRACTION:
            raise DegenerateResidual(curve.label, fraction)

    crossings, segments = _march(values, grid.periodic)
    periods = (curve.period, other.period) if grid.periodic else (None, None)
    origins = (curve.domain[0], other.domain[0])
    branches = []
    for keys, closed in _link(segments):
        points, residuals = _refine_chain(residual, keys, crossings, grid, tol)
        if len(points) < MIN_BRANCH_POINTS:
            continue
        points, residuals = _orient(points, residuals, closed, periods, origins)
        branches.append(PairBranch(residual.kind, points, closed, residuals))
    branches.sort(key=lambda b: (float(b.points[0, 0]), float(b.points[0, 1])))
    logger.debug("[%s] traced %d %s branches on a %d grid", curve.label, len(branches), residual.kind, grid_n)
    return branches


def trace_locus(
    curve: ParamCurve,
    alpha: AlphaParam | float,
    grid_n: int,
    other: ParamCurve | None = None,
    tol_refine: float = 1e-10,
) -> list[PairBranch]:
    """
    Trace the pairing locus G = 0.

    Raises:
        NoBranchFound: if no sign change of G survives the exclusions
        DegenerateResidual: if G vanishes on more than a quarter of the grid
    """
    if other is None and not curve.closed:
        raise InputError(f"[{curve.label}] tracing a single curve requires a closed curve")
    residual = _Residual(curve, other, as_alpha(alpha))
    branches = _trace(residual, grid_n, tol_refine)
    if not branches:
        raise NoBranchFound(curve.label, "transversal")
    return branches


def parallel_pairs(
    curve: ParamCurve,
    grid_n: int,
    other: ParamCurve | None = None,
    tol_refine: float = 1e-10,
) -> list[PairBranch]:
    """
    Trace the parallel-tangent locus P = 0 away from the diagonal.

    Raises:
        NoBranchFound: if no parallel pair exists
    """
    if other is None and not curve.closed:
        raise InputError(f"[{curve.label}] tracing a single curve requires a closed curve")
    branches = _trace(_Residual(curve, other, None), grid_n, tol_refine)
    if not branches:
        raise NoBranchFound(curve.label, "parallel")
    return branches


def follow_branch(
    curve: ParamCurve,
    alpha: AlphaParam | float | None,
    t_values: np.ndarray,
    s_seed: float,
    other: ParamCurve | None = None,
    tol: float = 1e-10,
) -> PairBranch:
    """
    Natural-parameter continuation of a locus along t.

    A secant predictor extrapolates s from the last two solutions and Newton's
    method corrects it. Stops early (keeping what it has) when the corrector fails.
    """
    t_values = np.asarray(t_values, dtype=float)
    points: list[tuple[float, float]] = []
    s_prev = s_prev2 = None
    for k, t in enumerate(t_values):
        if s_prev is None:
            guess = s_seed
        elif s_prev2 is None:
            guess = s_prev
        else:
            guess = s_prev + (s_prev - s_prev2) * (t - t_values[k - 1]) / (t_values[k - 1] - t_values[k - 2])
        try:
            s = solve_partner(curve, t, guess, alpha, other, tol)
        except RefinementFailed as e:
            logger.debug("continuation stopped: %s", e)
            break
        points.append((float(t), s))
        s_prev2, s_prev = s_prev, s
    kind = "parallel" if alpha is None else "transversal"
    pts = np.array(points) if points else np.empty((0, 2))
    residual = _Residual(curve, other, None if alpha is None else as_alpha(alpha))
    residuals = residual.at(pts[:, 0], pts[:, 1])[0] if len(pts) else np.empty(0)
    return PairBranch(kind, pts, False, residuals)
