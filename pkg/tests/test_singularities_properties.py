"""
Property-based tests for singularity classification.

Property 15: 非平行点对的 AEIL 奇点判定
Property 16: 平行点对的 IPTL 奇点判定
Property 17: 通用性判据一致
Property 18: 数值尖点扫描与解析分类一致
Property 19: 直线族的 A_k 类型
Property 20: α 扫描
Property 31: α 扫描的仿射不变性
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st, settings, assume

from intermediate_lines.curves import AffineMap, TransformedCurve, circle, parabola_arc
from intermediate_lines.envelope import EnvelopeOptions, build_envelope
from intermediate_lines.errors import InputError
from intermediate_lines.event_tracker import GapTracker
from intermediate_lines.models import (
    CuspMarker,
    EnvelopeBranch,
    EnvelopePoint,
    MongeJetPair,
    SingularityClass,
    Tag,
)
from intermediate_lines.singularities import (
    InsufficientResolution,
    MongeInvariantError,
    PreconditionViolated,
    _bisect,
    a2_jets,
    alpha_sweep,
    classify_nonparallel,
    classify_parallel,
    classify_parallel_inflection,
    cusp_inventory,
    default_alpha_grid,
    disjointness_report,
    family_type,
    monge_arcs,
    nonparallel_b3_critical,
    numeric_cusp_scan,
    parallel_chart,
    parallel_thresholds,
    realize_iptl,
    scan_branches,
    sweep_report,
    versality_check,
    versality_report,
)

alphas = st.floats(min_value=0.2, max_value=0.8, allow_nan=False, allow_infinity=False)
b0s = st.floats(min_value=0.5, max_value=2.0, allow_nan=False, allow_infinity=False)
signs = st.sampled_from([-1.0, 1.0])
magnitude = st.floats(min_value=0.5, max_value=1.0, allow_nan=False, allow_infinity=False)


def _nonparallel_pair(alpha, b0, b1, a3, b3_offset=0.0):
    m = MongeJetPair(a3=a3, b0=b0, b1=b1, b2=(alpha - 1) / (2 * alpha), alpha=alpha)
    m.b3 = nonparallel_b3_critical(m) + b3_offset
    return m


def _branch(xy: np.ndarray, u: np.ndarray, tag: Tag = Tag.AEIL) -> EnvelopeBranch:
    points = [EnvelopePoint(np.asarray(p, dtype=float), (float(v), float(v)), 0.6, tag, 0.0) for p, v in zip(xy, u)]
    return EnvelopeBranch(tag, points)


class TestNonparallelClassifier:
    """
    Property 15: 非平行点对的 AEIL 奇点判定

    With b2 = (alpha - 1) / (2 alpha) the AEIL is regular off b3 = b3_critical,
    an ordinary cusp on it, and degenerate when alpha = b0 / b1^2.
    """

    @settings(max_examples=100)
    @given(alpha=alphas, b0=b0s, b1=st.floats(min_value=1.5, max_value=3.0), sign=signs,
           a3=st.floats(min_value=0.1, max_value=2.0), offset=magnitude)
    def test_threshold(self, alpha, b0, b1, sign, a3, offset):
        b1 *= sign
        assume(abs(alpha - b0 / b1 ** 2) > 1e-3)
        m = _nonparallel_pair(alpha, b0, b1, a3)
        assume(np.isfinite(m.b3) and abs(m.b3) < 1e6)

        cusp = classify_nonparallel(m)
        assert cusp.klass is SingularityClass.ORDINARY_CUSP
        assert abs(cusp.witness["B00"]) < 1e-9 * b0 ** 3
        assert cusp.warnings == []

        m.b3 += offset
        regular = classify_nonparallel(m)
        assert regular.klass is SingularityClass.REGULAR
        assert abs(regular.witness["b3_gap"] - offset) < 1e-9 * max(1.0, abs(m.b3))

    @settings(max_examples=50)
    @given(alpha=alphas, b1=st.floats(min_value=1.5, max_value=3.0), a3=st.floats(min_value=0.1, max_value=2.0))
    def test_degenerate_when_alpha_is_b0_over_b1_squared(self, alpha, b1, a3):
        m = MongeJetPair(a3=a3, b0=alpha * b1 ** 2, b1=b1, b2=(alpha - 1) / (2 * alpha), b3=0.3, alpha=alpha)
        assert classify_nonparallel(m).klass is SingularityClass.DEGENERATE

    def test_no_local_branch(self):
        m = MongeJetPair(a3=0.3, b0=1.0, b1=2.0, b2=0.7, alpha=0.6)
        with pytest.raises(PreconditionViolated) as info:
            classify_nonparallel(m)
        assert "B00" in info.value.witness

    def test_parallel_tangents_rejected(self):
        with pytest.raises(PreconditionViolated):
            classify_nonparallel(MongeJetPair(a3=0.3, b0=1.0, b1=0.0, alpha=0.6))

    def test_invalid_pair(self):
        with pytest.raises(MongeInvariantError) as info:
            classify_nonparallel(MongeJetPair(a3=0.3, b0=-1.0, b1=2.0, alpha=0.6))
        assert isinstance(info.value, InputError)
        with pytest.raises(MongeInvariantError):
            classify_nonparallel(MongeJetPair(a3=0.3, b0=1.0, b1=2.0, alpha=1.5))

    def test_soft_warnings_reported(self):
        m = _nonparallel_pair(0.6, 1.0, 0.8, -0.2)
        verdict = classify_nonparallel(m)
        assert len(verdict.warnings) == 2

    def test_inflectional_p1(self):
        m = MongeJetPair(a3=0.5, b0=1.0, b1=2.0, b2=0.0, b3=0.4, alpha=0.6, p1_inflection=True)
        assert classify_nonparallel(m).klass is SingularityClass.REGULAR
        m.b3 = 0.0
        assert classify_nonparallel(m).klass is SingularityClass.DEGENERATE
        m.b2 = 0.4
        with pytest.raises(PreconditionViolated):
            classify_nonparallel(m)


class TestParallelClassifier:
    """
    Property 16: 平行点对的 IPTL 奇点判定

    With r = alpha / (alpha - 1) the IPTL is singular iff b2 = r / 2; then
    b3 = r^2 a3 separates ordinary from (3,4)-cusps and b4 = r^3 a4 the
    (3,4)-cusps from worse.
    """

    @settings(max_examples=100)
    @given(alpha=alphas, a3=st.floats(min_value=0.1, max_value=2.0), a4=st.floats(min_value=-1.0, max_value=1.0),
           b0=b0s, q=magnitude, sign=signs)
    def test_cascade(self, alpha, a3, a4, b0, q, sign):
        critical = parallel_thresholds(alpha, a3, a4)
        r = alpha / (alpha - 1)
        assert critical["b2_critical"] == r / 2

        m = MongeJetPair(a3=a3, a4=a4, b0=b0, b2=critical["b2_critical"] + sign * q, alpha=alpha)
        assert classify_parallel(m).klass is SingularityClass.REGULAR

        m.b2 = critical["b2_critical"]
        m.b3 = critical["b3_critical"] + sign * q
        assert classify_parallel(m).klass is SingularityClass.ORDINARY_CUSP

        m.b3 = critical["b3_critical"]
        m.b4 = critical["b4_critical"] + sign * q
        assert classify_parallel(m).klass is SingularityClass.CUSP34

        m.b4 = critical["b4_critical"]
        assert classify_parallel(m).klass is SingularityClass.DEGENERATE

    @settings(max_examples=50)
    @given(alpha=alphas, a3=st.floats(min_value=0.1, max_value=2.0))
    def test_witness_changes_sign_across_threshold(self, alpha, a3):
        b2 = parallel_thresholds(alpha, a3, 0.0)["b2_critical"]
        below = classify_parallel(MongeJetPair(a3=a3, b2=b2 - 1e-3, alpha=alpha))
        above = classify_parallel(MongeJetPair(a3=a3, b2=b2 + 1e-3, alpha=alpha))
        assert below.klass is above.klass is SingularityClass.REGULAR
        assert below.witness["q2"] < 0 < above.witness["q2"]

    def test_preconditions(self):
        with pytest.raises(PreconditionViolated):
            classify_parallel(MongeJetPair(a3=0.3, b1=0.5, alpha=0.6))
        with pytest.raises(PreconditionViolated):
            classify_parallel(MongeJetPair(a3=0.3, alpha=0.6, p1_inflection=True))


class TestParallelInflection:
    """Property 16: 平行点对的 IPTL 奇点判定 (p1 inflectional)"""

    def test_cubic_inflection(self):
        verdict = classify_parallel_inflection(MongeJetPair(a3=0.4, b2=0.7, alpha=0.3, p1_inflection=True))
        assert verdict.klass is SingularityClass.REGULAR
        assert verdict.inflection_order == 1
        assert abs(verdict.witness["through_y"] - 0.3) < 1e-15
        assert abs(verdict.witness["cubic"] - 0.4 * 0.7) < 1e-15

    def test_quintic_inflection(self):
        verdict = classify_parallel_inflection(MongeJetPair(a5=0.8, b2=0.7, alpha=0.3, p1_inflection=True))
        assert verdict.inflection_order == 2
        assert verdict.to_dict()["inflection_order"] == 2

    def test_both_points_inflectional(self):
        verdict = classify_parallel_inflection(MongeJetPair(a3=0.4, b3=0.5, alpha=0.3, p1_inflection=True))
        assert verdict.klass is SingularityClass.REGULAR
        assert {"h1_jet", "h2_jet"} <= set(verdict.witness)
        assert verdict.inflection_order == 1

    def test_requires_inflection(self):
        with pytest.raises(PreconditionViolated):
            classify_parallel_inflection(MongeJetPair(a3=0.4, b2=0.7, alpha=0.3))


class TestVersality:
    """
    Property 17: 通用性判据一致

    At A2 points the rank test on (m11, m12) agrees with the closed form
    a3 != -(5 alpha - 1) / (6 alpha^2 b1).
    """

    @settings(max_examples=100)
    @given(alpha=st.floats(min_value=0.15, max_value=0.85), b0=b0s, b1=st.floats(min_value=0.5, max_value=3.0),
           sign=signs, critical=st.booleans(), offset=st.floats(min_value=0.05, max_value=1.0), side=signs)
    def test_rank_matches_closed_form(self, alpha, b0, b1, sign, critical, offset, side):
        b1 *= sign
        a3_critical = -(5 * alpha - 1) / (6 * alpha ** 2 * b1)
        a3 = a3_critical if critical else a3_critical + side * offset
        assume(abs(alpha - b0 / b1 ** 2) > 1e-3)
        assume(abs(3 * alpha * a3 * b1 + alpha + 1) > 0.1)
        m = a2_jets(alpha, b0, b1, a3)
        assume(np.isfinite(m.b3) and abs(m.b3) < 1e6)
        assume(classify_nonparallel(m).klass is SingularityClass.ORDINARY_CUSP)

        report = versality_report(m)
        assert report["rank_versal"] == report["closed_form_versal"]
        assert versality_check(m) is (not critical)
        assert report["rank"] == (0 if critical else 1)

    def test_alpha_two_tenths(self):
        m = a2_jets(0.2, 1.0, 2.0, 0.5)
        assert versality_check(m) is True
        assert abs(versality_report(m)["a3_critical"]) < 1e-15

    def test_not_an_a2_point(self):
        m = _nonparallel_pair(0.6, 1.0, 2.0, 0.3, b3_offset=0.5)
        with pytest.raises(PreconditionViolated):
            versality_check(m)


class TestNumericScan:
    """
    Property 18: 数值尖点扫描与解析分类一致

    Sampling the IPTL of a realised parallel jet pair near the origin and
    scanning it reproduces the analytic verdict.
    """

    HALF_WIDTH = 0.02

    @staticmethod
    def _parallel_pair(case, alpha, a3, a4, b0, b3, b4, q, sign):
        critical = parallel_thresholds(alpha, a3, a4)
        m = MongeJetPair(a3=a3, a4=a4, b0=b0, b2=critical["b2_critical"], b3=b3, b4=b4, alpha=alpha)
        if case == "regular":
            m.b2 += sign * q
        elif case == "ordinary":
            m.b3 = critical["b3_critical"] + sign * q
        else:
            m.b3 = critical["b3_critical"]
            m.b4 = critical["b4_critical"] + sign * q
        return m

    @settings(max_examples=30, deadline=None)
    @given(case=st.sampled_from(["regular", "ordinary", "cusp34"]),
           alpha=st.floats(min_value=0.2, max_value=0.7),
           a3=st.floats(min_value=0.1, max_value=0.3), a4=st.floats(min_value=-0.3, max_value=0.3),
           b0=b0s, b3=st.floats(min_value=-0.3, max_value=0.3), b4=st.floats(min_value=-0.3, max_value=0.3),
           q=magnitude, sign=signs)
    def test_scan_agrees_with_classifier(self, case, alpha, a3, a4, b0, b3, b4, q, sign):
        m = self._parallel_pair(case, alpha, a3, a4, b0, b3, b4, q, sign)
        expected = classify_parallel(m).klass
        branch = realize_iptl(m, self.HALF_WIDTH, 81)
        centre = int(np.argmin(np.abs(branch.sources()[:, 1])))
        markers = [mk for mk in numeric_cusp_scan(branch) if abs(mk.index - centre) <= 3]
        if expected is SingularityClass.REGULAR:
            assert markers == []
        else:
            assert len(markers) == 1
            assert markers[0].klass is expected

    def test_iptl_passes_through_midpoint(self):
        m = MongeJetPair(a3=0.2, b0=1.5, b2=0.8, alpha=0.4)
        branch = realize_iptl(m)
        centre = int(np.argmin(np.abs(branch.sources()[:, 1])))
        assert np.allclose(branch.xy()[centre], [0.0, 0.4 * 1.5], atol=1e-12)

    def test_semicubical_parabola(self):
        u = np.linspace(-0.4, 0.4, 81)
        markers = numeric_cusp_scan(_branch(np.column_stack([u ** 2, u ** 3]), u))
        assert len(markers) == 1
        assert markers[0].klass is SingularityClass.ORDINARY_CUSP
        assert abs(markers[0].index - 40) <= 1
        assert np.allclose(markers[0].point, [0.0, 0.0], atol=1e-6)

    def test_three_four_cusp(self):
        u = np.linspace(-0.4, 0.4, 81)
        markers = numeric_cusp_scan(_branch(np.column_stack([u ** 3, u ** 4]), u))
        assert [m.klass for m in markers] == [SingularityClass.CUSP34]

    def test_straight_branch_has_no_cusps(self):
        u = np.linspace(-0.4, 0.4, 81)
        assert numeric_cusp_scan(_branch(np.column_stack([u, 2 * u]), u)) == []

    def test_cusp_at_the_end(self):
        u = np.linspace(-0.02, 0.78, 81)
        branch = _branch(np.column_stack([u ** 2, u ** 3]), u)
        with pytest.raises(InsufficientResolution):
            numeric_cusp_scan(branch, strict=True)
        tracker = GapTracker()
        assert numeric_cusp_scan(branch, tracker=tracker, alpha=0.6) == []
        events = tracker.get_stats().events
        assert [e.kind for e in events] == ["insufficient_resolution"]
        assert events[0].alpha == 0.6

    def test_regular_speed_dip_is_not_a_cusp(self):
        # the speed drops to 0.002 at u = 0 but never stalls
        u = np.linspace(-0.4, 0.4, 81)
        branch = _branch(np.column_stack([u ** 3 + 0.002 * u, u ** 2]), u)
        assert numeric_cusp_scan(branch) == []

    def test_unresolved_candidate_keeps_other_cusps(self):
        # X' = u (u - c) (1, u): ordinary cusps at u = 0 and at u = c next to the end
        c = 0.76
        u = np.linspace(-0.4, 0.78, 119)
        xy = np.column_stack([u ** 3 / 3 - c * u ** 2 / 2, u ** 4 / 4 - c * u ** 3 / 3])
        tracker = GapTracker()
        markers = numeric_cusp_scan(_branch(xy, u), tracker=tracker)
        assert [m.klass for m in markers] == [SingularityClass.ORDINARY_CUSP]
        assert abs(markers[0].index - 40) <= 1
        events = tracker.get_stats().events
        assert len(events) == 1
        assert "index 116" in events[0].message

    def test_closed_branch_wraps_around(self):
        theta = 2 * np.pi * np.arange(120) / 120
        deltoid = np.column_stack([2 * np.cos(theta) + np.cos(2 * theta), 2 * np.sin(theta) - np.sin(2 * theta)])
        branch = _branch(deltoid, theta)
        branch.closed = True
        markers = numeric_cusp_scan(branch, strict=True)
        assert [m.index for m in markers] == [0, 40, 80]
        assert all(m.klass is SingularityClass.ORDINARY_CUSP for m in markers)
        assert np.allclose(markers[0].point, [3.0, 0.0], atol=1e-3)

    def test_open_branch_misses_the_seam_cusp(self):
        theta = 2 * np.pi * np.arange(120) / 120
        deltoid = np.column_stack([2 * np.cos(theta) + np.cos(2 * theta), 2 * np.sin(theta) - np.sin(2 * theta)])
        assert [m.index for m in numeric_cusp_scan(_branch(deltoid, theta))] == [40, 80]

    def test_scan_branches_and_inventory(self):
        u = np.linspace(-0.4, 0.4, 81)
        cusp = _branch(np.column_stack([u ** 2, u ** 3]), u)
        v = np.linspace(-0.02, 0.78, 81)
        edge = _branch(np.column_stack([v ** 2, v ** 3]), v, Tag.IPTL)
        ctl = _branch(np.column_stack([u, u]), u, Tag.CTL)
        scan_branches([cusp, edge, ctl])
        inventory = cusp_inventory([cusp, edge, ctl])
        assert inventory["AEIL"]["count"] == 1
        assert inventory["IPTL"]["count"] == 0
        assert "CTL" not in inventory
        assert all(isinstance(m, CuspMarker) for m in cusp.cusp_markers)


class TestFamilyType:
    """
    Property 19: 直线族的 A_k 类型

    Along the parallel chart the distance function f(t) = F(X0, t, s(t)) has
    an A1, A2 or A3 singularity at a regular IPTL point, an ordinary cusp and
    a (3,4)-cusp respectively.
    """

    STEP = 5e-3

    def _type(self, m):
        p1, p2 = monge_arcs(m)
        return family_type(p1, np.array([0.0, m.alpha * m.b0]), m.alpha, 0.0, parallel_chart(m), p2, step=self.STEP)

    @pytest.mark.parametrize("alpha", [0.3, 0.6])
    def test_regular_point(self, alpha):
        b2 = parallel_thresholds(alpha, 0.2, 0.1)["b2_critical"] - 0.6
        m = MongeJetPair(a3=0.2, a4=0.1, b0=1.0, b2=b2, b3=0.1, alpha=alpha)
        assert classify_parallel(m).klass is SingularityClass.REGULAR
        assert self._type(m) == "A1"

    @pytest.mark.parametrize("alpha", [0.3, 0.6])
    def test_ordinary_cusp(self, alpha):
        critical = parallel_thresholds(alpha, 0.2, 0.1)
        m = MongeJetPair(a3=0.2, a4=0.1, b0=1.0, b2=critical["b2_critical"],
                         b3=critical["b3_critical"] + 0.6, b4=0.1, alpha=alpha)
        assert classify_parallel(m).klass is SingularityClass.ORDINARY_CUSP
        assert self._type(m) == "A2"

    @pytest.mark.parametrize("alpha", [0.3, 0.6])
    def test_three_four_cusp(self, alpha):
        critical = parallel_thresholds(alpha, 0.2, 0.1)
        m = MongeJetPair(a3=0.2, a4=0.1, b0=1.0, b2=critical["b2_critical"],
                         b3=critical["b3_critical"], b4=critical["b4_critical"] + 0.6, alpha=alpha)
        assert classify_parallel(m).klass is SingularityClass.CUSP34
        assert self._type(m) == "A3"

    def test_point_off_envelope(self):
        m = MongeJetPair(a3=0.2, b0=1.0, b2=-0.8, alpha=0.4)
        p1, p2 = monge_arcs(m)
        with pytest.raises(PreconditionViolated):
            family_type(p1, np.array([0.13, 0.47]), 0.4, 0.0, parallel_chart(m), p2, step=self.STEP)


class TestAlphaSweep:
    """
    Property 20: α 扫描

    The circle has no cusps at any alpha; transitions are bisected to the
    requested tolerance and reported in alpha order.
    """

    def test_default_grid(self):
        grid = default_alpha_grid()
        assert len(grid) == 98
        assert 0.5 not in grid
        assert grid == sorted(grid)
        assert all(0.0 < a < 1.0 for a in grid)

    def test_circle_has_no_events(self):
        options = EnvelopeOptions(grid_n=64, samples=64)
        result = sweep_report(circle(), [0.2, 0.35, 0.65, 0.8], options)
        assert result.events == []
        assert len(result.inventory) == 8
        assert all(entry["count"] == 0 for entry in result.inventory)
        assert alpha_sweep(circle(), [0.3, 0.7], options) == []

    def test_circle_components_never_meet(self):
        branches = build_envelope(circle(), 0.3, EnvelopeOptions(grid_n=64, samples=64))
        assert disjointness_report(branches, 0.3) == float("inf")

    def test_open_curve_rejected(self):
        with pytest.raises(InputError):
            alpha_sweep(parabola_arc(), [0.3])

    def test_bisection(self):
        def inventory(alpha):
            count = 2 if alpha >= 0.3 else 0
            return {"AEIL": {"count": count, "locations": [[0.1, 0.9]] * count},
                    "IPTL": {"count": 0, "locations": []}}

        event = _bisect(inventory, "AEIL", 0.2, 0.4, inventory(0.2), inventory(0.4), 1e-4)
        assert event.kind == "cusp_birth"
        assert event.tag is Tag.AEIL
        assert abs(event.alpha_star - 0.3) < 1e-4
        assert event.location == (0.1, 0.9)

        def dying(alpha):
            return inventory(1.0 - alpha)

        death = _bisect(dying, "AEIL", 0.6, 0.8, dying(0.6), dying(0.8), 1e-4)
        assert death.kind == "cusp_death"
        assert abs(death.alpha_star - 0.7) < 1e-4

    def test_bisection_skips_half(self):
        seen = []

        def inventory(alpha):
            seen.append(alpha)
            count = 1 if alpha > 0.55 else 0
            return {"AEIL": {"count": count, "locations": [[0.0, 1.0]] * count}}

        _bisect(inventory, "AEIL", 0.4, 0.6, inventory(0.4), inventory(0.6), 1e-3)
        assert all(abs(a - 0.5) > 1e-9 for a in seen)

    def test_bean_sweep_is_deterministic(self, bean_curve):
        options = EnvelopeOptions(grid_n=96, samples=64)
        first = sweep_report(bean_curve, [0.55, 0.6], options, bisect_tol=1e-2)
        second = sweep_report(bean_curve, [0.6, 0.55], options, bisect_tol=1e-2, workers=2)
        assert [e.to_dict() for e in first.events] == [e.to_dict() for e in second.events]
        assert first.inventory == second.inventory


class TestSweepInvariance:
    """
    Property 31: α 扫描的仿射不变性

    Cusps are affine invariants: the cusp inventory and the transition events
    of an affine image of a curve match those of the curve, pair for pair.
    """

    def test_bean_image_has_the_same_cusps(self, bean_curve):
        affine = AffineMap(np.array([[1.5, 0.4], [0.0, 0.8]]), [0.3, -0.2])
        image = TransformedCurve(bean_curve, affine)
        options = EnvelopeOptions(grid_n=96, samples=64, compute_detm=False, oracle=False)
        first = sweep_report(bean_curve, [0.55, 0.6], options, bisect_tol=1e-2)
        second = sweep_report(image, [0.55, 0.6], options, bisect_tol=1e-2)
        assert [e["count"] for e in first.inventory] == [e["count"] for e in second.inventory]
        for one, two in zip(first.inventory, second.inventory):
            for a, b in zip(one["locations"], two["locations"]):
                assert np.allclose(a, b, atol=3e-2)
        assert [(e.kind, e.tag) for e in first.events] == [(e.kind, e.tag) for e in second.events]
        for one, two in zip(first.events, second.events):
            assert abs(one.alpha_star - two.alpha_star) <= 1e-2
