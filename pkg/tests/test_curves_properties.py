"""
Property-based tests for curve models.

Property 1: 曲线导数一致性
Property 2: 仿射像的导数
Property 3: 曲线参数校验
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st, settings, assume

from intermediate_lines.curves import (
    AffineMap,
    CurveError,
    CurveParameterError,
    ParameterOutOfDomainError,
    SampledCurve,
    SingularMapError,
    TransformedCurve,
    TrigCurve,
    UnknownCurveError,
    bean,
    builtin_curve,
    circle,
    curve_from_spec,
    curve_scale,
    ellipse,
    eval_jet,
    monge_arc,
    parabola_arc,
    poly_graph,
    sample,
    transform,
)
from intermediate_lines.errors import InputError

params_on_bean = st.floats(min_value=0.0, max_value=2.0, allow_nan=False, allow_infinity=False)
small_entries = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


class TestAnalyticJets:
    """
    Property 1: 曲线导数一致性

    Exact jets of the analytic curves agree with finite differences of the
    positions, and closed curves repeat across the period.
    """

    @settings(max_examples=50)
    @given(t=params_on_bean)
    def test_bean_first_derivative_matches_difference_quotient(self, t: float):
        curve = bean()
        h = 1e-6
        numeric = (curve.position(t + h) - curve.position(t - h)) / (2 * h)
        assert np.allclose(curve.jet(t).d1, numeric, atol=1e-6)

    @settings(max_examples=50)
    @given(r=st.floats(min_value=0.1, max_value=10.0), t=st.floats(min_value=0.0, max_value=6.3))
    def test_circle_bracket_curvature_is_r_squared(self, r: float, t: float):
        jet = circle([r]).jet(t)
        assert abs(np.hypot(*jet.x) - r) < 1e-12 * max(1.0, r)
        assert abs(jet.kappa - r ** 2) < 1e-10 * r ** 2

    def test_builtin_closed_curves_are_periodic(self):
        for curve in (circle(), ellipse([2.0, 1.0]), bean()):
            assert curve.closed
            assert curve.check_periodicity() == []

    @settings(max_examples=50)
    @given(t=params_on_bean, k=st.integers(min_value=-3, max_value=3))
    def test_closed_curve_reduces_parameters_modulo_period(self, t: float, k: int):
        curve = bean()
        assert np.allclose(curve.position(t + k * curve.span), curve.position(t), atol=1e-9)

    def test_bean_is_convex(self):
        curve = bean()
        kappas = [curve.jet(t).kappa for t in curve.sample_parameters(400)]
        assert min(kappas) > 0

    @settings(max_examples=50)
    @given(
        a2=st.floats(min_value=0.5, max_value=3.0),
        a3=small_entries,
        a4=small_entries,
    )
    def test_monge_arc_coefficients_are_derivatives_at_origin(self, a2: float, a3: float, a4: float):
        jet = monge_arc([a2, a3, a4]).jet(0.0)
        assert np.allclose(jet.x, [0.0, 0.0])
        assert np.allclose(jet.d1, [1.0, 0.0])
        assert np.allclose(jet.d2, [0.0, a2])
        assert np.allclose(jet.d3, [0.0, a3])
        assert np.allclose(jet.d4, [0.0, a4])


class TestSampledCurve:
    """Property 1: 曲线导数一致性 (sampled curves)"""

    def test_sampled_circle_matches_analytic_jets(self):
        reference = circle()
        ts = np.linspace(0.0, 2 * np.pi, 400, endpoint=False)
        samples = np.column_stack([ts, reference.positions(ts)])
        curve = SampledCurve(samples, closed=True)
        assert curve.estimated
        for t in (0.3, 1.7, 4.0, 6.1):
            jet, exact = curve.jet(t), reference.jet(t)
            assert np.allclose(jet.x, exact.x, atol=1e-8)
            assert np.allclose(jet.d1, exact.d1, atol=1e-6)
            assert np.allclose(jet.d2, exact.d2, atol=1e-4)
            assert jet.estimated

    def test_too_few_samples_rejected(self):
        samples = np.column_stack([np.arange(5.0), np.arange(5.0), np.zeros(5)])
        with pytest.raises(CurveParameterError):
            SampledCurve(samples, closed=False)

    def test_non_increasing_parameters_rejected(self):
        ts = np.array([0.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
        samples = np.column_stack([ts, np.cos(ts), np.sin(ts)])
        with pytest.raises(CurveParameterError):
            SampledCurve(samples, closed=False)

    def test_closed_curve_must_be_periodic(self):
        terms_x, terms_y = [(1.0, 1.0, 0.0)], [(1.0, 1.0, -np.pi / 2)]
        assert TrigCurve(terms_x, terms_y, (0.0, 2 * np.pi), True, "unit").check_periodicity() == []
        with pytest.raises(CurveParameterError):
            TrigCurve(terms_x, terms_y, (0.0, 3.0), True, "short")
        assert TrigCurve(terms_x, terms_y, (0.0, 3.0), False, "arc").closed is False


class TestAffineImages:
    """
    Property 2: 仿射像的导数

    A TransformedCurve maps positions by A x + b and derivatives by A.
    """

    @settings(max_examples=50)
    @given(a=small_entries, b=small_entries, c=small_entries, d=small_entries,
           e=small_entries, f=small_entries, t=params_on_bean)
    def test_transformed_jets(self, a, b, c, d, e, f, t):
        assume(abs(a * d - b * c) > 0.1)
        A = np.array([[a, b], [c, d]])
        curve = TransformedCurve(bean(), AffineMap(A, [e, f]))
        base, image = bean().jet(t), curve.jet(t)
        assert np.allclose(image.x, A @ base.x + [e, f], atol=1e-12)
        assert np.allclose(image.d2, A @ base.d2, atol=1e-10)
        assert abs(image.kappa - (a * d - b * c) * base.kappa) < 1e-8 * max(1.0, abs(base.kappa))

    def test_singular_map_rejected(self):
        with pytest.raises(SingularMapError):
            AffineMap(np.array([[1.0, 2.0], [2.0, 4.0]]), np.zeros(2))

    def test_inverse_round_trip(self):
        affine = AffineMap(np.array([[2.0, 1.0], [0.5, 1.5]]), np.array([0.3, -1.0]))
        point = np.array([0.7, -0.2])
        assert np.allclose(affine.inverse().apply(affine.apply(point)), point)

    def test_transform_spec(self):
        curve = curve_from_spec({"name": "circle", "transform": {"linear": [[2, 0], [0, 1]], "translation": [1, 0]}})
        assert curve.label == "circle_affine"
        assert np.allclose(curve.position(0.0), [3.0, 0.0])


class TestCurveValidation:
    """
    Property 3: 曲线参数校验

    Bad names and parameters raise CurveError (an InputError, exit code 2).
    """

    def test_unknown_curve(self):
        with pytest.raises(UnknownCurveError) as info:
            builtin_curve("trefoil")
        assert isinstance(info.value, InputError)
        assert "bean" in str(info.value)

    def test_bad_parameters(self):
        with pytest.raises(CurveParameterError):
            circle([-1.0])
        with pytest.raises(CurveParameterError):
            ellipse([2.0, 0.0])
        with pytest.raises(CurveParameterError):
            parabola_arc([0.0])
        with pytest.raises(CurveParameterError):
            circle([1.0, 2.0])

    def test_open_arc_domain_enforced(self):
        arc = parabola_arc()
        with pytest.raises(ParameterOutOfDomainError):
            arc.jet(1.5)

    def test_spec_without_name_or_samples(self):
        with pytest.raises(CurveError):
            curve_from_spec({"params": [1.0]})

    def test_bad_transform_spec(self):
        with pytest.raises(CurveError):
            curve_from_spec({"name": "circle", "transform": {"translation": [1, 0]}})


class TestCurveHelpers:
    def test_sample_closed_curve(self):
        ts, points = sample(circle(), 8)
        assert len(ts) == 8
        assert ts[-1] < 2 * np.pi
        assert np.allclose(np.hypot(points[:, 0], points[:, 1]), 1.0)

    def test_curve_scale_is_bounding_box_diagonal(self):
        assert abs(curve_scale(ellipse([2.0, 1.0])) - np.hypot(4.0, 2.0)) < 1e-3
        assert curve_scale(bean()) == bean().scale

    @settings(max_examples=50)
    @given(c0=small_entries, c1=small_entries, c2=small_entries, c3=small_entries,
           t=st.floats(min_value=-1.0, max_value=1.0))
    def test_poly_graph_raw_coefficients(self, c0, c1, c2, c3, t):
        jet = eval_jet(poly_graph([c0, c1, c2, c3]), t)
        assert np.allclose(jet.x, [t, c0 + c1 * t + c2 * t ** 2 + c3 * t ** 3], atol=1e-12)
        assert np.allclose(jet.d2, [0.0, 2 * c2 + 6 * c3 * t], atol=1e-12)
        assert np.allclose(jet.d4, [0.0, 0.0])

    def test_transform_helper(self):
        curve = transform(circle(), AffineMap(np.diag([3.0, 1.0]), np.zeros(2)))
        assert np.allclose(curve.position(0.0), [3.0, 0.0])
        assert curve.closed
