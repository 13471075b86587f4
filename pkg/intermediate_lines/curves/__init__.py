"""
Plane curve models: analytic built-ins, sampled curves and affine images.
"""

from collections.abc import Callable, Mapping
from typing import Any

import numpy as np

from ..models import CurveJet
from .analytic import PolyGraph, TrigCurve, bean, circle, ellipse, monge_arc, parabola_arc, poly_graph
from .base import (
    CurveError,
    CurveParameterError,
    ParamCurve,
    ParameterOutOfDomainError,
    UnknownCurveError,
)
from .sampled import SampledCurve
from .transform import AffineMap, SingularMapError, TransformedCurve

# Built-in curve name -> factory taking a parameter list
BUILTIN_CURVES: dict[str, Callable[[list[float]], ParamCurve]] = {
    "circle": circle,
    "ellipse": ellipse,
    "bean": bean,
    "parabola_arc": parabola_arc,
    "monge_arc": monge_arc,
}


def builtin_curve(name: str, params: list[float] | None = None) -> ParamCurve:
    """Instantiate a built-in analytic curve by name."""
    if name not in BUILTIN_CURVES:
        raise UnknownCurveError(name, list(BUILTIN_CURVES))
    return BUILTIN_CURVES[name](list(params or []))


def eval_jet(curve: ParamCurve, t: float) -> CurveJet:
    return curve.jet(t)


def transform(curve: ParamCurve, affine: AffineMap) -> ParamCurve:
    return TransformedCurve(curve, affine)


def sample(curve: ParamCurve, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform parameter sampling; closed curves omit the duplicated end point."""
    ts = curve.sample_parameters(n)
    return ts, curve.positions(ts)


def curve_scale(curve: ParamCurve) -> float:
    return curve.scale


def curve_from_spec(spec: Mapping[str, Any]) -> ParamCurve:
    """
    Build a curve from {"name": str, "params": [...]} or
    {"samples": [[t, x, y], ...], "closed": bool}, optionally followed by
    {"transform": {"linear": [[a, b], [c, d]], "translation": [e, f]}}.
    """
    if not isinstance(spec, Mapping):
        raise CurveError("curve specification must be a mapping")
    if "samples" in spec:
        curve: ParamCurve = SampledCurve(np.asarray(spec["samples"], dtype=float), bool(spec.get("closed", False)),
                                         str(spec.get("label", "sampled")))
    elif "name" in spec:
        params = spec.get("params") or []
        if not isinstance(params, list | tuple):
            raise CurveError("curve 'params' must be a list")
        curve = builtin_curve(str(spec["name"]), list(params))
    else:
        raise CurveError("curve specification needs 'name' or 'samples'")
    affine = spec.get("transform")
    if affine:
        try:
            linear = np.asarray(affine["linear"], dtype=float).reshape(2, 2)
            translation = np.asarray(affine.get("translation", [0.0, 0.0]), dtype=float).reshape(2)
        except (KeyError, TypeError, ValueError):
            raise CurveError("curve 'transform' needs a 2x2 'linear' and a 2-vector 'translation'")
        curve = TransformedCurve(curve, AffineMap(linear, translation))
    return curve


__all__ = [
    "BUILTIN_CURVES",
    "AffineMap",
    "CurveError",
    "CurveParameterError",
    "ParamCurve",
    "ParameterOutOfDomainError",
    "PolyGraph",
    "SampledCurve",
    "SingularMapError",
    "TransformedCurve",
    "TrigCurve",
    "UnknownCurveError",
    "builtin_curve",
    "curve_from_spec",
    "curve_scale",
    "eval_jet",
    "monge_arc",
    "poly_graph",
    "sample",
    "transform",
]
