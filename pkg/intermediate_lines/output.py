"""
Output writers: CSV tables, versioned JSON reports and SVG figures.

Numbers are written with 12 significant digits, residuals in scientific
notation. Nothing time- or random-dependent goes into an output file, so
repeated runs on the same configuration produce identical bytes.
"""

import csv
import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Any

import numpy as np

from .curves import ParamCurve
from .models import EnvelopeBranch, PairBranch, Tag

SCHEMA_VERSION = "1"

INVARIANT_COLUMNS = ["t", "x", "y", "kappa", "mu", "xi_x", "xi_y"]
PAIR_COLUMNS = ["branch_id", "kind", "t", "s", "residual"]
ENVELOPE_COLUMNS = ["tag", "branch_id", "t", "s", "alpha", "x", "y", "online_residual", "detM_residual"]

# Tag -> stroke colour (MPTL red, AESS blue, affine evolute green at alpha = 1/2)
TAG_COLOURS = {
    Tag.AEIL: "blue",
    Tag.IPTL: "red",
    Tag.CTL: "green",
    Tag.EVOLUTE: "green",
}
CURVE_COLOUR = "black"
SVG_SAMPLES = 512


def fmt(value: float) -> str:
    return f"{float(value):.12g}"


def fmt_residual(value: float) -> str:
    return f"{float(value):.11e}"


def _json_number(value: Any) -> Any:
    """JSON has no NaN or infinity; they are written as strings."""
    if isinstance(value, float | np.floating):
        value = float(value)
        if math.isfinite(value):
            return float(fmt(value))
        return str(value)
    if isinstance(value, dict):
        return {k: _json_number(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_json_number(v) for v in value]
    if isinstance(value, np.ndarray):
        return _json_number(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    return value


# CSV

def write_invariants_csv(path: str | Path, rows: list[dict[str, float]]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(INVARIANT_COLUMNS)
        for row in rows:
            w.writerow([fmt(row[c]) for c in INVARIANT_COLUMNS])
    return path


def write_pairs_csv(path: str | Path, branches: list[PairBranch]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(PAIR_COLUMNS)
        for k, branch in enumerate(branches):
            residuals = branch.residuals if branch.residuals is not None else np.full(len(branch), np.nan)
            for (t, s), r in zip(branch.points, residuals):
                w.writerow([k, branch.kind, fmt(t), fmt(s), fmt_residual(r)])
    return path


def write_envelope_csv(path: str | Path, branches: list[EnvelopeBranch]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(ENVELOPE_COLUMNS)
        for branch in branches:
            for p in branch.points:
                w.writerow([
                    branch.tag.value, branch.branch_id, fmt(p.source[0]), fmt(p.source[1]), fmt(p.alpha),
                    fmt(p.X[0]), fmt(p.X[1]), fmt_residual(p.online_residual), fmt_residual(p.detm_residual),
                ])
    return path


# JSON

def write_json(path: str | Path, payload: dict[str, Any]) -> Path:
    path = Path(path)
    document = {"schema": SCHEMA_VERSION, **_json_number(payload)}
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def branch_summary(branch: EnvelopeBranch) -> dict[str, Any]:
    return {
        "branch_id": branch.branch_id,
        "tag": branch.tag.value,
        "points": len(branch),
        "breaks": list(branch.breaks),
        "closed": branch.closed,
        "oracle_distance": branch.oracle_distance,
        "contacts": [list(c) for c in branch.contacts],
        "cusps": [
            {
                "index": m.index,
                "klass": m.klass.value,
                "point": list(m.point),
                "source": list(m.source),
                "witness": dict(sorted(m.witness.items())),
            }
            for m in branch.cusp_markers
        ],
    }


def envelope_report(curve: ParamCurve, alpha: float, branches: list[EnvelopeBranch],
                    disjointness: float, gaps: dict | None = None) -> dict[str, Any]:
    return {
        "curve": curve.label,
        "alpha": alpha,
        "disjointness": disjointness,
        "branches": [branch_summary(b) for b in branches],
        "gaps": gaps or {},
    }


# SVG

def _viewbox(curve: ParamCurve) -> tuple[float, float, float, float]:
    """Curve bounding box padded by 20% on each side."""
    xy = curve.positions(np.linspace(*curve.domain, SVG_SAMPLES))
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    pad = 0.2 * (hi - lo)
    pad = np.where(pad > 0, pad, 0.2 * max(float(np.hypot(*(hi - lo))), 1.0))
    lo, hi = lo - pad, hi + pad
    return float(lo[0]), float(lo[1]), float(hi[0] - lo[0]), float(hi[1] - lo[1])


def _path_data(points: np.ndarray, closed: bool = False) -> str:
    # y is flipped so that the figure reads in the usual orientation
    coords = [f"{fmt(x)},{fmt(-y)}" for x, y in points]
    data = "M" + " L".join(coords)
    return data + " Z" if closed else data


def render_svg(curve: ParamCurve, branches: list[EnvelopeBranch], alpha: float) -> str:
    """
    Figure of the curve and the envelope branches.

    Colours: curve black, AEIL/AESS blue, IPTL/MPTL red, affine evolute green.
    Cusp markers are drawn as small crosses in the branch colour. Every
    component has one layer group; the AEIL and IPTL layers are always
    present, empty when the component is.
    """
    x0, y0, width, height = _viewbox(curve)
    stroke = 0.003 * math.hypot(width, height)
    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "viewBox": f"{fmt(x0)} {fmt(-(y0 + height))} {fmt(width)} {fmt(height)}",
    })
    ET.SubElement(svg, "title").text = f"{curve.label} alpha={fmt(alpha)}"

    base = curve.positions(curve.sample_parameters(SVG_SAMPLES) if curve.closed
                           else np.linspace(*curve.domain, SVG_SAMPLES))
    ET.SubElement(svg, "path", {
        "d": _path_data(base, curve.closed), "fill": "none",
        "stroke": CURVE_COLOUR, "stroke-width": fmt(stroke), "class": "curve",
    })

    # CTL is the curve itself away from alpha = 1/2
    drawn = [b for b in branches if b.tag is not Tag.CTL or alpha == 0.5]
    tags = [Tag.AEIL, Tag.IPTL] + [t for t in (Tag.CTL, Tag.EVOLUTE) if any(b.tag is t for b in drawn)]
    layers = {tag: ET.SubElement(svg, "g", {"class": tag.value}) for tag in tags}
    for branch in drawn:
        colour = TAG_COLOURS[branch.tag]
        group = ET.SubElement(layers[branch.tag], "g", {"id": f"branch-{branch.branch_id}"})
        whole = branch.closed and not branch.breaks
        for segment in branch.segments():
            if len(segment) < 2:
                continue
            ET.SubElement(group, "path", {
                "d": _path_data(segment, whole), "fill": "none",
                "stroke": colour, "stroke-width": fmt(stroke),
            })
        arm = 4 * stroke
        for marker in branch.cusp_markers:
            x, y = marker.point
            for dx, dy in ((arm, arm), (arm, -arm)):
                ET.SubElement(group, "line", {
                    "x1": fmt(x - dx), "y1": fmt(-(y - dy)), "x2": fmt(x + dx), "y2": fmt(-(y + dy)),
                    "stroke": colour, "stroke-width": fmt(stroke), "class": "cusp",
                })
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"


def write_svg(path: str | Path, curve: ParamCurve, branches: list[EnvelopeBranch], alpha: float) -> Path:
    path = Path(path)
    path.write_text(render_svg(curve, branches, alpha), encoding="utf-8")
    return path
