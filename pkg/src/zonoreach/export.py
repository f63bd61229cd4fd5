"""Report export: JSON (full report), CSV (interval hulls), SVG (2-D projections)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .experiment import ExperimentReport
from .sets import project

FORMATS = ("json", "csv", "svg")

_STYLE = {
    "data-driven": ("#1f77b4", 0.15),
    "model-based": ("#d62728", 0.35),
    "monte-carlo": ("#2ca02c", 0.35),
}


def report_json(report: ExperimentReport) -> str:
    return json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n"


def load_report(path: str | Path) -> ExperimentReport:
    with open(path) as fh:
        return ExperimentReport.from_dict(json.load(fh))


def _hull_2d(points: np.ndarray) -> np.ndarray:
    if len(points) < 3:
        return points
    try:
        h = ConvexHull(points)
    except QhullError:
        # collinear samples: keep the extreme pair
        d = points - points.mean(axis=0)
        axis = np.linalg.svd(d, full_matrices=False)[2][0]
        s = d @ axis
        return points[[int(np.argmin(s)), int(np.argmax(s))]]
    return points[h.vertices]


def step_polygons(report: ExperimentReport, dims: tuple[int, int]) -> list[list[tuple[str, np.ndarray]]]:
    """Per step: (label, vertices) for the data-driven set and its reference."""
    out = []
    samples = report.containment.samples
    for k, Z in enumerate(report.data_driven.sets):
        polys = [("data-driven", project(Z, dims))]
        if report.model_based is not None:
            polys.append(("model-based", project(report.model_based.sets[k], dims)))
        elif k < len(samples) and samples[k]:
            pts = np.asarray(samples[k])[:, list(dims)]
            polys.append(("monte-carlo", _hull_2d(pts)))
        out.append(polys)
    return out


def render_svg(report: ExperimentReport, dims: tuple[int, int] = (0, 1), width: int = 640, height: int = 480) -> str:
    n = report.data_driven.dim
    if len(dims) != 2 or dims[0] == dims[1] or not all(0 <= d < n for d in dims):
        raise ValueError(f"invalid dim pair {dims} for state dimension {n}")
    steps = step_polygons(report, dims)
    allpts = np.vstack([v for polys in steps for _, v in polys])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    pad = 40

    def tx(v: np.ndarray) -> str:
        x = pad + (v[:, 0] - lo[0]) / span[0] * (width - 2 * pad)
        y = height - pad - (v[:, 1] - lo[1]) / span[1] * (height - 2 * pad)
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{pad}" y="20" font-family="sans-serif" font-size="12">'
        f"{report.config.name}: x{dims[0] + 1} vs x{dims[1] + 1}</text>",
    ]
    for k, polys in enumerate(steps):
        lines.append(f'<g id="step-{k}">')
        for label, v in polys:
            color, alpha = _STYLE[label]
            lines.append(
                f'<polygon class="{label}" points="{tx(v)}" fill="{color}" '
                f'fill-opacity="{alpha}" stroke="{color}" stroke-width="1"/>'
            )
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export(
    report: ExperimentReport,
    formats=("json",),
    outdir: str | Path = ".",
    dims: list[tuple[int, int]] | None = None,
) -> list[Path]:
    """Write the requested formats into ``outdir``; returns the written paths."""
    formats = list(dict.fromkeys(formats))
    unknown = [f for f in formats if f not in FORMATS]
    if unknown:
        raise ValueError(f"unknown formats {unknown}; choose from {FORMATS}")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        p = out / "report.json"
        p.write_text(report_json(report))
        written.append(p)
    if "csv" in formats:
        for name, seq in (("data_driven", report.data_driven), ("model_based", report.model_based)):
            if seq is not None:
                p = out / f"{name}_hull.csv"
                p.write_text(seq.to_csv())
                written.append(p)
        p = out / "data.csv"
        p.write_text(report.data.to_csv())
        written.append(p)
    if "svg" in formats:
        for i, j in dims or report.config.plot_dims:
            p = out / f"reach_x{i + 1}_x{j + 1}.svg"
            p.write_text(render_svg(report, (i, j)))
            written.append(p)
    return written
