"""Trace/sample CSV files and the SVG trace plot."""
from __future__ import annotations

import csv
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .anneal import TraceRecord


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def trace_header(dim: int) -> list[str]:
    return (
        ["iter"]
        + [f"theta_{i}" for i in range(dim)]
        + ["temperature"]
        + [f"delta_{i}" for i in range(dim)]
        + ["accept_rate"]
        + [f"aux_stat_{i}" for i in range(dim)]
    )


def write_trace_csv(trace: list[TraceRecord], path) -> None:
    dim = len(trace[0].theta) if trace else 2
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(dim))
        for rec in trace:
            w.writerow(
                [str(rec.iteration)]
                + [fmt(v) for v in rec.theta]
                + [fmt(rec.temperature)]
                + [fmt(v) for v in rec.delta]
                + [fmt(rec.accept_rate)]
                + [fmt(v) for v in rec.aux_stats]
            )


def read_trace_csv(path) -> list[TraceRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        dim = sum(1 for h in header if h.startswith("theta_"))
        if header != trace_header(dim):
            raise ValueError(f"{path}: not a trace file (header {header})")
        out = []
        for row in reader:
            vals = [float(v) for v in row[1:]]
            out.append(
                TraceRecord(
                    iteration=int(row[0]),
                    theta=tuple(vals[:dim]),
                    temperature=vals[dim],
                    delta=tuple(vals[dim + 1: 2 * dim + 1]),
                    accept_rate=vals[2 * dim + 1],
                    aux_stats=tuple(vals[2 * dim + 2:]),
                )
            )
    return out


def write_matrix_csv(rows, header: list[str], path, index_name: str | None = None) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(([index_name] if index_name else []) + header)
        for i, row in enumerate(np.atleast_2d(rows)):
            w.writerow(([str(i)] if index_name else []) + [fmt(v) for v in row])


def trace_svg(iterations, thetas, labels=None, reference=None, title="SA trace") -> str:
    """Self-contained SVG with one panel per parameter component.

    Each panel holds exactly one polyline (the component against the
    iteration index); ``reference`` values, if given, are drawn as dashed
    horizontal lines.
    """
    iterations = np.asarray(iterations, dtype=float)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if thetas.shape[0] != iterations.shape[0]:
        thetas = thetas.T
    dim = thetas.shape[1]
    labels = labels or [f"theta_{i}" for i in range(dim)]
    pw, ph, pad = 360, 260, 48
    width = dim * (pw + pad) + pad
    height = ph + 2 * pad
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{escape(title)}</title>',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    x_lo, x_hi = (iterations.min(), iterations.max()) if iterations.size else (0.0, 1.0)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    for k in range(dim):
        col = thetas[:, k]
        vals = col if reference is None else np.append(col, reference[k])
        y_lo, y_hi = (vals.min(), vals.max()) if vals.size else (0.0, 1.0)
        if y_hi <= y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        ox = pad + k * (pw + pad)
        oy = pad

        def sx(v):
            return ox + (v - x_lo) / (x_hi - x_lo) * pw

        def sy(v):
            return oy + ph - (v - y_lo) / (y_hi - y_lo) * ph

        parts.append(f'<g id="panel-{k}">')
        parts.append(f'<rect x="{ox}" y="{oy}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
        parts.append(
            f'<text x="{ox + pw / 2}" y="{oy - 12}" text-anchor="middle" font-size="14">{escape(labels[k])}</text>'
        )
        parts.append(f'<text x="{ox}" y="{oy + ph + 16}" font-size="11">{x_lo:g}</text>')
        parts.append(f'<text x="{ox + pw}" y="{oy + ph + 16}" text-anchor="end" font-size="11">{x_hi:g}</text>')
        parts.append(f'<text x="{ox - 4}" y="{oy + ph}" text-anchor="end" font-size="11">{y_lo:.3g}</text>')
        parts.append(f'<text x="{ox - 4}" y="{oy + 10}" text-anchor="end" font-size="11">{y_hi:.3g}</text>')
        if reference is not None:
            yr = sy(reference[k])
            parts.append(
                f'<line x1="{ox}" y1="{yr:.2f}" x2="{ox + pw}" y2="{yr:.2f}" stroke="gray" stroke-dasharray="4 3"/>'
            )
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(iterations, col))
        parts.append(f'<polyline fill="none" stroke="steelblue" stroke-width="1" points="{pts}"/>')
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_trace_svg(trace: list[TraceRecord], path, labels=None, reference=None) -> None:
    its = [r.iteration for r in trace]
    th = [r.theta for r in trace]
    Path(path).write_text(trace_svg(its, th, labels=labels, reference=reference))
