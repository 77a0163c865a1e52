"""Figure rendering over the pextremal CLI's CSV files.

Two figure kinds: overlaid contour plots of extremal-value grids
(contour_q*.csv, header r1,r2,v) and semilog error-decay curves
(approx_*.csv, header f,q,n,d_n,error).  Inputs are read-only; output
is a static image.
"""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# Figure-style q colors: q=1 black, q=2 red, q=4 blue.
DEFAULT_STYLE = {"1": "black", "2": "red", "4": "blue"}

DEFAULT_LEVELS = (0.25, 0.5, 0.75, 1.0, 1.25)


class InputError(ValueError):
    """Missing or malformed input CSV."""


@dataclass(frozen=True)
class PlotSpec:
    inputs: Tuple[str, ...]
    kind: str  # "contour" | "decay"
    out: str
    levels: Tuple[float, ...] = DEFAULT_LEVELS
    style: Dict[str, str] = field(default_factory=lambda: dict(DEFAULT_STYLE))

    def __post_init__(self):
        if self.kind not in ("contour", "decay"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


@dataclass
class RenderResult:
    out: str
    # per (q label, level): list of traced polyline arrays, contour kind only
    level_curves: Optional[dict] = None


def q_label_from_name(path) -> str:
    m = re.search(r"contour_q([^./\\]+)\.csv$", str(path))
    if not m:
        raise InputError(f"cannot infer q from file name {path!r}; "
                         "expected contour_q<label>.csv")
    return m.group(1)


def load_contour_grid(path):
    """Read an (r1, r2, v) grid CSV back into axis vectors and a matrix."""
    rows = _read_csv(path, ("r1", "r2", "v"))
    r1 = np.array([float(r[0]) for r in rows])
    r2 = np.array([float(r[1]) for r in rows])
    v = np.array([float(r[2]) for r in rows])
    axis1 = np.unique(r1)
    axis2 = np.unique(r2)
    if axis1.size * axis2.size != v.size:
        raise InputError(f"{path}: rows do not form a full grid")
    V = v.reshape(axis1.size, axis2.size)
    # rows are emitted r1-major; verify the coordinates agree
    if not np.allclose(r1.reshape(V.shape)[:, 0], axis1):
        raise InputError(f"{path}: grid rows are not r1-major")
    return axis1, axis2, V


def load_decay_table(path):
    """Read an approx CSV into {q label: (n array, error array)}."""
    rows = _read_csv(path, ("f", "q", "n", "d_n", "error"))
    by_q: Dict[str, List[Tuple[int, float]]] = {}
    for f, q, n, d_n, err in rows:
        by_q.setdefault(q, []).append((int(n), float(err)))
    out = {}
    for q, pairs in by_q.items():
        pairs.sort()
        out[q] = (np.array([n for n, _ in pairs]),
                  np.array([e for _, e in pairs]))
    return out


def _read_csv(path, expected_header):
    path = Path(path)
    if not path.exists():
        raise InputError(f"input CSV not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file")
        if tuple(header) != tuple(expected_header):
            raise InputError(
                f"{path}: header {header} does not match {list(expected_header)}")
        rows = []
        for row in reader:
            if len(row) != len(expected_header):
                raise InputError(f"{path}: malformed row {row}")
            rows.append(row)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return rows


def render_contours(spec: PlotSpec) -> RenderResult:
    """Overlay level curves of one or more value grids into one figure."""
    fig, ax = plt.subplots(figsize=(6, 6))
    curves = {}
    for path in spec.inputs:
        label = q_label_from_name(path)
        r1, r2, V = load_contour_grid(path)
        color = spec.style.get(label, "gray")
        if spec.levels:
            # meshgrid indexing: V[i, j] is the value at (r1[i], r2[j])
            cs = ax.contour(r1, r2, V.T, levels=sorted(spec.levels),
                            colors=color, linewidths=1.0)
            for lev, segs in zip(cs.levels, _all_segments(cs)):
                curves[(label, float(lev))] = segs
        ax.plot([], [], color=color, label=f"q = {label}")
    ax.set_xlabel("|z1|")
    ax.set_ylabel("|z2|")
    ax.set_aspect("equal")
    ax.legend(loc="upper right")
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return RenderResult(out=spec.out, level_curves=curves)


def _all_segments(cs):
    """Per-level polylines of a contour set, across matplotlib versions."""
    if hasattr(cs, "allsegs"):
        return cs.allsegs
    segs = []
    for path_level in cs.get_paths():
        segs.append([path_level.vertices])
    return segs


def render_decay(spec: PlotSpec) -> RenderResult:
    """Semilog-y error-vs-n curves, one per q, from approx CSVs."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for path in spec.inputs:
        table = load_decay_table(path)
        for q in sorted(table):
            n, err = table[q]
            mask = err > 0
            ax.semilogy(n[mask], err[mask], color=spec.style.get(q, "gray"),
                        marker=".", label=f"q = {q}")
    ax.set_xlabel("n")
    ax.set_ylabel("best L2 error")
    ax.legend(loc="upper right")
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    return RenderResult(out=spec.out)


def render(spec: PlotSpec) -> RenderResult:
    if spec.kind == "contour":
        return render_contours(spec)
    return render_decay(spec)
