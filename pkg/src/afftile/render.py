"""Attractor approximation, rasterization, and rigorous cell covers.

Approximation points are kept as exact rationals until pixels are computed,
so the cell-cover certificates never suffer rounding artifacts. A cell
cover splitting into separated clusters is a proof of disconnectedness; a
single cluster proves nothing.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError, SizeGuardError
from .lattice import DigitSet, IntMatrix2, attractor_radius, inverse_power_norm, is_expanding
from .errors import NotExpandingError

DEFAULT_MAX_POINTS = 10_000_000
MAX_POINTS_ENV = "ATTRACTOR_MAX_POINTS"

FracVec = tuple[Fraction, Fraction]


def _max_points() -> int:
    raw = os.environ.get(MAX_POINTS_ENV)
    if raw is None:
        return DEFAULT_MAX_POINTS
    try:
        return int(raw)
    except ValueError:
        raise PreconditionError(f"{MAX_POINTS_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class AttractorApprox:
    """Level-k point cloud of the attractor with certified size data.

    ``points`` holds all distinct k-fold digit expansions in word order
    (first digit index most significant). ``radius`` bounds the whole
    attractor in the max-norm and ``piece_radius`` bounds the distance from
    any point of the attractor to the nearest listed point.
    """

    level: int
    points: tuple[FracVec, ...]
    radius: Fraction
    piece_radius: Fraction


def approximate(
    T: IntMatrix2, ds: DigitSet, level: int, max_points: int | None = None
) -> AttractorApprox:
    """Exact rational level-k approximation of the attractor."""
    if level < 1:
        raise PreconditionError("level must be >= 1")
    if not is_expanding(T):
        raise NotExpandingError("matrix not expanding")
    cap = max_points if max_points is not None else _max_points()
    if ds.q ** level > cap:
        raise SizeGuardError(f"{ds.q}^{level} points exceed the {cap}-point guard")

    radius = attractor_radius(T, ds)
    points: list[FracVec] = [(Fraction(0), Fraction(0))]
    for _ in range(level):
        nxt: list[FracVec] = []
        seen: set[FracVec] = set()
        for dx, dy in ds.digits:
            for x, y in points:
                p = T.inverse_apply((x + dx, y + dy))
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        points = nxt
    piece_radius = inverse_power_norm(T, level) * radius
    return AttractorApprox(level, tuple(points), radius, piece_radius)


def rasterize(
    approx: AttractorApprox, width: int, height: int, margin: int = 0
) -> np.ndarray:
    """Deterministic binary bitmap of the approximation.

    The bounding box (plus margin pixels on each side) is mapped to the
    pixel grid with a single aspect-preserving scale, centered on the
    shorter axis; a degenerate bounding box collapses to the viewport
    center. Row 0 is the top of the image.
    """
    pts = approx.points
    if not pts:
        raise PreconditionError("approximation must be non-empty")
    if width < 1 or height < 1 or margin < 0:
        raise PreconditionError("bad viewport")
    bitmap = np.zeros((height, width), dtype=bool)

    min_x = min(p[0] for p in pts)
    max_x = max(p[0] for p in pts)
    min_y = min(p[1] for p in pts)
    max_y = max(p[1] for p in pts)
    span_x = float(max_x - min_x)
    span_y = float(max_y - min_y)
    usable_w = width - 1 - 2 * margin
    usable_h = height - 1 - 2 * margin
    if usable_w < 0 or usable_h < 0:
        raise PreconditionError("margin leaves no drawable area")

    scales = []
    if span_x > 0:
        scales.append(usable_w / span_x)
    if span_y > 0:
        scales.append(usable_h / span_y)
    if not scales:
        bitmap[height // 2, width // 2] = True
        return bitmap
    scale = min(scales)
    off_x = margin + (usable_w - scale * span_x) / 2.0
    off_y = margin + (usable_h - scale * span_y) / 2.0

    for x, y in pts:
        px = int(round(off_x + scale * float(x - min_x)))
        py = int(round(off_y + scale * float(y - min_y)))
        px = min(max(px, 0), width - 1)
        py = min(max(py, 0), height - 1)
        bitmap[height - 1 - py, px] = True
    return bitmap


def export_pgm(bitmap: np.ndarray, path) -> None:
    """Binary PGM (P5, maxval 255): lit pixels black on a white background."""
    height, width = bitmap.shape
    payload = np.where(bitmap, 0, 255).astype(np.uint8).tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(b"P5\n%d %d\n255\n" % (width, height))
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write PGM to {path}: {exc}") from exc


def _fmt(value: Fraction | float) -> str:
    return f"{float(value):.8g}"


def export_svg(approx: AttractorApprox, path, side: Fraction | None = None) -> None:
    """SVG with one small black square per approximation point.

    The square side defaults to the certified piece diameter so adjacent
    pieces visually merge; the view box is the bounding box padded by one
    square. Output bytes depend only on the inputs.
    """
    pts = approx.points
    if side is None:
        side = 2 * approx.piece_radius
        if side == 0:
            side = Fraction(1)
    parts = ['<?xml version="1.0" encoding="UTF-8"?>']
    if pts:
        min_x = min(p[0] for p in pts)
        max_x = max(p[0] for p in pts)
        min_y = min(p[1] for p in pts)
        max_y = max(p[1] for p in pts)
        view = (
            _fmt(min_x - side),
            _fmt(-max_y - side),
            _fmt(max_x - min_x + 2 * side),
            _fmt(max_y - min_y + 2 * side),
        )
    else:
        view = ("0", "0", "1", "1")
    parts.append(
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="%s %s %s %s">' % view
    )
    parts.append('<g fill="#000000">')
    half = side / 2
    for x, y in pts:
        # flip the y axis: SVG y grows downward
        parts.append(
            f'<rect x="{_fmt(x - half)}" y="{_fmt(-y - half)}" '
            f'width="{_fmt(side)}" height="{_fmt(side)}"/>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    try:
        with open(path, "wb") as fh:
            fh.write("\n".join(parts).encode("ascii"))
            fh.write(b"\n")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc


@dataclass(frozen=True)
class CellCover:
    """Finite union of closed square cells certified to contain the attractor."""

    cell_size: Fraction
    cells: frozenset[tuple[int, int]]


def cell_cover(T: IntMatrix2, ds: DigitSet, level: int) -> CellCover:
    """Grid-cell cover of the attractor built from the level-k approximation.

    Every level-k piece lies within ``piece_radius`` of its approximation
    point, so inflating each point by that amount and collecting all closed
    cells the box touches yields a certified cover.
    """
    approx = approximate(T, ds, level)
    eps = approx.piece_radius
    size = eps if eps > 0 else Fraction(1)
    cells: set[tuple[int, int]] = set()
    for x, y in approx.points:
        i0 = (x - eps) / size
        i1 = (x + eps) / size
        j0 = (y - eps) / size
        j1 = (y + eps) / size
        for i in range(_floor(i0), _floor(i1) + 1):
            for j in range(_floor(j0), _floor(j1) + 1):
                cells.add((i, j))
    return CellCover(size, frozenset(cells))


def _floor(value: Fraction) -> int:
    return value.numerator // value.denominator


def _cell_clusters(cells: frozenset[tuple[int, int]]) -> list[frozenset[tuple[int, int]]]:
    # closed cells touch when indices differ by at most 1 in each axis
    remaining = set(cells)
    clusters = []
    while remaining:
        seed = remaining.pop()
        stack = [seed]
        comp = {seed}
        while stack:
            ci, cj = stack.pop()
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    nb = (ci + di, cj + dj)
                    if nb in remaining:
                        remaining.remove(nb)
                        comp.add(nb)
                        stack.append(nb)
        clusters.append(frozenset(comp))
    return sorted(clusters, key=lambda c: sorted(c))


def cell_cover_certificate(
    T: IntMatrix2, ds: DigitSet, level: int
) -> list[frozenset[tuple[int, int]]] | None:
    """Disconnectedness certificate from a separated cell cover, if one exists.

    Returns the clusters when the cover splits into two or more groups of
    cells at positive max-norm distance (which proves the attractor is
    disconnected), or None when the cover is one piece (no conclusion).
    """
    cover = cell_cover(T, ds, level)
    clusters = _cell_clusters(cover.cells)
    if len(clusters) >= 2:
        return clusters
    return None
