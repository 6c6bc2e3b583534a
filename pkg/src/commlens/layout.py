"""Force-directed placement and community-colored SVG rendering.

The layout simulates attraction ``f_a(d) = d^2 / k`` along edges and
repulsion ``f_r(d) = k^2 / d`` between all node pairs, with the ideal
spring length ``k = sqrt(area / N)`` on a unit-area domain, linear
cooling from an initial temperature of ``0.1 * sqrt(area)`` down to
zero, and a seeded uniform initial placement.  Repulsion is evaluated
exactly (O(N^2) per iteration, block-wise to bound memory); the final
coordinates are min-max normalized into the unit square.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import Graph, Partition, label_sort_key
from .rng import generator

__all__ = ["fruchterman_reingold", "render_svg", "coords_to_tsv",
           "SvgOptions", "PALETTE", "community_color"]

_AREA = 1.0
_MIN_DISTANCE = 1e-12
_BLOCK = 256

# 16-entry categorical palette; community ids beyond it reuse the hues
# with a distinct lightness shift per cycle
PALETTE = (
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8",
    "#f58231", "#911eb4", "#46f0f0", "#f032e6",
    "#bcf60c", "#fabebe", "#008080", "#e6beff",
    "#9a6324", "#fffac8", "#800000", "#aaffc3",
)


def community_color(community_id: int) -> str:
    """Fill color for a community id, cycling past the palette with a
    lightness shift so repeated hues stay distinguishable."""
    base = PALETTE[community_id % len(PALETTE)]
    cycle = community_id // len(PALETTE)
    if cycle == 0:
        return base
    r = int(base[1:3], 16) / 255.0
    g = int(base[3:5], 16) / 255.0
    b = int(base[5:7], 16) / 255.0
    h, l, s = colorsys.rgb_to_hls(r, g, b)
    l = 1.0 - (1.0 - l) * (0.62 ** cycle)
    r, g, b = colorsys.hls_to_rgb(h, l, s)
    return "#%02x%02x%02x" % (round(r * 255), round(g * 255), round(b * 255))


def _simulate(g: Graph, seed: int, iterations: int) -> np.ndarray:
    """Raw force simulation, before unit-square normalization."""
    n = g.n
    rng = generator(seed)
    pos = rng.random((n, 2))
    if n == 1:
        return pos
    k = np.sqrt(_AREA / n)
    t0 = 0.1 * np.sqrt(_AREA)
    u, v, _ = g.edge_arrays()
    loops = u == v
    eu, ev = u[~loops], v[~loops]

    for it in range(iterations):
        t = t0 * (iterations - it) / iterations
        disp = np.zeros_like(pos)
        # exact pairwise repulsion, block-wise over rows
        for start in range(0, n, _BLOCK):
            stop = min(start + _BLOCK, n)
            delta = pos[start:stop, None, :] - pos[None, :, :]
            dist = np.sqrt((delta * delta).sum(axis=-1))
            np.clip(dist, _MIN_DISTANCE, None, out=dist)
            disp[start:stop] += (delta * (k * k / (dist * dist))[:, :, None]).sum(axis=1)
        # attraction along edges
        delta = pos[eu] - pos[ev]
        dist = np.sqrt((delta * delta).sum(axis=-1))
        np.clip(dist, _MIN_DISTANCE, None, out=dist)
        pull = delta * (dist / k)[:, None]
        np.add.at(disp, eu, -pull)
        np.add.at(disp, ev, pull)
        # displace, capped by the current temperature
        length = np.sqrt((disp * disp).sum(axis=-1))
        np.clip(length, _MIN_DISTANCE, None, out=length)
        step = np.minimum(length, t)
        pos = pos + disp / length[:, None] * step[:, None]
    return pos


def fruchterman_reingold(g: Graph, seed: int = 0, iterations: int = 50) -> np.ndarray:
    """Deterministic (graph, seed, iterations) -> unit-square coordinates.

    Returns an (N, 2) array; every coordinate is finite and in [0, 1].
    A single node lands at (0.5, 0.5).
    """
    if g.n < 1:
        raise ValidationError("layout needs at least one node")
    if iterations < 1:
        raise ValidationError(f"need at least one iteration, got {iterations}")
    pos = _simulate(g, seed, iterations)
    out = np.empty_like(pos)
    for axis in range(2):
        lo = pos[:, axis].min()
        hi = pos[:, axis].max()
        if hi - lo < _MIN_DISTANCE:
            out[:, axis] = 0.5
        else:
            out[:, axis] = (pos[:, axis] - lo) / (hi - lo)
    return out


@dataclass(frozen=True)
class SvgOptions:
    """Rendering options; defaults give an 800x800 canvas with a 20px
    margin, 4px nodes and 1px grey edges."""

    width: int = 800
    height: int = 800
    margin: float = 20.0
    node_radius: float = 4.0
    edge_width: float = 1.0
    edge_color: str = "#999999"
    background: str = "#ffffff"


def render_svg(g: Graph, coords: np.ndarray, p: Partition,
               options: SvgOptions = SvgOptions()) -> str:
    """Well-formed SVG 1.1 text: one line per stored edge beneath one
    circle per node, filled by community color.

    Coordinate formatting is fixed (6 decimals) so identical inputs
    produce byte-identical documents.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape != (g.n, 2):
        raise ValidationError(
            f"coordinates shape {coords.shape} does not match {g.n} nodes")
    if len(p) != g.n:
        raise ValidationError(f"partition length {len(p)} != node count {g.n}")
    if not np.all(np.isfinite(coords)):
        raise ValidationError("coordinates must be finite")

    o = options
    span_x = o.width - 2.0 * o.margin
    span_y = o.height - 2.0 * o.margin
    x = o.margin + coords[:, 0] * span_x
    # SVG y grows downward; flip so the unit square keeps its orientation
    y = o.margin + (1.0 - coords[:, 1]) * span_y

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{o.width}" height="{o.height}" '
        f'viewBox="0 0 {o.width} {o.height}">',
        f'<rect width="{o.width}" height="{o.height}" fill="{o.background}"/>',
    ]
    u, v, _ = g.edge_arrays()
    for a, b in zip(u.tolist(), v.tolist()):
        parts.append(
            f'<line x1="{x[a]:.6f}" y1="{y[a]:.6f}" '
            f'x2="{x[b]:.6f}" y2="{y[b]:.6f}" '
            f'stroke="{o.edge_color}" stroke-width="{o.edge_width}"/>')
    for i in range(g.n):
        parts.append(
            f'<circle cx="{x[i]:.6f}" cy="{y[i]:.6f}" r="{o.node_radius}" '
            f'fill="{community_color(p[i])}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def coords_to_tsv(g: Graph, coords: np.ndarray) -> str:
    """``label<TAB>x<TAB>y`` lines, sorted by label."""
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape != (g.n, 2):
        raise ValidationError(
            f"coordinates shape {coords.shape} does not match {g.n} nodes")
    order = sorted(range(g.n), key=lambda i: label_sort_key(g.labels[i]))
    return "".join(
        f"{g.labels[i]}\t{repr(float(coords[i, 0]))}\t{repr(float(coords[i, 1]))}\n"
        for i in order)
