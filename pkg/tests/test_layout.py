import xml.etree.ElementTree as ET

import numpy as np
import pytest

from commlens.errors import ValidationError
from commlens.graph import Partition, parse_edge_list, random_graph
from commlens.layout import (
    PALETTE,
    SvgOptions,
    community_color,
    coords_to_tsv,
    fruchterman_reingold,
    render_svg,
    _simulate,
)
from helpers import barbell, barbell_two_communities, triangle

SVG_NS = "{http://www.w3.org/2000/svg}"


def _elements(svg_text, tag):
    root = ET.fromstring(svg_text)
    return root.findall(f".//{SVG_NS}{tag}")


class TestLayout:
    def test_single_node_centered(self):
        g, _ = parse_edge_list("7 7\n")  # one node via a self-loop
        coords = fruchterman_reingold(g, seed=0, iterations=5)
        assert coords.shape == (1, 2)
        assert coords[0].tolist() == [0.5, 0.5]

    def test_coordinates_in_unit_square_and_finite(self):
        g = barbell()
        coords = fruchterman_reingold(g, seed=3, iterations=60)
        assert np.all(np.isfinite(coords))
        assert coords.min() >= 0.0 and coords.max() <= 1.0

    def test_deterministic(self):
        g = barbell()
        a = fruchterman_reingold(g, seed=5, iterations=40)
        b = fruchterman_reingold(g, seed=5, iterations=40)
        assert np.array_equal(a, b)

    def test_seed_changes_layout(self):
        g = barbell()
        a = fruchterman_reingold(g, seed=1, iterations=40)
        b = fruchterman_reingold(g, seed=2, iterations=40)
        assert not np.array_equal(a, b)

    def test_two_node_equilibrium_separation(self):
        # force balance: attraction d^2/k equals repulsion k^2/d at d = k
        g, _ = parse_edge_list("0 1\n")
        raw = _simulate(g, seed=4, iterations=300)
        separation = float(np.linalg.norm(raw[0] - raw[1]))
        ideal = np.sqrt(1.0 / 2.0)
        assert separation == pytest.approx(ideal, rel=0.05)

    def test_validation(self):
        g = triangle()
        with pytest.raises(ValidationError):
            fruchterman_reingold(g, seed=0, iterations=0)


class TestRenderSvg:
    def test_valid_xml_with_exact_element_counts(self):
        g = barbell()
        coords = fruchterman_reingold(g, seed=0, iterations=30)
        svg = render_svg(g, coords, barbell_two_communities())
        assert len(_elements(svg, "circle")) == g.n
        assert len(_elements(svg, "line")) == g.num_edges

    def test_single_community_single_fill(self):
        g = triangle()
        coords = fruchterman_reingold(g, seed=0, iterations=10)
        svg = render_svg(g, coords, Partition.all_in_one(3))
        fills = {c.get("fill") for c in _elements(svg, "circle")}
        assert len(fills) == 1

    def test_two_communities_two_fills(self):
        g = barbell()
        coords = fruchterman_reingold(g, seed=0, iterations=10)
        svg = render_svg(g, coords, barbell_two_communities())
        fills = {c.get("fill") for c in _elements(svg, "circle")}
        assert fills == {PALETTE[0], PALETTE[1]}

    def test_edgeless_graph_renders_circles_only(self):
        g = random_graph(4, 0.0, seed=0)
        coords = fruchterman_reingold(g, seed=0, iterations=10)
        svg = render_svg(g, coords, Partition.singletons(4))
        assert len(_elements(svg, "circle")) == 4
        assert len(_elements(svg, "line")) == 0

    def test_distinct_colors_up_to_palette_size(self):
        colors = {community_color(i) for i in range(len(PALETTE))}
        assert len(colors) == len(PALETTE)

    def test_cycling_beyond_palette_shifts_lightness(self):
        beyond = {community_color(i) for i in range(3 * len(PALETTE))}
        assert len(beyond) == 3 * len(PALETTE)

    def test_inconsistent_dimensions_rejected(self):
        g = barbell()
        coords = fruchterman_reingold(g, seed=0, iterations=5)
        with pytest.raises(ValidationError):
            render_svg(g, coords[:4], barbell_two_communities())
        with pytest.raises(ValidationError):
            render_svg(g, coords, Partition.all_in_one(3))

    def test_options_control_canvas(self):
        g = triangle()
        coords = fruchterman_reingold(g, seed=0, iterations=5)
        svg = render_svg(g, coords, Partition.all_in_one(3),
                         SvgOptions(width=400, height=300, node_radius=2.0))
        root = ET.fromstring(svg)
        assert root.get("width") == "400"
        assert root.get("height") == "300"

    def test_byte_identical_rerender(self):
        g = barbell()
        coords = fruchterman_reingold(g, seed=9, iterations=25)
        a = render_svg(g, coords, barbell_two_communities())
        b = render_svg(g, coords, barbell_two_communities())
        assert a == b


class TestCoordsTsv:
    def test_sorted_by_label_with_roundtrip_floats(self):
        g = barbell()
        coords = fruchterman_reingold(g, seed=0, iterations=10)
        text = coords_to_tsv(g, coords)
        lines = text.splitlines()
        assert [ln.split("\t")[0] for ln in lines] == ["1", "2", "3", "4", "5", "6"]
        x = float(lines[0].split("\t")[1])
        assert x == coords[g.dense_index("1"), 0]
