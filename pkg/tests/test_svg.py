import xml.etree.ElementTree as ET

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from vaxdyn.svg import Plot, marching_squares


def test_circle_contour_lies_on_radius():
    x = y = np.linspace(-2, 2, 81)
    X, Y = np.meshgrid(x, y, indexing="ij")
    segs = marching_squares(x, y, np.hypot(X, Y), 1.0)
    pts = np.array([p for s in segs for p in s])
    assert len(segs) > 100
    h = x[1] - x[0]
    assert np.max(np.abs(np.hypot(pts[:, 0], pts[:, 1]) - 1.0)) < h**2


def test_nan_cells_skipped():
    x = y = np.linspace(0, 1, 5)
    Z = np.add.outer(x, y)
    Z[:, 2:] = np.nan
    segs = marching_squares(x, y, Z, 0.6)
    assert segs and all(p[1] <= y[1] + 1e-12 for s in segs for p in s)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-1, 1))
def test_linear_field_contour_is_exact(cx, cy, level):
    x = y = np.linspace(-1, 1, 9)
    Z = cx * x[:, None] + cy * y[None, :]
    for s in marching_squares(x, y, Z, level):
        for px, py in s:
            assert abs(cx * px + cy * py - level) < 1e-9


def test_render_deterministic_and_well_formed(tmp_path):
    def build():
        p = Plot(title="t", xlabel="a", ylabel="d")
        p.line([0, 1, 2], [0, 1, 4], label="curve", dash=True)
        p.points([1], [1], filled=False, label="marker")
        x = y = np.linspace(0, 1, 11)
        p.contour(x, y, np.add.outer(x, y), 1.0)
        return p

    a, b = build().render(), build().render()
    assert a == b
    root = ET.fromstring(a)
    assert root.tag.endswith("svg")
    build().save(tmp_path / "x.svg")
    assert (tmp_path / "x.svg").read_text() == a
