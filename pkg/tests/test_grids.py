import numpy as np
import pytest

from wavelab.grids import Field, Grid, field_from_function


class TestGrid:
    def test_nodes_and_spacing(self):
        g = Grid(-1.0, 1.0, 5)
        assert g.dx == 0.5
        np.testing.assert_allclose(g.x, [-1.0, -0.5, 0.0, 0.5, 1.0])

    def test_refine_nests(self):
        g = Grid(-2.0, 3.0, 11)
        fine = g.refine()
        assert fine.n == 21
        np.testing.assert_allclose(fine.x[::2], g.x)

    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            Grid(1.0, 1.0, 8)
        with pytest.raises(ValueError):
            Grid(2.0, 1.0, 8)

    def test_rejects_tiny_node_count(self):
        with pytest.raises(ValueError):
            Grid(0.0, 1.0, 2)


class TestField:
    def test_shape_must_match(self):
        with pytest.raises(ValueError):
            Field(Grid(0.0, 1.0, 5), np.zeros(4))

    def test_rejects_non_finite(self):
        vals = np.zeros(5)
        vals[2] = np.inf
        with pytest.raises(ValueError):
            Field(Grid(0.0, 1.0, 5), vals)

    def test_copy_is_independent(self):
        f = Field(Grid(0.0, 1.0, 5), np.zeros(5))
        g = f.copy()
        g.values[0] = 7.0
        assert f.values[0] == 0.0

    def test_from_function(self):
        f = field_from_function(Grid(0.0, 2.0, 5), np.sqrt)
        np.testing.assert_allclose(f.values, np.sqrt(np.linspace(0, 2, 5)))
