import math

import numpy as np
import pytest

from bipot.errors import FormatError, InvalidInputError
from bipot.extreal import ExtReal, as_ext_array, ext_scale
from bipot.grids import Grid, SampledBivariate, SampledFunction, pairing


class TestExtReal:
    def test_rejects_nan_and_neg_inf(self):
        with pytest.raises(InvalidInputError):
            ExtReal(float("nan"))
        with pytest.raises(InvalidInputError):
            ExtReal(-math.inf)

    def test_absorbing_addition(self):
        assert (ExtReal(3.0) + ExtReal(math.inf)).value == math.inf
        assert (ExtReal(math.inf) + 5).value == math.inf
        assert (ExtReal(2.0) + 3.0).value == 5.0

    def test_zero_times_inf_is_inf(self):
        assert ExtReal(math.inf).scale(0.0).value == math.inf
        assert ExtReal(math.inf).scale(2.0).value == math.inf
        assert ExtReal(4.0).scale(0.5).value == 2.0
        with pytest.raises(InvalidInputError):
            ExtReal(1.0).scale(-1.0)

    def test_tokens_round_trip(self):
        assert ExtReal.parse("inf").value == math.inf
        assert ExtReal.parse("-1.25").value == -1.25
        assert ExtReal(math.inf).token() == "inf"
        v = 0.1 + 0.2
        assert ExtReal.parse(ExtReal(v).token()).value == v

    def test_array_guards(self):
        with pytest.raises(InvalidInputError):
            as_ext_array([1.0, float("nan")])
        with pytest.raises(InvalidInputError):
            as_ext_array([-math.inf])
        a = as_ext_array([1.0, math.inf])
        assert not a.flags.writeable
        out = ext_scale(0.0, a)
        assert out[0] == 0.0 and out[1] == math.inf


class TestGrid:
    def test_nodes_are_lo_plus_ih(self):
        g = Grid.line(-1.0, 1.0, 5)
        h = g.h[0]
        assert np.array_equal(g.axis(0), -1.0 + np.arange(5) * h)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            Grid.line(1.0, -1.0, 5)
        with pytest.raises(InvalidInputError):
            Grid.line(0.0, 1.0, 2)
        with pytest.raises(InvalidInputError):
            Grid(lo=(0, 0, 0), hi=(1, 1, 1), n=(4, 4, 4))

    def test_index_coord_bijection(self):
        g = Grid.box((-1.0, 0.0), (1.0, 2.0), (5, 9))
        for idx in g.node_indices():
            assert g.snap(g.coords(idx)) == idx

    def test_snap_rejects_outside(self):
        g = Grid.line(0.0, 1.0, 11)
        with pytest.raises(InvalidInputError):
            g.snap([2.0])


class TestSampledCsv:
    def test_function_round_trip_1d(self, tmp_path):
        g = Grid.line(-1.0, 1.0, 9)
        f = SampledFunction.from_callable(
            g, lambda x: np.where(x > 0, x * 1.7, np.inf))
        p = tmp_path / "f.csv"
        f.to_csv(p)
        back = SampledFunction.read_csv(p)
        assert back.grid.n == g.n
        assert np.array_equal(back.vals, f.vals)

    def test_function_round_trip_2d(self, tmp_path):
        g = Grid.box(-1.0, 1.0, (5, 7))
        f = SampledFunction.from_callable(g, lambda a, b: a * b + 0.125)
        p = tmp_path / "f2.csv"
        f.to_csv(p)
        back = SampledFunction.read_csv(p)
        assert np.array_equal(back.vals, f.vals)

    def test_bivariate_round_trip(self, tmp_path):
        gx = Grid.line(-1.0, 1.0, 5)
        gy = Grid.line(0.0, 2.0, 7)
        b = SampledBivariate.from_callable(gx, gy, lambda x, y: x + y * y)
        p = tmp_path / "b.csv"
        b.to_csv(p)
        back = SampledBivariate.read_csv(p)
        assert back.xgrid.n == gx.n and back.ygrid.n == gy.n
        assert np.array_equal(back.vals, b.vals)

    def test_malformed_rows_carry_line_numbers(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("x,value\n0.0,1.0\n0.5,zardoz\n1.0,2.0\n")
        with pytest.raises(FormatError) as err:
            SampledFunction.read_csv(p)
        assert err.value.line == 3

    def test_missing_rows_rejected(self, tmp_path):
        g = Grid.line(0.0, 1.0, 5)
        f = SampledFunction.from_callable(g, lambda x: x)
        p = tmp_path / "f.csv"
        f.to_csv(p)
        lines = p.read_text().splitlines()
        del lines[3]   # drop an interior node
        p.write_text("\n".join(lines) + "\n")
        with pytest.raises(FormatError):
            SampledFunction.read_csv(p)


def test_pairing_2d_matches_dot():
    gx = Grid.box((-1.0, 0.0), (1.0, 1.0), (4, 5))
    gy = Grid.box((0.0, -1.0), (2.0, 1.0), (3, 6))
    P = pairing(gx, gy)
    x = gx.coords((2, 3))
    y = gy.coords((1, 4))
    assert P[2, 3, 1, 4] == pytest.approx(x[0] * y[0] + x[1] * y[1], abs=1e-15)
