import numpy as np
import pytest

from bipot.bipotentials import (GraphSet, b_infinity, bipotential_from_sync,
                                check_bbgraph, check_bipotential,
                                check_cyclically_monotone, check_sync,
                                default_graph_tol, graph_of,
                                graphs_match_within, separable,
                                sync_from_bipotential)
from bipot.errors import InvalidInputError
from bipot.grids import SampledBivariate, SampledFunction
from bipot.legendre import conjugate_pair


def fy_equality_graph(phi, grid, tol):
    """Definitional equality set of (phi, phi*), enumerated nodewise."""
    pair = conjugate_pair(phi, grid)
    xs = grid.axis(0)
    resid = pair.phi.vals[:, None] + pair.phistar.vals[None, :] \
        - xs[:, None] * xs[None, :]
    return resid <= tol


class TestSyncBipotentialRoundTrip:
    def test_separable_quadratic_sync(self, line_grid):
        phi = SampledFunction.from_callable(line_grid, lambda x: 0.5 * x * x)
        b = separable(phi, line_grid)
        c = sync_from_bipotential(b)
        xs = line_grid.axis(0)
        want = 0.5 * (xs[:, None] - xs[None, :]) ** 2
        assert np.abs(c.vals - want).max() <= 1e-12

    def test_round_trip_identity(self, line_grid):
        phi = SampledFunction.from_callable(line_grid, np.abs)
        b = separable(phi, line_grid)
        back = bipotential_from_sync(sync_from_bipotential(b))
        fin = np.isfinite(b.vals)
        assert np.array_equal(np.isfinite(back.vals), fin)
        # subtract-then-add the pairing costs one rounding each way
        assert np.abs(back.vals[fin] - b.vals[fin]).max() <= 1e-12

    def test_indicator_sync_of_b_infinity(self, line_grid):
        M = GraphSet.from_pairs(line_grid, line_grid, [(10, 10), (50, 50)])
        c = sync_from_bipotential(b_infinity(M))
        assert np.all(c.vals[M.mask] == 0.0)
        assert np.all(np.isinf(c.vals[~M.mask]))

    def test_negative_sync_rejected(self, line_grid):
        vals = np.zeros((line_grid.n[0], line_grid.n[0]))
        vals[3, 4] = -0.5
        with pytest.raises(InvalidInputError):
            bipotential_from_sync(SampledBivariate(line_grid, line_grid, vals))


class TestSeparable:
    def test_quadratic_graph_is_diagonal(self, line_grid):
        phi = SampledFunction.from_callable(line_grid, lambda x: 0.5 * x * x)
        b = separable(phi, line_grid)
        assert check_bipotential(b).ok
        g = graph_of(b, default_graph_tol(line_grid, line_grid))
        ij = np.argwhere(g.mask)
        assert np.abs(ij[:, 0] - ij[:, 1]).max() <= 1
        assert np.all(np.diag(g.mask))

    def test_indicator_graph_shape(self, line_grid):
        phi = SampledFunction.from_callable(
            line_grid, lambda x: np.where(np.abs(x) <= 1, 0.0, np.inf))
        b = separable(phi, line_grid)
        tol = default_graph_tol(line_grid, line_grid)
        got = graph_of(b, tol).mask
        want = fy_equality_graph(phi, line_grid, tol)
        assert np.array_equal(got, want)
        xs = line_grid.axis(0)
        i_lo, i_hi = line_grid.snap([-1.0]), line_grid.snap([1.0])
        j0 = line_grid.snap([0.0])
        # interior x with y = 0, and the two vertical boundary rays
        assert got[(np.abs(xs) < 1), j0].all()
        assert got[i_hi, xs >= 0].all() and got[i_lo, xs <= 0].all()
        assert not got[(np.abs(xs) < 1 - 1e-9), j0 + 5].any()

    def test_graph_matches_fy_equality_on_corpus(self, convex_corpus, line_grid):
        tol = default_graph_tol(line_grid, line_grid)
        for name, phi in convex_corpus.items():
            got = graph_of(separable(phi, line_grid), tol).mask
            want = fy_equality_graph(phi, line_grid, tol)
            assert np.array_equal(got, want), name


class TestBInfinity:
    def test_singleton_passes(self, line_grid):
        M = GraphSet.from_pairs(line_grid, line_grid, [(7, 13)])
        assert check_bipotential(b_infinity(M)).ok
        assert check_bbgraph(M).ok

    def test_identity_graph(self, line_grid):
        n = line_grid.n[0]
        M = GraphSet(line_grid, line_grid, np.eye(n, dtype=bool))
        binf = b_infinity(M)
        assert check_bipotential(binf).ok
        assert graph_of(binf, 0.0).same_pairs(M)

    def test_empty_rejected(self, line_grid):
        M = GraphSet(line_grid, line_grid,
                     np.zeros((line_grid.n[0],) * 2, dtype=bool))
        with pytest.raises(InvalidInputError):
            b_infinity(M)

    def test_non_uniqueness_two_bipotentials_same_graph(self, line_grid):
        # a maximal cyclically monotone graph carries both the separable
        # bipotential and b_infinity: same graph, different functions
        phi = SampledFunction.from_callable(line_grid, lambda x: 0.5 * x * x)
        b = separable(phi, line_grid)
        tol = default_graph_tol(line_grid, line_grid)
        M = graph_of(b, tol)
        binf = b_infinity(M)
        assert check_bipotential(b).ok and check_bipotential(binf).ok
        assert graph_of(binf, tol).same_pairs(M)
        off_graph = ~M.mask & np.isfinite(b.vals)
        assert np.all(np.isinf(binf.vals[off_graph]))
        assert off_graph.any()


class TestCheckBipotential:
    def test_negative_fixture_zero_function(self, line_grid):
        b = SampledBivariate(line_grid, line_grid,
                             np.zeros((line_grid.n[0],) * 2))
        rep = check_bipotential(b)
        assert not rep.ok and rep.axiom == "duality-lower-bound"
        assert rep.witness is not None

    def test_corpus_passes(self, convex_corpus, line_grid):
        for name, phi in convex_corpus.items():
            rep = check_bipotential(separable(phi, line_grid))
            assert rep.ok, (name, rep)

    def test_three_way_violation_detected(self, line_grid):
        # separable quadratic with the graph value over-reported: b > <x,y>
        # on the diagonal breaks equality membership while the slice
        # subdifferential memberships survive
        phi = SampledFunction.from_callable(line_grid, lambda x: 0.5 * x * x)
        b = separable(phi, line_grid)
        vals = b.vals.copy()
        n = line_grid.n[0]
        bump = 1.0
        vals[np.arange(n), np.arange(n)] += bump
        rep = check_bipotential(SampledBivariate(line_grid, line_grid, vals))
        assert not rep.ok


class TestCheckSync:
    def test_quadratic_difference_sync(self, line_grid):
        c = SampledBivariate.from_callable(
            line_grid, line_grid, lambda x, y: 0.5 * (x - y) ** 2)
        assert check_sync(c).ok

    def test_shifted_sync_fails_minimum_axiom(self, line_grid):
        c = SampledBivariate.from_callable(
            line_grid, line_grid, lambda x, y: 0.5 * (x - y) ** 2 + 1.0)
        rep = check_sync(c)
        assert not rep.ok
        assert rep.axiom == "attained-min-zero"
        assert rep.residual == pytest.approx(1.0, abs=1e-9)

    def test_negative_values_fail(self, line_grid):
        vals = np.full((line_grid.n[0],) * 2, -0.25)
        rep = check_sync(SampledBivariate(line_grid, line_grid, vals))
        assert not rep.ok and rep.axiom == "nonnegative"

    def test_psync_equivalence_on_corpus(self, convex_corpus, line_grid):
        for name, phi in convex_corpus.items():
            b = separable(phi, line_grid)
            c = sync_from_bipotential(b)
            assert check_sync(c).ok == check_bipotential(b).ok, name


class TestCheckBBGraph:
    def test_band_graph_passes(self, line_grid):
        xs = line_grid.axis(0)
        mask = np.abs(xs[:, None] - xs[None, :]) <= 0.5 + 1e-12
        assert check_bbgraph(GraphSet(line_grid, line_grid, mask)).ok

    def test_split_section_fails(self, line_grid):
        mask = np.zeros((line_grid.n[0],) * 2, dtype=bool)
        mask[10, 50] = mask[30, 50] = True   # y-section {10, 30} with a gap
        rep = check_bbgraph(GraphSet(line_grid, line_grid, mask))
        assert not rep.ok and rep.axiom == "y-section-convex"
        (tag, iy), (wx,) = rep.witness
        assert tag == "y" and iy == 50 and 10 < wx < 30

    def test_x_section_failure_found(self, line_grid):
        mask = np.zeros((line_grid.n[0],) * 2, dtype=bool)
        mask[50, 10] = mask[50, 30] = True
        rep = check_bbgraph(GraphSet(line_grid, line_grid, mask))
        assert not rep.ok and rep.axiom == "x-section-convex"


class TestCyclicMonotone:
    def test_identity_graph_all_lengths(self):
        pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]
        assert check_cyclically_monotone(pts, 3).ok

    def test_swap_fails_with_exact_residual(self):
        rep = check_cyclically_monotone([(0.0, 1.0), (1.0, 0.0)], 2)
        assert not rep.ok
        assert rep.residual == -1.0
        assert rep.witness in ((0, 1), (1, 0))

    def test_flat_passes(self):
        assert check_cyclically_monotone([(0.0, 0.0), (1.0, 0.0)], 2).ok

    def test_clamps_with_warning(self):
        with pytest.warns(UserWarning):
            rep = check_cyclically_monotone([(0.0, 0.0), (1.0, 1.0)], 5)
        assert rep.ok

    def test_2d_points(self):
        pts = [((0.0, 0.0), (0.0, 0.0)), ((1.0, 0.0), (1.0, 0.0)),
               ((0.0, 1.0), (0.0, 1.0))]
        assert check_cyclically_monotone(pts, 3).ok

    def test_separable_quadratic_graph_points_cycle_free(self, line_grid):
        phi = SampledFunction.from_callable(line_grid, lambda x: 0.5 * x * x)
        b = separable(phi, line_grid)
        M = graph_of(b, default_graph_tol(line_grid, line_grid))
        pts = [(line_grid.coords(xi), line_grid.coords(yi))
               for xi, yi in list(M.pairs())[::60]][:6]
        assert check_cyclically_monotone(pts, 5).ok


class TestGraphSetCsv:
    def test_round_trip(self, tmp_path, line_grid):
        M = GraphSet.from_pairs(line_grid, line_grid, [(0, 5), (7, 7)])
        p = tmp_path / "m.csv"
        M.to_csv(p)
        back = GraphSet.read_csv(p)
        assert back.same_pairs(M)
        assert back.xgrid.n == M.xgrid.n

    def test_graphs_match_within(self, line_grid):
        a = GraphSet.from_pairs(line_grid, line_grid, [(10, 10)])
        b = GraphSet.from_pairs(line_grid, line_grid, [(11, 10)])
        c = GraphSet.from_pairs(line_grid, line_grid, [(13, 10)])
        assert graphs_match_within(a, b, 1)
        assert not graphs_match_within(a, c, 1)
