import itertools

import numpy as np
import pytest

from modchaos.errors import BudgetExceeded, DepthExceeded, IncompatibleDescriptors, InvalidArgument
from modchaos.structure import (
    FinitePoints,
    GridFunction,
    Interval,
    ModularStructure,
    ModuleSpace,
    check_nesting,
    contains,
    diameter,
    diameter_report,
    modular_certificate,
    prefixes,
    separation_report,
    set_distance,
    strong_certificate,
)


def dyadic_module(j, alphabet=2, max_depth=8):
    """Cells are the m-adic subintervals of [0, 1]; diameters halve with depth."""

    def cell_map(prefix):
        lo, width = 0.0, 1.0
        for a in prefix:
            width /= alphabet
            lo += (a - 1) * width
        return Interval(lo, lo + width)

    return ModuleSpace(j, alphabet, cell_map, max_depth)


def lagged_module(j):
    """Depth-n cells have diameter 1 while n < j and collapse to a point afterwards."""

    def cell_map(prefix):
        base = 10.0 * (prefix[0] - 1) if prefix else 0.0
        if not prefix:
            return Interval(0.0, 11.0)
        return Interval(base, base + 1.0) if len(prefix) < j else FinitePoints.of(base)

    return ModuleSpace(j, 2, cell_map, 32)


class TestDescriptors:
    def test_finite_points_diameter(self):
        assert FinitePoints.of(0.0, 3.0, 1.0).diameter() == 3.0
        assert FinitePoints.of((0.0, 0.0), (3.0, 4.0)).diameter() == 5.0

    def test_interval(self):
        assert Interval(-1.0, 2.5).diameter() == 3.5
        with pytest.raises(InvalidArgument):
            Interval(2.0, 1.0)

    def test_grid_function_sup_metric(self):
        grid = np.linspace(1.0, 1.1, 11)
        gf = GridFunction.of(grid, grid, -grid)
        assert gf.diameter() == pytest.approx(2 * 1.1)

    def test_grid_length_checked(self):
        with pytest.raises(InvalidArgument):
            GridFunction.of((0.0, 1.0), (1.0,))

    def test_module_function(self):
        assert diameter(Interval(0, 1)) == 1.0


class TestSetDistance:
    def test_points(self):
        assert set_distance(FinitePoints.of(0.0, 5.0), FinitePoints.of(2.0, 9.0)) == 2.0

    def test_intervals(self):
        assert set_distance(Interval(0, 1), Interval(3, 4)) == 2.0
        assert set_distance(Interval(0, 2), Interval(1, 4)) == 0.0

    def test_point_interval(self):
        assert set_distance(FinitePoints.of(-1.0), Interval(0.5, 1)) == 1.5
        assert set_distance(Interval(0.5, 1), FinitePoints.of(0.75)) == 0.0

    def test_grid_functions(self):
        grid = (0.0, 0.5, 1.0)
        f = GridFunction.of(grid, (0.0, 0.5, 1.0))
        g = GridFunction.of(grid, (0.0, -0.5, -1.0))
        # sup over t of |t - (-t)| on the grid
        assert set_distance(f, g) == 2.0

    def test_incompatible(self):
        with pytest.raises(IncompatibleDescriptors):
            set_distance(FinitePoints.of(0.0), GridFunction.of((0.0,), (0.0,)))
        with pytest.raises(IncompatibleDescriptors):
            set_distance(GridFunction.of((0.0,), (0.0,)), GridFunction.of((1.0,), (0.0,)))

    def test_symmetric(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = FinitePoints.of(*rng.normal(size=3))
            b = Interval(*sorted(rng.normal(size=2)))
            assert set_distance(a, b) == pytest.approx(set_distance(b, a))


class TestContains:
    def test_interval_in_interval(self):
        assert contains(Interval(0, 1), Interval(0.25, 0.5))
        assert not contains(Interval(0, 1), Interval(0.5, 1.5))

    def test_points(self):
        assert contains(FinitePoints.of(1.0, 2.0), FinitePoints.of(2.0))
        assert contains(Interval(0, 1), FinitePoints.of(0.3, 1.0))
        assert not contains(FinitePoints.of(1.0), FinitePoints.of(1.5))

    def test_grid_rows(self):
        grid = (0.0, 1.0)
        parent = GridFunction.of(grid, (0.0, 1.0), (0.0, -1.0))
        assert contains(parent, GridFunction.of(grid, (0.0, -1.0)))
        assert not contains(parent, GridFunction.of(grid, (0.0, 2.0)))


class TestPrefixes:
    def test_lexicographic(self):
        assert list(prefixes(2, 2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]
        assert list(prefixes(3, 0)) == [()]

    def test_matches_itertools(self):
        assert list(prefixes(3, 4)) == list(itertools.product((1, 2, 3), repeat=4))

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            list(prefixes(2, 13, budget=4096))


class TestModule:
    def test_depth_limit(self):
        mod = dyadic_module(1, max_depth=3)
        with pytest.raises(DepthExceeded):
            mod.cell((1, 1, 1, 1))

    def test_index_positive(self):
        with pytest.raises(InvalidArgument):
            dyadic_module(0)

    def test_structure_caches(self):
        calls = []

        def factory(j):
            calls.append(j)
            return dyadic_module(j)

        s = ModularStructure(2, factory, range(1, 4))
        assert s.module(2) is s.module(2)
        assert calls == [2]

    def test_factory_index_checked(self):
        s = ModularStructure(2, lambda j: dyadic_module(j + 1), range(1, 3))
        with pytest.raises(InvalidArgument):
            s.module(1)


class TestReports:
    def test_nesting_ok(self):
        assert check_nesting(dyadic_module(1), 5).ok

    def test_nesting_violation_reported(self):
        def cell_map(prefix):
            return Interval(0, 1) if len(prefix) < 2 else Interval(0.5, 2.0)

        report = check_nesting(ModuleSpace(1, 2, cell_map, 4), 3)
        assert not report.ok
        assert report.violation is not None

    def test_dyadic_diameters(self):
        report = diameter_report(dyadic_module(1), 6, threshold=0.02)
        assert report.table == tuple(2.0**-n for n in range(7))
        assert report.verdict

    def test_dyadic_diameters_above_threshold(self):
        assert not diameter_report(dyadic_module(1), 6).verdict

    def test_separation_dyadic(self):
        # cells [0, 1/2] and [1/2, 1] touch
        assert separation_report(dyadic_module(1), 1).epsilon == 0.0
        # depth 2: every quarter has a partner at distance >= 1/4
        rep = separation_report(dyadic_module(1), 2)
        assert rep.epsilon == pytest.approx(0.25)
        assert rep.witnesses[(1, 1)] == (2, 2)

    def test_separation_first_maximiser(self):
        mod = ModuleSpace(1, 3, lambda p: FinitePoints.of(0.0, 1.0, 2.0) if not p else
                          FinitePoints.of(float(p[0] - 1)), 4)
        rep = separation_report(mod, 1)
        assert rep.epsilon == 1.0
        assert rep.witnesses[(2,)] == (1,)


class TestCertificates:
    def test_modular_dyadic_fails_separation(self):
        s = ModularStructure(2, dyadic_module, range(1, 4))
        cert = modular_certificate(s, depth=4, threshold=0.1)
        assert cert.nesting_ok and cert.diameter_ok
        assert not cert.verdict

    def test_empty_depths(self):
        s = ModularStructure(2, dyadic_module, range(1, 4))
        with pytest.raises(InvalidArgument):
            strong_certificate(s, depths=())

    def test_modular_vs_strong_contrast(self):
        s = ModularStructure(2, lagged_module, range(1, 10))
        # each module individually collapses once the depth exceeds its index
        for j in range(1, 10):
            assert modular_certificate(s, [j], depth=j).verdict
        strong = strong_certificate(s, range(1, 10), depths=(1, 2, 3, 4))
        assert strong.sup_table == (1.0, 1.0, 1.0, 1.0)
        assert not strong.verdict
        assert strong_certificate(s, range(1, 4), depths=(1, 2, 3, 4)).verdict

    def test_epsilon0_is_min_over_modules(self):
        s = ModularStructure(2, lagged_module, range(1, 6))
        cert = modular_certificate(s, depth=6)
        assert cert.epsilon0 == min(r["epsilon"] for r in cert.per_module)
        assert cert.epsilon0 == pytest.approx(9.0)

    def test_statement_is_finite(self):
        s = ModularStructure(2, lagged_module, range(1, 3))
        text = modular_certificate(s, depth=3).statement
        assert "j=1..2" in text and "not a proof" in text

    def test_range_must_be_contiguous(self):
        s = ModularStructure(2, lagged_module, range(1, 6))
        with pytest.raises(InvalidArgument):
            modular_certificate(s, [1, 3])
