from fractions import Fraction

import pytest

from scatdiag import (Diagram, Ray, Series, TruncationPolicy, merge_parallel, new_case, new_lines,
                      new_named, path_ordered_product, localize)
from scatdiag.diagram import ray_sort_key

POL = TruncationPolicy(4)


def functions(d):
    return {(r.direction, str(r.function)) for r in d.rays}


class TestNamed:
    def test_std11(self):
        d = new_named("std", 1, 1)
        assert len(d) == 4 and all(r.initial for r in d)
        assert functions(d) == {((1, 0), "1 + t0*x"), ((-1, 0), "1 + t0*x"),
                                ((0, 1), "1 + t1*y"), ((0, -1), "1 + t1*y")}

    def test_std33(self):
        d = new_named("std", 3, 3)
        f = d.rays[0].function
        assert f.coefficient((2, 0), (2, 0)) == 3 or f.coefficient((0, 2), (0, 2)) == 3

    def test_exp(self):
        assert {str(r.function) for r in new_named("exp", 2, 3)} == {"1 + t0*x^2", "1 + t1*y^3"}

    def test_det(self):
        d = new_named("det", 2)
        assert "1 + t1*x^-1*y^2" in {str(r.function) for r in d}
        assert {r.direction for r in d} >= {(-1, 2), (1, -2)}

    @pytest.mark.parametrize("args", [("std", 0, 1), ("exp", 1, -2), ("det", 0),
                                      ("std", 1), ("nope", 1)])
    def test_bad(self, args):
        with pytest.raises(ValueError):
            new_named(*args)

    def test_invariants(self):
        for d in (new_named("std", 2, 3), new_named("exp", 2, 2), new_named("det", 3)):
            d.check()
            assert list(d.rays) == sorted(d.rays, key=ray_sort_key)


class TestLines:
    def test_variables_per_line(self):
        d = new_lines([((0, 0), (1, 0)), ((1, 1), (2, 2), 2)])
        assert d.t_count == 2 and len(d) == 4
        f = [r for r in d if r.edge == 1][0].function
        assert f.coefficient((0, 1), (2, 2)) == 2
        assert {r.direction for r in d if r.edge == 1} == {(1, 1), (-1, -1)}

    def test_empty(self):
        with pytest.raises(ValueError):
            new_lines([])


class TestCase:
    def test_p2_functions(self):
        d = new_case("P2", 1)
        for r in d:
            assert len(r.function) == 2

    def test_cubic_functions(self):
        d = new_case("cubic", 1)
        for r in d:
            ((_, c),) = [(m, c) for m, c in r.function.terms() if m.t_exps.count(3)]
            assert c == 1 and len(r.function) == 4

    def test_p2_central_rays(self):
        d = new_case("P2", 1)
        U = d.unfolding
        central = [r for r in d if U.in_central(r.base[0])]
        assert len(central) == 6

    def test_p2_layout(self):
        d = new_case("P2", 1)
        U = d.unfolding
        for r in d:
            a, b = U.vertex(r.edge), U.vertex(r.edge + 1)
            assert r.base == ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
            target = b if r.direction[0] > 0 else a
            dx, dy = target[0] - r.base[0], target[1] - r.base[1]
            assert dx * r.direction[1] == dy * r.direction[0]
        d.check()

    def test_one_variable_per_edge(self):
        d = new_case("(8)", 2)
        assert d.t_count == len(d.unfolding.edges) == len(d) // 2

    def test_refined(self):
        d = new_case("(8'a)", 1, refined=True)
        assert all(len(r.function) == 2 for r in d)
        assert d.label == "(8'a)~"

    def test_bad_k(self):
        with pytest.raises(ValueError):
            new_case("P2", 0)


class TestRay:
    def test_direction_must_be_primitive(self):
        with pytest.raises(ValueError):
            Ray((0, 0), (2, 2), Series.one(1, POL), 1)

    def test_function_checks(self):
        one = Series.one(1, POL)
        x = Series.monomial(1, (1,), (1, 0), POL)
        with pytest.raises(ValueError):
            Ray((0, 0), (1, 0), one, 1).check()
        with pytest.raises(ValueError):
            Ray((0, 0), (0, 1), one + x, 1).check()
        with pytest.raises(ValueError):
            Ray((0, 0), (-1, 0), one + x, 1).check()
        Ray((0, 0), (-1, 0), one + x, 1, initial=True).check()

    def test_contains(self):
        r = Ray((1, 1), (1, 2), Series.one(1, POL), 1)
        assert r.contains((2, 3)) and r.contains((1, 1)) and not r.contains((0, -1))

    def test_ids(self):
        d = new_named("std", 1, 1)
        ids = [r.ray_id for r in d]
        assert len(set(ids)) == 4 and all(len(i) == 12 for i in ids)
        assert d.by_id(ids[2][:6]) is d.rays[2]
        with pytest.raises(KeyError):
            d.by_id("nothere")
        with pytest.raises(KeyError, match="ambiguous"):
            d.by_id("")


class TestMerge:
    def _pair(self):
        one = Series.one(2, POL)
        a = one + Series.monomial(1, (1, 0), (1, 1), POL)
        b = one + Series.monomial(2, (0, 1), (1, 1), POL)
        rays = [Ray((0, 0), (1, 1), a, 1), Ray((0, 0), (1, 1), b, 1)]
        return Diagram(tuple(rays), 2, POL), a * b

    def test_merge(self):
        d, ab = self._pair()
        m = merge_parallel(d)
        assert len(m) == 1 and m.rays[0].function == ab

    def test_unchanged(self):
        d = new_named("std", 1, 1)
        assert merge_parallel(d).rays == d.rays

    def test_product_unchanged(self):
        from scatdiag import scatter
        d = scatter(new_named("std", 2, 2), 4)
        p = (Fraction(0), Fraction(0))
        pol = d.policy.with_bound(4)
        before = path_ordered_product(localize(d, p), pol)
        after = path_ordered_product(localize(merge_parallel(d), p), pol)
        assert before == after and before.is_identity()
