from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import assume, given, strategies as st

from scatdiag import (Series, f_out, log1, new_case, new_lines, new_named, scatter, t_order_for,
                      wall_correspondence)
from scatdiag.series import pack, primitive
from scatdiag.tropical import (AmbiguousAncestry, Leg, Terminus, TropicalCurve, automorphisms,
                               complete_ray, completions, correspondence, deformation_orders,
                               incoming, leg_multiplicity, local_count, log_terms, multiplicity,
                               tropical_sum_check, vertex_multiplicity)

import oracles

Q = Fraction


def star(*vectors, out):
    """One vertex at the origin: legs along ``vectors`` and an unbounded output leg."""
    legs = [Leg(0, primitive(out)[0], primitive(out)[1], Terminus.unbounded())]
    for v in vectors:
        u, w = primitive(v)
        legs.append(Leg(0, u, w, Terminus("wall")))
    return TropicalCurve(((Q(0), Q(0)),), (), tuple(legs))


class TestLegMultiplicity:
    @pytest.mark.parametrize("w,m", [(1, 1), (2, mpq(-1, 4)), (3, mpq(1, 9)), (4, mpq(-1, 16))])
    def test_values(self, w, m):
        assert leg_multiplicity(w) == m

    def test_length(self):
        assert leg_multiplicity(2, 3) == mpq(-3, 4)

    def test_bad(self):
        with pytest.raises(ValueError):
            leg_multiplicity(0)


class TestVertexMultiplicity:
    def test_unit(self):
        assert vertex_multiplicity(star((1, 0), (0, 1), out=(-1, -1)), 0) == 1

    def test_weighted(self):
        assert vertex_multiplicity(star((1, 3), (1, -3), out=(-2, 0)), 0) == 6

    def test_unbalanced(self):
        with pytest.raises(ValueError):
            vertex_multiplicity(star((1, 3), (1, -3), out=(-1, 0)), 0)

    def test_incoming(self):
        ins, out = incoming(star((1, 3), (1, -3), out=(-2, 0)), 0)
        assert sorted(ins) == [(-1, -3), (-1, 3)] and out == (-2, 0)

    def test_four_valent_general_position(self):
        vs = ((1, 0), (0, 1), (-1, 2))
        assert deformation_orders(vs) == {3}
        assert local_count(vs) == 3

    def test_parallel_legs(self):
        # two weight-one legs along (1, 0) and one along (0, 1): a single
        # trivalent curve after deformation, which the plain caterpillar misses
        assert local_count(((1, 0), (1, 0), (0, 1))) == 1

    def test_two_legs_is_det(self):
        assert local_count(((2, 1), (-1, 3))) == 7


vec = st.tuples(st.integers(-2, 2), st.integers(-2, 2)).filter(lambda v: v != (0, 0))


@given(st.lists(vec, min_size=3, max_size=3), st.lists(st.tuples(st.integers(-3, 3),
                                                                 st.integers(-3, 3)),
                                                       min_size=3, max_size=3))
def test_local_count_is_deformation_invariant(vs, shifts):
    """Moving the lines off a common point keeps the asymptotic count."""
    out = (sum(v[0] for v in vs), sum(v[1] for v in vs))
    assume(out != (0, 0))
    for i in range(3):
        for j in range(i + 1, 3):
            assume(oracles.det(vs[i], vs[j]) != 0)
            s = (vs[i][0] + vs[j][0], vs[i][1] + vs[j][1])
            assume(s != (0, 0) and oracles.det(s, out) != 0)
    bases = [(Q(a) + Q(i, 7), Q(b) + Q(i * i, 11)) for i, (a, b) in enumerate(shifts)]
    from dataclasses import replace
    d = new_lines(list(zip(bases, vs)), t_bound=3)
    pol = replace(d.policy, square_free=True)
    d = scatter(replace(d, policy=pol), 3)
    prim, w = primitive(out)
    f = Series.one(3, pol)
    for r in d.new_rays:
        if r.direction == prim:
            f = f * r.function
    c = log1(f).raw().get((3, pack((1, 1, 1)), out[0], out[1]), 0)
    scale = 1
    for v in vs:
        scale *= primitive(v)[1]
    assert mpq(c) * scale / w == local_count(tuple(vs))


class TestAutomorphisms:
    def test_identical_legs(self):
        twin = Leg(0, (1, 0), 1, Terminus("singular", (Q(2), Q(0))))
        other = Leg(0, (0, 1), 1, Terminus("singular", (Q(0), Q(2))))
        h = TropicalCurve(((Q(0), Q(0)),), (),
                          (Leg(0, (-2, -1), 1, Terminus.unbounded()), twin, twin, other))
        assert automorphisms(h) == 2 == oracles.brute_automorphisms(h)
        assert multiplicity(h) == mpq(1, 2)

    def test_distinct_legs(self):
        h = star((1, 0), (0, 1), out=(-1, -1))
        assert automorphisms(h) == 1 == oracles.brute_automorphisms(h)

    def test_against_brute_force(self, p2_low):
        n = 0
        for r in p2_low.new_rays:
            for h in completions(p2_low, r):
                assert automorphisms(h) == oracles.brute_automorphisms(h)
                n += 1
        assert n > 50


@st.composite
def trees(draw, depth=2):
    """Rooted trees with repeated branches mapped to the same place."""
    V, E, L = [(Q(0), Q(0))], [], [Leg(0, (0, 1), 1, Terminus.unbounded())]

    def grow(v, level):
        pos = V[v]
        for _ in range(draw(st.integers(1, 2))):
            copies = draw(st.integers(1, 3))
            if level < depth and draw(st.booleans()):
                w = draw(st.integers(1, 2))
                dx = draw(st.integers(-2, 2))
                shape = draw(st.randoms())
                state = shape.getstate()
                for _ in range(copies):
                    V.append((pos[0] + dx, pos[1] - 1))
                    c = len(V) - 1
                    E.append((v, c, w))
                    shape.setstate(state)
                    _grow_fixed(c, level + 1, shape)
            else:
                d = draw(st.sampled_from([(1, 0), (-1, 0), (1, -1), (-1, -2)]))
                w = draw(st.integers(1, 2))
                for _ in range(copies):
                    L.append(Leg(v, d, w, Terminus("singular", (pos[0] + d[0], pos[1] + d[1]))))

    def _grow_fixed(v, level, rnd):
        pos = V[v]
        for _ in range(rnd.randint(1, 2)):
            copies = rnd.randint(1, 2)
            d = rnd.choice([(1, 0), (-1, 0), (1, -1)])
            for _ in range(copies):
                L.append(Leg(v, d, 1, Terminus("singular", (pos[0] + d[0], pos[1] + d[1]))))

    grow(0, 0)
    return TropicalCurve(tuple(V), tuple(E), tuple(L))


@given(trees())
def test_automorphisms_brute_force(h):
    assume(len(h.vertices) + len(h.legs) <= 12)
    assert automorphisms(h) == oracles.brute_automorphisms(h)


class TestCompletion:
    def test_std11(self):
        d = scatter(new_named("std", 1, 1), 3)
        (r,) = d.new_rays
        h = complete_ray(d, r)
        assert len(h.vertices) == 1 and not h.edges
        assert sorted((l.direction, l.weight, l.terminus.kind) for l in h.legs) == [
            ((-1, 0), 1, "wall"), ((0, -1), 1, "wall"), ((1, 1), 1, "unbounded")]
        assert multiplicity(h) == 1 and h.is_balanced()

    def test_p2_first_order_shape(self, p2_low):
        U = p2_low.unfolding
        ups = [r for r in p2_low.new_rays if r.order == 2 and r.direction == (0, 1)]
        assert ups
        for r in ups:
            h = complete_ray(p2_low, r)
            assert len(h.vertices) == 1 and len(h.legs) == 3
            for leg in h.legs[1:]:
                assert leg.terminus.kind == "singular"
                p = leg.terminus.point
                assert p[1] == U.boundary_y(p[0])
            c, _, (_, n) = r.single_term()
            assert c == n * multiplicity(h)
            if n == 3:
                assert multiplicity(h) == 3 and c == 9

    def test_initial_ray(self):
        d = new_named("std", 1, 1)
        with pytest.raises(ValueError):
            completions(d, d.rays[0])

    def test_ambiguous(self, p2_low):
        many = [r for r in p2_low.new_rays if len(completions(p2_low, r)) > 1]
        assert many
        with pytest.raises(AmbiguousAncestry):
            complete_ray(p2_low, many[0])

    def test_all_balanced(self, p2_low):
        for r in p2_low.new_rays:
            for h in completions(p2_low, r):
                assert h.is_balanced()
                for leg in h.legs:
                    if leg.terminus.kind == "singular":
                        # a leg ends on the wall it came from
                        p, v = leg.terminus.point, h.vertices[leg.vertex]
                        assert oracles.det(leg.direction, (p[0] - v[0], p[1] - v[1])) == 0

    def test_json(self, p2_low):
        r = next(r for r in p2_low.new_rays if r.direction == (0, 1))
        js = complete_ray(p2_low, r).to_json()
        assert set(js) == {"vertices", "edges", "legs"}
        assert js["legs"][0]["terminus"] == "unbounded"


@pytest.mark.parametrize("kind,params,k", [("std", (1, 1), 4), ("std", (2, 2), 5),
                                           ("exp", (2, 3), 5), ("det", (2,), 5),
                                           ("std", (3, 3), 4)])
def test_named_correspondence(kind, params, k):
    d = scatter(new_named(kind, *params), k)
    for r in d.new_rays:
        c, wm = correspondence(d, r)
        assert c == wm


def test_p2_correspondence_every_ray(p2_low):
    for r in p2_low.new_rays:
        c, wm = correspondence(p2_low, r)
        assert c == wm, r.ray_id


@pytest.mark.parametrize("case,refined", [("(8'a)", True), ("(8'a)", False), ("(6a)", False),
                                          ("(4a)", False)])
def test_case_correspondence_every_log_term(case, refined):
    """Cases whose edges have length 2 exercise the wall exponent in the leg factor."""
    N, Y = t_order_for(case, 2 if case != "(4a)" else 1)
    d = scatter(new_case(case, 1, t_bound=N, refined=refined), N, accelerate=True, y_bound=Y)
    n = 0
    for b, m in sorted({(r.base, r.direction) for r in d.new_rays}):
        for c, wm in wall_correspondence(d, b, m).values():
            assert c == wm
            n += 1
    assert n >= len(d.new_rays) > 20


def test_p2_single_wall_coefficient(p2_low):
    """When a ray is alone on its support, its own coefficient is w * Mult."""
    groups = {}
    for r in p2_low.new_rays:
        groups.setdefault((r.base, r.direction), []).append(r)
    n = 0
    for rs in groups.values():
        if len(rs) != 1:
            continue
        (r,) = rs
        c, (_, _), m = r.single_term()
        assert c == correspondence(p2_low, r)[1]
        n += 1
    assert n > 20


def test_log_terms_of_shared_support(p2_low):
    # the y^6 walls at the origin: 72 from one wall, minus half the square of 9
    L = log_terms(p2_low, (Q(0), Q(0)), (0, 1))
    six = sum((c for k, c in L.items() if k[3] == 6), mpq(0))
    assert six == mpq(63, 2)


class TestSumCheck:
    def _expected(self, d, deg):
        L = log1(f_out(d))
        return {n: L.coefficient((), (0, n)) for n in range(3, 3 * deg + 1, 3)}

    def test_order_one(self, p2_low):
        s = tropical_sum_check(p2_low, 1)
        assert s.coefficient((), (0, 3)) == 27 and len(s) == 1

    def test_order_two(self, p2_low):
        s = tropical_sum_check(p2_low, 2)
        assert s.coefficient((), (0, 6)) == mpq(405, 2)
        assert {n: s.coefficient((), (0, n)) for n in (3, 6)} == self._expected(p2_low, 2)

    def test_order_three(self, p2):
        s = tropical_sum_check(p2, 3)
        assert s.coefficient((), (0, 9)) == 2196
        assert {n: s.coefficient((), (0, n)) for n in (3, 6, 9)} == self._expected(p2, 3)

    def test_empty(self):
        assert len(tropical_sum_check(new_case("P2", 1), 0)) == 0

    def test_other_case(self):
        with pytest.raises(ValueError):
            tropical_sum_check(new_case("(8)", 1), 0)

    def test_needs_order(self, p2_low):
        with pytest.raises(ValueError):
            tropical_sum_check(p2_low, 3)
