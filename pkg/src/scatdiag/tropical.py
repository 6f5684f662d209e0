"""
Tropical curves obtained by completing rays, and their multiplicities.

Curves are read off the log of the wall functions.  At a point ``p`` the
walls leaving ``p`` in a common direction are multiplied and their log is
expanded; each term ``c t^a z^m`` of it is produced by multisets of log
terms of the walls passing through ``p``.  A term of an initial wall becomes
a leg back to its singular point, a term of a created wall becomes a bounded
edge to that wall's base, and that term is completed in turn.  With
``w = |m|`` the lattice length,

    c = w * sum of Mult(h) over the completions h of the term,

which is what :func:`correspondence` reports for each ray.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, permutations
from math import factorial

from gmpy2 import mpq

from .diagram import Diagram, Ray, new_lines
from .engine import _rotate
from .series import Series, TruncationPolicy, log1, pack, primitive, unpack

__all__ = ["Terminus", "Leg", "TropicalCurve", "AmbiguousAncestry", "complete_ray",
           "completions", "vertex_multiplicity", "leg_multiplicity", "multiplicity",
           "tropical_sum_check", "deformation_orders", "local_count", "incoming",
           "automorphisms", "log_terms", "term_completions", "correspondence",
           "wall_correspondence"]


class AmbiguousAncestry(ValueError):
    """The ray decomposes into several tropical curves."""


@dataclass(frozen=True)
class Terminus:
    """Where a leg ends: ``"unbounded"``, ``"singular"`` (at ``point``) or ``"wall"``.

    ``length`` is the exponent ``l`` of the wall ``(1 + t z^u)^l`` the leg
    comes from and ``step`` is the lattice length of ``u``.
    """

    kind: str
    point: tuple | None = None
    length: int = 1
    step: int = 1

    @classmethod
    def unbounded(cls):
        return cls("unbounded")


@dataclass(frozen=True)
class Leg:
    vertex: int
    direction: tuple
    weight: int
    terminus: Terminus


@dataclass(frozen=True)
class TropicalCurve:
    vertices: tuple
    edges: tuple
    legs: tuple

    def incident(self, v):
        """Weighted outgoing tangent vectors at vertex ``v``."""
        out = []
        P = self.vertices
        for i, j, w in self.edges:
            for a, b in ((i, j), (j, i)):
                if a == v:
                    dx, dy = P[b][0] - P[a][0], P[b][1] - P[a][1]
                    den = Fraction(dx).denominator * Fraction(dy).denominator
                    u, _ = primitive((int(dx * den), int(dy * den)))
                    out.append((w * u[0], w * u[1]))
        for leg in self.legs:
            if leg.vertex == v:
                out.append((leg.weight * leg.direction[0], leg.weight * leg.direction[1]))
        return out

    def is_balanced(self):
        for v in range(len(self.vertices)):
            s = [0, 0]
            for u in self.incident(v):
                s[0] += u[0]
                s[1] += u[1]
            if s != [0, 0]:
                return False
        return True

    def segments(self):
        """``(start, end_or_None, primitive direction, weight)`` for edges and legs."""
        P = self.vertices
        out = []
        for i, j, w in self.edges:
            dx, dy = P[j][0] - P[i][0], P[j][1] - P[i][1]
            den = Fraction(dx).denominator * Fraction(dy).denominator
            u, _ = primitive((int(dx * den), int(dy * den)))
            out.append((P[i], P[j], u, w))
        for leg in self.legs:
            end = leg.terminus.point if leg.terminus.kind == "singular" else None
            out.append((P[leg.vertex], end, leg.direction, leg.weight))
        return out

    def to_json(self):
        from .diagram import fmt_q
        return {
            "vertices": [[fmt_q(x), fmt_q(y)] for x, y in self.vertices],
            "edges": [[i, j, w] for i, j, w in self.edges],
            "legs": [{"vertex": l.vertex, "direction": list(l.direction), "weight": l.weight,
                      "terminus": l.terminus.kind, "length": l.terminus.length,
                      "step": l.terminus.step,
                      **({"point": [fmt_q(c) for c in l.terminus.point]}
                         if l.terminus.point is not None else {})}
                     for l in self.legs],
        }

    def __str__(self):
        lines = []
        for v, p in enumerate(self.vertices):
            lines.append(f"V{v} at ({p[0]}, {p[1]})")
        for i, j, w in self.edges:
            lines.append(f"  edge V{i} -- V{j}  weight {w}")
        for l in self.legs:
            end = f" to ({l.terminus.point[0]}, {l.terminus.point[1]})" \
                if l.terminus.point is not None else ""
            lines.append(f"  leg at V{l.vertex} dir {l.direction} weight {l.weight} "
                         f"[{l.terminus.kind}{end}]")
        return "\n".join(lines)


def _policy_at(d: Diagram, p):
    pol = d.policy
    if d.y_bound is not None and p[1] > 0:
        pol = pol.with_y_bound(d.y_bound)
    return pol


def _log_raw(d: Diagram, rays, pol):
    f = Series.one(d.t_count, pol)
    for r in rays:
        f = f * r.function.truncate(pol)
    return {k: c for k, c in log1(f).raw().items() if k[0] > 0}


def _pt(p):
    return (Fraction(p[0]), Fraction(p[1]))


def log_terms(d: Diagram, base, direction) -> dict:
    """Log of the product of the created walls leaving ``base`` along ``direction``.

    Keys are raw monomial keys ``(deg, packed, mx, my)``.
    """
    base, direction = _pt(base), tuple(direction)
    memo = d._memo.setdefault("log_terms", {})
    if (base, direction) in memo:
        return memo[(base, direction)]
    U = d.unfolding
    if d.accelerated and U is not None and not U.in_central(base[0]):
        j = U.domain_of(base[0])
        nv = d.t_count
        central = log_terms(d, U.translate_point(base, -j),
                            primitive(U.translate_vector(direction, -j))[0])
        res = {}
        for (dg, pk, mx, my), c in central.items():
            m = U.translate_vector((mx, my), j)
            res[(dg, _rotate(pk, j * U.r, nv), m[0], m[1])] = c
    else:
        rays = [r for r in d.rays
                if not r.initial and r.base == base and r.direction == direction]
        res = _log_raw(d, rays, _policy_at(d, base))
    memo[(base, direction)] = res
    return res


def _inputs(d: Diagram, p):
    """Log terms ``(key, coefficient, ray)`` of the walls through ``p`` not created there."""
    memo = d._memo.setdefault("inputs", {})
    if p in memo:
        return memo[p]
    groups = {}
    for r in d.rays:
        if not r.contains(p) or (not r.initial and r.base == p):
            continue
        if r.initial and r.base == p:
            # both halves of a line through p form one wall
            neg = (-r.direction[0], -r.direction[1])
            key = ("line", max(r.direction, neg), repr(r.function.to_json()))
        else:
            key = ("ray", r.base, r.direction)
        groups.setdefault(key, []).append(r)
    pol = _policy_at(d, p)
    out = []
    for key in sorted(groups, key=repr):
        rs = groups[key][:1] if key[0] == "line" else groups[key]
        for k, c in sorted(_log_raw(d, rs, pol).items()):
            out.append((k, c, rs[0]))
    memo[p] = out
    return out


def _terminus(d: Diagram, r: Ray):
    raw = r.function.raw()
    low = min(k for k in raw if k[0] > 0)
    step = primitive((low[2], low[3]))[1] // low[0]
    if d.unfolding is not None:
        return Terminus("singular", r.base, d.unfolding.edge_length(r.edge), step)
    return Terminus("wall", None, r.function.max_degree(), step)


def _graft(partials, subs, wt):
    out = []
    for V, E, L in partials:
        for V2, E2, L2 in subs:
            off = len(V)
            out.append((V + V2,
                        E + [(0, off, wt)] + [(i + off, j + off, w) for i, j, w in E2],
                        L + [(v + off, dd, w, tt) for v, dd, w, tt in L2]))
    return out


def _translate(U, part, j):
    V, E, L = part
    V2 = [U.translate_point(v, j) for v in V]
    L2 = []
    for v, dd, w, tt in L:
        if tt.point is not None:
            tt = replace(tt, point=U.translate_point(tt.point, j))
        L2.append((v, U.translate_vector(dd, j), w, tt))
    return (V2, list(E), L2)


def _multisets(cand, tv, m):
    """Multisets of candidate terms whose t-vectors and exponents add up to ``(tv, m)``."""
    nv = len(tv)
    vecs = [unpack(k[1], nv) for k, _, _ in cand]

    def rec(i, rem, mx, my, chosen):
        if not any(rem):
            if (mx, my) == (0, 0) and chosen:
                yield list(chosen)
            return
        if i == len(cand):
            return
        yield from rec(i + 1, rem, mx, my, chosen)
        k = cand[i][0]
        n = 0
        cur = rem
        while True:
            cur = tuple(a - b for a, b in zip(cur, vecs[i]))
            if min(cur) < 0:
                break
            n += 1
            yield from rec(i + 1, cur, mx - n * k[2], my - n * k[3], chosen + [(i, n)])

    yield from rec(0, tuple(tv), m[0], m[1], [])


def term_completions(d: Diagram, base, key):
    """Partial curves ``(vertices, edges, legs)`` rooted at ``base`` producing ``key``.

    ``key`` is a raw monomial key of :func:`log_terms` at ``base``.  The
    outgoing leg is not included.
    """
    p = _pt(base)
    key = tuple(key)
    memo = d._memo.setdefault("term_curves", {})
    if (p, key) in memo:
        return memo[(p, key)]
    U = d.unfolding
    nv = d.t_count
    if d.accelerated and U is not None and not U.in_central(p[0]):
        # pull back to the central domain, where the walls are complete
        j = U.domain_of(p[0])
        m0 = U.translate_vector((key[2], key[3]), -j)
        key0 = (key[0], _rotate(key[1], -j * U.r, nv), m0[0], m0[1])
        res = [_translate(U, part, j)
               for part in term_completions(d, U.translate_point(p, -j), key0)]
        memo[(p, key)] = res
        return res
    tv = unpack(key[1], nv)
    cand = [t for t in _inputs(d, p)
            if all(a <= b for a, b in zip(unpack(t[0][1], nv), tv))]
    res = []
    for chosen in _multisets(cand, tv, (key[2], key[3])):
        if len({primitive((cand[i][0][2], cand[i][0][3]))[0] for i, _ in chosen}) < 2:
            continue
        partials = [([p], [], [])]
        for i, n in chosen:
            k, _, r = cand[i]
            prim, w = primitive((k[2], k[3]))
            if r.initial:
                leg = (0, (-prim[0], -prim[1]), w, _terminus(d, r))
                partials = [(V, E, L + [leg] * n) for V, E, L in partials]
                continue
            subs = term_completions(d, r.base, k)
            nxt = []
            for combo in combinations_with_replacement(range(len(subs)), n):
                cur = partials
                for c in combo:
                    cur = _graft(cur, [subs[c]], w)
                nxt.extend(cur)
            partials = nxt
        res.extend(partials)
    memo[(p, key)] = res
    return res


def _close(part, direction, weight):
    V, E, L = part
    legs = [Leg(0, tuple(direction), weight, Terminus.unbounded())]
    legs += [Leg(v, tuple(dd), w, tt) for v, dd, w, tt in L]
    return TropicalCurve(tuple(V), tuple(E), tuple(legs))


def completions(d: Diagram, ray: Ray):
    """Every tropical curve completing a created ray.

    These are the completions of the ray's monomial as a term of the log
    of all walls sharing the ray's base and direction.  Edges are stored as
    ``(parent, child, weight)``; vertex 0 carries the unbounded leg.
    """
    if ray.initial:
        raise ValueError("initial rays have no ancestry")
    _, (dg, pk), m = ray.single_term()
    _, g = primitive(m)
    return [_close(part, ray.direction, g)
            for part in term_completions(d, ray.base, (dg, pk, m[0], m[1]))]


def complete_ray(d: Diagram, ray: Ray) -> TropicalCurve:
    """The tropical curve of a created ray when it is unique."""
    alts = completions(d, ray)
    if len(alts) != 1:
        raise AmbiguousAncestry(f"ray {ray.ray_id} has {len(alts)} completions")
    return alts[0]


def correspondence(d: Diagram, ray: Ray):
    """``(c, w * sum Mult)`` for a created ray; the two agree on consistent diagrams.

    ``c`` is the coefficient of the ray's monomial in the log of the walls
    sharing its base and direction, which is the ray's own coefficient
    whenever no lower-order wall lies on the same support.
    """
    _, (dg, pk), m = ray.single_term()
    c = log_terms(d, ray.base, ray.direction).get((dg, pk, m[0], m[1]), mpq(0))
    w = primitive(m)[1]
    return c, w * sum((multiplicity(h) for h in completions(d, ray)), mpq(0))

def wall_correspondence(d: Diagram, base, direction) -> dict:
    """``{key: (c, w * sum Mult)}`` over every log term of one group of walls.

    The group is all created walls leaving ``base`` along ``direction``;
    keys are raw monomial keys and ``w`` is the lattice length of the
    term's exponent.
    """
    out = {}
    for key, c in sorted(log_terms(d, base, direction).items()):
        w = primitive((key[2], key[3]))[1]
        mult = sum((multiplicity(_close(part, direction, w))
                    for part in term_completions(d, base, key)), mpq(0))
        out[key] = (c, w * mult)
    return out


def _det(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _caterpillar(vectors):
    prod = 1
    s = vectors[0]
    for u in vectors[1:]:
        prod *= _det(s, u)
        s = (s[0] + u[0], s[1] + u[1])
    return abs(prod)


def deformation_orders(vectors):
    """Caterpillar products over all orders of the incoming vectors.

    Orders in which some partial sum is parallel to the next vector give
    no trivalent deformation and are skipped.
    """
    return {_caterpillar(list(p)) for p in permutations(vectors) if _caterpillar(list(p))}


@lru_cache(maxsize=None)
def local_count(vectors) -> mpq:
    """Tropical count of a vertex with the given incoming weighted vectors.

    Lines ``1 + t_i z^(v_i)`` are scattered through one point and the
    coefficient of ``t_1...t_n z^(sum v_i)`` in the log of the outgoing wall
    is divided by the lattice length of ``sum v_i``.  A line whose exponent
    has lattice length ``w`` counts a weight ``w`` leg with a factor ``1/w``,
    so the lengths are multiplied back in.  The result is the count of
    trivalent curves through generic translates of the lines.
    """
    from .engine import scatter
    vectors = tuple(sorted(vectors))
    n = len(vectors)
    out = (sum(v[0] for v in vectors), sum(v[1] for v in vectors))
    if n < 2 or out == (0, 0):
        raise ValueError("a vertex needs two or more incoming vectors with nonzero sum")
    if n == 2:
        return mpq(abs(_det(*vectors)))
    prim, w = primitive(out)
    d = new_lines([((0, 0), v) for v in vectors], t_bound=n)
    pol = replace(d.policy, square_free=True)
    d = scatter(replace(d, policy=pol), n)
    f = Series.one(n, pol)
    for r in d.rays:
        if not r.initial and r.direction == prim:
            f = f * r.function
    key = (n, pack((1,) * n), out[0], out[1])
    scale = 1
    for v in vectors:
        scale *= primitive(v)[1]
    return mpq(log1(f).raw().get(key, 0)) * scale / w


def _output_index(curve, v):
    for k, leg in enumerate(curve.legs):
        if leg.vertex == v and leg.terminus.kind == "unbounded":
            return ("leg", k)
    for k, (i, j, _) in enumerate(curve.edges):
        if j == v:
            return ("edge", k)
    raise ValueError(f"vertex {v} has no outgoing edge")


def incoming(curve: TropicalCurve, v: int):
    """Weighted vectors flowing into ``v`` from the leaves, and the outgoing one."""
    P = curve.vertices
    kind, idx = _output_index(curve, v)
    ins, out = [], None
    for k, (i, j, w) in enumerate(curve.edges):
        if v not in (i, j):
            continue
        a, b = (i, j) if i == v else (j, i)
        dx, dy = P[b][0] - P[a][0], P[b][1] - P[a][1]
        den = Fraction(dx).denominator * Fraction(dy).denominator
        u, _ = primitive((int(dx * den), int(dy * den)))
        vec = (w * u[0], w * u[1])
        if (kind, idx) == ("edge", k):
            out = vec
        else:
            ins.append((-vec[0], -vec[1]))
    for k, leg in enumerate(curve.legs):
        if leg.vertex != v:
            continue
        vec = (leg.weight * leg.direction[0], leg.weight * leg.direction[1])
        if (kind, idx) == ("leg", k):
            out = vec
        else:
            ins.append((-vec[0], -vec[1]))
    return ins, out


def vertex_multiplicity(curve: TropicalCurve, v: int):
    """``|det|`` at a trivalent vertex; the deformation count at higher valency."""
    ins, out = incoming(curve, v)
    if len(ins) < 2:
        raise ValueError(f"vertex {v} has valency {len(ins) + 1}")
    if (sum(u[0] for u in ins), sum(u[1] for u in ins)) != out:
        raise ValueError(f"vertex {v} is not balanced")
    if len(ins) == 2:
        return mpq(abs(_det(*ins)))
    return local_count(tuple(ins))


def leg_multiplicity(w: int, length: int = 1):
    """``(-1)^(w+1) / w^2``, times ``l`` for a leg on a wall ``(1 + t z^m)^l``."""
    if w < 1:
        raise ValueError("leg weight must be positive")
    return mpq(length * (-1) ** (w + 1), w * w)


def _canon(curve, v, children, legs_at):
    """Canonical form of the subtree at ``v`` and its automorphism count."""
    items = []
    aut = 1
    for c, w in children[v]:
        form, a = _canon(curve, c, children, legs_at)
        items.append(("e", w, curve.vertices[c], form))
        aut *= a
    for leg in legs_at[v]:
        items.append(("l", leg.weight, leg.direction, leg.terminus.kind, leg.terminus.point,
                      leg.terminus.length))
    items.sort(key=repr)
    for c in Counter(map(repr, items)).values():
        aut *= factorial(c)
    return tuple(map(repr, items)), aut


def automorphisms(curve: TropicalCurve) -> int:
    """Size of the automorphism group fixing the embedding.

    The curves built here are trees rooted at the vertex with the unbounded
    leg, so the group is a product over vertices of permutations of
    identical branches.
    """
    children = {v: [] for v in range(len(curve.vertices))}
    for i, j, w in curve.edges:
        children[i].append((j, w))
    legs_at = {v: [] for v in range(len(curve.vertices))}
    for k, leg in enumerate(curve.legs):
        if k and leg.terminus.kind == "unbounded":
            raise ValueError("curve has several unbounded legs")
        legs_at[leg.vertex].append(leg)
    return _canon(curve, 0, children, legs_at)[1]


def multiplicity(curve: TropicalCurve):
    """Product of vertex and leg multiplicities divided by ``|Aut|``."""
    if not curve.is_balanced():
        raise ValueError("curve is not balanced")
    m = mpq(1)
    for v in range(len(curve.vertices)):
        m *= vertex_multiplicity(curve, v)
    for leg in curve.legs:
        t = leg.terminus
        if t.kind != "unbounded":
            if leg.weight % t.step:
                raise ValueError("leg weight is not a multiple of its wall's step")
            m *= leg_multiplicity(leg.weight // t.step, t.length) / t.step
    return m / automorphisms(curve)


def tropical_sum_check(d: Diagram, order: int) -> Series:
    """``sum (D.beta) Mult(h) y^(D.beta)`` over curves of upward walls, ``D.beta <= 3 order``.

    ``D.beta`` is the y-degree.  The curves are the completions of every
    log term of the upward walls based in the central fundamental domain,
    so the result is compared against ``log1(f_out)``.  The diagram must be
    scattered to t-order ``2 * order`` for the sum to be complete.
    """
    if d.case != "(9)":
        raise ValueError("tropical_sum_check weights curves by 3d and needs the (9) case")
    if d.certified_order < 2 * order:
        raise ValueError(f"degree {order} needs the diagram scattered to order {2 * order}")
    if d.y_bound is not None and d.y_bound < 3 * order:
        raise ValueError(f"degree {order} needs y_bound >= {3 * order}")
    U = d.unfolding
    acc = {}
    seen = set()
    for r in d.rays:
        if r.initial or r.direction != (0, 1) or not U.in_central(r.base[0]):
            continue
        if r.base in seen:
            continue
        seen.add(r.base)
        for key in sorted(log_terms(d, r.base, (0, 1))):
            n = key[3]
            if n > 3 * order:
                continue
            for part in term_completions(d, r.base, key):
                acc[n] = acc.get(n, 0) + n * multiplicity(_close(part, (0, 1), n))
    pol = TruncationPolicy(0, None, None)
    return Series({(0, 0, 0, n): c for n, c in acc.items() if c}, 0, pol)
