"""
Rays, diagrams and the initial diagrams.

A ray is ``base + R_{>=0} direction`` carrying a wall function.  Diagrams are
immutable; the engine builds new ones.  Two families of initial diagrams
exist: the named ones (``std``, ``exp``, ``det``) made of two lines through the
origin, and the case diagrams read off an unfolding.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb

from .lattice import UnfoldingData, build_unfolding, resolve_case
from .series import Series, TruncationPolicy, primitive

__all__ = ["Ancestor", "Ray", "Diagram", "new_named", "new_lines", "new_case", "merge_parallel",
           "ray_sort_key", "fmt_q"]


def fmt_q(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Ancestor:
    """A parent ray (by id) used ``weight`` times in producing a child."""

    ray_id: str
    weight: int


@dataclass(frozen=True)
class Ray:
    base: tuple
    direction: tuple
    function: Series
    order: int
    ancestry: tuple = ()
    initial: bool = False
    edge: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "base", (Fraction(self.base[0]), Fraction(self.base[1])))
        d = (int(self.direction[0]), int(self.direction[1]))
        if primitive(d)[1] != 1:
            raise ValueError(f"ray direction {d} is not primitive")
        object.__setattr__(self, "direction", d)

    def check(self):
        """Raise ``ValueError`` if a ray invariant fails.

        Initial rays may be the backward half of a line, whose function is
        written in the opposite direction.
        """
        f = self.function
        if f.constant_term() != 1:
            raise ValueError("wall function must have constant term 1")
        if f.is_one():
            raise ValueError("wall function must not be 1")
        a, b = self.direction
        for (_, _, mx, my) in f.raw():
            if (mx, my) == (0, 0):
                continue
            if mx * b != my * a:
                raise ValueError(f"monomial exponent {(mx, my)} is not along {self.direction}")
            if mx * a + my * b < 0 and not self.initial:
                raise ValueError(f"monomial exponent {(mx, my)} is not along {self.direction}")

    @property
    def ray_id(self):
        blob = json.dumps([[fmt_q(self.base[0]), fmt_q(self.base[1])], list(self.direction),
                           self.function.to_json()], separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def contains(self, p):
        """Whether ``p`` lies on the closed ray."""
        dx, dy = p[0] - self.base[0], p[1] - self.base[1]
        a, b = self.direction
        return dx * b == dy * a and dx * a + dy * b >= 0

    def single_term(self):
        """``(coefficient, (deg, packed), m)`` if the function is ``1 + c t^a z^m``."""
        items = [(k, v) for k, v in self.function.raw().items() if k != (0, 0, 0, 0)]
        if len(items) != 1:
            return None
        (d, p, x, y), c = items[0]
        return c, (d, p), (x, y)


def ray_sort_key(r: Ray):
    return (r.base, r.direction, r.order, not r.initial,
            json.dumps(r.function.to_json(), separators=(",", ":")))


@dataclass(frozen=True)
class Diagram:
    rays: tuple
    t_count: int
    policy: TruncationPolicy
    certified_order: int = 0
    case: str | None = None
    unfolding: UnfoldingData | None = None
    kind: str | None = None
    params: tuple = ()
    accelerated: bool = False
    y_bound: int | None = None
    _index: dict = field(default_factory=dict, compare=False, repr=False)
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(sorted(self.rays, key=ray_sort_key)))

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    @property
    def label(self):
        if self.case is not None:
            suffix = "~" if self.unfolding is not None and self.unfolding.refined else ""
            return self.case + suffix
        return f"{self.kind}({','.join(map(str, self.params))})"

    def by_id(self, rid):
        if not self._index:
            for r in self.rays:
                self._index.setdefault(r.ray_id, r)
        if rid in self._index:
            return self._index[rid]
        hits = [r for key, r in self._index.items() if key.startswith(rid)]
        if len(hits) > 1:
            raise KeyError(f"ray id prefix {rid!r} is ambiguous ({len(hits)} rays)")
        if not hits:
            raise KeyError(f"no ray with id {rid!r}")
        return hits[0]

    @property
    def initial_rays(self):
        return [r for r in self.rays if r.initial]

    @property
    def new_rays(self):
        return [r for r in self.rays if not r.initial]

    def with_rays(self, rays, **kw):
        return replace(self, rays=tuple(rays), _index={}, _memo={}, **kw)

    def check(self):
        for r in self.rays:
            r.check()
        if self.unfolding is not None:
            for r in self.initial_rays:
                if r.base != self.unfolding.singular_point(r.edge):
                    raise ValueError(f"initial ray {r.ray_id} is not based at its singular point")


def _line(base, m, f, edge=None):
    neg = (-m[0], -m[1])
    return [Ray(base, m, f, 1, (), True, edge), Ray(base, neg, f, 1, (), True, edge)]


def new_named(kind: str, *params, t_bound: int = 8) -> Diagram:
    """Two lines through the origin: ``std(m, n)``, ``exp(m, n)`` or ``det(m)``."""
    kind = kind.lower()
    params = tuple(int(p) for p in params)
    if any(p <= 0 for p in params):
        raise ValueError("parameters must be positive")
    pol = TruncationPolicy(t_bound)
    O = (0, 0)
    if kind == "std":
        if len(params) != 2:
            raise ValueError("std takes two parameters")
        m, n = params
        f1 = Series.from_terms([((j, 0), (j, 0), comb(m, j)) for j in range(m + 1)], 2, pol)
        f2 = Series.from_terms([((0, j), (0, j), comb(n, j)) for j in range(n + 1)], 2, pol)
        lines = [((1, 0), f1), ((0, 1), f2)]
    elif kind == "exp":
        if len(params) != 2:
            raise ValueError("exp takes two parameters")
        m, n = params
        f1 = Series.from_terms([((0, 0), (0, 0), 1), ((1, 0), (m, 0), 1)], 2, pol)
        f2 = Series.from_terms([((0, 0), (0, 0), 1), ((0, 1), (0, n), 1)], 2, pol)
        lines = [((1, 0), f1), ((0, 1), f2)]
    elif kind == "det":
        if len(params) != 1:
            raise ValueError("det takes one parameter")
        (m,) = params
        f1 = Series.from_terms([((0, 0), (0, 0), 1), ((1, 0), (1, 0), 1)], 2, pol)
        f2 = Series.from_terms([((0, 0), (0, 0), 1), ((0, 1), (-1, m), 1)], 2, pol)
        lines = [((1, 0), f1), (primitive((-1, m))[0], f2)]
    else:
        raise ValueError(f"unknown diagram kind {kind!r}")
    rays = []
    for i, (d, f) in enumerate(lines):
        rays += _line(O, d, f, edge=i)
    return Diagram(tuple(rays), 2, pol, 0, kind=kind, params=params)


def new_lines(lines, t_bound: int = 8) -> Diagram:
    """Lines ``(base, m)`` or ``(base, m, l)``, each with function ``(1 + t_i z^m)^l``.

    Every line gets its own t-variable.  ``m`` may be any nonzero lattice
    vector; the line runs along its primitive direction.
    """
    lines = [tuple(ln) if len(ln) == 3 else (ln[0], ln[1], 1) for ln in lines]
    n = len(lines)
    if n == 0:
        raise ValueError("need at least one line")
    pol = TruncationPolicy(t_bound)
    rays = []
    for i, (base, m, l) in enumerate(lines):
        m = (int(m[0]), int(m[1]))
        if m == (0, 0) or l < 1:
            raise ValueError(f"bad line {(base, m, l)}")
        terms = []
        for j in range(l + 1):
            exps = [0] * n
            exps[i] = j
            terms.append((tuple(exps), (j * m[0], j * m[1]), comb(l, j)))
        f = Series.from_terms(terms, n, pol)
        rays += _line(base, primitive(m)[0], f, edge=i)
    return Diagram(tuple(rays), n, pol, 0, kind="lines", params=())


def case_policy(t_bound, y_bound=None):
    return TruncationPolicy(t_bound, lateral_bound=t_bound, y_bound=y_bound)


def new_case(case, k: int = 1, t_bound: int = 8, refined: bool = False) -> Diagram:
    """Initial diagram of a case over ``k`` fundamental domains on each side.

    Each edge ``e`` of the window contributes two rays based at its midpoint,
    pointing to the two endpoints, with functions ``(1 + t_e z^m)^l``.  Every
    edge gets its own t-variable.  With ``refined=True`` the edges are first
    cut into unit segments (the smooth toric model).

    ``t_bound`` is the highest order the diagram can later be scattered to:
    monomials ``t^a z^m`` with ``a + |m_x| > t_bound`` are discarded from the
    start, since they can never contribute to an upward ray of that order.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    label = resolve_case(case)
    U = build_unfolding(label, k, refined=refined)
    edges = U.edges
    r = len(edges)
    pol = case_policy(t_bound)
    rays = []
    for i, e in enumerate(edges):
        p = U.singular_point(e)
        d = U.edge_direction(e)
        l = U.edge_length(e)
        for s in (1, -1):
            m = (s * d[0], s * d[1])
            exps = [0] * r
            terms = []
            for j in range(l + 1):
                exps[i] = j
                terms.append((tuple(exps), (j * m[0], j * m[1]), comb(l, j)))
            f = Series.from_terms(terms, r, pol)
            rays.append(Ray(p, m, f, 1, (), True, e))
    return Diagram(tuple(rays), r, pol, 0, case=label, unfolding=U)


def merge_parallel(d: Diagram) -> Diagram:
    """Multiply together rays sharing base and direction."""
    groups = {}
    for r in d.rays:
        groups.setdefault((r.base, r.direction), []).append(r)
    rays = []
    for (base, m), rs in groups.items():
        if len(rs) == 1:
            rays.append(rs[0])
            continue
        f = rs[0].function
        for r in rs[1:]:
            f = f * r.function
        if f.is_one():
            continue
        anc = tuple(a for r in rs for a in r.ancestry)
        rays.append(Ray(base, m, f, min(r.order for r in rs), anc,
                        all(r.initial for r in rs), rs[0].edge))
    return d.with_rays(rays)

