"""
Wall crossings, path-ordered products and order-by-order scattering.

Conventions
-----------
A loop around a point runs counterclockwise.  Crossing a ray with primitive
direction ``m`` there, the loop's tangent is ``(-m_y, m_x)``, which is also
the normal ``n`` used in ``z^k -> f^<n, k> z^k``.  Local rays are sorted by
angle in ``[0, 2 pi)`` measured from ``(1, 0)`` and the product is
``theta_r o ... o theta_1``.

Automorphisms are stored through their units: ``theta(x) = x * U_x`` and
``theta(y) = y * U_y``.  Applying ``theta`` to ``x * G`` gives
``x * f^<n, (1,0)> * theta(G)``, so only the units are ever multiplied.  This
matters for case diagrams, whose truncation drops ``t^a z^m`` once
``a + |m_x|`` exceeds the order: every wall term satisfies ``|m_x| <= a``,
so the dropped terms form an ideal of the ring the units live in, while the
bare monomial ``x`` does not.

Case diagrams may also carry a y-bound.  All singular points lie on or below
the line ``y = 0``, so every ray through a point with ``y > 0`` points
upwards; there, monomials with ``m_y`` above the bound form an ideal that
can never feed back into lower y-degrees and are discarded.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, NamedTuple

from gmpy2 import mpq

from .diagram import Ancestor, Diagram, Ray
from .series import (BITS, ONE_KEY, Series, TruncationPolicy, inverse_raw, mul_raw,
                     primitive, unpack)

__all__ = [
    "PlaneAutomorphism", "LocalDiagram", "DefectTerm", "WindowOverflowError",
    "InconsistentInput", "wall_crossing", "localize", "path_ordered_product",
    "consistency_defect", "scatter", "intersect", "angle_key", "ancestry",
    "check_consistency", "points_of",
]


class WindowOverflowError(RuntimeError):
    """Rays from outside the generated window could reach the central domain."""


class InconsistentInput(ValueError):
    """A local diagram is not consistent to the order the caller claimed."""


def angle_key(m):
    """Exact sort key for the angle of ``m`` in ``[0, 2 pi)``."""
    a, b = m
    if b > 0 or (b == 0 and a > 0):
        half = 0
    else:
        half = 1
    if b == 0:
        return (half, 0, Fraction(0))
    return (half, 1, Fraction(-a, b))


def intersect(b1, m1, b2, m2):
    """Intersection point of two rays, or ``None`` (parallel rays give ``None``)."""
    det = m2[0] * m1[1] - m1[0] * m2[1]
    if det == 0:
        return None
    rx, ry = b2[0] - b1[0], b2[1] - b1[1]
    s = Fraction(m2[0] * ry - m2[1] * rx, 1) / det
    u = Fraction(m1[0] * ry - m1[1] * rx, 1) / det
    if s < 0 or u < 0:
        return None
    return (b1[0] + s * m1[0], b1[1] + s * m1[1])


# -- raw automorphism kernels -------------------------------------------------

class _Powers:
    """Cached integer powers of one wall function."""

    __slots__ = ("f", "pol", "cache")

    def __init__(self, f, pol):
        self.f = f
        self.pol = pol
        self.cache = {0: {ONE_KEY: mpq(1)}, 1: f}

    def __getitem__(self, e):
        c = self.cache
        if e in c:
            return c[e]
        if e < 0:
            if -1 not in c:
                c[-1] = inverse_raw(Series(self.f, 0, self.pol))
            step, base = -1, c[-1]
        else:
            step, base = 1, self.f
        prev = self[e - step]
        r = mul_raw(prev, base, self.pol)
        c[e] = r
        return r


def _apply_wall(G, n, P, pol):
    """Apply ``z^m -> f^<n,m> z^m`` to a raw series."""
    groups = defaultdict(dict)
    n0, n1 = n
    for k, c in G.items():
        groups[n0 * k[2] + n1 * k[3]][k] = c
    out = {}
    for e, part in groups.items():
        prod = part if e == 0 else mul_raw(part, P[e], pol)
        for k, v in prod.items():
            s = out.get(k)
            out[k] = v if s is None else s + v
    return {k: v for k, v in out.items() if v}


def _units_of_product(local, pol):
    """Units ``(U_x, U_y)`` of the product of ``(direction, f_raw)`` walls in order."""
    gx = {ONE_KEY: mpq(1)}
    gy = {ONE_KEY: mpq(1)}
    for m, f in local:
        n = (-m[1], m[0])
        P = _Powers(f, pol)
        gx = _apply_wall(gx, n, P, pol)
        if n[0]:
            gx = mul_raw(gx, P[n[0]], pol)
        gy = _apply_wall(gy, n, P, pol)
        if n[1]:
            gy = mul_raw(gy, P[n[1]], pol)
    return gx, gy


def _extract_defect(gx, gy, D):
    """Solve the normal form for the degree-``D`` wall terms.

    Raises ``InconsistentInput`` if a term of lower positive degree survives.
    Returns ``{(deg, packed, mx, my): a}``.
    """
    terms = {}
    for k, c in gx.items():
        if k == ONE_KEY:
            continue
        if k[0] != D:
            raise InconsistentInput(f"term of degree {k[0]} survives below order {D}")
        mx, my = k[2], k[3]
        _, g = primitive((mx, my))
        if my == 0:
            raise RuntimeError("x-image carries a horizontal defect term")
        terms[k] = c * g / my
    for k, c in gy.items():
        if k == ONE_KEY:
            continue
        if k[0] != D:
            raise InconsistentInput(f"term of degree {k[0]} survives below order {D}")
        mx, my = k[2], k[3]
        _, g = primitive((mx, my))
        if mx == 0:
            raise RuntimeError("y-image carries a vertical defect term")
        a = -c * g / mx
        if k in terms:
            if terms[k] != a:
                raise RuntimeError("x- and y-images disagree on a defect term")
        else:
            terms[k] = a
    return terms


# -- public automorphism API --------------------------------------------------

class PlaneAutomorphism:
    """A ring automorphism fixing t, stored as ``x -> x U_x``, ``y -> y U_y``."""

    def __init__(self, unit_x: Series, unit_y: Series):
        self.unit_x = unit_x
        self.unit_y = unit_y

    @classmethod
    def identity(cls, nvars, policy):
        one = Series.one(nvars, policy)
        return cls(one, one)

    @property
    def nvars(self):
        return self.unit_x.nvars

    @property
    def policy(self):
        return self.unit_x.policy

    def _loose(self):
        return replace(self.policy, lateral_bound=None)

    @property
    def image_x(self):
        pol = self._loose()
        x = Series({(0, 0, 1, 0): mpq(1)}, self.nvars, pol)
        return x * self.unit_x.truncate(pol)

    @property
    def image_y(self):
        pol = self._loose()
        y = Series({(0, 0, 0, 1): mpq(1)}, self.nvars, pol)
        return y * self.unit_y.truncate(pol)

    def unit_of(self, m):
        """The unit ``theta(z^m) / z^m``."""
        return self.unit_x ** m[0] * self.unit_y ** m[1]

    def apply(self, s: Series) -> Series:
        pol = s.policy.meet(self.policy)
        ux, uy = _Powers(self.unit_x.raw(), pol), _Powers(self.unit_y.raw(), pol)
        out = {}
        for k, c in s.raw().items():
            u = mul_raw(ux[k[2]], uy[k[3]], pol)
            for kk, v in mul_raw({k: c}, u, pol).items():
                out[kk] = out.get(kk, 0) + v
        return Series({k: v for k, v in out.items() if v}, s.nvars, pol)

    def compose(self, inner: "PlaneAutomorphism") -> "PlaneAutomorphism":
        """``self o inner``."""
        return PlaneAutomorphism(self.unit_x * self.apply(inner.unit_x),
                                 self.unit_y * self.apply(inner.unit_y))

    __matmul__ = compose

    def inverse(self) -> "PlaneAutomorphism":
        """Inverse by fixed-point iteration on the units (t-adically convergent)."""
        vx = self.unit_x ** -1
        vy = self.unit_y ** -1
        for _ in range(self.policy.t_bound + 2):
            # theta(V) = U^{-1} is solved as V <- U^{-1} - (theta(V) - V)
            nx = self.unit_x ** -1 - self.apply(vx) + vx
            ny = self.unit_y ** -1 - self.apply(vy) + vy
            if nx == vx and ny == vy:
                break
            vx, vy = nx, ny
        return PlaneAutomorphism(vx, vy)

    def is_identity(self):
        return self.unit_x.is_one() and self.unit_y.is_one()

    def __eq__(self, other):
        return (isinstance(other, PlaneAutomorphism) and self.unit_x == other.unit_x
                and self.unit_y == other.unit_y)

    def __repr__(self):
        return f"PlaneAutomorphism(x -> x*({self.unit_x}), y -> y*({self.unit_y}))"


def wall_crossing(ray: Ray, crossing_direction, policy=None) -> PlaneAutomorphism:
    """Automorphism for crossing ``ray`` along ``crossing_direction``."""
    m = ray.direction
    c = crossing_direction
    n = (-m[1], m[0])
    s = n[0] * c[0] + n[1] * c[1]
    if s == 0:
        raise ValueError("crossing direction is parallel to the wall")
    if s < 0:
        n = (-n[0], -n[1])
    f = ray.function if policy is None else ray.function.truncate(policy)
    pol = f.policy
    P = _Powers(f.raw(), pol)
    nv = f.nvars
    return PlaneAutomorphism(Series(dict(P[n[0]]), nv, pol), Series(dict(P[n[1]]), nv, pol))


@dataclass(frozen=True)
class LocalDiagram:
    point: tuple
    rays: tuple

    def __len__(self):
        return len(self.rays)


def _local_sort_key(r: Ray):
    return (angle_key(r.direction), r.function.to_json().__repr__())


def localize(d: Diagram, p) -> LocalDiagram:
    """Rays through ``p``, splitting those that merely pass through."""
    p = (Fraction(p[0]), Fraction(p[1]))
    out = []
    for r in d.rays:
        if r.base == p:
            out.append(r)
        elif r.contains(p):
            neg = (-r.direction[0], -r.direction[1])
            out.append(Ray(p, r.direction, r.function, r.order, r.ancestry, r.initial, r.edge))
            out.append(Ray(p, neg, r.function, r.order, r.ancestry, r.initial, r.edge))
    out.sort(key=_local_sort_key)
    return LocalDiagram(p, tuple(out))


def path_ordered_product(ld: LocalDiagram, policy=None) -> PlaneAutomorphism:
    """Compose the wall crossings of ``ld`` counterclockwise."""
    if not ld.rays:
        pol = policy if policy is not None else TruncationPolicy(0)
        return PlaneAutomorphism.identity(0, pol)
    f0 = ld.rays[0].function
    pol = policy if policy is not None else f0.policy
    local = [(r.direction, r.function.truncate(pol).raw()) for r in ld.rays]
    gx, gy = _units_of_product(local, pol)
    return PlaneAutomorphism(Series(gx, f0.nvars, pol), Series(gy, f0.nvars, pol))


class DefectTerm(NamedTuple):
    coefficient: object
    t_exps: tuple
    m: tuple


def consistency_defect(ld: LocalDiagram, k: int, policy=None):
    """Wall terms of t-degree ``k + 1`` needed to make ``ld`` consistent.

    ``ld`` must be consistent to order ``k``; otherwise ``InconsistentInput``.
    Returns a sorted list of :class:`DefectTerm`.
    """
    if not ld.rays:
        return []
    f0 = ld.rays[0].function
    base = policy if policy is not None else f0.policy
    pol = base.with_bound(k + 1)
    local = [(r.direction, r.function.truncate(pol).raw()) for r in ld.rays]
    gx, gy = _units_of_product(local, pol)
    terms = _extract_defect(gx, gy, k + 1)
    out = [DefectTerm(c, unpack(key[1], f0.nvars), (key[2], key[3]))
           for key, c in sorted(terms.items())]
    return out


# -- scattering ---------------------------------------------------------------

class _R:
    """Mutable working record for a ray during scattering."""

    __slots__ = ("base", "dir", "f", "order", "initial", "edge", "domain", "src")

    def __init__(self, base, dir, f, order, initial=False, edge=None, domain=0, src=None):
        self.base = base
        self.dir = dir
        self.f = f
        self.order = order
        self.initial = initial
        self.edge = edge
        self.domain = domain
        self.src = src


def _rotate(packed, shift, nfields):
    if nfields == 0 or shift % nfields == 0:
        return packed
    s = (shift % nfields) * BITS
    total = nfields * BITS
    mask = (1 << total) - 1
    return ((packed << s) | (packed >> (total - s))) & mask


class _Scatterer:
    def __init__(self, d: Diagram, accelerate: bool, y_bound):
        self.d = d
        self.U = d.unfolding
        self.acc = bool(accelerate and self.U is not None)
        self.y_bound = y_bound
        self.nvars = d.t_count
        self.rays = []
        self.points = defaultdict(set)
        self.strip = []
        self.singular = set()
        if self.U is not None:
            self.singular = {r.base for r in d.rays if r.initial}
        for r in d.rays:
            dom = self.U.domain_of(r.base[0]) if self.U is not None else 0
            self.rays.append(_R(r.base, r.direction, r.function.raw(), r.order,
                                r.initial, r.edge, dom, r))
        if self.acc:
            self.lo, self.hi = self.U.domain_bounds(0)
            self.period_fields = self.U.r

    def hits_strip(self, r):
        bx = r.base[0]
        if self.lo <= bx < self.hi:
            return True
        if bx < self.lo:
            return r.dir[0] > 0
        return r.dir[0] < 0

    def add_intersections(self, new_ids):
        rays = self.rays
        if self.acc:
            new_ids = [i for i in new_ids if self.hits_strip(rays[i])]
            self.strip.extend(new_ids)
            cand = self.strip
        else:
            cand = range(len(rays))
        new_set = set(new_ids)
        for i in new_ids:
            ri = rays[i]
            for j in cand:
                if j == i or (j in new_set and j < i):
                    continue
                rj = rays[j]
                p = intersect(ri.base, ri.dir, rj.base, rj.dir)
                if p is None:
                    continue
                if self.acc and not (self.lo <= p[0] < self.hi):
                    continue
                if p in self.singular:
                    continue
                pts = self.points[p]
                pts.add(i)
                pts.add(j)

    def policy_at(self, p, D):
        pol = self.d.policy.with_bound(D)
        if self.y_bound is not None and p[1] > 0:
            pol = pol.with_y_bound(self.y_bound)
        return pol

    def local_walls(self, p, ids, pol):
        loc = []
        for i in ids:
            r = self.rays[i]
            f = r.f
            loc.append((r.dir, f, i))
            if r.base != p:
                loc.append(((-r.dir[0], -r.dir[1]), f, i))
        loc.sort(key=lambda t: (angle_key(t[0]), t[2]))
        return [(m, {k: v for k, v in f.items() if pol.admits(k[0], k[2], k[3])})
                for m, f, _ in loc]

    def defect(self, p, ids, D):
        pol = self.policy_at(p, D)
        gx, gy = _units_of_product(self.local_walls(p, ids, pol), pol)
        return _extract_defect(gx, gy, D)

    def copies(self, rec):
        U = self.U
        K = U.domains
        out = []
        for j in range(-K, K + 1):
            if j == 0:
                continue
            f = {}
            for (dg, pk, mx, my), c in rec.f.items():
                f[(dg, _rotate(pk, j * self.period_fields, self.nvars), mx,
                   my - j * U.shear * mx)] = c
            m = U.translate_vector(rec.dir, j)
            out.append(_R(U.translate_point(rec.base, j), m, f, rec.order,
                          domain=j))
        return out

    def overflow(self, recs):
        """Translates one period beyond the window that matter in the central strip.

        Only meaningful with a y-bound: without one, every far wall eventually
        reaches the strip at some y-degree.
        """
        U = self.U
        K = U.domains
        Y = self.y_bound
        bad = []
        for rec in recs:
            for j in (-(K + 1), K + 1):
                b = U.translate_point(rec.base, j)
                m = U.translate_vector(rec.dir, j)
                ghost = _R(b, m, None, rec.order)
                if not self.hits_strip(ghost):
                    continue
                ys = [k[3] - j * U.shear * k[2] for k in rec.f if k != ONE_KEY]
                if min(ys) > Y and self._strip_min_y(ghost) > 0:
                    continue
                bad.append((rec, j))
        return bad

    def _strip_min_y(self, r):
        (bx, by), (mx, my) = r.base, r.dir
        if self.lo <= bx < self.hi:
            ys = [by]
        else:
            ys = []
        if mx != 0:
            for x in (self.lo, self.hi):
                s = (x - bx) / mx
                if s >= 0:
                    ys.append(by + s * my)
        return min(ys) if ys else by

    def run(self, k, progress=None, check_window=True):
        start = self.d.certified_order + 1
        self.add_intersections(list(range(len(self.rays))))
        check_window = check_window and self.acc and self.y_bound is not None
        if check_window:
            central = [r for r in self.rays if r.initial and r.domain == 0]
            bad = self.overflow(central)
            if bad:
                raise WindowOverflowError(
                    f"{len(bad)} initial rays outside the window reach the central domain; "
                    f"use more domains")
        for D in range(start, k + 1):
            new = []
            for p in sorted(self.points):
                ids = self.points[p]
                if len(ids) < 2:
                    continue
                o = sorted(self.rays[i].order for i in ids)
                if o[0] + o[1] > D:
                    continue
                terms = self.defect(p, ids, D)
                for key, a in sorted(terms.items()):
                    m, _ = primitive((key[2], key[3]))
                    rec = _R(p, m, {ONE_KEY: mpq(1), key: a}, D)
                    new.append(rec)
                    if self.acc:
                        new.extend(self.copies(rec))
            if check_window:
                bad = self.overflow([r for r in new if r.domain == 0])
                if bad:
                    raise WindowOverflowError(
                        f"order {D}: {len(bad)} rays would enter the central domain from "
                        f"outside the window; use more domains")
            ids = list(range(len(self.rays), len(self.rays) + len(new)))
            self.rays.extend(new)
            self.add_intersections(ids)
            if progress is not None:
                progress(D, len(new), len(self.rays), len(self.points))

    def result(self, k):
        d = self.d
        out = []
        for r in self.rays:
            if r.src is not None:
                out.append(r.src)
            else:
                out.append(Ray(r.base, r.dir, Series(r.f, self.nvars, d.policy), r.order))
        return d.with_rays(out, certified_order=k, accelerated=self.acc or d.accelerated,
                           y_bound=self.y_bound)


def scatter(d: Diagram, k: int, accelerate: bool = False, y_bound=None,
            progress: Callable | None = None, check_window: bool = True) -> Diagram:
    """Make ``d`` consistent to order ``k``.

    For case diagrams ``accelerate`` computes defects only in the central
    fundamental domain and copies the new rays to every other domain of the
    window.  ``y_bound`` (case diagrams only) discards monomials above that
    y-degree at points with ``y > 0``; it does not affect upward rays of
    y-degree up to the bound.
    """
    if k < d.certified_order:
        raise ValueError(f"diagram is already certified to order {d.certified_order}")
    if y_bound is not None and d.unfolding is None:
        raise ValueError("y_bound only applies to case diagrams")
    lb = d.policy.lateral_bound
    if lb is not None and k > lb:
        raise ValueError(f"diagram was built for orders up to {lb}; rebuild it with t_bound >= {k}")
    if d.policy.t_bound < k:
        d = d.with_rays([Ray(r.base, r.direction, r.function.truncate(d.policy.with_bound(k)),
                             r.order, r.ancestry, r.initial, r.edge) for r in d.rays],
                        policy=d.policy.with_bound(k))
    if k == d.certified_order:
        return d
    s = _Scatterer(d, accelerate, y_bound)
    s.run(k, progress, check_window)
    return s.result(k)


def points_of(d: Diagram, central_only=False):
    """All points where two non-parallel rays of ``d`` meet (singular points excluded)."""
    s = _Scatterer(d, False, None)
    s.add_intersections(list(range(len(s.rays))))
    pts = sorted(p for p, ids in s.points.items() if len(ids) >= 2)
    if central_only and d.unfolding is not None:
        pts = [p for p in pts if d.unfolding.in_central(p[0])]
    return pts


def check_consistency(d: Diagram, k=None, points=None):
    """Points whose path-ordered product is not the identity mod ``t^(k+1)``."""
    k = d.certified_order if k is None else k
    bad = []
    for p in (points if points is not None else points_of(d)):
        ld = localize(d, p)
        pol = d.policy.with_bound(k)
        yb = d.y_bound
        if yb is not None and p[1] > 0:
            pol = pol.with_y_bound(yb)
        if not path_ordered_product(ld, pol).is_identity():
            bad.append(p)
    return bad


# -- ancestry -----------------------------------------------------------------

def _marker_inputs(d: Diagram, p, below):
    """Rays through ``p`` not created at ``p``, grouped into marker classes."""
    groups = []
    index = {}
    for r in d.rays:
        if r.order >= below or not r.contains(p):
            continue
        if not r.initial and r.base == p:
            continue
        key = None
        if r.initial and r.base == p:
            # the two halves of a line share one marker
            neg = (-r.direction[0], -r.direction[1])
            key = (max(r.direction, neg), repr(r.function.to_json()))
        if key is not None and key in index:
            groups[index[key]].append(r)
            continue
        if key is not None:
            index[key] = len(groups)
        groups.append([r])
    return groups


def local_marked_scatter(d: Diagram, p, upto: int):
    """Re-scatter the walls through ``p`` with one marker variable per input wall.

    Returns ``(groups, created)`` where ``created`` maps each created term key
    ``(deg, packed, mx, my)`` (markers in the high bit fields) to its coefficient.
    """
    p = (Fraction(p[0]), Fraction(p[1]))
    groups = _marker_inputs(d, p, upto)
    nv = d.t_count
    walls = []
    for gi, rays in enumerate(groups):
        shift = BITS * (nv + gi)
        for r in rays:
            f = {}
            for (dg, pk, mx, my), c in r.function.raw().items():
                w = dg // r.order if (dg, pk, mx, my) != ONE_KEY else 0
                f[(dg, pk + (w << shift), mx, my)] = c
            walls.append(_R(r.base, r.direction, f, r.order))
    yb = d.y_bound
    created = {}
    for D in range(2, upto + 1):
        pol = d.policy.with_bound(D)
        if yb is not None and p[1] > 0:
            pol = pol.with_y_bound(yb)
        loc = []
        for i, r in enumerate(walls):
            loc.append((r.dir, r.f, i))
            if r.base != p:
                loc.append(((-r.dir[0], -r.dir[1]), r.f, i))
        loc.sort(key=lambda t: (angle_key(t[0]), t[2]))
        loc = [(m, {k: v for k, v in f.items() if pol.admits(k[0], k[2], k[3])})
               for m, f, _ in loc]
        gx, gy = _units_of_product(loc, pol)
        terms = _extract_defect(gx, gy, D)
        for key, a in sorted(terms.items()):
            m, _ = primitive((key[2], key[3]))
            walls.append(_R(p, m, {ONE_KEY: mpq(1), key: a}, D))
            created[key] = a
    return groups, created


def ancestry(d: Diagram, ray: Ray):
    """Decompose a created ray by the input walls at its base.

    Returns a list of ``(parents, coefficient)`` where ``parents`` is a tuple of
    ``(Ray, weight)``; the coefficients sum to the ray's own coefficient.
    """
    if ray.initial:
        raise ValueError("initial rays have no ancestry")
    term = ray.single_term()
    if term is None:
        raise ValueError("ancestry needs a single-term wall function")
    c, (dg, pk), m = term
    memo = d._memo.setdefault("ancestry", {})
    if ray.base not in memo:
        upto = max(r.order for r in d.rays if not r.initial and r.base == ray.base)
        memo[ray.base] = local_marked_scatter(d, ray.base, upto)
    groups, created = memo[ray.base]
    nv = d.t_count
    tmask = (1 << (BITS * nv)) - 1
    out = []
    total = 0
    for (kd, kp, kx, ky), a in sorted(created.items()):
        if kd != dg or (kx, ky) != m or (kp & tmask) != pk:
            continue
        ws = unpack(kp >> (BITS * nv), len(groups))
        parents = []
        for gi, w in enumerate(ws):
            if not w:
                continue
            g = groups[gi]
            rep = g[0]
            if len(g) > 1:
                # the half whose direction matches its function's exponents
                for r in g:
                    _, _, mm = r.single_term() or (None, None, None)
                    if mm is not None and primitive(mm)[0] == r.direction:
                        rep = r
                        break
            parents.append((rep, w))
        out.append((tuple(parents), a))
        total += a
    if total != c:
        raise RuntimeError(f"marker decomposition sums to {total}, ray has {c}")
    return out


def record_ancestry(d: Diagram, ray: Ray) -> Ray:
    """A copy of ``ray`` with its ancestry field filled in (unique decomposition only)."""
    alts = ancestry(d, ray)
    if len(alts) != 1:
        return ray
    anc = tuple(Ancestor(r.ray_id, w) for r, w in alts[0][0])
    return Ray(ray.base, ray.direction, ray.function, ray.order, anc, ray.initial, ray.edge)
