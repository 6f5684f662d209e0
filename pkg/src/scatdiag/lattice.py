"""
Reflexive polygons, kinks and the unfolded boundary polytope.

The sixteen reflexive polygons are stored by their vertex lists.  Each case
has a kink vector ``k`` (one entry per vertex) and a length vector ``l``
(affine length of the edge following each vertex counterclockwise).  The
unfolding places edge 0 on the segment from ``(0, 0)`` to ``(l[0], 0)``,
lets the slope drop by ``k[i]`` at vertex ``i``, and repeats the data
periodically in both directions.  The region lies below this boundary.

Vertex ``i`` of the unfolding is ``vertex(i)`` for any integer ``i``; edge
``e`` runs from ``vertex(e)`` to ``vertex(e + 1)``.  Translating by one
period is an integral affine map ``T`` with ``T(vertex(i)) = vertex(i + r)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .series import primitive

__all__ = [
    "POLYTOPES", "CASES", "ALIASES", "resolve_case", "kink", "case_data",
    "derive_case_data", "UnfoldingData", "build_unfolding",
    "SmoothModelClasses", "smooth_model_classes", "load_class_table",
]

POLYTOPES = {
    "(9)": [(1, 0), (0, 1), (-1, -1)],
    "(8')": [(1, 0), (0, 1), (-1, 0), (0, -1)],
    "(8)": [(-1, -1), (0, -1), (1, 0), (0, 1)],
    "(7)": [(-1, -1), (0, -1), (1, 0), (1, 1), (0, 1)],
    "(6)": [(1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1), (1, 0)],
    "(8'a)": [(-1, -1), (1, -1), (0, 1)],
    "(7a)": [(1, -1), (-1, -1), (-1, 0), (0, 1)],
    "(6a)": [(1, -1), (-1, -1), (-1, 1), (0, 1)],
    "(6b)": [(-1, -1), (1, -1), (-1, 2)],
    "(6c)": [(-1, -1), (1, -1), (1, 0), (0, 1), (-1, 0)],
    "(5a)": [(1, -1), (-1, -1), (-1, 2), (0, 1)],
    "(5b)": [(-1, -1), (1, -1), (1, 0), (0, 1), (-1, 1)],
    "(4a)": [(1, -1), (-1, -1), (-1, 1), (1, 1)],
    "(4b)": [(1, -1), (-1, -1), (-1, 2), (1, 0)],
    "(4c)": [(-1, -1), (1, -1), (-1, 3)],
    "(3a)": [(-1, -1), (2, -1), (-1, 2)],
}

# (kinks, lengths); regenerated by derive_case_data in the test suite
CASES = {
    "(9)": ((3, 3, 3), (1, 1, 1)),
    "(8')": ((2, 2, 2, 2), (1, 1, 1, 1)),
    "(8)": ((1, 2, 3, 2), (1, 1, 1, 1)),
    "(7)": ((1, 1, 1, 2, 2), (1, 1, 1, 1, 1)),
    "(6)": ((1, 1, 1, 1, 1, 1), (1, 1, 1, 1, 1, 1)),
    "(8'a)": ((2, 2, 4), (2, 1, 1)),
    "(7a)": ((1, 2, 3, 1), (2, 1, 1, 1)),
    "(6a)": ((1, 1, 2, 2), (2, 2, 1, 1)),
    "(6b)": ((2, 1, 3), (3, 2, 1)),
    "(6c)": ((1, 1, 1, 2, 1), (2, 1, 1, 1, 1)),
    "(5a)": ((1, 1, 2, 1), (3, 2, 1, 1)),
    "(5b)": ((1, 1, 1, 1, 1), (2, 2, 1, 1, 1)),
    "(4a)": ((1, 1, 1, 1), (2, 2, 2, 2)),
    "(4b)": ((1, 1, 1, 1), (3, 2, 1, 2)),
    "(4c)": ((1, 1, 2), (4, 2, 2)),
    "(3a)": ((1, 1, 1), (3, 3, 3)),
}

ALIASES = {"p2": "(9)", "p1xp1": "(8')", "f1": "(8)", "cubic": "(3a)"}


def resolve_case(label: str) -> str:
    """Canonical label for a case name or alias (case-insensitive)."""
    s = str(label).strip()
    low = s.lower()
    if low in ALIASES:
        return ALIASES[low]
    if not low.startswith("("):
        low = f"({low})"
    for key in CASES:
        if key.lower() == low:
            return key
    raise KeyError(f"unknown case {label!r}")


def kink(m1, m2) -> int:
    """Absolute determinant of two primitive vectors."""
    if tuple(m1) == (0, 0) or tuple(m2) == (0, 0):
        raise ValueError("kink of a zero vector")
    return abs(m1[0] * m2[1] - m1[1] * m2[0])


def _ccw(vertices):
    v = list(vertices)
    a2 = sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1]
             for i in range(len(v)))
    return v if a2 > 0 else v[::-1]


def derive_case_data(vertices):
    """Kinks and edge lengths of a polygon, in the canonical rotation.

    Vertices are taken counterclockwise, and the rotation chosen is the
    lexicographically smallest sequence of ``(-length, kink)`` pairs, so the
    longest edge comes first and ties go to the smallest kink.
    """
    v = _ccw(vertices)
    n = len(v)
    ks, ls = [], []
    for i in range(n):
        a, b, c = v[i - 1], v[i], v[(i + 1) % n]
        t_next, g = primitive((c[0] - b[0], c[1] - b[1]))
        t_prev, _ = primitive((a[0] - b[0], a[1] - b[1]))
        ks.append(kink(t_next, t_prev))
        ls.append(g)
    rots = [[(-ls[(i + j) % n], ks[(i + j) % n]) for j in range(n)] for i in range(n)]
    best = min(rots)
    return tuple(p[1] for p in best), tuple(-p[0] for p in best)


def case_data(case):
    """``(kinks, lengths)`` for a case label or alias."""
    return CASES[resolve_case(case)]


@dataclass(frozen=True)
class UnfoldingData:
    """The periodic boundary polytope restricted to a window of domains.

    ``kinks`` and ``lengths`` describe one period.  For a refined
    (smooth-model) unfolding every edge has length 1 and the extra lattice
    points on the original edges appear as vertices with kink 0.
    """

    case: str
    kinks: tuple
    lengths: tuple
    domains: int
    refined: bool = False
    x_start: int = 0
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def r(self):
        return len(self.kinks)

    @property
    def period(self):
        return sum(self.lengths)

    @property
    def shear(self):
        return sum(self.kinks)

    def slope(self, e: int) -> int:
        """Slope ``s`` of edge ``e``; its direction is ``(1, -s)``."""
        r = self.r
        q, i = divmod(e, r)
        base = q * self.shear
        return base + sum(self.kinks[1:i + 1])

    def edge_direction(self, e):
        return (1, -self.slope(e))

    def edge_length(self, e):
        return self.lengths[e % self.r]

    def vertex(self, i: int):
        c = self._cache
        if i in c:
            return c[i]
        if i == 0:
            p = (Fraction(0), Fraction(0))
        elif i > 0:
            x, y = self.vertex(i - 1)
            l = self.edge_length(i - 1)
            p = (x + l, y - self.slope(i - 1) * l)
        else:
            x, y = self.vertex(i + 1)
            l = self.edge_length(i)
            p = (x - l, y + self.slope(i) * l)
        c[i] = p
        return p

    def kink_at(self, i):
        return self.kinks[i % self.r]

    def singular_point(self, e):
        (x0, y0), (x1, y1) = self.vertex(e), self.vertex(e + 1)
        return ((x0 + x1) / 2, (y0 + y1) / 2)

    # windows and translations

    def domain_bounds(self, j=0):
        L = self.period
        return (Fraction(self.x_start + j * L), Fraction(self.x_start + (j + 1) * L))

    @property
    def window(self):
        lo, _ = self.domain_bounds(-self.domains)
        _, hi = self.domain_bounds(self.domains)
        return lo, hi

    def domain_of(self, x):
        return math.floor((Fraction(x) - self.x_start) / self.period)

    def in_central(self, x):
        lo, hi = self.domain_bounds(0)
        return lo <= x < hi

    @property
    def edges(self):
        """Edge indices whose singular point lies in the window."""
        lo, hi = self.window
        out = []
        e = math.floor(lo) - 2
        while self.singular_point(e)[0] < hi:
            if self.singular_point(e)[0] >= lo:
                out.append(e)
            e += 1
        return out

    @property
    def vertices(self):
        lo, hi = self.window
        out = []
        i = math.floor(lo) - 2
        while self.vertex(i)[0] <= hi:
            if self.vertex(i)[0] >= lo:
                out.append(self.vertex(i))
            i += 1
        return out

    @property
    def singular_points(self):
        return [self.singular_point(e) for e in self.edges]

    def translate_point(self, p, j):
        """Apply ``T^j`` to a point."""
        x, y = p
        c = self.vertex(j * self.r)[1]
        return (x + j * self.period, y - j * self.shear * x + c)

    def translate_vector(self, m, j):
        return (m[0], m[1] - j * self.shear * m[0])

    def boundary_y(self, x):
        """Height of the boundary above ``x``."""
        x = Fraction(x)
        i = math.floor(x) - 1
        while self.vertex(i + 1)[0] <= x:
            i += 1
        while self.vertex(i)[0] > x:
            i -= 1
        (x0, y0) = self.vertex(i)
        return y0 - self.slope(i) * (x - x0)

    def to_json(self):
        return {"case": self.case, "kinks": list(self.kinks), "lengths": list(self.lengths),
                "domains": self.domains, "refined": self.refined, "x_start": self.x_start}

    @classmethod
    def from_json(cls, d):
        return cls(d["case"], tuple(d["kinks"]), tuple(d["lengths"]), d["domains"],
                   d["refined"], d["x_start"])


def build_unfolding(case, domains: int = 1, refined: bool = False) -> UnfoldingData:
    """Unfolding of ``case`` with ``domains`` fundamental domains on each side."""
    if domains < 1:
        raise ValueError("domains must be at least 1")
    label = resolve_case(case)
    k, l = CASES[label]
    L = sum(l)
    x_start = -math.ceil(Fraction(L - l[0], 2))
    if refined:
        kk, ll = [], []
        for ki, li in zip(k, l):
            kk.extend([ki] + [0] * (li - 1))
            ll.extend([1] * li)
        k, l = tuple(kk), tuple(ll)
    return UnfoldingData(label, tuple(k), tuple(l), domains, refined, x_start)


@dataclass(frozen=True)
class SmoothModelClasses:
    """Curve classes attached to the integral boundary points of the unfolding.

    ``class_of_boundary_point`` maps ``x mod period`` to an integer vector in
    the basis ``basis_names``; ``degrees`` gives the anticanonical degree of
    each basis class when known.
    """

    basis_names: tuple
    class_of_boundary_point: dict
    period: int
    degrees: tuple | None = None

    def class_at(self, x):
        x = Fraction(x)
        if x.denominator != 1:
            raise ValueError(f"{x} is not an integral boundary point")
        key = int(x) % self.period
        try:
            return self.class_of_boundary_point[key]
        except KeyError:
            raise KeyError(f"no class recorded for boundary point x={x}") from None

    def degree(self, beta):
        if self.degrees is None:
            raise ValueError("class table has no anticanonical degrees")
        return sum(a * b for a, b in zip(beta, self.degrees))


def smooth_model_classes(case) -> SmoothModelClasses:
    """Built-in class tables for ``(9)`` and ``(8'a)`` (via its smooth model F2)."""
    label = resolve_case(case)
    if label == "(9)":
        return SmoothModelClasses(("H",), {0: (1,), 1: (1,), 2: (1,)}, 3, (3,))
    if label == "(8'a)":
        # boundary points in order: F, E, F, S with F -> L2, E -> L1 - L2, S -> L1 + L2
        F, E, S = (0, 1), (1, -1), (1, 1)
        return SmoothModelClasses(("L1", "L2"), {0: F, 1: E, 2: F, 3: S}, 4, (2, 2))
    raise KeyError(f"no built-in class table for {label}; supply one with load_class_table")


def load_class_table(source, case) -> SmoothModelClasses:
    """Read a user class table: ``{"basis": [...], "points": [{"xy": [x, y], "class": [...]}]}``.

    An optional ``"degrees"`` list gives the anticanonical degree of each basis class.
    """
    if isinstance(source, (str, bytes)) and not str(source).lstrip().startswith("{"):
        with open(source) as fh:
            data = json.load(fh)
    elif isinstance(source, dict):
        data = source
    else:
        data = json.loads(source)
    k, l = case_data(case)
    L = sum(l)
    basis = tuple(data["basis"])
    table = {}
    for pt in data["points"]:
        x = Fraction(pt["xy"][0])
        if x.denominator != 1:
            raise ValueError(f"boundary point {pt['xy']} is not integral")
        vec = tuple(int(c) for c in pt["class"])
        if len(vec) != len(basis):
            raise ValueError(f"class {vec} does not match basis of size {len(basis)}")
        table[int(x) % L] = vec
    missing = set(range(L)) - set(table)
    if missing:
        raise ValueError(f"class table misses boundary points x = {sorted(missing)} (mod {L})")
    deg = data.get("degrees")
    return SmoothModelClasses(basis, table, L, tuple(deg) if deg else None)
