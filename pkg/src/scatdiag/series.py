"""
Truncated sparse series over Q[t_0, ..., t_{r-1}][x^{+-1}, y^{+-1}].

A monomial is t^a z^m with a a vector of nonnegative integers and m a
lattice point.  Terms are kept in a dict keyed by ``(deg, packed, mx, my)``
where ``deg`` is the total t-degree and ``packed`` stores the exponent
vector ``a`` in fixed-width bit fields, so that multiplying monomials is
integer addition.  Coefficients are ``gmpy2.mpq`` rationals.

The truncation ideal is described by a :class:`TruncationPolicy`.  Besides
the total t-degree bound it can carry two optional refinements used by the
scattering engine for case diagrams (see ``engine``):

* ``lateral_bound``: also drop t^a z^m with ``deg + |mx| > lateral_bound``;
* ``y_bound``: also drop monomials with ``my > y_bound``.

Both describe ideals of the subrings the engine works in, so arithmetic
modulo them is well defined there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple

from gmpy2 import mpq

BITS = 16
FIELD = (1 << BITS) - 1

__all__ = [
    "primitive", "Monomial", "TruncationPolicy", "Series", "add", "mul",
    "int_pow", "log1", "substitute_t_one", "collapse_t", "pack", "unpack",
]


def primitive(v):
    """Split an integer vector as ``c * v'`` with ``v'`` primitive.

    >>> primitive((4, -6))
    ((2, -3), 2)
    """
    a, b = int(v[0]), int(v[1])
    g = math.gcd(a, b)
    if g == 0:
        raise ValueError("the zero vector has no primitive part")
    return (a // g, b // g), g


def pack(exps) -> int:
    p = 0
    for i, e in enumerate(exps):
        if e < 0 or e > FIELD:
            raise ValueError(f"t-exponent {e} out of range")
        p |= int(e) << (BITS * i)
    return p


def unpack(p: int, n: int) -> tuple:
    return tuple((p >> (BITS * i)) & FIELD for i in range(n))


class Monomial(NamedTuple):
    t_exps: tuple
    m: tuple

    @property
    def degree(self):
        return sum(self.t_exps)


@dataclass(frozen=True)
class TruncationPolicy:
    """Which monomials survive ring operations.

    ``square_free`` additionally kills every monomial in which some
    t-variable appears squared.
    """

    t_bound: int
    lateral_bound: int | None = None
    y_bound: int | None = None
    square_free: bool = False

    def __post_init__(self):
        if self.t_bound < 0:
            raise ValueError("t_bound must be nonnegative")

    def admits(self, deg, mx, my):
        if deg > self.t_bound:
            return False
        if self.lateral_bound is not None and deg + abs(mx) > self.lateral_bound:
            return False
        if self.y_bound is not None and my > self.y_bound:
            return False
        return True

    def meet(self, other):
        if self == other:
            return self
        return TruncationPolicy(min(self.t_bound, other.t_bound),
                                _min_opt(self.lateral_bound, other.lateral_bound),
                                _min_opt(self.y_bound, other.y_bound),
                                self.square_free or other.square_free)

    def with_bound(self, t_bound):
        return replace(self, t_bound=t_bound)

    def with_y_bound(self, y_bound):
        return replace(self, y_bound=y_bound)


def _min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _to_q(c):
    if isinstance(c, str):
        return mpq(c)
    return mpq(c)


class Series:
    """An immutable truncated series.

    Build one from ``(t_exps, m, coefficient)`` triples::

        >>> P = TruncationPolicy(3)
        >>> f = Series.from_terms([((0, 0), (0, 0), 1), ((1, 0), (1, 0), 1)], 2, P)
        >>> str(f)
        '1 + t0*x'
    """

    __slots__ = ("_t", "nvars", "policy", "_sorted")

    def __init__(self, terms, nvars, policy):
        # terms: dict {(deg, packed, mx, my): mpq}, assumed clean
        self._t = terms
        self.nvars = nvars
        self.policy = policy
        self._sorted = None

    # construction

    @classmethod
    def from_terms(cls, triples: Iterable, nvars: int, policy: TruncationPolicy):
        d = {}
        for exps, m, c in triples:
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError(f"expected {nvars} t-exponents, got {len(exps)}")
            deg = sum(exps)
            if not policy.admits(deg, m[0], m[1]):
                continue
            k = (deg, pack(exps), int(m[0]), int(m[1]))
            d[k] = d.get(k, 0) + _to_q(c)
        return cls({k: v for k, v in d.items() if v}, nvars, policy)

    @classmethod
    def zero(cls, nvars, policy):
        return cls({}, nvars, policy)

    @classmethod
    def one(cls, nvars, policy):
        return cls({(0, 0, 0, 0): mpq(1)}, nvars, policy)

    @classmethod
    def monomial(cls, c, t_exps, m, policy):
        return cls.from_terms([(t_exps, m, c)], len(t_exps), policy)

    @classmethod
    def from_json(cls, items, nvars, policy):
        return cls.from_terms(((it["t"], it["m"], mpq(it["c"])) for it in items),
                              nvars, policy)

    # access

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def raw(self):
        """The underlying ``{(deg, packed, mx, my): coeff}`` dict (do not mutate)."""
        return self._t

    def keys_sorted(self):
        if self._sorted is None:
            self._sorted = sorted(self._t)
        return self._sorted

    def terms(self):
        """Yield ``(Monomial, coefficient)`` in the canonical order."""
        n = self.nvars
        for k in self.keys_sorted():
            yield Monomial(unpack(k[1], n), (k[2], k[3])), self._t[k]

    def coefficient(self, t_exps, m):
        exps = tuple(t_exps)
        return self._t.get((sum(exps), pack(exps), int(m[0]), int(m[1])), mpq(0))

    def constant_term(self):
        return self._t.get((0, 0, 0, 0), mpq(0))

    def min_degree(self, skip_constant=True):
        ds = [k[0] for k in self._t if not (skip_constant and k == (0, 0, 0, 0))]
        return min(ds) if ds else None

    def max_degree(self):
        return max((k[0] for k in self._t), default=None)

    def lattice_support(self):
        return sorted({(k[2], k[3]) for k in self._t})

    def is_one(self):
        return len(self._t) == 1 and self._t.get((0, 0, 0, 0)) == 1

    def to_json(self):
        n = self.nvars
        return [{"c": str(self._t[k]), "t": list(unpack(k[1], n)), "m": [k[2], k[3]]}
                for k in self.keys_sorted()]

    # structure

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.nvars == other.nvars and self._t == other._t

    def __hash__(self):
        return hash((self.nvars, frozenset(self._t.items())))

    def truncate(self, policy):
        """Re-truncate under ``policy`` (which becomes the new policy)."""
        t = {k: v for k, v in self._t.items() if policy.admits(k[0], k[2], k[3])}
        return Series(t, self.nvars, policy)

    def _check(self, other):
        if not isinstance(other, Series):
            raise TypeError(f"expected Series, got {type(other).__name__}")
        if other.nvars != self.nvars:
            raise ValueError(f"mismatched t-variable count: {self.nvars} vs {other.nvars}")
        return self.policy.meet(other.policy)

    # arithmetic

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, -other)

    def __neg__(self):
        return Series({k: -v for k, v in self._t.items()}, self.nvars, self.policy)

    def __mul__(self, other):
        if isinstance(other, Series):
            return mul(self, other)
        c = mpq(other)
        if not c:
            return Series.zero(self.nvars, self.policy)
        return Series({k: v * c for k, v in self._t.items()}, self.nvars, self.policy)

    __rmul__ = __mul__

    def __pow__(self, n):
        return int_pow(self, n)

    def __repr__(self):
        return f"Series({self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for mono, c in self.terms():
            body = []
            for i, e in enumerate(mono.t_exps):
                if e:
                    body.append(f"t{i}" if e == 1 else f"t{i}^{e}")
            for name, e in zip("xy", mono.m):
                if e:
                    body.append(name if e == 1 else f"{name}^{e}")
            if not body:
                parts.append(str(c))
                continue
            if c == 1:
                s = ""
            elif c == -1:
                s = "-"
            else:
                s = f"{c}*"
            parts.append(s + "*".join(body))
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


def add(a: Series, b: Series) -> Series:
    pol = a._check(b)
    t = dict(a._t)
    for k, v in b._t.items():
        s = t.get(k)
        if s is None:
            t[k] = v
        else:
            s = s + v
            if s:
                t[k] = s
            else:
                del t[k]
    if pol is not a.policy or pol is not b.policy:
        t = {k: v for k, v in t.items() if pol.admits(k[0], k[2], k[3])}
    return Series(t, a.nvars, pol)


def _by_degree(s: Series):
    return sorted(s._t.items(), key=lambda kv: kv[0][0])


def mul_raw(a: dict, b: dict, pol: TruncationPolicy) -> dict:
    """Product of two raw term dicts, truncated by ``pol``."""
    if len(a) > len(b):
        a, b = b, a
    N = pol.t_bound
    lat = pol.lateral_bound
    Y = pol.y_bound
    sf = pol.square_free
    bl = sorted(b.items(), key=lambda kv: kv[0][0])
    out = {}
    get = out.get
    for (d1, p1, x1, y1), c1 in a.items():
        room = N - d1
        for (d2, p2, x2, y2), c2 in bl:
            if d2 > room:
                break
            x = x1 + x2
            d = d1 + d2
            if lat is not None and d + (x if x >= 0 else -x) > lat:
                continue
            y = y1 + y2
            if Y is not None and y > Y:
                continue
            if sf and p1 & p2:
                continue
            k = (d, p1 + p2, x, y)
            v = get(k)
            out[k] = c1 * c2 if v is None else v + c1 * c2
    return {k: v for k, v in out.items() if v}


def mul(a: Series, b: Series) -> Series:
    pol = a._check(b)
    return Series(mul_raw(a._t, b._t, pol), a.nvars, pol)


ONE_KEY = (0, 0, 0, 0)


def _unit_part(f: Series):
    """Return ``u = f - 1`` after checking that ``f`` is invertible."""
    if f._t.get(ONE_KEY) != 1:
        raise ValueError("series must have constant term 1")
    u = {k: v for k, v in f._t.items() if k != ONE_KEY}
    yb = f.policy.y_bound
    for k in u:
        if k[0] >= 1:
            continue
        if yb is not None and k[3] >= 1:
            continue
        raise ValueError("series minus 1 is not nilpotent under the truncation")
    return u


def inverse_raw(f: Series) -> dict:
    u = _unit_part(f)
    negu = {k: -v for k, v in u.items()}
    res = {ONE_KEY: mpq(1)}
    p = {ONE_KEY: mpq(1)}
    while True:
        p = mul_raw(p, negu, f.policy)
        if not p:
            break
        for k, v in p.items():
            s = res.get(k, 0) + v
            if s:
                res[k] = s
            else:
                res.pop(k, None)
    return res


def int_pow(f: Series, n: int) -> Series:
    """``f**n`` by repeated squaring; negative ``n`` needs constant term 1."""
    n = int(n)
    if n < 0:
        base = Series(inverse_raw(f), f.nvars, f.policy)
        n = -n
    else:
        base = f
    result = {ONE_KEY: mpq(1)} if f.policy.admits(0, 0, 0) else {}
    b = base._t
    while n:
        if n & 1:
            result = mul_raw(result, b, f.policy)
        n >>= 1
        if n:
            b = mul_raw(b, b, f.policy)
    return Series(result, f.nvars, f.policy)


def log1(f: Series) -> Series:
    """``log f`` as ``sum (-1)^(n+1) (f-1)^n / n``, truncated."""
    u = _unit_part(f)
    res = {}
    p = {ONE_KEY: mpq(1)}
    n = 0
    while True:
        n += 1
        p = mul_raw(p, u, f.policy)
        if not p:
            break
        c = mpq(1 if n % 2 else -1, n)
        for k, v in p.items():
            s = res.get(k, 0) + c * v
            if s:
                res[k] = s
            else:
                res.pop(k, None)
    return Series(res, f.nvars, f.policy)


def substitute_t_one(f: Series) -> Series:
    """Set every t-variable to 1, summing colliding coefficients.

    The result has no t-variables; its policy keeps only the y-bound.
    """
    pol = TruncationPolicy(0, None, f.policy.y_bound)
    t = {}
    for (d, p, x, y), c in f._t.items():
        k = (0, 0, x, y)
        t[k] = t.get(k, 0) + c
    return Series({k: v for k, v in t.items() if v}, 0, pol)


def collapse_t(f: Series) -> Series:
    """Identify all t-variables with a single one, keeping the total degree."""
    t = {}
    for (d, p, x, y), c in f._t.items():
        k = (d, d, x, y)
        t[k] = t.get(k, 0) + c
    return Series({k: v for k, v in t.items() if v}, 1, f.policy)
