"""
Outgoing functions, log invariants and curve classes of case diagrams.

``f_out`` multiplies the upward walls of one fundamental domain with every
t-variable set to 1.  Its logarithm is ``sum (D.beta) R_beta y^(D.beta)``, so
the invariants ``R_d`` are read off coefficient by coefficient.  Splitting
the upward walls by the class of their tropical curves gives the finer
``f_beta`` and ``R_beta``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .diagram import Diagram, Ray, fmt_q
from .lattice import SmoothModelClasses, case_data
from .series import Series, TruncationPolicy, collapse_t, log1, substitute_t_one
from .tropical import AmbiguousAncestry, completions

__all__ = ["InvariantTable", "class_step", "t_order_for", "certified_degree", "upward_rays",
           "f_out", "extract_R", "ray_class", "f_beta", "class_partition", "display_factors",
           "format_factors", "convergence_audit", "NotCertified"]


class NotCertified(ValueError):
    """The diagram was not scattered far enough for the requested degree."""


def _kinks(case):
    k, _ = case_data(case)
    return [x for x in k if x]


def class_step(case) -> int:
    """The spacing of achievable ``D.beta`` values: the gcd of the kinks."""
    return math.gcd(*_kinks(case))


def t_order_for(case, dmax: int):
    """``(t_order, y_bound)`` needed to certify ``R_d`` for ``d <= dmax``.

    ``D.beta = step * d``; a curve of that degree has t-degree at most
    ``2 * ceil(D.beta / kmin)`` with ``kmin`` the smallest kink.
    """
    if dmax < 1:
        raise ValueError("dmax must be at least 1")
    ks = _kinks(case)
    Y = dmax * math.gcd(*ks)
    return 2 * math.ceil(Fraction(Y, min(ks))), Y


def certified_degree(d: Diagram) -> int:
    """Largest ``dmax`` whose invariants the diagram determines."""
    if d.unfolding is None:
        raise ValueError("invariants need a case diagram")
    ks = _kinks(d.case)
    step = math.gcd(*ks)
    Y = (d.certified_order // 2) * min(ks)
    if d.y_bound is not None:
        Y = min(Y, d.y_bound)
    return Y // step


def upward_rays(d: Diagram, domain: int = 0):
    """Created rays with direction ``(0, 1)`` based in fundamental domain ``domain``."""
    if d.unfolding is None:
        raise ValueError("f_out needs a case diagram")
    U = d.unfolding
    lo, hi = U.domain_bounds(domain)
    return [r for r in d.rays
            if not r.initial and r.direction == (0, 1) and lo <= r.base[0] < hi]


def _y_bound(d: Diagram):
    return certified_degree(d) * class_step(d.case)


def _product(rays, d: Diagram, graded: bool):
    Y = _y_bound(d)
    if graded:
        pol = TruncationPolicy(d.certified_order, None, Y)
        f = Series.one(1, pol)
        for r in rays:
            f = f * collapse_t(r.function).truncate(pol)
    else:
        pol = TruncationPolicy(0, None, Y)
        f = Series.one(0, pol)
        for r in rays:
            f = f * substitute_t_one(r.function).truncate(pol)
    for (_, _, mx, _) in f.raw():
        if mx:
            raise RuntimeError("x-exponent left in the outgoing function")
    return f


def f_out(d: Diagram, domain: int = 0, graded: bool = False) -> Series:
    """Product of the upward walls of one fundamental domain, as a series in y.

    The result is truncated above the certified y-degree.  With
    ``graded=True`` all t-variables become a single ``t0`` instead of 1.
    """
    return _product(upward_rays(d, domain), d, graded)


@dataclass
class InvariantTable:
    by_degree: dict
    certified_to: int
    by_class: dict | None = None
    basis: tuple | None = None
    case: str | None = None

    def to_json(self):
        out = {"case": self.case, "certified_to": self.certified_to,
               "by_degree": {str(k): fmt_q(v) for k, v in sorted(self.by_degree.items())}}
        if self.by_class is not None:
            out["basis"] = list(self.basis)
            out["by_class"] = [{"class": list(b), "R": fmt_q(v)}
                               for b, v in sorted(self.by_class.items())]
        return out

    def __str__(self):
        lines = [f"{'d':>3}  R_d"]
        for k, v in sorted(self.by_degree.items()):
            lines.append(f"{k:>3}  {fmt_q(v)}")
        if self.by_class:
            lines.append("")
            lines.append(f"{'beta':>12}  R_beta")
            for b, v in sorted(self.by_class.items()):
                lines.append(f"{_class_str(b, self.basis):>12}  {fmt_q(v)}")
        return "\n".join(lines)


def _class_str(beta, basis):
    parts = []
    for c, name in zip(beta, basis):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else str(abs(c))
        parts.append(f"{sign}{mag}{name}")
    s = "".join(parts) or "0"
    return s[1:] if s.startswith("+") else s


def extract_R(d: Diagram, dmax: int, classes: SmoothModelClasses | None = None) -> InvariantTable:
    """``R_d`` for ``d <= dmax`` from ``log f_out``; per class as well if ``classes`` is given."""
    cert = certified_degree(d)
    if dmax > cert:
        N, Y = t_order_for(d.case, dmax)
        raise NotCertified(f"degree {dmax} needs order {N} with y_bound {Y}; "
                           f"this diagram certifies degree {cert}")
    step = class_step(d.case)
    L = log1(f_out(d))
    by_degree = {}
    for n in range(1, dmax + 1):
        c = L.coefficient((), (0, step * n))
        by_degree[n] = mpq(c) / (step * n)
    table = InvariantTable(by_degree, cert, case=d.case)
    if classes is not None:
        by_class = {}
        for beta, f in class_partition(d, classes).items():
            D = classes.degree(beta)
            for k, c in _class_invariants(f, D).items():
                if k * D <= step * dmax:
                    by_class[tuple(k * b for b in beta)] = c
        table.by_class = by_class
        table.basis = classes.basis_names
    return table


def _crossings(curve, c):
    """Weighted count of transverse crossings of the curve with the line ``x = c``."""
    total = 0
    for start, end, u, w in curve.segments():
        if end is None:
            if u[0] == 0:
                if start[0] == c:
                    raise ValueError("curve segment lies on a test line")
                continue
            crosses = (start[0] < c) == (u[0] > 0) and start[0] != c
        else:
            lo, hi = sorted((start[0], end[0]))
            if u[0] == 0:
                if start[0] == c:
                    raise ValueError("curve segment lies on a test line")
                continue
            if c in (lo, hi):
                raise ValueError("curve vertex lies on a test line")
            crosses = lo < c < hi
        if crosses:
            total += abs(u[0]) * w
    return total


def _curve_class(d: Diagram, curve, classes, eps):
    U = d.unfolding
    beta = [0] * len(classes.basis_names)
    for (xv, _) in U.vertices:
        n = _crossings(curve, xv + eps)
        if n:
            for i, b in enumerate(classes.class_at(xv)):
                beta[i] += n * b
    return tuple(beta)


def ray_class(d: Diagram, ray: Ray, classes: SmoothModelClasses, dmax: int | None = None):
    """Class ``sum d_v beta_v`` of the tropical curve of ``ray``.

    ``d_v`` counts the crossings of the curve with the vertical line just
    right of the boundary vertex ``v``, at offset ``1 / (2 dmax + 2)``.
    Every completion of the ray must give the same class.
    """
    if d.unfolding is None:
        raise ValueError("classes need a case diagram")
    if dmax is None:
        dmax = max(certified_degree(d), 1) * class_step(d.case)
    eps = Fraction(1, 2 * dmax + 2)
    found = {_curve_class(d, h, classes, eps) for h in completions(d, ray)}
    if not found:
        raise AmbiguousAncestry(f"ray {ray.ray_id} has no completion")
    if len(found) > 1:
        raise AmbiguousAncestry(f"ray {ray.ray_id} completes to classes {sorted(found)}")
    return found.pop()


def _primitive_class(beta):
    g = math.gcd(*beta)
    if g == 0:
        raise ValueError("zero class")
    return tuple(b // g for b in beta), g


def class_partition(d: Diagram, classes: SmoothModelClasses, domain: int = 0) -> dict:
    """``{primitive beta: f_beta}`` over the upward walls of one domain.

    Walls above the certified y-degree are left out.  Raises if a wall's
    class disagrees with the y-degree of its function.
    """
    groups = {}
    Y = _y_bound(d)
    for r in upward_rays(d, domain):
        if r.single_term()[2][1] > Y:
            continue
        beta = ray_class(d, r, classes)
        n = r.single_term()[2][1]
        if classes.degrees is not None and classes.degree(beta) != n:
            raise RuntimeError(f"ray {r.ray_id}: class {beta} has degree "
                               f"{classes.degree(beta)} but the wall has y^{n}")
        prim, _ = _primitive_class(beta)
        groups.setdefault(prim, []).append(r)
    return {b: _product(rs, d, False) for b, rs in sorted(groups.items())}


def _class_invariants(f: Series, D: int) -> dict:
    L = log1(f)
    out = {}
    for k in range(1, (f.policy.y_bound or 0) // D + 1):
        c = L.coefficient((), (0, k * D))
        if c:
            out[k] = mpq(c) / (k * D)
    return out


def f_beta(d: Diagram, beta, classes: SmoothModelClasses, domain: int = 0):
    """``f_beta`` for a primitive class and the invariants ``{k: R_(k beta)}``."""
    beta = tuple(beta)
    if _primitive_class(beta)[1] != 1:
        raise ValueError(f"class {beta} is not primitive")
    part = class_partition(d, classes, domain)
    f = part.get(beta)
    if f is None:
        f = Series.one(0, TruncationPolicy(0, None, _y_bound(d)))
    return f, _class_invariants(f, classes.degree(beta))


def display_factors(d: Diagram, domain: int = 0):
    """``[(factor, exponent)]``: the upward walls grouped by identical function."""
    Y = _y_bound(d)
    pol = TruncationPolicy(0, None, Y)
    count = Counter()
    keep = {}
    for r in upward_rays(d, domain):
        f = substitute_t_one(r.function).truncate(pol)
        if f.is_one():
            continue
        key = str(f)
        count[key] += 1
        keep[key] = f
    def order(key):
        f = keep[key]
        ((_, _, _, n), c), = [(k, v) for k, v in f.raw().items() if k != (0, 0, 0, 0)]
        return (n, c)
    return [(keep[k], count[k]) for k in sorted(count, key=order)]


def format_factors(factors) -> str:
    return "".join(f"({f})" + (f"^{e}" if e > 1 else "") for f, e in factors) or "1"


def convergence_audit(case, dmax: int, k: int = 1, extra: int = 2, refined: bool = False):
    """Recompute ``R_d`` with ``extra`` more orders and report whether it moved."""
    from .diagram import new_case
    from .engine import scatter
    N, Y = t_order_for(case, dmax)
    tables = []
    for n in (N, N + extra):
        d = scatter(new_case(case, k, t_bound=n, refined=refined), n, accelerate=True,
                    y_bound=Y)
        tables.append(extract_R(d, dmax).by_degree)
    return tables[0] == tables[1], tables[0], tables[1]
