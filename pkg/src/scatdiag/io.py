"""
Persistence and drawing.

Diagrams serialize to a single versioned JSON document whose text is a pure
function of the diagram, so saving twice, or loading and saving again,
gives the same bytes.  A :class:`Store` keeps scattered diagrams keyed by
how they were built, so a computation is never repeated.  The TikZ emitter
writes one ``\\draw`` command per ray.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction

from .diagram import Ancestor, Diagram, Ray, fmt_q
from .lattice import UnfoldingData
from .series import Series, TruncationPolicy

__all__ = ["SCHEMA", "VERSION", "diagram_to_json", "diagram_from_json", "dumps", "loads",
           "save", "load", "Store", "StoreError", "store_key", "default_store_path",
           "tikz", "curve_tikz", "PALETTE", "STORE_ENV", "format_diagram", "default_clip"]

SCHEMA = "scatdiag.diagram"
VERSION = 1
STORE_ENV = "SCATDIAG_STORE"


class StoreError(ValueError):
    """A saved document cannot be read back."""


def _policy_json(p: TruncationPolicy):
    return {"t_bound": p.t_bound, "lateral_bound": p.lateral_bound, "y_bound": p.y_bound,
            "square_free": p.square_free}


def _ray_json(r: Ray):
    out = {
        "id": r.ray_id,
        "base": [fmt_q(r.base[0]), fmt_q(r.base[1])],
        "direction": list(r.direction),
        "order": r.order,
        "initial": r.initial,
        "function": r.function.to_json(),
    }
    if r.edge is not None:
        out["edge"] = r.edge
    if r.ancestry:
        out["ancestry"] = [[a.ray_id, a.weight] for a in r.ancestry]
    return out


def diagram_to_json(d: Diagram) -> dict:
    return {
        "schema": SCHEMA,
        "version": VERSION,
        "label": d.label,
        "case": d.case,
        "kind": d.kind,
        "params": list(d.params),
        "unfolding": d.unfolding.to_json() if d.unfolding is not None else None,
        "t_count": d.t_count,
        "policy": _policy_json(d.policy),
        "certified_order": d.certified_order,
        "accelerated": d.accelerated,
        "y_bound": d.y_bound,
        "rays": [_ray_json(r) for r in d.rays],
    }


def diagram_from_json(obj) -> Diagram:
    try:
        if obj.get("schema") != SCHEMA:
            raise StoreError(f"not a diagram document (schema {obj.get('schema')!r})")
        if obj.get("version") != VERSION:
            raise StoreError(f"unsupported diagram version {obj.get('version')!r}")
        pol = TruncationPolicy(**obj["policy"])
        n = obj["t_count"]
        rays = []
        for rj in obj["rays"]:
            f = Series.from_json(rj["function"], n, pol)
            anc = tuple(Ancestor(a, w) for a, w in rj.get("ancestry", ()))
            r = Ray(tuple(Fraction(c) for c in rj["base"]), tuple(rj["direction"]), f,
                    rj["order"], anc, rj["initial"], rj.get("edge"))
            if r.ray_id != rj["id"]:
                raise StoreError(f"ray {rj['id']} does not match its content")
            rays.append(r)
        U = obj["unfolding"]
        return Diagram(tuple(rays), n, pol, obj["certified_order"], obj["case"],
                       UnfoldingData.from_json(U) if U is not None else None,
                       obj["kind"], tuple(obj["params"]), obj["accelerated"], obj["y_bound"])
    except StoreError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise StoreError(f"malformed diagram document: {exc}") from exc


def _text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=True) + "\n"


def dumps(d: Diagram) -> str:
    """Canonical JSON text of a diagram."""
    return _text(diagram_to_json(d))


def loads(text: str) -> Diagram:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StoreError(f"not JSON: {exc}") from exc
    return diagram_from_json(obj)


def save(d: Diagram, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps(d))


def load(path) -> Diagram:
    with open(path, encoding="ascii") as fh:
        return loads(fh.read())


def default_store_path():
    return os.environ.get(STORE_ENV) or os.path.join(os.getcwd(), "scatdiag_store.json")


def store_key(d: Diagram, accelerate: bool | None = None, y_bound=None) -> str:
    """What identifies a scattering run apart from its progress.

    Two diagrams with the same key differ only in certified order, so the
    lower one can be scattered on to reach the higher.  ``accelerate`` and
    ``y_bound`` default to the diagram's own settings.
    """
    if d.unfolding is not None:
        U = d.unfolding
        head = f"{d.case}{'~' if U.refined else ''}/k{U.domains}"
    else:
        head = d.label.replace(" ", "")
    acc = d.accelerated if accelerate is None else accelerate
    y = d.y_bound if y_bound is None else y_bound
    lat = d.policy.lateral_bound
    return (f"{head}/L{'-' if lat is None else lat}/Y{'-' if y is None else y}"
            f"/{'acc' if acc else 'full'}")


class Store:
    """A JSON file of scattered diagrams, keyed by run and certified order.

    ``entries`` maps ``(key, order)`` to the diagram's JSON object.
    """

    SCHEMA = "scatdiag.store"

    def __init__(self, path=None):
        self.path = path or default_store_path()
        self.entries = {}
        self.errors = []
        if os.path.exists(self.path):
            self._read()

    def _read(self):
        with open(self.path, encoding="ascii") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise StoreError(f"store {self.path} is not JSON: {exc}") from exc
        if doc.get("schema") != self.SCHEMA or doc.get("version") != VERSION:
            raise StoreError(f"{self.path} is not a store document")
        for item in doc.get("entries", []):
            self.entries[(item["key"], item["order"])] = item["diagram"]

    def write(self):
        items = [{"key": k, "order": o, "diagram": self.entries[(k, o)]}
                 for k, o in sorted(self.entries)]
        tmp = f"{self.path}.tmp"
        with open(tmp, "w", encoding="ascii", newline="\n") as fh:
            fh.write(_text({"schema": self.SCHEMA, "version": VERSION, "entries": items}))
        os.replace(tmp, self.path)

    def put(self, d: Diagram):
        self.entries[(store_key(d), d.certified_order)] = diagram_to_json(d)

    def get(self, key, order):
        obj = self.entries.get((key, order))
        return None if obj is None else diagram_from_json(obj)

    def best(self, key, order):
        """The cached diagram with the highest certified order not above ``order``.

        Corrupt entries are dropped and reported in ``errors``.
        """
        for o in sorted((o for k, o in self.entries if k == key and o <= order), reverse=True):
            try:
                return self.get(key, o)
            except StoreError as exc:
                self.errors.append(f"entry {key} order {o}: {exc}")
                del self.entries[(key, o)]
        return None

    def __len__(self):
        return len(self.entries)


def format_diagram(d: Diagram, classes=None) -> str:
    """One line per ray: id, base, direction, order and function.

    ``classes`` maps ray ids to a printable class for the rays that have one.
    """
    head = f"{d.label}: {len(d.rays)} rays, certified to order {d.certified_order}"
    if d.accelerated:
        head += ", accelerated"
    if d.y_bound is not None:
        head += f", y-degree <= {d.y_bound}"
    lines = [head]
    for r in d.rays:
        b = f"({fmt_q(r.base[0])}, {fmt_q(r.base[1])})"
        tag = "initial" if r.initial else f"order {r.order}"
        line = f"{r.ray_id}  {b:>14}  {str(r.direction):>9}  {tag:<8}  {r.function}"
        if classes and r.ray_id in classes:
            line += f"  [{classes[r.ray_id]}]"
        lines.append(line)
    return "\n".join(lines) + "\n"


# TikZ

PALETTE = ("blue", "red", "green!50!black", "orange", "violet", "cyan!60!black",
           "brown", "magenta")


def _num(q) -> str:
    s = f"{float(q):.4g}"
    return "0" if s == "-0" else s


def _clip_ray(base, u, box):
    """Part of ``base + s u`` (``s >= 0``) inside ``box``, or ``None``."""
    x0, y0, x1, y1 = box
    lo, hi = Fraction(0), None
    for p, dp, a, b in ((base[0], u[0], x0, x1), (base[1], u[1], y0, y1)):
        if dp == 0:
            if not a <= p <= b:
                return None
            continue
        s1, s2 = (a - p) / dp, (b - p) / dp
        s1, s2 = min(s1, s2), max(s1, s2)
        lo = max(lo, s1)
        hi = s2 if hi is None else min(hi, s2)
    if hi is None or hi <= lo:
        return None
    return ((base[0] + lo * u[0], base[1] + lo * u[1]),
            (base[0] + hi * u[0], base[1] + hi * u[1]))


def default_clip(d: Diagram):
    if d.unfolding is None:
        return (-3, -3, 3, 3)
    lo, hi = d.unfolding.window
    ys = [v[1] for v in d.unfolding.vertices]
    return (lo, min(ys) - 1, hi, max(3, max(ys) + 6))


def _y_order(r: Ray):
    keys = [k for k in r.function.raw() if k != (0, 0, 0, 0)]
    return abs(min(keys)[3]) if keys else 0


def tikz(d: Diagram, colors: bool = True, directions=None, special=(), clip=None,
         scale: float = 1.0) -> str:
    """TikZ code with one ``\\draw[->,color] (x1,y1) -- (x2,y2);`` line per visible ray.

    Rays are cut to ``clip = (x0, y0, x1, y1)``.  Created rays are colored by
    the y-exponent of their leading monomial; ``directions`` limits coloring
    to rays with those directions, and rays whose id starts with one of
    ``special`` are drawn thick.  Initial rays are gray, and with
    ``colors=False`` every ray is black.
    """
    box = tuple(Fraction(c) for c in (clip if clip is not None else default_clip(d)))
    if box[2] <= box[0] or box[3] <= box[1]:
        raise ValueError(f"empty clip rectangle {clip}")
    dirs = None if directions is None else {tuple(v) for v in directions}
    lines = [f"\\begin{{tikzpicture}}[scale={scale:g}]"]
    for r in d.rays:
        seg = _clip_ray(r.base, r.direction, box)
        if seg is None:
            continue
        if not colors:
            color = "black"
        elif r.initial:
            color = "gray"
        elif dirs is not None and r.direction not in dirs:
            color = "black"
        else:
            color = PALETTE[_y_order(r) % len(PALETTE)]
        if any(r.ray_id.startswith(s) for s in special):
            color += ",very thick"
        (a, b), (c, e) = seg
        lines.append(f"\\draw[->,{color}] ({_num(a)},{_num(b)}) -- ({_num(c)},{_num(e)});")
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines) + "\n"


def curve_tikz(curve, leg_length=2, color="blue") -> str:
    """TikZ code for a tropical curve: bounded edges, legs and edge weights above 1."""
    P = curve.vertices
    lines = ["\\begin{tikzpicture}"]
    for i, j, w in curve.edges:
        lines.append(f"\\draw[{color}] ({_num(P[i][0])},{_num(P[i][1])}) -- "
                     f"({_num(P[j][0])},{_num(P[j][1])});"
                     + (f" % weight {w}" if w > 1 else ""))
    for leg in curve.legs:
        a = P[leg.vertex]
        if leg.terminus.point is not None:
            b = leg.terminus.point
            style = color
        else:
            b = (a[0] + leg_length * leg.direction[0], a[1] + leg_length * leg.direction[1])
            style = f"->,{color}"
        lines.append(f"\\draw[{style}] ({_num(a[0])},{_num(a[1])}) -- ({_num(b[0])},{_num(b[1])});"
                     + (f" % weight {leg.weight}" if leg.weight > 1 else ""))
    for v in P:
        lines.append(f"\\fill[{color}] ({_num(v[0])},{_num(v[1])}) circle (1.5pt);")
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines) + "\n"
