"""
Command-line interface.

::

    scatdiag init P2 --order 3
    scatdiag scatter P2 3 --accelerate
    scatdiag scatter std11 5
    scatdiag tex P2 1 --clip -3 -1 3 4 > p2.tex
    scatdiag tropical P2 2 --ray 1a2b3c
    scatdiag invariants P2 3
    scatdiag save P2 3 -o p2.json

A target is a case label (``P2``, ``(8'a)`` ...) or a named diagram
(``std 1 1``, ``std11``, ``exp 2 3``, ``det2``).  For case targets ORDER is
the curve degree ``d`` and the matching t-order is chosen automatically; for
named targets it is the t-order itself.  A target may also be a saved
``.json`` diagram.  Scattered diagrams are cached in the store given by
``--store`` or the ``SCATDIAG_STORE`` environment variable.

Exit status is 0 on success, 2 on usage errors and 3 on data errors.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
import time

from . import io
from .diagram import new_case, new_named
from .engine import InconsistentInput, WindowOverflowError, scatter
from .invariants import (NotCertified, certified_degree, class_step, display_factors,
                         extract_R, format_factors, ray_class, t_order_for, upward_rays)
from .lattice import load_class_table, resolve_case, smooth_model_classes
from .tropical import AmbiguousAncestry, completions, multiplicity

USAGE, DATA = 2, 3
NAMED = {"std": 2, "exp": 2, "det": 1}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class Target:
    """A parsed target: how to build the initial diagram and which order to reach."""

    def __init__(self, tokens, args, need_order=True):
        self.path = None
        self.kind = None
        self.case = None
        self.order = None
        tokens = list(tokens)
        if not tokens:
            raise UsageError("missing target")
        head = tokens.pop(0)
        if head.endswith(".json") and os.path.exists(head):
            self.path = head
            if tokens:
                raise UsageError(f"unexpected arguments after file: {tokens}")
            return
        m = re.fullmatch(r"(std|exp|det)(\d*)", head.lower())
        if m:
            self.kind = m.group(1)
            n = NAMED[self.kind]
            if m.group(2):
                if len(m.group(2)) != n:
                    raise UsageError(f"{head}: {self.kind} takes {n} one-digit parameters "
                                     f"when written together")
                self.params = tuple(int(c) for c in m.group(2))
            else:
                if len(tokens) < n:
                    raise UsageError(f"{self.kind} takes {n} parameters")
                self.params = tuple(_int(t) for t in tokens[:n])
                tokens = tokens[n:]
        else:
            try:
                self.case = resolve_case(head)
            except (KeyError, ValueError) as exc:
                raise UsageError(f"unknown case or diagram {head!r}") from exc
        if len(tokens) > 1:
            raise UsageError(f"unexpected arguments: {tokens[1:]}")
        if tokens:
            self.order = _int(tokens[0])
        elif need_order:
            raise UsageError("missing ORDER")
        else:
            self.order = 1 if self.case else 2
        if self.order < 1:
            raise UsageError("ORDER must be positive")
        self.domains = getattr(args, "domains", 1)
        self.refined = getattr(args, "refined", False)
        self.accelerate = getattr(args, "accelerate", False)

    def initial(self, t_bound=None):
        if self.case is not None:
            N, _ = self.t_order()
            return new_case(self.case, self.domains, t_bound=t_bound or N, refined=self.refined)
        try:
            return new_named(self.kind, *self.params, t_bound=t_bound or self.order)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def t_order(self):
        if self.case is None:
            return self.order, None
        return t_order_for(self.case, self.order)


def _int(s):
    try:
        return int(s)
    except ValueError:
        raise UsageError(f"expected an integer, got {s!r}") from None


def obtain(target: Target, args, out=sys.stdout):
    """The scattered diagram for a target, from a file, the store or a fresh run."""
    if target.path is not None:
        try:
            return io.load(target.path)
        except io.StoreError as exc:
            raise DataError(str(exc)) from exc
    d0 = target.initial()
    N, Y = target.t_order()
    acc = target.accelerate and d0.unfolding is not None
    use_store = not getattr(args, "no_store", False)
    store = None
    start = d0
    if use_store:
        try:
            store = io.Store(getattr(args, "store", None))
        except io.StoreError as exc:
            raise DataError(str(exc)) from exc
        key = io.store_key(d0, acc, Y)
        cached = store.best(key, N)
        for msg in store.errors:
            print(f"warning: corrupt cache {msg}; recomputing", file=sys.stderr)
        if cached is not None and cached.certified_order == N:
            print(f"cache hit: {key} order {N}; nothing recomputed", file=out)
            return cached
        if cached is not None:
            print(f"resuming {key} from cached order {cached.certified_order}", file=out)
            start = cached
    t0 = time.perf_counter()
    try:
        d = scatter(start, N, accelerate=acc, y_bound=Y)
    except (WindowOverflowError, InconsistentInput) as exc:
        raise DataError(str(exc)) from exc
    print(f"scattered {d.label} to order {N} in {time.perf_counter() - t0:.1f}s", file=out)
    if store is not None:
        store.put(d)
        store.write()
    return d


def _classes(d, args, required):
    path = getattr(args, "class_table", None)
    try:
        if path:
            return load_class_table(path, d.case)
        return smooth_model_classes(d.case)
    except KeyError as exc:
        if required:
            raise DataError(exc.args[0]) from exc
        return None
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc


def cmd_init(args, out):
    t = Target(args.target, args, need_order=False)
    if t.path is not None:
        raise UsageError("init builds a new diagram; use load for files")
    t.domains = args.order if args.order is not None else args.domains
    d = t.initial(t_bound=8)
    print(io.format_diagram(d), end="", file=out)
    if args.output:
        io.save(d, args.output)
    return d


def _print_invariants(d, out, dmax=None, classes=None):
    dmax = certified_degree(d) if dmax is None else dmax
    table = extract_R(d, dmax, classes)
    print(table, file=out)
    return table


def cmd_scatter(args, out):
    t = Target(args.target, args)
    d = obtain(t, args, out)
    if d.unfolding is not None:
        print(f"f_out = {format_factors(display_factors(d))}", file=out)
        cert = certified_degree(d)
        _print_invariants(d, out, cert if t.order is None else min(t.order, cert))
    else:
        print(io.format_diagram(d.with_rays(d.new_rays)), end="", file=out)
    if args.output:
        io.save(d, args.output)
    return d


def cmd_show(args, out):
    t = Target(args.target, args, need_order=False)
    d = obtain(t, args, out)
    labels = None
    if d.unfolding is not None:
        C = _classes(d, args, required=args.classes)
        if C is not None:
            labels = {}
            Y = certified_degree(d) * class_step(d.case)
            for r in upward_rays(d):
                if r.single_term()[2][1] > Y:
                    continue
                try:
                    beta = ray_class(d, r, C)
                except AmbiguousAncestry as exc:
                    raise DataError(str(exc)) from exc
                labels[r.ray_id] = "beta=" + ",".join(str(b) for b in beta)
    print(io.format_diagram(d, labels), end="", file=out)
    return d


def cmd_tex(args, out):
    t = Target(args.target, args, need_order=False)
    d = obtain(t, args, sys.stderr)
    dirs = None
    if args.directions:
        dirs = []
        for s in args.directions:
            m = re.fullmatch(r"\(?\s*(-?\d+)\s*,\s*(-?\d+)\s*\)?", s)
            if not m:
                raise UsageError(f"bad direction {s!r}; write it as a,b")
            dirs.append((int(m.group(1)), int(m.group(2))))
    try:
        text = io.tikz(d, colors=args.colors == "on", directions=dirs,
                       special=tuple(args.special or ()), clip=args.clip)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    out.write(text)
    return text


def cmd_tropical(args, out):
    t = Target(args.target, args, need_order=False)
    d = obtain(t, args, out)
    try:
        r = d.by_id(args.ray)
    except KeyError as exc:
        raise DataError(exc.args[0]) from exc
    if r.initial:
        raise DataError(f"ray {r.ray_id} is initial and has no tropical curve")
    curves = completions(d, r)
    total = 0
    for i, h in enumerate(curves):
        m = multiplicity(h)
        total += m
        print(f"curve {i + 1} of {len(curves)}: Mult = {io.fmt_q(m)}", file=out)
        print(h, file=out)
        if args.tex:
            out.write(io.curve_tikz(h))
    print(f"sum of multiplicities: {io.fmt_q(total)}", file=out)
    return curves


def cmd_invariants(args, out):
    t = Target(args.target, args)
    if t.case is None and t.path is None:
        raise UsageError("invariants need a case target")
    t.accelerate = True
    d = obtain(t, args, out)
    if d.unfolding is None:
        raise DataError("invariants need a case diagram")
    C = _classes(d, args, required=True) if args.classes else None
    dmax = t.order if t.path is None else args.dmax or certified_degree(d)
    _print_invariants(d, out, dmax, C)


def cmd_save(args, out):
    t = Target(args.target, args)
    d = obtain(t, args, out)
    io.save(d, args.output)
    print(f"saved {len(d.rays)} rays to {args.output}", file=out)


def cmd_load(args, out):
    try:
        d = io.load(args.file)
    except (OSError, io.StoreError) as exc:
        raise DataError(str(exc)) from exc
    print(io.format_diagram(d), end="", file=out)
    if args.into_store:
        try:
            store = io.Store(args.store)
        except io.StoreError as exc:
            raise DataError(str(exc)) from exc
        store.put(d)
        store.write()
        print(f"stored as {io.store_key(d)} order {d.certified_order}", file=out)


def build_parser():
    p = argparse.ArgumentParser(prog="scatdiag", description="Exact scattering diagrams.")
    sub = p.add_subparsers(dest="verb", required=True)

    def target(sp, order_help="ORDER"):
        sp.add_argument("target", nargs="+", metavar="TARGET",
                        help=f"case, named diagram with parameters, or .json file; then {order_help}")
        sp.add_argument("--domains", "-k", type=int, default=1,
                        help="fundamental domains on each side (case targets)")
        sp.add_argument("--refined", action="store_true", help="use the smooth toric model")
        sp.add_argument("--accelerate", action="store_true",
                        help="compute in the central domain only and translate")
        sp.add_argument("--store", help=f"cache file (default ${io.STORE_ENV} or ./scatdiag_store.json)")
        sp.add_argument("--no-store", action="store_true", help="neither read nor write the cache")
        sp.add_argument("--class-table", help="JSON class table for a case without a built-in one")

    sp = sub.add_parser("init", help="build an initial diagram")
    sp.add_argument("target", nargs="+", metavar="TARGET")
    sp.add_argument("--order", type=int, help="number of fundamental domains (same as --domains)")
    sp.add_argument("--domains", "-k", type=int, default=1)
    sp.add_argument("--refined", action="store_true")
    sp.add_argument("-o", "--output", help="also save the diagram here")
    sp.set_defaults(func=cmd_init)

    sp = sub.add_parser("scatter", help="scatter to an order and report the result")
    target(sp)
    sp.add_argument("-o", "--output", help="also save the diagram here")
    sp.set_defaults(func=cmd_scatter)

    sp = sub.add_parser("show", help="print the rays of a diagram")
    target(sp, "[ORDER]")
    sp.add_argument("--classes", action="store_true",
                    help="require a class table and print classes of upward rays")
    sp.set_defaults(func=cmd_show)

    sp = sub.add_parser("tex", help="TikZ code for a diagram")
    target(sp, "[ORDER]")
    sp.add_argument("--colors", choices=("on", "off"), default="on")
    sp.add_argument("--directions", nargs="+", metavar="A,B",
                    help="color only rays with these directions")
    sp.add_argument("--special", nargs="+", metavar="ID", help="rays to draw thick")
    sp.add_argument("--clip", nargs=4, type=float, metavar=("X0", "Y0", "X1", "Y1"))
    sp.set_defaults(func=cmd_tex)

    sp = sub.add_parser("tropical", help="tropical curves of a ray")
    target(sp, "[ORDER]")
    sp.add_argument("--ray", required=True, help="ray id or a unique prefix of it")
    sp.add_argument("--tex", action="store_true", help="also print TikZ code for each curve")
    sp.set_defaults(func=cmd_tropical)

    sp = sub.add_parser("invariants", help="table of log invariants R_d")
    target(sp, "DMAX")
    sp.add_argument("--classes", action="store_true", help="also split by curve class")
    sp.add_argument("--dmax", type=int, help="degree bound for file targets")
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("save", help="scatter and save a diagram")
    target(sp)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_save)

    sp = sub.add_parser("load", help="read a saved diagram")
    sp.add_argument("file")
    sp.add_argument("--into-store", action="store_true", help="add it to the cache")
    sp.add_argument("--store")
    sp.set_defaults(func=cmd_load)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"scatdiag: error: {exc}", file=sys.stderr)
        return USAGE
    except (DataError, NotCertified) as exc:
        print(f"scatdiag: {exc}", file=sys.stderr)
        return DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
