"""
Tropical curves behind the walls of a scattering diagram.

Every created wall is traced back through the walls that produced it.  The
traces are tropical curves, and a wall's coefficient is recovered from
their multiplicities.  Run with ``python demos/tropical_curves.py``.
"""
from scatdiag import (completions, correspondence, multiplicity, new_case, new_named,
                      scatter, t_order_for, upward_rays)
from scatdiag.io import fmt_q


def show(d, r):
    _, _, m = r.single_term()
    print(f"ray {r.ray_id} from {tuple(map(fmt_q, r.base))} along {r.direction}: {r.function}")
    for h in completions(d, r):
        print(f"  Mult {fmt_q(multiplicity(h))}")
        print("   ", str(h).replace("\n", "\n    "))
    # c is taken from the log of all walls on this support, not the raw 1 + c z^m
    c, wm = correspondence(d, r)
    print(f"  log coefficient {fmt_q(c)}, w * sum of Mult {fmt_q(wm)}\n")


def main():
    # Two standard walls meeting at the origin: one curve with a single vertex.
    d = scatter(new_named("std", 1, 1), 2)
    show(d, d.new_rays[0])

    # A wall of the projective plane diagram with more than one curve behind it.
    N, Y = t_order_for("P2", 2)
    d = scatter(new_case("P2", 1, t_bound=N), N, accelerate=True, y_bound=Y)
    rays = [r for r in upward_rays(d) if r.single_term() and len(completions(d, r)) > 1]
    show(d, rays[0])


if __name__ == "__main__":
    main()
