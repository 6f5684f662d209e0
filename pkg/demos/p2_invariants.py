"""
Log invariants of the projective plane, read off a scattering diagram.

Run with ``python demos/p2_invariants.py [dmax]``.  The diagram is built on
three fundamental domains so the central one sees all of its neighbours;
only the central domain is scattered, and its new rays are copied outward.
"""
import sys
import time

from scatdiag import extract_R, f_out, log1, new_case, scatter, t_order_for
from scatdiag.invariants import display_factors, format_factors


def main(dmax=3):
    N, Y = t_order_for("P2", dmax)
    print(f"degree {dmax} needs t-order {N} and y-degree {Y}")
    d0 = new_case("P2", 3, t_bound=N)
    print(f"initial diagram: {len(d0.rays)} rays over {d0.unfolding.domains} domains")

    t0 = time.perf_counter()
    d = scatter(d0, N, accelerate=True, y_bound=Y)
    print(f"scattered to {len(d.rays)} rays in {time.perf_counter() - t0:.1f}s\n")

    # The vertical rays leaving the central domain multiply to f_out.
    print("f_out =", format_factors(display_factors(d)))
    print("log f_out =", log1(f_out(d)))

    table = extract_R(d, dmax)
    print()
    print(table)


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
