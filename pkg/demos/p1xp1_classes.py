"""
Splitting log invariants of P1 x P1 by curve class.

The quadric is handled through its smooth toric model, the Hirzebruch
surface F2, whose boundary points carry the classes L1, L2 of the two
rulings.  Each vertical wall is tagged with the class of its tropical
curve, and the walls of one primitive class multiply to ``f_beta``.
Run with ``python demos/p1xp1_classes.py``.
"""
from scatdiag import (class_partition, extract_R, f_beta, new_case, ray_class, scatter,
                      smooth_model_classes, t_order_for, upward_rays)
from scatdiag.io import fmt_q


def name(beta, basis):
    return " + ".join(f"{c}{b}" if c != 1 else b for c, b in zip(beta, basis) if c)


def main(dmax=3):
    N, Y = t_order_for("(8'a)", dmax)
    d = scatter(new_case("(8'a)", 1, t_bound=N, refined=True), N, accelerate=True, y_bound=Y)
    C = smooth_model_classes("(8'a)")
    print(f"scattered (8'a) on F2 to t-order {N}: {len(d.rays)} rays\n")

    print("vertical walls and their classes:")
    for r in upward_rays(d):
        if r.single_term()[2][1] <= Y:
            beta = ray_class(d, r, C)
            print(f"  {str(r.function):<28} {name(beta, C.basis_names)}")

    print("\nf_beta by primitive class:")
    for beta in sorted(class_partition(d, C)):
        f, R = f_beta(d, beta, C)
        inv = ", ".join(f"R_{k}b = {fmt_q(v)}" for k, v in sorted(R.items()))
        print(f"  {name(beta, C.basis_names):<10} {f}   [{inv}]")

    print()
    print(extract_R(d, dmax, C))


if __name__ == "__main__":
    main()
