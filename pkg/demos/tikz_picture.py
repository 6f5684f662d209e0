"""
Draw a scattered diagram as TikZ.

``python demos/tikz_picture.py out.tex`` writes a standalone LaTeX file with
two pictures: a small standard diagram, and the central part of the
projective plane diagram with the vertical rays drawn thick.
"""
import sys

from scatdiag import io, new_case, new_named, scatter, t_order_for, upward_rays

PREAMBLE = "\\documentclass{standalone}\n\\usepackage{tikz}\n\\begin{document}\n"


def main(path=None):
    small = scatter(new_named("std", 2, 2), 4)
    N, Y = t_order_for("P2", 2)
    p2 = scatter(new_case("P2", 1, t_bound=N), N, accelerate=True, y_bound=Y)
    up = [r.ray_id for r in upward_rays(p2)]
    pictures = [
        io.tikz(small, clip=(-1, -1, 3, 3)),
        io.tikz(p2, special=up, clip=(-4, -8, 4, 6), scale=0.5),
    ]
    text = PREAMBLE + "\n".join(pictures) + "\\end{document}\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
        print(f"wrote {path}: {sum(t.count(chr(92) + 'draw') for t in pictures)} rays drawn")
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
