"""Mixing deviation on a weighted complex and the overlap of a planar embedding."""

from __future__ import annotations

import numpy as np

from hdx import complete_skeleton, random_weights
from hdx.mixing import random_families, verify_mixing
from hdx.overlap import overlap_bruteforce


def main() -> None:
    X = random_weights(complete_skeleton(7, 2), seed=1)
    certs = verify_mixing(X, 2, random_families(X, 2, 200, seed=3))
    for c in certs:
        print(f"{c.name}: {c.status}  deviation {c.lhs:.4g} <= bound {c.rhs:.4g}")

    rng = np.random.default_rng(0)
    pts = rng.normal(size=(X.num_vertices, 2))
    res = overlap_bruteforce(X, pts)
    print(f"overlap: {res.ratio:.3f} of the triangle weight covers {np.round(res.best_point, 3)}")


if __name__ == "__main__":
    main()
