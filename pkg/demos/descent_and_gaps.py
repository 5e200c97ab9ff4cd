"""Link gaps on complete skeleta, the descent map, and the global gaps they certify."""

from __future__ import annotations

from hdx import complete_skeleton, summarize
from hdx.spectra import descent_profile, verify_global_gaps


def main() -> None:
    for N, n in [(4, 2), (6, 2), (6, 3), (8, 3)]:
        X = complete_skeleton(N, n)
        print(f"K_{N} {n}-skeleton")
        for row in descent_profile(X):
            pred = "" if row.predicted is None else f"  predicted {row.predicted[0]:.6f}"
            print(f"  level {row.k:2d}: lambda {row.lam:.6f}  kappa {row.kappa:.6f}{pred}")
        print("  global gap certificates:", summarize(verify_global_gaps(X)))


if __name__ == "__main__":
    main()
