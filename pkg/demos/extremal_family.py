"""Build the 2**f_r(n) family, verify it, and push it through the
complement and edge-dual maps.

    python demos/extremal_family.py 6 2
"""

import sys

from diffiso import (
    complement_family,
    dualize,
    extremal_family,
    f_r,
    find_involution_clique,
    is_difference_isomorphic,
)


def describe(label, fam):
    report = is_difference_isomorphic(fam)
    psi = find_involution_clique(fam) if fam.space.n <= 12 else None
    print(f"{label:<12} n={fam.space.n} r={fam.space.r} size={len(fam):<6} "
          f"ok={report.ok} pairs={report.checked_pairs} clique={psi}")


def main(argv):
    n, r = (int(a) for a in argv[:2]) if len(argv) >= 2 else (6, 2)
    fam, psi = extremal_family(n, r)
    print(f"f_{r}({n}) = {f_r(n, r)}; family built around psi = {psi}")
    print("first members:", ", ".join(fam.hexes()[:4]))
    describe("extremal", fam)
    describe("complement", complement_family(fam))
    if r < n:
        describe("dual", dualize(fam))


if __name__ == "__main__":
    main(sys.argv[1:])
