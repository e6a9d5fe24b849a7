"""A difference-isomorphic family that no involution turns into a clique.

The last member is G0; the others form a psi-clique that G0 reaches
through the 4-cycle phi.
"""

from diffiso import appendix_family, find_involution_clique, is_difference_isomorphic
from diffiso.core import induce_edge_perm
from diffiso.relation import arrow


def main():
    for n, r in [(7, 2), (8, 2), (8, 3), (9, 2)]:
        fam, psi, phi, g0 = appendix_family(n, r)
        ep_phi = induce_edge_perm(fam.space, phi)
        reach = all(arrow(g0, g, ep_phi) for g in list(fam)[:-1])
        print(f"n={n} r={r} size={len(fam):<3} psi={psi} phi={phi}")
        print(f"    G0 reaches every other member under phi: {reach}")
        print(f"    difference-isomorphic: {is_difference_isomorphic(fam).ok}")
        print(f"    involution clique: {find_involution_clique(fam)}")


if __name__ == "__main__":
    main()
