"""Exact F_r(n) for every space whose compatibility graph fits the cap,
next to the 2**f_r(n) lower bound.

The n = r + 1 rows show the bound failing; every row with n >= r + 2
meets it.
"""

import math

from diffiso import f_r, search


def main(budget=60.0):
    print(f"{'n':>2} {'r':>2} {'F_r(n)':>7} {'2^f':>5} {'exact':>6} {'nodes':>8}")
    for n in range(2, 6):
        for r in range(1, n):
            res = search(n, r, budget)
            mark = " <- n = r + 1" if n == r + 1 and res.size > 2 ** f_r(n, r) else ""
            print(f"{n:>2} {r:>2} {res.size:>7} {2 ** f_r(n, r):>5} {str(res.exact):>6} "
                  f"{res.nodes_explored:>8}{mark}")
    print("F_1(n) = C(n, n//2):", [search(n, 1).size == math.comb(n, n // 2) for n in range(2, 6)])


if __name__ == "__main__":
    main()
