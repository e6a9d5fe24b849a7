"""Run every finite check at its default desk scale and print one line each."""

from diffiso.lemmalab import (
    check_eq_2,
    check_lemma_2_3,
    check_lemma_2_4,
    check_lemma_2_6,
    check_lemma_3_2,
    check_lemma_3_3,
    check_lemma_3_4,
    check_lemma_3_7,
    check_prop_2_7,
)

CHECKS = [
    ("2.3 at (4, 2)", lambda: check_lemma_2_3(4, 2)),
    ("2.4 sweep to (8, 4)", lambda: check_lemma_2_4(8, 4, sweep=True)),
    ("2.6 at (4, 2)", lambda: check_lemma_2_6(4, 2)),
    ("eq2 sweep to (8, 4)", lambda: check_eq_2(8, 4, sweep=True)),
    ("2.7 at (6, 2)", lambda: check_prop_2_7(6, 2)),
    ("3.2 at (4, 2)", lambda: check_lemma_3_2(4, 2)),
    ("3.2 sampled (6, 2)", lambda: check_lemma_3_2(6, 2, "sampled", samples=2000, seed=1)),
    ("3.4 at (5, 2)", lambda: check_lemma_3_4(5, 2)),
    ("3.7 at n = 7", lambda: check_lemma_3_7(7)),
    ("3.3 at (6, 2), delta 4", lambda: check_lemma_3_3(6, 2, delta=4)),
]


def main():
    for label, run in CHECKS:
        rep = run()
        ratio = "-" if rep.worst_ratio is None else f"{rep.worst_ratio:.4f}"
        print(f"{label:<24} {rep.mode:<11} instances={rep.instances_checked:<10} "
              f"violations={rep.violations} worst_ratio={ratio}")


if __name__ == "__main__":
    main()
