"""Walk through the three ambiguity measures on hand-picked soft labels.

Run:  python3 demos/compare_measures.py

A soft label spreads probability over the answer categories of a task plus
an explicit "can't solve" (cs) response. Each measure condenses it into a
single ambiguity score in [0, 1]; they differ in how hard they punish
near-uniform disagreement and how they treat abstention mass.
"""

from ambiq import (
    MeasureKind,
    ProbabilityVector,
    ambiguity,
    modified_from_new,
    normalized_entropy,
)

HEADER = f"{'soft label':<34} {'new':>7} {'old':>7} {'modified':>9} {'entropy':>8}"


def describe(q: ProbabilityVector) -> str:
    parts = ", ".join(f"{v:.2f}" for v in q.proper)
    return f"({parts} | cs {q.cs:.2f})"


def show(q: ProbabilityVector) -> None:
    new = ambiguity(q, MeasureKind.NEW)
    old = ambiguity(q, MeasureKind.OLD)
    modified = ambiguity(q, MeasureKind.MODIFIED)
    entropy = normalized_entropy(q)
    print(
        f"{describe(q):<34} {new:>7.3f} {old:>7.3f} {modified:>9.3f} {entropy:>8.3f}"
    )


def main() -> None:
    print("Dichotomous tasks, no abstention: sweeping toward an even split.")
    print(HEADER)
    for top in (1.0, 0.9, 0.8, 0.7, 0.6, 0.5):
        show(ProbabilityVector((top, 1.0 - top), 0.0))
    print()
    print("The old total-variation measure saturates quickly: it already")
    print("reports 1.0 at a 50/50 split, while the new measure tops out at")
    print("0.5 there because two random annotators still agree half the")
    print("time. The modified measure rescales the new one so uniform")
    print("conditional disagreement reaches 1.0, restoring comparability")
    print("with the old scale without inheriting its saturation.")
    print()

    print("Abstention mass is treated asymmetrically: moving probability")
    print("to cs always raises every measure.")
    print(HEADER)
    for cs in (0.0, 0.25, 0.5, 0.75, 1.0):
        half = (1.0 - cs) / 2.0
        show(ProbabilityVector((half, half), cs))
    print()

    print("Five categories: disagreement spread wide versus concentrated.")
    print(HEADER)
    show(ProbabilityVector((0.8, 0.2, 0.0, 0.0, 0.0), 0.0))
    show(ProbabilityVector((0.4, 0.4, 0.2, 0.0, 0.0), 0.0))
    show(ProbabilityVector((0.25, 0.25, 0.2, 0.2, 0.1), 0.0))
    show(ProbabilityVector((0.2, 0.2, 0.2, 0.2, 0.2), 0.0))
    print()
    print("Normalized entropy (rightmost column) tracks the same ordering")
    print("but lacks the cs asymmetry: it is shown for contrast only.")
    print()

    q = ProbabilityVector((0.4, 0.4, 0.2, 0.0, 0.0), 0.0)
    amb = ambiguity(q, MeasureKind.NEW)
    print("The modified measure is an algebraic rescaling of the new one:")
    print(f"  amb~ = (C*amb - q_cs) / (C-1)")
    print(
        f"  e.g. C=5, amb={amb:.3f}, q_cs=0 ->"
        f" {modified_from_new(amb, q.cs, q.n_proper):.3f}"
        f" (direct: {ambiguity(q, MeasureKind.MODIFIED):.3f})"
    )


if __name__ == "__main__":
    main()
