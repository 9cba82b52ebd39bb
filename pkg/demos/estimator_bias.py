"""How finite annotation pools bias ambiguity estimates.

Run:  python3 demos/estimator_bias.py

Plugging empirical frequencies into the measure is consistent but biased:
squared frequencies overestimate squared probabilities, so the plug-in
estimator sits below the truth at every finite n, converging from below.
For the quadratic-entropy measure that bias is available in closed form.
Bayesian point estimates trade this known bias for prior shrinkage.
"""

from ambiq import (
    ProbabilityVector,
    ambiguity_new,
    bias_curve,
    bias_plugin,
    expected_plugin,
)


def main() -> None:
    q = ProbabilityVector((0.45, 0.35), 0.20)
    truth = ambiguity_new(q)
    print(f"True soft label: (0.45, 0.35 | cs 0.20), ambiguity {truth:.4f}.")
    print()

    print("Exact expectation of the plug-in estimator (closed form):")
    print(f"  {'n':>5} {'E[estimate]':>12} {'bias':>10}")
    for n in (1, 2, 3, 5, 10, 30, 100, 500):
        print(
            f"  {n:>5} {expected_plugin(q, n):>12.4f} {bias_plugin(q, n):>10.4f}"
        )
    print()
    print("One annotator can never disagree with itself, so n = 1 reports")
    print("only the abstention mass and carries the worst bias. The bias")
    print("is strictly negative and shrinks monotonically, roughly like")
    print("1/n once n is moderate.")
    print()

    print("Monte Carlo comparison with Bayesian point estimates (posterior")
    print("mean and mode under a flat symmetric prior), 200 repeats:")
    series = bias_curve(
        q,
        n_values=(1, 2, 5, 20, 100, 500),
        prior_beta=1.0,
        mc_repeats=200,
        seed=0,
    )
    labels = series.labels
    print(f"  {'n':>5}" + "".join(f" {label:>16}" for label in labels))
    for i, n in enumerate(series.n_values):
        cells = []
        for label in labels:
            bias = series.bias[label][i]
            err = series.stderr[label][i]
            cells.append(f"{bias:+.4f}±{err:.4f}" if err else f"{bias:+.4f} exact")
        print(f"  {n:>5}" + "".join(f" {cell:>16}" for cell in cells))
    print()
    print("The posterior mean starts biased toward the prior's ambiguity")
    print("(upward here) and crosses toward zero; the mode inherits extra")
    print("wobble from histogram binning. By n = 500 every estimator's")
    print("bias is far inside +-0.02.")


if __name__ == "__main__":
    main()
