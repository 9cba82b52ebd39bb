"""The exact posterior density of ambiguity for binary tasks.

Run:  python3 demos/binary_density_tour.py

For two answer categories the posterior distribution of the ambiguity
value admits an analytic density: conditioning on the cs mass, the event
{ambiguity <= a} is a two-sided tail event for the conditional answer
probability, and a change of variables turns the posterior into a single
integral. This script normalizes the density, compares its mean to the
closed form, samples a text histogram, and probes the endpoint behavior
where the two measures differ qualitatively.
"""

import numpy as np

from ambiq import (
    BinaryCounts,
    CountVector,
    DirichletParams,
    MeasureKind,
    density_curve,
    density_integral,
    expected_amb,
    expected_amb_modified,
    posterior_cdf_binary,
    posterior_density_binary,
    posterior_update,
)

COUNTS = BinaryCounts(n_plus=4, n_minus=1, n_cs=1)


def text_plot(grid, values, height=12, width=64) -> None:
    top = float(np.max(values))
    columns = np.interp(
        np.linspace(grid[0], grid[-1], width), grid, values
    )
    for level in range(height, 0, -1):
        threshold = top * (level - 0.5) / height
        row = "".join("#" if v >= threshold else " " for v in columns)
        print(f"  {row}")
    print("  " + "-" * width)
    print(f"  a = {grid[0]:.2f}{'':<{width - 16}}a = {grid[-1]:.2f}")


def main() -> None:
    print(f"Annotations: {COUNTS.n_plus} yes, {COUNTS.n_minus} no, {COUNTS.n_cs} cs;")
    print("prior beta = 1.")
    print()

    posterior = posterior_update(
        DirichletParams.symmetric(2, 1.0),
        CountVector(proper=(COUNTS.n_plus, COUNTS.n_minus), cs=COUNTS.n_cs),
    )

    for measure, closed_mean in (
        (MeasureKind.NEW, expected_amb(posterior)),
        (MeasureKind.MODIFIED, expected_amb_modified(posterior)),
    ):
        mass = density_integral(COUNTS, measure=measure, moment=0)
        first = density_integral(COUNTS, measure=measure, moment=1)
        print(f"{measure.value} measure:")
        print(f"  integral of the density : {mass.value:.8f} (should be 1)")
        print(f"  mean from the density   : {first.value / mass.value:.8f}")
        print(f"  closed-form mean        : {closed_mean:.8f}")
        grid, values = density_curve(COUNTS, measure=measure, n_points=256)
        text_plot(grid, values)
        print()

    print("Endpoint behavior near a = 1 distinguishes the measures: the")
    print("plain density vanishes (reaching 1 requires total abstention, a")
    print("posterior null set), while the modified density diverges like")
    print("(1-a)^(-1/2) because uniform conditional disagreement already")
    print("scores 1.")
    print(f"  {'1 - a':>8} {'new':>12} {'modified':>12}")
    for eps in (1e-2, 1e-3, 1e-4, 1e-5):
        new = posterior_density_binary(1.0 - eps, COUNTS, measure=MeasureKind.NEW)
        modified = posterior_density_binary(
            1.0 - eps, COUNTS, measure=MeasureKind.MODIFIED
        )
        print(f"  {eps:>8.0e} {new:>12.4e} {modified:>12.4e}")
    print()

    print("The cumulative distribution gives calibrated tail statements:")
    for threshold in (0.25, 0.5, 0.75):
        prob = 1.0 - posterior_cdf_binary(threshold, COUNTS, measure=MeasureKind.NEW)
        print(f"  P(ambiguity > {threshold:.2f} | data) = {prob:.3f}")


if __name__ == "__main__":
    main()
