"""Exact posterior density of binary-task ambiguity: the inverse transform
xi and its a-derivative, normalization of the analytic density, agreement
with an independently assembled scipy route, consistency of means with the
closed-form posterior moments, the CDF (endpoints, monotonicity, agreement
with the density and with an empirical CDF), and tail behavior near a = 1.

The reference density here is deliberately naive: scipy beta pdfs and scipy
quadrature glued to the public xi/xi_partial_a inversion. It shares no
integration code with the production path, so agreement checks the whole
change-of-variables pipeline, not one implementation against itself.
"""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from ambiq.binary_density import (
    BinaryCounts,
    density_curve,
    density_integral,
    lower_bound,
    posterior_cdf_binary,
    posterior_density_binary,
    xi,
    xi_partial_a,
)
from ambiq.exceptions import DomainError
from ambiq.measures import MeasureKind, ProbabilityVector, ambiguity
from ambiq.numerics import DirichletParams, Quadrature, make_generator
from ambiq.posterior_analytics import expected_amb, expected_amb_modified


def reference_density(a, counts, beta, measure):
    """Naive scipy route; see module docstring."""
    cond = (counts.n_plus + beta, counts.n_minus + beta)
    cs = (counts.n_cs + beta, counts.n_plus + counts.n_minus + 2 * beta)
    lo = lower_bound(a, measure)
    if a <= lo:
        return 0.0

    def integrand(u):
        x = xi(a, u, measure)
        jac = abs(xi_partial_a(a, u, measure))
        spikes = scipy.stats.beta.pdf(x, *cond) + scipy.stats.beta.pdf(1 - x, *cond)
        return scipy.stats.beta.pdf(u, *cs) * spikes * jac

    # Square-root substitutions toward both endpoints, as in the package,
    # but integrated by scipy with a fixed tiny inset.
    mid = 0.5 * (lo + a)
    eps = 1e-7
    left, _ = scipy.integrate.quad(
        lambda s: 2 * s * integrand(lo + s * s), eps, math.sqrt(mid - lo), limit=300
    )
    right, _ = scipy.integrate.quad(
        lambda s: 2 * s * integrand(a - s * s), eps, math.sqrt(a - mid), limit=300
    )
    return left + right


def mixture_vector(a, u, measure):
    """Binary soft label whose ambiguity equals a: proper = (1-u)(xi, 1-xi)."""
    x = xi(a, u, measure)
    return ProbabilityVector(((1.0 - u) * x, (1.0 - u) * (1.0 - x)), u)


class TestXi:
    def test_inverts_the_measure(self):
        # xi is defined so the resulting soft label scores exactly a.
        for measure in (MeasureKind.NEW, MeasureKind.MODIFIED):
            for a in (0.15, 0.4, 0.7, 0.95):
                lo = lower_bound(a, measure)
                for frac in (0.1, 0.5, 0.9):
                    u = lo + frac * (a - lo)
                    q = mixture_vector(a, u, measure)
                    assert ambiguity(q, measure) == pytest.approx(a, abs=1e-9)

    def test_hand_value(self):
        # New measure, u = 0, a = 1/2: r = 0, xi = 1/2 (uniform conditional).
        assert xi(0.5, 0.0, MeasureKind.NEW) == pytest.approx(0.5, abs=1e-12)

    def test_branch_in_lower_half(self):
        for measure in (MeasureKind.NEW, MeasureKind.MODIFIED):
            x = xi(0.3, 0.1, measure)
            assert 0.0 < x <= 0.5

    def test_outside_domain_rejected(self):
        # u > a means even total conditional agreement cannot push the
        # measure down to a.
        with pytest.raises(DomainError):
            xi(0.3, 0.5, MeasureKind.NEW)
        # New measure at a > 1/2 also needs u >= 2a - 1.
        with pytest.raises(DomainError):
            xi(0.9, 0.5, MeasureKind.NEW)

    def test_vectorized_over_u(self):
        us = np.array([0.05, 0.1, 0.2])
        out = xi(0.4, us, MeasureKind.MODIFIED)
        assert out.shape == us.shape
        for u, x in zip(us, out):
            assert x == pytest.approx(xi(0.4, float(u), MeasureKind.MODIFIED))


class TestXiPartialA:
    def test_matches_finite_difference(self):
        h = 1e-6
        for measure in (MeasureKind.NEW, MeasureKind.MODIFIED):
            for a, u in ((0.3, 0.1), (0.6, 0.25), (0.8, 0.5)):
                if lower_bound(a, measure) + 1e-3 > u:
                    continue
                grad = xi_partial_a(a, u, measure)
                fd = (xi(a + h, u, measure) - xi(a - h, u, measure)) / (2 * h)
                assert grad == pytest.approx(fd, rel=1e-5)

    def test_positive_on_lower_branch(self):
        # Raising a pushes the lower root up toward the uniform point 1/2.
        assert xi_partial_a(0.4, 0.1, MeasureKind.NEW) > 0.0


class TestLowerBound:
    def test_new_measure_kink(self):
        assert lower_bound(0.3, MeasureKind.NEW) == 0.0
        assert lower_bound(0.8, MeasureKind.NEW) == pytest.approx(0.6)

    def test_modified_measure(self):
        assert lower_bound(0.3, MeasureKind.MODIFIED) == 0.0
        assert lower_bound(0.8, MeasureKind.MODIFIED) == 0.0


class TestNormalization:
    @pytest.mark.parametrize(
        "counts,beta",
        [
            (BinaryCounts(0, 0, 0), 1.0),
            (BinaryCounts(0, 0, 0), 0.5),
            (BinaryCounts(3, 2, 1), 1.0),
            (BinaryCounts(12, 3, 2), 2.0),
            (BinaryCounts(30, 0, 0), 1.0),
            (BinaryCounts(0, 0, 7), 0.5),
        ],
    )
    @pytest.mark.parametrize("measure", [MeasureKind.NEW, MeasureKind.MODIFIED])
    def test_density_integrates_to_one(self, counts, beta, measure):
        result = density_integral(counts, prior_beta=beta, measure=measure)
        assert result.value == pytest.approx(1.0, abs=1e-6)
        assert not result.depth_exceeded

    def test_mean_matches_closed_form(self):
        counts = BinaryCounts(10, 1, 1)
        posterior = DirichletParams(proper=(11.0, 2.0), cs=2.0)
        for measure, expected in (
            (MeasureKind.NEW, expected_amb(posterior)),
            (MeasureKind.MODIFIED, expected_amb_modified(posterior)),
        ):
            mass = density_integral(counts, measure=measure, moment=0).value
            first = density_integral(counts, measure=measure, moment=1).value
            assert first / mass == pytest.approx(expected, abs=1e-6)


class TestAgainstReferenceRoute:
    @pytest.mark.parametrize(
        "counts,beta",
        [
            (BinaryCounts(3, 2, 1), 1.0),
            (BinaryCounts(0, 0, 0), 0.5),
            (BinaryCounts(12, 3, 2), 2.0),
        ],
    )
    @pytest.mark.parametrize("measure", [MeasureKind.NEW, MeasureKind.MODIFIED])
    def test_density_agrees(self, counts, beta, measure):
        for a in (0.2, 0.45, 0.55, 0.8):
            mine = posterior_density_binary(a, counts, prior_beta=beta, measure=measure)
            ref = reference_density(a, counts, beta, measure)
            assert mine == pytest.approx(ref, rel=1e-5, abs=1e-9)


class TestDensityEdges:
    def test_rejects_closed_endpoints(self):
        # The density is defined on the open interval only; the CDF handles
        # the endpoints.
        counts = BinaryCounts(2, 2, 0)
        with pytest.raises(DomainError):
            posterior_density_binary(0.0, counts)
        with pytest.raises(DomainError):
            posterior_density_binary(1.0, counts)

    def test_nonnegative_on_grid(self):
        counts = BinaryCounts(5, 0, 2)
        for measure in (MeasureKind.NEW, MeasureKind.MODIFIED):
            grid = np.linspace(0.01, 0.99, 25)
            values = [
                posterior_density_binary(float(a), counts, measure=measure) for a in grid
            ]
            assert all(v >= 0.0 for v in values)
            assert all(math.isfinite(v) for v in values)

    def test_quadrature_override_threads_through(self):
        counts = BinaryCounts(3, 2, 1)
        loose = posterior_density_binary(
            0.4, counts, quadrature=Quadrature(tol=1e-4, max_depth=30)
        )
        tight = posterior_density_binary(
            0.4, counts, quadrature=Quadrature(tol=1e-10, max_depth=50)
        )
        assert loose == pytest.approx(tight, rel=1e-3)


class TestTailBehavior:
    def test_new_density_vanishes_at_upper_bound(self):
        counts = BinaryCounts(3, 2, 1)
        values = [
            posterior_density_binary(1.0 - eps, counts, measure=MeasureKind.NEW)
            for eps in (1e-2, 1e-3, 1e-4)
        ]
        assert values[0] > values[1] > values[2]
        assert values[-1] < 0.05

    def test_modified_density_has_inverse_sqrt_divergence(self):
        # f(1-eps)/f(1-4eps) -> sqrt(4 eps / eps) = 2 as eps -> 0.
        counts = BinaryCounts(3, 2, 1)
        eps = 1e-5
        near = posterior_density_binary(1.0 - eps, counts, measure=MeasureKind.MODIFIED)
        far = posterior_density_binary(1.0 - 4 * eps, counts, measure=MeasureKind.MODIFIED)
        assert near / far == pytest.approx(2.0, abs=0.05)


class TestCdf:
    def test_endpoints(self):
        counts = BinaryCounts(4, 1, 1)
        for measure in (MeasureKind.NEW, MeasureKind.MODIFIED):
            assert posterior_cdf_binary(0.0, counts, measure=measure) == 0.0
            assert posterior_cdf_binary(1.0, counts, measure=measure) == 1.0

    def test_monotone_on_grid(self):
        counts = BinaryCounts(3, 2, 1)
        grid = np.linspace(0.0, 1.0, 41)
        for measure in (MeasureKind.NEW, MeasureKind.MODIFIED):
            values = [
                posterior_cdf_binary(float(a), counts, measure=measure) for a in grid
            ]
            assert all(0.0 <= v <= 1.0 for v in values)
            assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))

    def test_consistent_with_density(self):
        # CDF increments must equal the integral of the density; compare a
        # central difference of the CDF against the density at the midpoint.
        counts = BinaryCounts(3, 2, 1)
        h = 5e-4
        for measure in (MeasureKind.NEW, MeasureKind.MODIFIED):
            for a in (0.3, 0.6):
                rise = posterior_cdf_binary(
                    a + h, counts, measure=measure
                ) - posterior_cdf_binary(a - h, counts, measure=measure)
                assert rise / (2 * h) == pytest.approx(
                    posterior_density_binary(a, counts, measure=measure), rel=1e-3
                )

    def test_against_empirical_cdf(self):
        counts = BinaryCounts(3, 2, 1)
        posterior = DirichletParams(proper=(4.0, 3.0), cs=2.0)
        rng = make_generator(21)
        draws = rng.dirichlet(posterior.as_array(), size=20_000)
        proper, cs = draws[:, :-1], draws[:, -1]
        for measure in (MeasureKind.NEW, MeasureKind.MODIFIED):
            from ambiq.measures import ambiguity_array

            values = np.sort(ambiguity_array(proper, cs, measure))
            for a in (0.25, 0.5, 0.75):
                ecdf = float(np.searchsorted(values, a, side="right")) / len(values)
                assert posterior_cdf_binary(a, counts, measure=measure) == pytest.approx(
                    ecdf, abs=0.02
                )


class TestDensityCurve:
    def test_shapes_and_grid(self):
        counts = BinaryCounts(2, 1, 1)
        grid, values = density_curve(counts, n_points=128)
        assert grid.shape == values.shape == (128,)
        assert np.all(np.diff(grid) > 0)
        assert np.all(values >= 0.0)
        assert np.all(np.isfinite(values))

    def test_new_grid_contains_kink(self):
        grid, _ = density_curve(BinaryCounts(1, 1, 0), n_points=64)
        assert 0.5 in grid

    def test_deterministic(self):
        counts = BinaryCounts(2, 1, 1)
        a1, v1 = density_curve(counts, measure=MeasureKind.MODIFIED, n_points=32)
        a2, v2 = density_curve(counts, measure=MeasureKind.MODIFIED, n_points=32)
        np.testing.assert_array_equal(v1, v2)


class TestBinaryCounts:
    def test_total(self):
        assert BinaryCounts(3, 2, 1).total == 6

    def test_accepts_numpy_integers(self):
        row = np.array([3, 2, 1])
        counts = BinaryCounts(row[0], row[1], row[2])
        assert counts.total == 6

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            BinaryCounts(-1, 0, 0)

    def test_rejects_float(self):
        with pytest.raises(DomainError):
            BinaryCounts(1.5, 0, 0)
