import math
from fractions import Fraction

import pytest

from diana.theory import (
    ProblemConstants,
    TheoryBounds,
    decreasing_bound,
    momentum_admissibility,
    momentum_bound,
    nonconvex_bound,
    optimal_nodes,
    select_decreasing,
    select_strongly_convex,
    strongly_convex_bound,
    validate_params,
)


def exact_constants(L, mu, n, sigma2=0, zeta2=0):
    return ProblemConstants(L=L, mu=mu, sigma2=sigma2, zeta2=zeta2, n=n)


class TestLinearRateSelection:
    def test_ten_worker_worked_numbers(self):
        constants = exact_constants(L=10.0, mu=1.0, n=10)
        b = select_strongly_convex(constants, 0.5)
        assert b.alpha == 0.25
        assert b.c == pytest.approx(0.8, abs=1e-15)
        assert b.leading_term == pytest.approx(6.6, rel=1e-12)

    def test_two_worker_max_norm_instance(self):
        # n = 2, kappa = 10, block dim 20, max norm: the floor is
        # 2/(1 + 2 sqrt 5) and everything below follows from it.
        a = 2.0 / (1.0 + math.sqrt(20.0))
        constants = exact_constants(L=10.0, mu=1.0, n=2, sigma2=1.0)
        b = select_strongly_convex(constants, a)
        assert b.alpha == pytest.approx(0.1827439976315568, rel=1e-14)
        assert b.c == pytest.approx(9.5, rel=1e-12)
        assert b.gamma == pytest.approx(0.06645236277511156, rel=1e-14)
        assert b.leading_term == pytest.approx(15.048373876248846, rel=1e-14)
        # 1 + n c alpha collapses to (2 - a)/a = 2 sqrt 5
        assert b.neighborhood == pytest.approx(b.gamma * math.sqrt(5.0), rel=1e-12)

    def test_leading_term_identity_exact(self):
        # 1/(gamma mu) == max(2/a, (kappa+1)(1/2 - 1/n + 1/(n a))),
        # checked in exact rational arithmetic.
        for a in (Fraction(1, 2), Fraction(1, 10), Fraction(3, 4), Fraction(1)):
            for n in (1, 2, 10, 100):
                for kappa in (Fraction(1), Fraction(10), Fraction(1000)):
                    constants = exact_constants(L=kappa, mu=Fraction(1), n=n)
                    b = select_strongly_convex(constants, a)
                    want = max(
                        2 / a, (kappa + 1) * (Fraction(1, 2) - Fraction(1, n) + 1 / (n * a))
                    )
                    assert 1 / (b.gamma * constants.mu) == want

    def test_memory_balance_identity_exact(self):
        # The selected (alpha, c) satisfy the balance condition with
        # equality: (1 + n c a^2/4)/(1 + n c a/2) == a.
        for a in (Fraction(1, 3), Fraction(1, 2), Fraction(9, 10)):
            for n in (1, 2, 7):
                alpha = a / 2
                c = 4 * (1 - a) / (n * a * a)
                lhs = (1 + n * c * alpha * alpha) / (1 + n * c * alpha)
                assert lhs == a

    def test_neighborhood_formula_exact(self):
        a, n = Fraction(1, 2), 4
        constants = exact_constants(L=Fraction(8), mu=Fraction(1), n=n, sigma2=Fraction(3))
        b = select_strongly_convex(constants, a)
        # 1 + n c alpha == (2 - a)/a
        assert b.neighborhood == (b.gamma / constants.mu) * (2 - a) / a * Fraction(3) / n

    def test_bound_evaluates(self):
        constants = exact_constants(L=10.0, mu=1.0, n=2, sigma2=1.0)
        b = select_strongly_convex(constants, 0.5)
        v0 = 7.0
        assert strongly_convex_bound(constants, b, v0, 0) == pytest.approx(
            v0 + b.neighborhood
        )
        k = 100
        want = (1 - b.gamma) ** k * v0 + b.neighborhood
        assert strongly_convex_bound(constants, b, v0, k) == pytest.approx(want)

    def test_requires_strong_convexity(self):
        with pytest.raises(ValueError, match="mu > 0"):
            select_strongly_convex(exact_constants(L=1.0, mu=0.0, n=2), 0.5)
        with pytest.raises(ValueError, match="floor"):
            select_strongly_convex(exact_constants(L=1.0, mu=0.5, n=2), 0.0)
        with pytest.raises(ValueError, match="floor"):
            select_strongly_convex(exact_constants(L=1.0, mu=0.5, n=2), 1.5)

    def test_bound_rejects_wrong_selector_output(self):
        constants = exact_constants(L=1.0, mu=0.5, n=2)
        stray = nonconvex_bound(constants, 0.5, K=4, Lambda0=1.0)
        with pytest.raises(ValueError):
            strongly_convex_bound(constants, stray, 1.0, 10)
        with pytest.raises(ValueError):
            decreasing_bound(stray, 1.0, 10)


class TestValidateParams:
    CONSTANTS = exact_constants(L=10.0, mu=1.0, n=10)

    def test_selected_params_pass(self):
        for a in (0.1, 0.5, 1.0):
            b = select_strongly_convex(self.CONSTANTS, a)
            assert validate_params(self.CONSTANTS, b.alpha, b.c, b.gamma, a) == []

    def test_memoryless_ceiling(self):
        a = 0.5
        ceiling = 2 * 10 * a / (11.0 * (2 + 8 * a))
        assert validate_params(self.CONSTANTS, 0.0, 0.0, ceiling * 0.999, a) == []
        out = validate_params(self.CONSTANTS, 0.0, 0.0, ceiling * 1.01, a)
        assert len(out) == 1 and "memoryless-stepsize-ceiling" in out[0]

    def test_each_violation_fires(self):
        b = select_strongly_convex(self.CONSTANTS, 0.5)
        out = validate_params(self.CONSTANTS, -0.1, b.c, b.gamma, 0.5)
        assert any("memory-rate-nonnegative" in v for v in out)
        out = validate_params(self.CONSTANTS, b.alpha, b.c, 0.0, 0.5)
        assert out == ["stepsize-positive: gamma = 0.0 <= 0"]
        out = validate_params(self.CONSTANTS, b.alpha, -1.0, b.gamma, 0.5)
        assert any("memory-weight-nonnegative" in v for v in out)
        out = validate_params(self.CONSTANTS, 0.4, 0.1, 1e-4, 0.5)
        assert any("memory-rate-balance" in v for v in out)
        out = validate_params(self.CONSTANTS, b.alpha, b.c, b.gamma * 1.5, 0.5)
        assert out and all("stepsize-ceiling" in v for v in out)

    def test_slack_tolerates_rounding(self):
        # gamma exactly at the ceiling passes; one part in 1e12 above it
        # still passes, but a real violation does not.
        b = select_strongly_convex(self.CONSTANTS, 0.5)
        assert validate_params(
            self.CONSTANTS, b.alpha, b.c, b.gamma * (1 + 1e-13), 0.5
        ) == []
        assert validate_params(self.CONSTANTS, b.alpha, b.c, b.gamma * (1 + 1e-9), 0.5)

    def test_requires_mu(self):
        with pytest.raises(ValueError):
            validate_params(exact_constants(L=1.0, mu=0.0, n=2), 0.1, 1.0, 0.01, 0.5)


class TestDecreasingSelection:
    def test_theta_is_twice_inverse_gamma_exact(self):
        for a in (Fraction(1, 2), Fraction(1, 5), Fraction(1)):
            for n in (1, 2, 10):
                for kappa in (Fraction(2), Fraction(50)):
                    constants = exact_constants(L=kappa, mu=Fraction(1), n=n)
                    dec = select_decreasing(constants, a)
                    lin = select_strongly_convex(constants, a)
                    assert dec.theta == 2 / lin.gamma
                    assert dec.eta == constants.mu / dec.theta

    def test_two_worker_instance_numbers(self):
        a = 2.0 / (1.0 + math.sqrt(20.0))
        constants = exact_constants(L=10.0, mu=1.0, n=2, sigma2=1.0)
        dec = select_decreasing(constants, a)
        assert dec.theta == pytest.approx(30.096747752497688, rel=1e-12)
        assert dec.eta == pytest.approx(0.03322618138755578, rel=1e-12)
        assert dec.noise_term == pytest.approx(0.2971840008612521, rel=1e-12)

    def test_schedule_values(self):
        constants = exact_constants(L=10.0, mu=2.0, n=2)
        dec = select_decreasing(constants, 0.5)
        assert dec.schedule(0) == pytest.approx(2.0 / dec.theta)
        for k in (1, 10, 1000):
            assert dec.schedule(k) == pytest.approx(2.0 / (2.0 * k + dec.theta))

    def test_regimes(self):
        # constant dominates
        dec = select_decreasing(exact_constants(L=2.0, mu=1.0, n=100), 0.01)
        assert dec.regime == "constant"
        # kappa/n dominates
        dec = select_decreasing(exact_constants(L=1000.0, mu=1.0, n=10), 0.001)
        assert dec.regime == "kappa_over_n"
        # kappa * a dominates
        dec = select_decreasing(exact_constants(L=100.0, mu=1.0, n=1000), 0.5)
        assert dec.regime == "kappa_alpha_p"
        assert set(dec.regime_scores) == {"constant", "kappa_over_n", "kappa_alpha_p"}

    def test_three_way_tie_takes_first(self):
        # kappa = 10, n = 10, a = 1/10: all three scores equal 1.
        dec = select_decreasing(exact_constants(L=10.0, mu=1.0, n=10), 0.1)
        assert dec.regime_scores == {
            "constant": 1,
            "kappa_over_n": 1.0,
            "kappa_alpha_p": 1.0,
        }
        assert dec.regime == "constant"

    def test_two_way_tie_above_one(self):
        # kappa/n == kappa a == 10 > 1: first of the pair wins.
        dec = select_decreasing(exact_constants(L=40.0, mu=1.0, n=4), 0.25)
        assert dec.regime == "kappa_over_n"

    def test_recursion_lemma(self):
        # Simulating v_{k+1} = (1 - gamma_k mu) v_k + gamma_k^2 N with the
        # selected schedule must stay below max(V0, noise_term)/(eta k + 1).
        for sigma2, v0 in ((1.0, 10.0), (100.0, 0.01), (0.0, 1.0)):
            constants = exact_constants(L=50.0, mu=1.0, n=5, sigma2=sigma2)
            a = 0.25
            dec = select_decreasing(constants, a)
            alpha, c = a / 2, 4 * (1 - a) / (5 * a * a)
            noise = (1 + 5 * c * alpha) * sigma2 / 5
            assert dec.noise_term == pytest.approx(
                4 * noise / (dec.theta * constants.mu), rel=1e-12
            )
            v = v0
            for k in range(10_000):
                bound = decreasing_bound(dec, v0, k)
                assert v <= bound * (1 + 1e-9), f"k={k}: {v} > {bound}"
                g = dec.schedule(k)
                v = (1 - g * constants.mu) * v + g * g * noise
            assert v <= decreasing_bound(dec, v0, 10_000) * (1 + 1e-9)

    def test_requires_mu(self):
        with pytest.raises(ValueError):
            select_decreasing(exact_constants(L=1.0, mu=0.0, n=2), 0.5)


class TestNonconvex:
    def test_single_worker_unit_floor(self):
        constants = exact_constants(L=2.0, mu=0.0, n=1, sigma2=3.0, zeta2=5.0)
        K = 100
        b = nonconvex_bound(constants, 1.0, K=K, Lambda0=7.0)
        assert b.gamma == pytest.approx(1.0 / (2.0 * 10.0), rel=1e-15)
        want = (2 * 2.0 * 7.0 / 10.0, 3.0 / 10.0, 0.0)
        for got, w in zip(b.terms, want):
            assert got == pytest.approx(w, rel=1e-14)
        assert b.total == pytest.approx(sum(want), rel=1e-14)

    def test_variance_identities_exact(self):
        # With the linear-regime memory pair (alpha, c), the nonconvex
        # constants collapse: 1 + 2 c alpha == D/(n a) and
        # 1 + 2 c n alpha == (4 - 3a)/a where D = 4 + (n - 4) a.
        for a in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
            for n in (1, 2, 3, 8):
                alpha = a / 2
                c = 4 * (1 - a) / (n * a * a)
                D = 4 + (n - 4) * a
                assert 1 + 2 * c * alpha == D / (n * a)
                assert 1 + 2 * c * n * alpha == (4 - 3 * a) / a

    def test_term_scaling_in_K(self):
        constants = exact_constants(L=1.0, mu=0.0, n=4, sigma2=1.0, zeta2=1.0)
        b1 = nonconvex_bound(constants, 0.5, K=100, Lambda0=1.0)
        b2 = nonconvex_bound(constants, 0.5, K=10_000, Lambda0=1.0)
        assert b2.total == pytest.approx(b1.total / 10.0, rel=1e-12)
        assert b2.gamma == pytest.approx(b1.gamma / 10.0, rel=1e-12)

    def test_validation(self):
        constants = exact_constants(L=1.0, mu=0.0, n=2)
        with pytest.raises(ValueError):
            nonconvex_bound(constants, 0.5, K=0, Lambda0=1.0)
        with pytest.raises(ValueError):
            nonconvex_bound(constants, 0.0, K=10, Lambda0=1.0)


class TestMomentum:
    def test_omega_single_worker_unit_floor(self):
        constants = exact_constants(L=1.0, mu=0.0, n=1)
        b = momentum_bound(constants, 1.0, beta=0.5, gamma=0.1, k=10, gap0=1.0)
        assert b.omega == 1.0
        assert b.delta is None

    def test_memoryless_bound_numbers(self):
        constants = exact_constants(L=1.0, mu=0.0, n=1, sigma2=2.0, zeta2=7.0)
        beta, gamma, k, gap0 = 0.5, 0.1, 10, 3.0
        b = momentum_bound(constants, 1.0, beta, gamma, k, gap0)
        one_m_b = 0.5
        want = (
            4 * gap0 / (gamma * k),
            2 * gamma * 2.0 / one_m_b**2,
            2 * gamma**2 * beta**2 * 2.0 / one_m_b**5,
            0.0,  # (1 - a) kills the dissimilarity term at a = 1
        )
        for got, w in zip(b.terms, want):
            assert got == pytest.approx(w, rel=1e-12)

    def test_memoryless_admissibility(self):
        constants = exact_constants(L=1.0, mu=0.0, n=1)
        assert momentum_admissibility(constants, 1.0, 0.5, 0.1) == []
        out = momentum_admissibility(constants, 1.0, 1.0, 0.1)
        assert len(out) == 1 and "momentum-below-one" in out[0]
        out = momentum_admissibility(constants, 1.0, 0.5, 0.5)
        assert any("momentum-stepsize-ceiling" in v for v in out)
        # just under the ceiling but with beta too heavy: balance fires
        out = momentum_admissibility(constants, 1.0, 0.9, 0.09)
        assert any("momentum-balance" in v for v in out)
        assert not any("ceiling" in v for v in out)
        out = momentum_admissibility(constants, 1.0, 0.5, 0.0)
        assert any("stepsize-positive" in v for v in out)

    def test_memory_variant_admissibility(self):
        constants = exact_constants(L=1.0, mu=0.0, n=2)
        a = 0.5
        ok = dict(beta=0.5, gamma=0.05, alpha=0.25)
        assert momentum_admissibility(constants, a, **ok) == []
        out = momentum_admissibility(constants, a, 0.5, 0.05, alpha=0.6)
        assert any("memory-rate-range" in v for v in out)
        out = momentum_admissibility(constants, a, 0.8, 0.05, alpha=0.25)
        assert any("momentum-memory-budget" in v for v in out)
        out = momentum_admissibility(constants, a, 0.5, 0.2, alpha=0.25)
        assert any("momentum-stepsize-ceiling" in v for v in out)

    def test_memory_variant_constants_and_terms(self):
        constants = exact_constants(L=1.0, mu=0.0, n=2, sigma2=1.0, zeta2=2.0)
        a, alpha, beta, gamma, k, gap0 = 0.5, 0.25, 0.5, 0.05, 100, 1.0
        b = momentum_bound(constants, a, beta, gamma, k, gap0, alpha=alpha)
        assert b.omega == pytest.approx(1.5)
        assert b.delta == pytest.approx(3.0)
        noise_factor = 3 / a - 2  # = 4
        one_m_b = 0.5
        want = (
            4 * gap0 / (gamma * k),
            2 * gamma * 1.0 * 1.0 * noise_factor / (one_m_b**2 * 2),
            2 * gamma**2 * 1.0 * beta**2 * 1.0 * noise_factor / (one_m_b**5 * 2),
            3 * gamma**2 * 1.0 * beta**2 * 2.0 * (1 / a - 1) / (one_m_b**5 * 2),
        )
        for got, w in zip(b.terms, want):
            assert got == pytest.approx(w, rel=1e-12)

    def test_bound_rejects_inadmissible(self):
        constants = exact_constants(L=1.0, mu=0.0, n=1)
        with pytest.raises(ValueError, match="momentum-stepsize-ceiling"):
            momentum_bound(constants, 1.0, beta=0.5, gamma=0.5, k=10, gap0=1.0)
        with pytest.raises(ValueError, match="k >= 1"):
            momentum_bound(constants, 1.0, beta=0.5, gamma=0.1, k=0, gap0=1.0)


class TestOptimalNodes:
    def test_unit_block_wants_no_extra_workers(self):
        n_star, budget = optimal_nodes(16, 16)
        assert n_star == 0.0
        assert budget(5.0) == 6.0
        assert budget(0.5) == 2.0

    def test_hundred_to_one_split(self):
        n_star, budget = optimal_nodes(1600, 16)
        assert n_star == pytest.approx(18.0)
        assert budget(30.0) == 31.0
        assert budget(10.0) == 20.0

    def test_validation(self):
        with pytest.raises(ValueError):
            optimal_nodes(10, 3)
        with pytest.raises(ValueError):
            optimal_nodes(0, 1)


class TestDataModel:
    def test_constants_validation(self):
        with pytest.raises(ValueError):
            ProblemConstants(L=0.0, mu=0.0)
        with pytest.raises(ValueError):
            ProblemConstants(L=1.0, mu=-0.1)
        with pytest.raises(ValueError):
            ProblemConstants(L=1.0, mu=2.0)
        with pytest.raises(ValueError):
            ProblemConstants(L=1.0, mu=0.5, sigma2=-1.0)
        with pytest.raises(ValueError):
            ProblemConstants(L=1.0, mu=0.5, zeta2=-1.0)
        with pytest.raises(ValueError):
            ProblemConstants(L=1.0, mu=0.5, n=0)

    def test_kappa(self):
        assert ProblemConstants(L=10.0, mu=2.0).kappa == 5.0
        assert ProblemConstants(L=10.0, mu=0.0).kappa == math.inf

    def test_total_requires_terms(self):
        with pytest.raises(ValueError, match="terms"):
            TheoryBounds(alpha_p=0.5).total
