"""Convergence-rate calculators for quantized gradient-difference descent.

Every function here evaluates closed-form expressions in the problem
constants and the norm-ratio floor of the quantizer; nothing iterates.
Formulas use plain arithmetic operators only, so exact number types
(fractions.Fraction) pass through untouched when callers need exact
algebraic identities rather than floating approximations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional


@dataclass(frozen=True)
class ProblemConstants:
    """Smoothness/convexity/noise description of a distributed problem.

    L is the smoothness constant of each worker objective, mu the strong
    convexity modulus (0 for merely smooth problems), sigma2 the average
    stochastic-gradient variance (1/n) sum_i sigma_i^2, zeta2 a bound on
    the worker-gradient dissimilarity (1/n) sum_i ||grad f_i - grad f||^2,
    and n the number of workers.
    """

    L: float
    mu: float
    sigma2: float = 0
    zeta2: float = 0
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one worker")
        if not self.L > 0:
            raise ValueError("smoothness constant must be positive")
        if self.mu < 0 or self.mu > self.L:
            raise ValueError("need 0 <= mu <= L")
        if self.sigma2 < 0 or self.zeta2 < 0:
            raise ValueError("variance bounds must be >= 0")

    @property
    def kappa(self):
        if self.mu == 0:
            return math.inf
        return self.L / self.mu


@dataclass
class TheoryBounds:
    """Derived step/memory parameters and bound ingredients.

    Which fields are set depends on the selector that produced the object;
    unset fields stay None.
    """

    alpha_p: float
    alpha: Optional[float] = None
    c: Optional[float] = None
    gamma: Optional[float] = None
    leading_term: Optional[float] = None
    neighborhood: Optional[float] = None
    theta: Optional[float] = None
    eta: Optional[float] = None
    noise_term: Optional[float] = None
    regime: Optional[str] = None
    regime_scores: Optional[dict] = None
    schedule: Optional[Callable[[int], float]] = field(default=None, repr=False)
    omega: Optional[float] = None
    delta: Optional[float] = None
    terms: Optional[tuple] = None

    @property
    def total(self):
        if self.terms is None:
            raise ValueError("no bound terms on this object")
        return sum(self.terms)


def select_strongly_convex(constants: ProblemConstants, alpha_p) -> TheoryBounds:
    """Memory rate, memory weight, and stepsize for the linear-rate regime.

    With a = alpha_p the choices are alpha = a/2, c = 4(1-a)/(n a^2), and
    gamma = min(alpha/mu, 2/((L+mu)(1+c*alpha))). The leading iteration
    count 1/(gamma*mu) then equals
    max(2/a, (kappa+1)(1/2 - 1/n + 1/(n a))) identically, and the
    stationary neighborhood radius is (gamma/mu)(1+n*c*alpha)*sigma2/n.
    """
    if constants.mu <= 0:
        raise ValueError("linear-rate selection needs mu > 0")
    _check_alpha_p(alpha_p)
    a = alpha_p
    n = constants.n
    alpha = a / 2
    c = 4 * (1 - a) / (n * a * a)
    gamma = min(
        alpha / constants.mu,
        2 / ((constants.L + constants.mu) * (1 + c * alpha)),
    )
    return TheoryBounds(
        alpha_p=a,
        alpha=alpha,
        c=c,
        gamma=gamma,
        leading_term=1 / (gamma * constants.mu),
        neighborhood=(gamma / constants.mu) * (1 + n * c * alpha) * constants.sigma2 / n,
    )


def strongly_convex_bound(
    constants: ProblemConstants, bounds: TheoryBounds, V0, k: int
):
    """Value of the linear-rate guarantee (1-gamma*mu)^k V0 + neighborhood."""
    if bounds.gamma is None or bounds.neighborhood is None:
        raise ValueError("bounds object was not produced for the linear regime")
    return (1 - bounds.gamma * constants.mu) ** k * V0 + bounds.neighborhood


def _check_alpha_p(a) -> None:
    if not (0 < a <= 1):
        raise ValueError(f"norm-ratio floor must lie in (0, 1], got {a}")


def validate_params(
    constants: ProblemConstants, alpha, c, gamma, alpha_p
) -> list[str]:
    """Check admissibility of (alpha, c, gamma) for the linear-rate theory.

    Returns a list of violated-condition descriptions (empty when all
    hold). Floating comparisons carry a 1e-12 relative slack so parameter
    sets that satisfy a condition with algebraic equality are not flagged
    for one rounding ulp.
    """
    _check_alpha_p(alpha_p)
    n, mu, L = constants.n, constants.mu, constants.L
    if mu <= 0:
        raise ValueError("admissibility checks need mu > 0")

    def leq(lhs, rhs) -> bool:
        return lhs <= rhs + 1e-12 * max(1.0, abs(rhs))

    violations = []
    if alpha < 0:
        violations.append(f"memory-rate-nonnegative: alpha = {alpha} < 0")
    if gamma <= 0:
        violations.append(f"stepsize-positive: gamma = {gamma} <= 0")
        return violations
    if alpha > 0:
        if c < 0:
            violations.append(f"memory-weight-nonnegative: c = {c} < 0")
        else:
            lhs = (1 + n * c * alpha * alpha) / (1 + n * c * alpha)
            if not leq(lhs, alpha_p):
                violations.append(
                    "memory-rate-balance: (1 + n c alpha^2)/(1 + n c alpha) = "
                    f"{lhs} exceeds the norm-ratio floor {alpha_p}"
                )
            ceiling = min(alpha / mu, 2 / ((mu + L) * (1 + c * alpha)))
            if not leq(gamma, ceiling):
                violations.append(
                    "stepsize-ceiling: gamma = "
                    f"{gamma} exceeds min(alpha/mu, 2/((mu+L)(1+c*alpha))) = {ceiling}"
                )
    else:
        ceiling = 2 * n * alpha_p / ((mu + L) * (2 + (n - 2) * alpha_p))
        if not leq(gamma, ceiling):
            violations.append(
                "memoryless-stepsize-ceiling: gamma = "
                f"{gamma} exceeds 2 n a / ((mu+L)(2+(n-2)a)) = {ceiling}"
            )
    return violations


def select_decreasing(constants: ProblemConstants, alpha_p) -> TheoryBounds:
    """Offset and schedule for the 1/k-rate stepsize gamma_k = 2/(mu k + theta).

    theta = (mu/a) max(4, 2(kappa+1)/n + (kappa+1)(n-2) a / n) makes the
    initial stepsize admissible (theta = 2 / gamma_max). eta = mu/theta,
    and noise_term is the variance half of the bound constant
    C = max(V0, noise_term); the guarantee is E V_k <= C / (eta k + 1).
    regime_scores reports the three asymptotic regimes
    (constant, kappa/n, kappa * a); regime names the largest (first on
    ties, in that order).
    """
    if constants.mu <= 0:
        raise ValueError("decreasing-stepsize selection needs mu > 0")
    _check_alpha_p(alpha_p)
    a = alpha_p
    n = constants.n
    mu = constants.mu
    kappa = constants.kappa
    alpha = a / 2
    c = 4 * (1 - a) / (n * a * a)
    theta = (mu / a) * max(4, 2 * (kappa + 1) / n + (kappa + 1) * (n - 2) * a / n)
    eta = mu / theta
    noise_term = 4 * (1 + n * c * alpha) * constants.sigma2 / (n * theta * mu)
    scores = {"constant": 1, "kappa_over_n": kappa / n, "kappa_alpha_p": kappa * a}
    regime = max(scores, key=scores.get)  # first key wins ties
    return TheoryBounds(
        alpha_p=a,
        alpha=alpha,
        c=c,
        theta=theta,
        eta=eta,
        noise_term=noise_term,
        regime=regime,
        regime_scores=scores,
        schedule=lambda k: 2 / (mu * k + theta),
    )


def decreasing_bound(bounds: TheoryBounds, V0, k: int):
    """Value of the 1/k guarantee max(V0, noise_term) / (eta k + 1)."""
    if bounds.eta is None or bounds.noise_term is None:
        raise ValueError("bounds object was not produced for the 1/k regime")
    return max(V0, bounds.noise_term) / (bounds.eta * k + 1)


def nonconvex_bound(
    constants: ProblemConstants, alpha_p, K: int, Lambda0
) -> TheoryBounds:
    """Stepsize and 1/sqrt(K) guarantee for smooth nonconvex objectives.

    With a = alpha_p and D = 4 + (n-4) a, the stepsize is
    gamma = n a / (L D sqrt(K)) and the guarantee on
    min_k E||grad f(x_k)||^2 over K iterations splits into three terms:
    initial gap, gradient noise, and worker dissimilarity. All three are
    returned in .terms (their sum in .total), the stepsize in .gamma.
    """
    _check_alpha_p(alpha_p)
    if K < 1:
        raise ValueError("need K >= 1")
    a = alpha_p
    n = constants.n
    L = constants.L
    D = 4 + (n - 4) * a
    sqrt_K = math.sqrt(K)
    gamma = n * a / (L * D * sqrt_K)
    terms = (
        2 * L * D * Lambda0 / (n * a * sqrt_K),
        (4 - 3 * a) * constants.sigma2 / (D * sqrt_K),
        8 * (1 - a) * constants.zeta2 / (D * sqrt_K),
    )
    return TheoryBounds(alpha_p=a, gamma=gamma, terms=terms)


def momentum_admissibility(
    constants: ProblemConstants, alpha_p, beta, gamma, alpha=0
) -> list[str]:
    """Violated admissibility conditions for the heavy-ball variants.

    alpha = 0 covers the memoryless method (conditions in omega alone);
    alpha > 0 the gradient-difference method (conditions in 2*omega - 1
    and delta).
    """
    _check_alpha_p(alpha_p)
    a = alpha_p
    n, L = constants.n, constants.L
    omega = (n - 1) / n + 1 / (n * a)
    violations = []
    if gamma <= 0:
        violations.append(f"stepsize-positive: gamma = {gamma} <= 0")
        return violations
    if alpha == 0:
        if not beta < 1:
            violations.append(f"momentum-below-one: beta = {beta} >= 1")
            return violations
        ceiling = (1 - beta * beta) / (2 * L * omega)
        if not gamma < ceiling:
            violations.append(
                f"momentum-stepsize-ceiling: gamma = {gamma} not below "
                f"(1-beta^2)/(2 L omega) = {ceiling}"
            )
        lhs = beta * beta / (1 - beta) ** 3
        rhs = (1 - beta * beta - 2 * L * gamma * omega) / (gamma * gamma * L * L * omega)
        if not lhs <= rhs:
            violations.append(
                f"momentum-balance: beta^2/(1-beta)^3 = {lhs} exceeds "
                f"(1 - beta^2 - 2 L gamma omega)/(gamma^2 L^2 omega) = {rhs}"
            )
    else:
        if not 0 < alpha < a:
            violations.append(
                f"memory-rate-range: alpha = {alpha} outside (0, alpha_p = {a})"
            )
            return violations
        if not beta < 1 - alpha:
            violations.append(
                f"momentum-memory-budget: beta = {beta} not below 1 - alpha = {1 - alpha}"
            )
            return violations
        delta = 1 + (2 / n) * (1 / a - 1) * (1 + alpha / (1 - alpha - beta))
        ceiling = (1 - beta * beta) / (2 * L * (2 * omega - 1))
        if not gamma < ceiling:
            violations.append(
                f"momentum-stepsize-ceiling: gamma = {gamma} not below "
                f"(1-beta^2)/(2 L (2 omega - 1)) = {ceiling}"
            )
        lhs = beta * beta / ((1 - beta) ** 2 * alpha)
        rhs = (1 - beta * beta - 2 * L * gamma * (2 * omega - 1)) / (
            gamma * gamma * L * L * delta
        )
        if not lhs <= rhs:
            violations.append(
                f"momentum-balance: beta^2/((1-beta)^2 alpha) = {lhs} exceeds "
                f"(1 - beta^2 - 2 L gamma (2 omega - 1))/(gamma^2 L^2 delta) = {rhs}"
            )
    return violations


def momentum_bound(
    constants: ProblemConstants, alpha_p, beta, gamma, k: int, gap0, alpha=0
) -> TheoryBounds:
    """Guarantee on min_j E||grad f(z_j)||^2 for the heavy-ball variants.

    gap0 is the initial objective gap f(x_0) - f_inf (the momentum buffer
    starts at zero so the virtual iterate z_0 equals x_0). Set alpha = 0
    for the memoryless method. Raises ValueError when (beta, gamma) is
    inadmissible; .omega and .delta expose the variance constants.
    """
    violations = momentum_admissibility(constants, alpha_p, beta, gamma, alpha)
    if violations:
        raise ValueError("; ".join(violations))
    if k < 1:
        raise ValueError("need k >= 1")
    a = alpha_p
    n, L = constants.n, constants.L
    omega = (n - 1) / n + 1 / (n * a)
    one_m_b = 1 - beta
    if alpha == 0:
        delta = None
        terms = (
            4 * gap0 / (gamma * k),
            2 * gamma * L * constants.sigma2 / (a * n * one_m_b**2),
            2 * gamma**2 * L**2 * beta**2 * constants.sigma2 / (one_m_b**5 * a * n),
            gamma**2 * L**2 * beta**2 * (1 - a) * constants.zeta2 / (one_m_b**5 * a * n),
        )
    else:
        delta = 1 + (2 / n) * (1 / a - 1) * (1 + alpha / (1 - alpha - beta))
        noise_factor = 3 / a - 2
        terms = (
            4 * gap0 / (gamma * k),
            2 * gamma * L * constants.sigma2 * noise_factor / (one_m_b**2 * n),
            2 * gamma**2 * L**2 * beta**2 * constants.sigma2 * noise_factor
            / (one_m_b**5 * n),
            3 * gamma**2 * L**2 * beta**2 * constants.zeta2 * (1 / a - 1)
            / (one_m_b**5 * n),
        )
    return TheoryBounds(
        alpha_p=a, alpha=alpha, gamma=gamma, omega=omega, delta=delta, terms=terms
    )


def optimal_nodes(d: int, m: int):
    """Worker count minimizing the combined iteration/communication budget.

    For dimension d split into m equal blocks the minimizer is
    n* = 2 (sqrt(d/m) - 1); the returned closure evaluates the resulting
    budget max(2 sqrt(d/m), kappa + 1) as a function of kappa.
    """
    if d < 1 or m < 1 or d % m:
        raise ValueError("need m >= 1 equal blocks dividing d")
    block = d // m
    n_star = 2 * (math.sqrt(block) - 1)

    def budget(kappa):
        return max(2 * math.sqrt(block), kappa + 1)

    return n_star, budget
