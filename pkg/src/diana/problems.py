"""Distributed test problems: quadratics, l2-regularized logistic
regression on LIBSVM files, and a two-worker split of the Rosenbrock
function.

Each problem knows its worker decomposition f = (1/n) sum f_i, exposes
deterministic per-worker gradients plus a stochastic oracle, and carries
its smoothness/convexity constants. Optimum metadata (x_star, f_star and
the per-worker gradients there) is attached where a closed form or a
high-accuracy reference solve is available.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .prox import Regularizer
from .theory import ProblemConstants


class LibsvmParseError(ValueError):
    """Raised with file/line attribution when a LIBSVM line is malformed."""


class Problem:
    """Base distributed problem; subclasses fill in f_i and grad_i.

    Attributes
    ----------
    dim, n : dimensions and worker count.
    constants : ProblemConstants for the theory calculators.
    x_star, f_star, h_star : optimum metadata, or None when unknown.
        h_star holds the n per-worker gradients at x_star.
    sigmas : per-worker additive noise levels (E||noise||^2 = sigma_i^2).
    """

    dim: int
    n: int
    constants: ProblemConstants
    x_star = None
    f_star = None
    h_star = None

    def __init__(self, dim: int, n: int, sigmas=0.0):
        self.dim = dim
        self.n = n
        self.sigmas = np.broadcast_to(np.asarray(sigmas, dtype=np.float64), (n,)).copy()
        if np.any(self.sigmas < 0):
            raise ValueError("noise levels must be >= 0")

    def f_i(self, x: np.ndarray, i: int) -> float:
        raise NotImplementedError

    def grad_i(self, x: np.ndarray, i: int) -> np.ndarray:
        raise NotImplementedError

    def f(self, x: np.ndarray) -> float:
        return sum(self.f_i(x, i) for i in range(self.n)) / self.n

    def grad(self, x: np.ndarray) -> np.ndarray:
        g = self.grad_i(x, 0).copy()
        for i in range(1, self.n):
            g += self.grad_i(x, i)
        return g / self.n

    def sample_grad(self, x: np.ndarray, i: int, rng: np.random.Generator) -> np.ndarray:
        """Stochastic gradient for worker i: deterministic gradient plus
        spherical Gaussian noise with E||noise||^2 = sigma_i^2."""
        g = self.grad_i(x, i)
        s = self.sigmas[i]
        if s > 0.0:
            g = g + (s / math.sqrt(self.dim)) * rng.standard_normal(self.dim)
        return g

    @property
    def mean_noise_variance(self) -> float:
        return float(np.mean(self.sigmas**2))


class QuadraticProblem(Problem):
    """f_i(x) = 0.5 (x - b_i)' A_i (x - b_i) with SPD matrices A_i."""

    def __init__(self, As, bs, sigmas=0.0):
        As = [np.asarray(A, dtype=np.float64) for A in As]
        bs = [np.asarray(b, dtype=np.float64) for b in bs]
        if len(As) != len(bs) or not As:
            raise ValueError("need matching nonempty matrix/center lists")
        dim = As[0].shape[0]
        super().__init__(dim, len(As), sigmas)
        self.As = As
        self.bs = bs
        mean_A = sum(As) / self.n
        eigs = np.linalg.eigvalsh(mean_A)
        if eigs[0] <= 0:
            raise ValueError("average curvature matrix must be positive definite")
        self.x_star = np.linalg.solve(
            mean_A, sum(A @ b for A, b in zip(As, bs)) / self.n
        )
        self.h_star = [A @ (self.x_star - b) for A, b in zip(As, bs)]
        self.constants = ProblemConstants(
            L=float(eigs[-1]),
            mu=float(eigs[0]),
            sigma2=self.mean_noise_variance,
            zeta2=estimate_dissimilarity_at(self, self.x_star),
            n=self.n,
        )
        self.f_star = self.f(self.x_star)

    def f_i(self, x, i):
        r = x - self.bs[i]
        return 0.5 * float(r @ self.As[i] @ r)

    def grad_i(self, x, i):
        return self.As[i] @ (x - self.bs[i])


def quadratic_problem(
    n: int, dim: int, condition_number: float, seed: int, sigma: float = 0.0
) -> QuadraticProblem:
    """Random n-worker quadratic with average curvature spanning exactly
    [1, condition_number].

    All workers share one eigenbasis; each worker's spectrum pins 1 and
    condition_number at the ends with the interior drawn uniformly, so
    every f_i is 1-strongly convex and condition_number-smooth and the
    average attains both extremes.
    """
    if dim < 2:
        raise ValueError("need dim >= 2 to pin both spectrum ends")
    if condition_number < 1:
        raise ValueError("condition number must be >= 1")
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    As, bs = [], []
    for _ in range(n):
        diag = np.empty(dim)
        diag[0] = 1.0
        diag[-1] = condition_number
        diag[1:-1] = rng.uniform(1.0, condition_number, dim - 2)
        As.append((Q * diag) @ Q.T)
        bs.append(rng.standard_normal(dim))
    return QuadraticProblem(As, bs, sigma)


def load_libsvm(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a LIBSVM file: one `label idx:val ...` line per row, 1-based
    feature indices, whitespace-delimited.

    Labels must be binary; {0, 1} labels are remapped to {-1, +1} with a
    warning. Parse failures raise LibsvmParseError naming the line.
    """
    rows: list[dict[int, float]] = []
    labels: list[float] = []
    max_idx = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            try:
                label = float(parts[0])
            except ValueError:
                raise LibsvmParseError(
                    f"{path}:{lineno}: label {parts[0]!r} is not a number"
                ) from None
            feats: dict[int, float] = {}
            for tok in parts[1:]:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise LibsvmParseError(
                        f"{path}:{lineno}: feature {tok!r} lacks an index:value colon"
                    )
                try:
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise LibsvmParseError(
                        f"{path}:{lineno}: bad feature token {tok!r}"
                    ) from None
                if idx < 1:
                    raise LibsvmParseError(
                        f"{path}:{lineno}: feature index {idx} is not 1-based"
                    )
                feats[idx] = val
                max_idx = max(max_idx, idx)
            labels.append(label)
            rows.append(feats)
    if not rows:
        raise LibsvmParseError(f"{path}: no data rows")
    y = np.asarray(labels)
    values = set(np.unique(y))
    if values <= {0.0, 1.0}:
        warnings.warn(f"{path}: remapping {{0,1}} labels to {{-1,+1}}", stacklevel=2)
        y = 2.0 * y - 1.0
    elif not values <= {-1.0, 1.0}:
        raise LibsvmParseError(
            f"{path}: labels must be binary, found {sorted(values)}"
        )
    X = np.zeros((len(rows), max_idx))
    for r, feats in enumerate(rows):
        for idx, val in feats.items():
            X[r, idx - 1] = val
    return X, y


def partition_rows(
    n_rows: int, n_workers: int, seed: int, by_label=None
) -> list[np.ndarray]:
    """Split row indices into n_workers shards.

    Default is shuffled round-robin (seeded). Passing the label vector as
    by_label instead sorts rows by label and cuts contiguous chunks, which
    concentrates classes on workers and drives the gradient dissimilarity
    up. Every shard is nonempty or a ValueError is raised.
    """
    if n_workers < 1:
        raise ValueError("need at least one worker")
    if by_label is not None:
        order = np.argsort(np.asarray(by_label), kind="stable")
        shards = [np.sort(part) for part in np.array_split(order, n_workers)]
    else:
        perm = np.random.default_rng(seed).permutation(n_rows)
        shards = [np.sort(perm[i::n_workers]) for i in range(n_workers)]
    if any(len(s) == 0 for s in shards):
        raise ValueError(
            f"cannot split {n_rows} rows into {n_workers} nonempty shards"
        )
    return shards


class LogisticProblem(Problem):
    """l2-regularized logistic loss, rows sharded across workers.

    f_i(x) = mean over the shard of log(1 + exp(-y a'x)) + (lam2/2)||x||^2.
    Any l1 penalty belongs in the Regularizer handed to the optimizer, not
    here. The smoothness constant is (max row norm)^2 / 4 + lam2.
    """

    def __init__(self, X, y, shards, lam2=0.0, sigmas=0.0, batch_size=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if lam2 < 0:
            raise ValueError("l2 weight must be >= 0")
        super().__init__(X.shape[1], len(shards), sigmas)
        self.Xs = [X[s] for s in shards]
        self.ys = [y[s] for s in shards]
        if batch_size is not None and batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self.batch_size = batch_size
        self.lam2 = lam2
        row_norm2 = float(np.max(np.einsum("ij,ij->i", X, X)))
        self.constants = ProblemConstants(
            L=row_norm2 / 4.0 + lam2,
            mu=lam2,
            sigma2=self.mean_noise_variance,
            n=self.n,
        )

    def _margins(self, x, i):
        return self.ys[i] * (self.Xs[i] @ x)

    def f_i(self, x, i):
        m = self._margins(x, i)
        return float(np.mean(np.logaddexp(0.0, -m))) + 0.5 * self.lam2 * float(
            np.dot(x, x)
        )

    def grad_i(self, x, i):
        m = self._margins(x, i)
        w = 1.0 / (1.0 + np.exp(m))  # sigmoid(-m)
        return -(self.Xs[i].T @ (w * self.ys[i])) / len(m) + self.lam2 * x

    def sample_grad(self, x, i, rng):
        if self.batch_size is None:
            return super().sample_grad(x, i, rng)
        Xi, yi = self.Xs[i], self.ys[i]
        take = min(self.batch_size, len(yi))
        sel = rng.choice(len(yi), size=take, replace=False)
        m = yi[sel] * (Xi[sel] @ x)
        w = 1.0 / (1.0 + np.exp(m))
        return -(Xi[sel].T @ (w * yi[sel])) / take + self.lam2 * x


def logistic_problem(
    libsvm_path,
    n_workers: int,
    lambda2: float,
    partition_seed: int = 0,
    partition: str = "shuffled",
    sigma: float = 0.0,
    batch_size=None,
) -> LogisticProblem:
    """Load a LIBSVM file and shard it across workers.

    partition is "shuffled" (seeded round-robin) or "by_label" (sorted
    contiguous chunks, maximizing worker disagreement).
    """
    X, y = load_libsvm(libsvm_path)
    if partition == "shuffled":
        shards = partition_rows(len(y), n_workers, partition_seed)
    elif partition == "by_label":
        shards = partition_rows(len(y), n_workers, partition_seed, by_label=y)
    else:
        raise ValueError(f"unknown partition {partition!r}")
    return LogisticProblem(X, y, shards, lam2=lambda2, sigmas=sigma, batch_size=batch_size)


class RosenbrockProblem(Problem):
    """Two-worker additive split of the 2-d Rosenbrock-type objective
    f(x, y) = (x-1)^2 + 10 (y - x^2)^2 + 289 with

        f_1 = (x+16)^2 + 10 (y - x^2)^2 + 16 y
        f_2 = (x-18)^2 + 10 (y - x^2)^2 - 16 y

    Gradients are deterministic. The average is minimized at (1, 1) but
    each worker's gradient there is the nonzero vector +-(34, 16), so the
    dissimilarity is exactly 1412 everywhere. The smoothness constant is a
    local Hessian-norm estimate near the optimum (no global one exists);
    mu = 0.
    """

    def __init__(self):
        super().__init__(2, 2, 0.0)
        self.x_star = np.array([1.0, 1.0])
        self.f_star = 289.0
        self.h_star = [np.array([34.0, 16.0]), np.array([-34.0, -16.0])]
        self.constants = ProblemConstants(L=102.0, mu=0.0, zeta2=1412.0, n=2)

    def f_i(self, x, i):
        u, v = float(x[0]), float(x[1])
        bend = 10.0 * (v - u * u) ** 2
        if i == 0:
            return (u + 16.0) ** 2 + bend + 16.0 * v
        return (u - 18.0) ** 2 + bend - 16.0 * v

    def grad_i(self, x, i):
        u, v = float(x[0]), float(x[1])
        gap = v - u * u
        shift, tilt = (16.0, 16.0) if i == 0 else (-18.0, -16.0)
        return np.array([2.0 * (u + shift) - 40.0 * u * gap, 20.0 * gap + tilt])


def rosenbrock_split() -> RosenbrockProblem:
    """The two-worker Rosenbrock split (deterministic gradients)."""
    return RosenbrockProblem()


def estimate_dissimilarity_at(problem: Problem, x: np.ndarray) -> float:
    """(1/n) sum_i ||grad f_i(x) - grad f(x)||^2 at a single point."""
    grads = [problem.grad_i(x, i) for i in range(problem.n)]
    mean = sum(grads) / problem.n
    return float(sum(np.dot(g - mean, g - mean) for g in grads) / problem.n)


def estimate_dissimilarity(problem: Problem, points) -> float:
    """Max of the per-point gradient dissimilarity over the given points."""
    points = list(points)
    if not points:
        raise ValueError("need at least one probe point")
    return max(estimate_dissimilarity_at(problem, np.asarray(x)) for x in points)


def solve_reference(
    problem: Problem, reg: Regularizer | None = None, tol: float = 1e-12,
    max_iter: int = 2_000_000,
) -> np.ndarray:
    """High-accuracy minimizer of f + reg by proximal gradient descent.

    Runs full deterministic gradients with stepsize 1/L until the gradient
    mapping norm drops below tol. Intended for attaching reference optima
    to problems without closed forms.
    """
    reg = reg or Regularizer()
    gamma = 1.0 / problem.constants.L
    x = np.zeros(problem.dim)
    for _ in range(max_iter):
        x_next = reg.prox(gamma, x - gamma * problem.grad(x))
        if np.linalg.norm(x_next - x) / gamma <= tol:
            return x_next
        x = x_next
    raise RuntimeError(f"reference solve did not reach tol={tol}")


def attach_reference_optimum(
    problem: Problem, reg: Regularizer | None = None, tol: float = 1e-12
) -> Problem:
    """Solve for the optimum of f + reg and store it on the problem."""
    x = solve_reference(problem, reg, tol)
    problem.x_star = x
    problem.f_star = problem.f(x)
    problem.h_star = [problem.grad_i(x, i) for i in range(problem.n)]
    return problem
