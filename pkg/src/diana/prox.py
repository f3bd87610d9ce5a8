"""Regularizers with closed-form proximal operators.

Every regularizer here evaluates exactly and proxes in closed form:
prox(r, gamma, u) returns the unique minimizer of
gamma * r(v) + 0.5 * ||v - u||^2. Composite steps in the optimizer call
these on the shifted iterate, so no inner solver is ever needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Regularizer:
    """Base regularizer; the zero function (plain gradient steps)."""

    def value(self, x: np.ndarray) -> float:
        return 0.0

    def prox(self, gamma: float, u: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("prox stepsize must be positive")
        return np.asarray(u, dtype=np.float64).copy()


@dataclass(frozen=True)
class L1(Regularizer):
    """lam * ||x||_1; prox is soft thresholding."""

    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("l1 weight must be >= 0")

    def value(self, x: np.ndarray) -> float:
        return self.lam * float(np.sum(np.abs(x)))

    def prox(self, gamma: float, u: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("prox stepsize must be positive")
        u = np.asarray(u, dtype=np.float64)
        t = gamma * self.lam
        return np.sign(u) * np.maximum(np.abs(u) - t, 0.0)


@dataclass(frozen=True)
class SquaredL2(Regularizer):
    """(lam / 2) * ||x||_2^2; prox shrinks by 1 / (1 + gamma * lam)."""

    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("l2 weight must be >= 0")

    def value(self, x: np.ndarray) -> float:
        return 0.5 * self.lam * float(np.dot(x, x))

    def prox(self, gamma: float, u: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("prox stepsize must be positive")
        return np.asarray(u, dtype=np.float64) / (1.0 + gamma * self.lam)


@dataclass(frozen=True)
class ElasticNet(Regularizer):
    """lam1 * ||x||_1 + (lam2 / 2) * ||x||_2^2; soft threshold then shrink."""

    lam1: float
    lam2: float

    def __post_init__(self):
        if self.lam1 < 0 or self.lam2 < 0:
            raise ValueError("elastic net weights must be >= 0")

    def value(self, x: np.ndarray) -> float:
        return self.lam1 * float(np.sum(np.abs(x))) + 0.5 * self.lam2 * float(
            np.dot(x, x)
        )

    def prox(self, gamma: float, u: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("prox stepsize must be positive")
        u = np.asarray(u, dtype=np.float64)
        t = gamma * self.lam1
        return (np.sign(u) * np.maximum(np.abs(u) - t, 0.0)) / (
            1.0 + gamma * self.lam2
        )


@dataclass(frozen=True)
class Box(Regularizer):
    """Indicator of the box [lower, upper]^d; prox is the projection."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"empty box: [{self.lower}, {self.upper}]")

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        inside = np.all(x >= self.lower) and np.all(x <= self.upper)
        return 0.0 if inside else math.inf

    def prox(self, gamma: float, u: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("prox stepsize must be positive")
        return np.clip(np.asarray(u, dtype=np.float64), self.lower, self.upper)


def prox(r: Regularizer, gamma: float, u: np.ndarray) -> np.ndarray:
    """Proximal map of gamma * r at u (argmin gamma r(v) + ||v - u||^2 / 2)."""
    return r.prox(gamma, u)
