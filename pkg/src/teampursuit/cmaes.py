"""Compact (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates
and cumulative step-size adaptation, using the usual default parameter set."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np


def default_population_size(dim: int) -> int:
    return 4 + int(math.floor(3 * math.log(dim)))


class CMAES:
    def __init__(self, mean, sigma: float, rng: np.random.Generator,
                 popsize: int | None = None):
        self.mean = np.array(mean, dtype=float)
        n = self.dim = self.mean.shape[0]
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)
        self.rng = rng
        self.lam = popsize or default_population_size(n)
        self.mu = self.lam // 2
        w = math.log((self.lam + 1) / 2) - np.log(np.arange(1, self.mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / np.sum(self.weights ** 2)

        self.cc = (4 + self.mueff / n) / (n + 4 + 2 * self.mueff / n)
        self.cs = (self.mueff + 2) / (n + self.mueff + 5)
        self.c1 = 2 / ((n + 1.3) ** 2 + self.mueff)
        self.cmu = min(1 - self.c1,
                       2 * (self.mueff - 2 + 1 / self.mueff) / ((n + 2) ** 2 + self.mueff))
        self.damps = 1 + 2 * max(0.0, math.sqrt((self.mueff - 1) / (n + 1)) - 1) + self.cs
        self.chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

        self.pc = np.zeros(n)
        self.ps = np.zeros(n)
        self.B = np.eye(n)
        self.D = np.ones(n)
        self.C = np.eye(n)
        self.generation = 0

    def ask(self) -> np.ndarray:
        z = self.rng.standard_normal((self.lam, self.dim))
        y = (z * self.D) @ self.B.T
        return self.mean + self.sigma * y

    def tell(self, solutions: np.ndarray, values) -> None:
        n = self.dim
        idx = np.argsort(values, kind="stable")[:self.mu]
        old_mean = self.mean
        y = (solutions[idx] - old_mean) / self.sigma
        y_w = self.weights @ y
        self.mean = old_mean + self.sigma * y_w

        # C^(-1/2) * y_w
        c_inv_sqrt_y = self.B @ ((self.B.T @ y_w) / self.D)
        self.ps = ((1 - self.cs) * self.ps
                   + math.sqrt(self.cs * (2 - self.cs) * self.mueff) * c_inv_sqrt_y)
        self.generation += 1
        ps_norm = np.linalg.norm(self.ps)
        h_sig = (ps_norm / math.sqrt(1 - (1 - self.cs) ** (2 * self.generation)) / self.chi_n
                 < 1.4 + 2 / (n + 1))
        self.pc = ((1 - self.cc) * self.pc
                   + h_sig * math.sqrt(self.cc * (2 - self.cc) * self.mueff) * y_w)

        rank_mu = (y.T * self.weights) @ y
        delta_h = (1 - h_sig) * self.cc * (2 - self.cc)
        self.C = ((1 - self.c1 - self.cmu) * self.C
                  + self.c1 * (np.outer(self.pc, self.pc) + delta_h * self.C)
                  + self.cmu * rank_mu)
        self.sigma *= math.exp((self.cs / self.damps) * (ps_norm / self.chi_n - 1))

        self.C = np.triu(self.C) + np.triu(self.C, 1).T
        eigvals, self.B = np.linalg.eigh(self.C)
        self.D = np.sqrt(np.maximum(eigvals, 1e-300))


def fmin(func: Callable[[np.ndarray], float], x0, sigma: float, max_evaluations: int,
         rng: np.random.Generator, popsize: int | None = None):
    """Minimise `func`; returns (best_x, best_f, evaluations)."""
    es = CMAES(x0, sigma, rng, popsize)
    best_x, best_f = np.array(x0, dtype=float), math.inf
    evals = 0
    while evals < max_evaluations:
        X = es.ask()
        k = min(len(X), max_evaluations - evals)
        values = np.array([func(x) for x in X[:k]])
        evals += k
        j = int(np.argmin(values))
        if values[j] < best_f:
            best_x, best_f = X[j].copy(), float(values[j])
        if k < len(X):
            break
        es.tell(X, values)
        if not np.isfinite(es.sigma) or es.sigma < 1e-12:
            break
    return best_x, best_f, evals
