"""Exact t-SNE, estimator-shaped, deterministic per seed.

High-dimensional affinities come from per-point Gaussian bandwidths binary
searched to match the requested perplexity, symmetrized and normalized; the
low-dimensional kernel is Student-t with one degree of freedom. Optimization
is gradient descent with momentum, adaptive per-coordinate gains, and early
exaggeration for the first phase. No tree approximation: correctness and
reproducibility over speed, so inputs are expected at desk scale (thousands
of points, not millions).

The two KL divergence readings the optimizer records (end of the
exaggeration phase and final, both against the unexaggerated P) make the
convergence contract checkable: final KL must not exceed the
end-of-exaggeration KL beyond float noise.
"""

import numpy as np

# below this many matrix cells, pairwise math uses pure ufunc broadcasting,
# which keeps fixed-seed runs independent of the BLAS in use
_BROADCAST_CELLS = 2 ** 25


def _squared_distances(X: np.ndarray) -> np.ndarray:
    n, d = X.shape
    if n * n * d <= _BROADCAST_CELLS:
        diff = X[:, None, :] - X[None, :, :]
        D = (diff * diff).sum(axis=-1)
    else:
        sq = (X * X).sum(axis=1)
        D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def _conditional_probabilities(D: np.ndarray, perplexity: float,
                               tol: float = 1e-5, max_steps: int = 50) -> np.ndarray:
    """Row-stochastic conditional affinities at the target perplexity."""
    n = D.shape[0]
    target = np.log(perplexity)
    P = np.zeros((n, n))
    others = ~np.eye(n, dtype=bool)
    for i in range(n):
        Di = D[i][others[i]]
        beta, beta_min, beta_max = 1.0, -np.inf, np.inf
        Pi = np.exp(-Di * beta)
        for _ in range(max_steps):
            Pi = np.exp(-Di * beta)
            sum_pi = Pi.sum()
            if sum_pi <= 0.0:
                Pi = np.ones_like(Di)
                sum_pi = Pi.sum()
            entropy = np.log(sum_pi) + beta * float((Di * Pi).sum()) / sum_pi
            diff = entropy - target
            if abs(diff) < tol:
                break
            if diff > 0:
                beta_min = beta
                beta = beta * 2.0 if np.isinf(beta_max) else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = beta / 2.0 if np.isinf(beta_min) else (beta + beta_min) / 2.0
        P[i][others[i]] = Pi / Pi.sum()
    return P


def _kl_divergence(P: np.ndarray, Q: np.ndarray) -> float:
    return float((P * np.log(P / Q)).sum())


def _low_dim_q(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    num = 1.0 / (1.0 + _squared_distances(Y))
    np.fill_diagonal(num, 0.0)
    Q = num / num.sum()
    return np.maximum(Q, 1e-12), num


class TSNE:
    """2-D embedding with fit_transform; coordinates fixed by the seed."""

    def __init__(self, perplexity: float = 30.0, n_iter: int = 1000,
                 early_exaggeration: float = 12.0, exaggeration_iter: int = 250,
                 learning_rate: float | None = None, seed: int = 0):
        self.perplexity = perplexity
        self.n_iter = n_iter
        self.early_exaggeration = early_exaggeration
        self.exaggeration_iter = exaggeration_iter
        self.learning_rate = learning_rate
        self.seed = seed

    def get_params(self, deep: bool = True) -> dict:
        return {
            "perplexity": self.perplexity,
            "n_iter": self.n_iter,
            "early_exaggeration": self.early_exaggeration,
            "exaggeration_iter": self.exaggeration_iter,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
        }

    def set_params(self, **params) -> "TSNE":
        for key, value in params.items():
            if not hasattr(self, key):
                raise ValueError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit_transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("X must be a 2-D array")
        if not np.isfinite(X).all():
            raise ValueError("X contains non-finite values")
        n = X.shape[0]
        if 3.0 * self.perplexity >= n:
            raise ValueError(f"perplexity {self.perplexity} too large for {n} points")
        if self.n_iter < 250:
            raise ValueError("n_iter must be >= 250")
        if not 0 < self.exaggeration_iter <= self.n_iter:
            raise ValueError("exaggeration_iter must be in (0, n_iter]")

        lr = self.learning_rate if self.learning_rate is not None else max(n / 12.0, 50.0)

        cond = _conditional_probabilities(_squared_distances(X), self.perplexity)
        self.conditional_p_ = cond
        P = (cond + cond.T) / (2.0 * n)
        P = np.maximum(P, 1e-12)
        self.p_ = P

        rng = np.random.default_rng(self.seed)
        Y = rng.normal(0.0, 1e-4, size=(n, 2))
        velocity = np.zeros_like(Y)
        gains = np.ones_like(Y)
        P_run = P * self.early_exaggeration
        self.kl_exaggeration_end_ = np.inf

        small = n * n * 2 <= _BROADCAST_CELLS
        for it in range(self.n_iter):
            if it == self.exaggeration_iter:
                P_run = P
                Q, _ = _low_dim_q(Y)
                self.kl_exaggeration_end_ = _kl_divergence(P, Q)
            Q, num = _low_dim_q(Y)
            W = (P_run - Q) * num
            if small:
                grad = 4.0 * ((W[:, :, None]) * (Y[:, None, :] - Y[None, :, :])).sum(axis=1)
            else:
                grad = 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)
            momentum = 0.5 if it < self.exaggeration_iter else 0.8
            same_sign = (grad > 0) == (velocity > 0)
            gains = np.where(same_sign, gains * 0.8, gains + 0.2)
            np.maximum(gains, 0.01, out=gains)
            velocity = momentum * velocity - lr * (gains * grad)
            Y = Y + velocity
            Y = Y - Y.mean(axis=0)

        Q, _ = _low_dim_q(Y)
        self.kl_final_ = _kl_divergence(P, Q)
        self.embedding_ = Y
        return Y
