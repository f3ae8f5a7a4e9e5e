"""Exact t-SNE with a Student-t output kernel.

O(n^2) per iteration, which is fine for corpora of a few hundred summaries and
keeps every intermediate quantity checkable against brute-force oracles.
All reductions use numpy's fixed pairwise summation order so a run is
bit-identical given the same inputs and seed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from hlsum import HlsumError
from hlsum.rng import SplitMix64

PERPLEXITY_TOL = 1e-3
MAX_BISECTION_STEPS = 100
SIGMA_BOUNDS = (1e-10, 1e10)
Q_FLOOR = 1e-12


class EmbeddingError(HlsumError):
    pass


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    initial_momentum: float = 0.5
    final_momentum: float = 0.8
    momentum_switch: int = 250
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    min_gain: float = 0.01
    seed: int = 0
    output_dims: int = 2

    def __post_init__(self):
        if self.perplexity < 1:
            raise ValueError("perplexity must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")

    def effective_perplexity(self, n: int) -> float:
        return max(1.0, min(self.perplexity, (n - 1) / 3.0))


@dataclass
class Embedding:
    points: np.ndarray
    final_kl: float
    config: TsneConfig
    perplexity: float
    tags: list[str] = field(default_factory=list)
    kl_history: list[float] = field(default_factory=list)

    def metadata(self) -> dict:
        return {
            **asdict(self.config),
            "effective_perplexity": self.perplexity,
            "final_kl": self.final_kl,
            "n": int(self.points.shape[0]),
        }


def pairwise_sq_dists(X) -> np.ndarray:
    """Squared Euclidean distances between all rows of ``X``.

    Computed by explicit differences rather than the Gram expansion so the
    diagonal is exactly zero and the matrix exactly symmetric.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise EmbeddingError("need at least 2 rows for pairwise distances")
    n = X.shape[0]
    D = np.empty((n, n))
    for i in range(n):
        diff = X - X[i]
        D[i] = np.einsum("ij,ij->i", diff, diff)
    return np.minimum(D, D.T)


def _row_affinities(d: np.ndarray, sigma: float) -> tuple[np.ndarray, float]:
    """Normalized Gaussian row and its perplexity; ``d`` excludes the self entry."""
    shifted = d - d.min()
    logits = -shifted / (2.0 * sigma * sigma)
    w = np.exp(logits)
    total = w.sum()
    p = w / total
    # entropy in nats from the log-sum-exp form avoids log(0)
    h = math.log(total) - float(np.dot(p, logits))
    return p, math.exp(h)


def conditional_affinities(d_row, perplexity: float, i: int = 0) -> tuple[np.ndarray, float]:
    """Conditional distribution p_{j|i} for one row of squared distances.

    ``d_row`` is the full row including the zero self distance at index ``i``.
    Sigma is found by bisection on log(sigma) over :data:`SIGMA_BOUNDS`.
    Returns the row (with ``p_{i|i} = 0``) and sigma.
    """
    d_row = np.asarray(d_row, dtype=float)
    n = d_row.shape[0]
    if perplexity > n - 1:
        raise EmbeddingError(f"perplexity {perplexity} exceeds n-1 = {n - 1} at row {i}")
    others = np.delete(d_row, i)

    lo, hi = math.log(SIGMA_BOUNDS[0]), math.log(SIGMA_BOUNDS[1])
    sigma = 1.0
    p, perp = _row_affinities(others, sigma)
    # bisect well past the contract tolerance; only a miss of that tolerance is an error
    for _ in range(MAX_BISECTION_STEPS):
        if abs(perp - perplexity) <= 1e-12 * perplexity:
            break
        if perp > perplexity:
            hi = math.log(sigma)
        else:
            lo = math.log(sigma)
        sigma = math.exp(0.5 * (lo + hi))
        p, perp = _row_affinities(others, sigma)
    if abs(perp - perplexity) > PERPLEXITY_TOL:
        raise EmbeddingError(
            f"perplexity bisection failed at row {i}: reached {perp:.6g}, target {perplexity:.6g}"
        )
    return np.insert(p, i, 0.0), sigma


def conditional_matrix(D: np.ndarray, perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    n = D.shape[0]
    P = np.empty((n, n))
    sigmas = np.empty(n)
    for i in range(n):
        P[i], sigmas[i] = conditional_affinities(D[i], perplexity, i)
    return P, sigmas


def symmetrize(P_cond) -> np.ndarray:
    P_cond = np.asarray(P_cond, dtype=float)
    n = P_cond.shape[0]
    P = (P_cond + P_cond.T) / (2.0 * n)
    np.fill_diagonal(P, 0.0)
    return P


def _sq_dists_low(Y: np.ndarray) -> np.ndarray:
    total = np.zeros((Y.shape[0], Y.shape[0]))
    for k in range(Y.shape[1]):
        col = Y[:, k]
        d = col[:, None] - col[None, :]
        total += d * d
    return total


def student_t_kernel(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized kernel ``(1 + |y_i - y_j|^2)^-1`` with zero diagonal, and Q."""
    num = 1.0 / (1.0 + _sq_dists_low(Y))
    np.fill_diagonal(num, 0.0)
    return num, num / num.sum()


def kl_divergence(P, Q) -> float:
    """KL(P || Q) over off-diagonal entries with ``p_ij > 0``; Q floored at 1e-12."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    mask = P > 0
    np.fill_diagonal(mask, False)
    p = P[mask]
    q = np.maximum(Q[mask], Q_FLOOR)
    return float(np.sum(p * np.log(p / q)))


def _gradient(P: np.ndarray, num: np.ndarray, Q: np.ndarray, Y: np.ndarray) -> np.ndarray:
    W = (P - Q) * num
    grad = np.empty_like(Y)
    for k in range(Y.shape[1]):
        col = Y[:, k]
        grad[:, k] = np.sum(W * (col[:, None] - col[None, :]), axis=1)
    return 4.0 * grad


def kl_gradient(P, Y) -> np.ndarray:
    """dKL/dY: 4 * sum_j (p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|^2)^-1."""
    P = np.asarray(P, dtype=float)
    Y = np.asarray(Y, dtype=float)
    num, Q = student_t_kernel(Y)
    return _gradient(P, num, Q, Y)


def _initial_points(n: int, dims: int, seed: int) -> np.ndarray:
    rng = SplitMix64(seed)
    # N(0, 1e-4): variance 1e-4
    return np.array([[rng.normal(0.0, 1e-2) for _ in range(dims)] for _ in range(n)])


def tsne_embed(X, config: TsneConfig | None = None, tags=None) -> Embedding:
    """Embed the rows of ``X`` into ``config.output_dims`` dimensions.

    Gradient descent with momentum and per-coordinate adaptive gains,
    early exaggeration of P, and re-centering after every step. The
    recorded ``kl_history`` holds the unexaggerated KL at each iteration.
    """
    config = config or TsneConfig()
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 4:
        raise EmbeddingError("t-SNE needs at least 4 rows")
    perplexity = config.effective_perplexity(n)

    D = pairwise_sq_dists(X)
    P_cond, _ = conditional_matrix(D, perplexity)
    P = symmetrize(P_cond)

    Y = _initial_points(n, config.output_dims, config.seed)
    Y -= Y.mean(axis=0)
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)

    mask = P > 0
    p_pos = P[mask]
    p_log_p = float(np.sum(p_pos * np.log(p_pos)))
    history: list[float] = []

    def kl_at(Q: np.ndarray) -> float:
        return p_log_p - float(np.sum(p_pos * np.log(np.maximum(Q[mask], Q_FLOOR))))

    for it in range(config.iterations):
        num, Q = student_t_kernel(Y)
        if it > 0:
            history.append(kl_at(Q))
        exaggerate = it < config.exaggeration_iters
        grad = _gradient(P * config.early_exaggeration if exaggerate else P, num, Q, Y)

        momentum = config.initial_momentum if it < config.momentum_switch else config.final_momentum
        same_sign = (grad > 0) == (update > 0)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, config.min_gain, out=gains)
        update = momentum * update - config.learning_rate * gains * grad
        Y = Y + update
        Y -= Y.mean(axis=0)

        if not np.all(np.isfinite(Y)):
            raise EmbeddingError(f"non-finite embedding at iteration {it}")
    history.append(kl_at(student_t_kernel(Y)[1]))

    return Embedding(
        points=Y,
        final_kl=history[-1],
        config=config,
        perplexity=perplexity,
        tags=list(tags) if tags is not None else [str(i) for i in range(n)],
        kl_history=history,
    )
