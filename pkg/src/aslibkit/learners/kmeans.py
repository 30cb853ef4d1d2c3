"""k-means with k-means++ seeding and BIC choice of k."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._util import derive_seed
from ..errors import LearnerError

SHIFT_TOL = 1e-9
MAX_ITER = 100


@dataclass(frozen=True)
class Clustering:
    assignments: np.ndarray
    centroids: np.ndarray
    chosen_k: int
    wcss: float
    bic: float
    bic_by_k: tuple[float, ...] = ()

    def predict(self, X) -> np.ndarray:
        return nearest_centroid(np.asarray(X, dtype=float), self.centroids)

    def to_dict(self) -> dict:
        return {"centroids": self.centroids.tolist(), "chosen_k": self.chosen_k, "wcss": self.wcss, "bic": self.bic}

    @classmethod
    def from_dict(cls, d):
        c = np.array(d["centroids"], dtype=float)
        return cls(np.zeros(0, dtype=int), c, int(d["chosen_k"]), float(d["wcss"]), float(d["bic"]))


def nearest_centroid(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Index of the closest centroid; equidistant rows take the lower index."""
    if X.ndim != 2 or X.shape[1] != centroids.shape[1]:
        raise LearnerError("SCHEMA", f"expected {centroids.shape[1]} features, got shape {X.shape}")
    d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def _wcss(X, centroids, assign) -> float:
    return math.fsum(((X - centroids[assign]) ** 2).sum(axis=1))


def kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers.append(X[idx])
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(axis=1))
    return np.array(centers, dtype=float)


def lloyd(X, centroids, max_iter: int = MAX_ITER, tol: float = SHIFT_TOL):
    """Lloyd iterations from the given centroids.

    Returns ``(assignments, centroids, wcss_trace)``. The trace holds the
    objective after every assignment step and is checked to be non-increasing;
    an empty cluster keeps its previous centroid.
    """
    X = np.asarray(X, dtype=float)
    c = np.array(centroids, dtype=float, copy=True)
    trace = []
    assign = nearest_centroid(X, c)
    for _ in range(max_iter):
        trace.append(_wcss(X, c, assign))
        new = c.copy()
        for j in range(c.shape[0]):
            members = X[assign == j]
            if members.shape[0]:
                new[j] = members.mean(axis=0)
        shift = float(np.max(np.abs(new - c))) if c.size else 0.0
        c = new
        assign = nearest_centroid(X, c)
        if shift < tol:
            break
    trace.append(_wcss(X, c, assign))
    for a, b in zip(trace, trace[1:]):
        if b > a + 1e-9 * max(1.0, abs(a)):
            raise LearnerError("NOT_MONOTONE", f"WCSS increased from {a!r} to {b!r}")
    return assign, c, trace


def bic_score(X: np.ndarray, assign: np.ndarray, k: int, wcss: float) -> float:
    """BIC of a hard-assignment spherical Gaussian mixture (lower is better).

    ``n*d*ln(WCSS/(n*d)) - 2*sum_j n_j ln(n_j/n) + (k*d + k) ln n``; the
    mixing-weight term keeps a single Gaussian blob from being split.
    """
    n, d = X.shape
    if wcss <= 0:
        return -math.inf
    counts = np.bincount(assign, minlength=k)
    counts = counts[counts > 0]
    mix = math.fsum(c * math.log(c / n) for c in counts)
    return n * d * math.log(wcss / (n * d)) - 2.0 * mix + (k * d + k) * math.log(n)


def kmeans_auto(X, max_clusters: int = 30, seed: int = 0, n_init: int = 1) -> Clustering:
    """Run k-means for k = 1..min(max_clusters, distinct rows) and keep the lowest BIC.

    A clustering with k > 1 that leaves some cluster with a single row is not
    eligible: one point carries no variance estimate, and on small samples the
    all-singleton solution (WCSS = 0) would otherwise always win. Rows are
    put in canonical order before seeding so the result does not depend on
    input row order. Ties in BIC go to the smaller k.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise LearnerError("DIMENSION", f"need a non-empty 2-D matrix, got shape {X.shape}")
    if max_clusters < 1:
        raise ValueError("max_clusters must be >= 1")
    order = np.lexsort(X.T[::-1]) if X.shape[1] else np.arange(X.shape[0])
    Xc = X[order]
    distinct = np.unique(Xc, axis=0).shape[0]
    best = None
    bics = []
    for k in range(1, min(max_clusters, distinct) + 1):
        run_best = None
        for r in range(n_init):
            rng = np.random.default_rng(derive_seed(seed, "kmeans", k, r))
            init = Xc.mean(axis=0, keepdims=True) if k == 1 else kmeans_pp(Xc, k, rng)
            assign, cent, trace = lloyd(Xc, init)
            if run_best is None or trace[-1] < run_best[2]:
                run_best = (assign, cent, trace[-1])
        assign, cent, w = run_best
        b = bic_score(Xc, assign, k, w)
        if k > 1 and np.bincount(assign, minlength=k).min() < 2:
            b = math.inf
        bics.append(b)
        if best is None or b < best[3]:
            best = (assign, cent, k, b, w)
    assign_c, cent, k, b, w = best
    assign = np.empty_like(assign_c)
    assign[order] = assign_c
    return Clustering(assign, cent, k, float(w), float(b), tuple(bics))
