from __future__ import annotations

import hashlib
import math
from typing import Iterable, Sequence

import numpy as np


def derive_seed(seed: int, *keys: object) -> int:
    """Derive a 64-bit child seed from ``seed`` and a tuple of keys.

    Independent of task scheduling: the same keys always map to the same seed.
    """
    payload = repr((int(seed),) + tuple(keys)).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")


def lex_argmin(values: np.ndarray, names: Sequence[str]) -> np.ndarray | int:
    """Argmin over the last axis; exact ties go to the lexicographically smallest name."""
    values = np.asarray(values, dtype=float)
    perm = np.array(sorted(range(len(names)), key=lambda j: names[j]), dtype=int)
    picked = np.argmin(values[..., perm], axis=-1)
    out = perm[picked]
    if np.ndim(out) == 0:
        return int(out)
    return out


def exact_mean(values: Iterable[float]) -> float:
    vals = list(values)
    if not vals:
        return math.nan
    return math.fsum(vals) / len(vals)


def canonical_row_order(X: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
    """Permutation sorting rows lexicographically by (X columns..., y)."""
    X = np.asarray(X, dtype=float)
    keys = []
    if y is not None:
        y = np.asarray(y)
        if y.ndim == 1:
            keys.append(y)
        else:
            keys.extend(y[:, j] for j in range(y.shape[1] - 1, -1, -1))
    keys.extend(X[:, j] for j in range(X.shape[1] - 1, -1, -1))
    if not keys:
        return np.arange(X.shape[0])
    return np.lexsort(keys)


def json_float(x: float | None):
    """JSON-safe float: NaN/inf -> None."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return None
    return x
