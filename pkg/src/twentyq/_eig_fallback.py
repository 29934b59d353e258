"""Pure numpy scoring kernel, used when the compiled extension is absent."""

from __future__ import annotations

import numpy as np


def _xlogx(arr: np.ndarray) -> np.ndarray:
    out = np.zeros_like(arr)
    np.log(arr, out=out, where=arr > 0.0)
    return arr * out


def expected_surprisal(prior: np.ndarray, like: np.ndarray) -> float:
    """sum_a [ m_a ln m_a - sum_y W ln W ], W = like * prior, m = row sums."""
    W = like * prior
    m = W.sum(axis=-1)
    return float((_xlogx(m) - _xlogx(W).sum(axis=-1)).sum())


def expected_surprisal_many(
    prior: np.ndarray, like_stack: np.ndarray, out: np.ndarray
) -> None:
    """Batched form over a (n_q, n_a, n_y) likelihood stack."""
    W = like_stack * prior
    m = W.sum(axis=-1)
    out[:] = (_xlogx(m) - _xlogx(W).sum(axis=-1)).sum(axis=-1)
