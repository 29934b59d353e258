"""Question scoring: expected post-answer surprisal, lower is better.

Dispatches to the compiled kernel when built, otherwise to the numpy
fallback; set TWENTYQ_PURE=1 to force the fallback. A slow reference
implementation that literally performs every belief update is kept for
cross-checking the kernels.
"""

from __future__ import annotations

import os

import numpy as np

from twentyq.belief import entropy, likelihood_matrix, likelihood_vector, update
from twentyq.scenes import AttributeVocabulary, Context, DEFAULT_VOCAB

_FORCE_PURE = os.environ.get("TWENTYQ_PURE", "") not in ("", "0")

if _FORCE_PURE:
    from twentyq import _eig_fallback as _kernel

    BACKEND = "pure"
else:
    try:
        from twentyq import _eigcore as _kernel

        BACKEND = "compiled"
    except ImportError:
        from twentyq import _eig_fallback as _kernel

        BACKEND = "pure"


def expected_surprisal(prior: np.ndarray, like: np.ndarray) -> float:
    """Expected negative log posterior mass on the target after one answer.

    prior: belief vector over scenes. like: matrix [answer, scene] of
    answer probabilities. Equals sum_a p(a) H(posterior | a) in nats.
    """
    prior = np.ascontiguousarray(prior, dtype=np.float64)
    like = np.ascontiguousarray(like, dtype=np.float64)
    return float(_kernel.expected_surprisal(prior, like))


def expected_surprisal_many(prior: np.ndarray, like_stack: np.ndarray) -> np.ndarray:
    """Batched scoring over a (n_questions, n_answers, n_scenes) stack."""
    prior = np.ascontiguousarray(prior, dtype=np.float64)
    like_stack = np.ascontiguousarray(like_stack, dtype=np.float64)
    out = np.empty(like_stack.shape[0], dtype=np.float64)
    _kernel.expected_surprisal_many(prior, like_stack, out)
    return out


def expected_surprisal_reference(
    belief: np.ndarray,
    context: Context,
    question,
    model,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> float:
    """Independent route: enumerate answers, update the belief, weigh entropies."""
    total = 0.0
    belief = np.asarray(belief, dtype=np.float64)
    for answer in question.answer_support(vocab):
        like = likelihood_vector(question, answer, context, model, vocab)
        marginal = float(belief @ like)
        if marginal <= 0.0:
            continue
        posterior = update(belief, context, question, answer, model, vocab)
        total += marginal * entropy(posterior, "nats")
    return total


def question_matrix(
    question,
    context: Context,
    model,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> np.ndarray:
    """Belief-independent likelihood matrix for one question (cacheable)."""
    return likelihood_matrix(question, context, model, vocab)
