"""Bayesian belief over which scene in the context is the target.

Beliefs are plain float64 probability vectors indexed like context.scenes.
Updates multiply in the answer model's likelihood and renormalize. An N/A
answer to a polar question carries no information under every model here,
so it is applied as an identity update rather than through the model.
"""

from __future__ import annotations

import math

import numpy as np

from twentyq.scenes import AttributeVocabulary, Context, DEFAULT_VOCAB, caption_likelihood


class ContradictionError(ValueError):
    """Every scene has zero likelihood for the received answer.

    Only reachable with a noise-free answer model whose answers conflict.
    """

    def __init__(self, question_text: str, answer: str):
        self.question_text = question_text
        self.answer = answer
        super().__init__(
            f"answer {answer!r} to {question_text!r} rules out every scene"
        )


def init_uniform(k: int) -> np.ndarray:
    if k < 2:
        raise ValueError("a game needs k >= 2 candidate scenes")
    return np.full(k, 1.0 / k, dtype=np.float64)


def entropy(belief: np.ndarray, unit: str = "nats") -> float:
    """Shannon entropy with the 0 ln 0 = 0 convention."""
    p = np.asarray(belief, dtype=np.float64)
    nz = p[p > 0.0]
    # clamp: rounding can leave a tiny negative at a point mass
    h = max(float(-np.sum(nz * np.log(nz))), 0.0)
    if unit == "nats":
        return h
    if unit == "bits":
        return h / math.log(2.0)
    raise ValueError(f"unknown entropy unit {unit!r}")


def init_from_description(
    context: Context,
    description,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> np.ndarray:
    """Posterior over scenes given an opening description of the target.

    Weights each scene by the probability its caption generator emits the
    description. A description no scene could produce is uninformative and
    falls back to uniform.
    """
    if isinstance(description, str):
        description = description.split()
    weights = np.array(
        [caption_likelihood(description, s, vocab) for s in context.scenes],
        dtype=np.float64,
    )
    total = weights.sum()
    if total <= 0.0:
        return init_uniform(context.k)
    return weights / total


def likelihood_vector(
    question,
    answer: str,
    context: Context,
    model,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> np.ndarray:
    """p(answer | question, scene_y) for every y."""
    return np.array(
        [model.answer_dist(question, s, vocab).get(answer, 0.0) for s in context.scenes],
        dtype=np.float64,
    )


def likelihood_matrix(
    question,
    context: Context,
    model,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> np.ndarray:
    """Matrix L[a, y] = p(answer_a | question, scene_y), rows in answer_support order."""
    support = question.answer_support(vocab)
    mat = np.zeros((len(support), context.k), dtype=np.float64)
    for y, scene in enumerate(context.scenes):
        dist = model.answer_dist(question, scene, vocab)
        for i, a in enumerate(support):
            mat[i, y] = dist.get(a, 0.0)
    return mat


def update(
    belief: np.ndarray,
    context: Context,
    question,
    answer: str,
    model,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> np.ndarray:
    """Condition the belief on one answer, returning a fresh vector.

    Raises ContradictionError when the answer has zero likelihood under
    every scene, and ValueError for answers outside the question's support.
    """
    support = question.answer_support(vocab)
    if answer not in support:
        raise ValueError(
            f"answer {answer!r} not in support {support} of {question.text!r}"
        )
    belief = np.asarray(belief, dtype=np.float64)
    if question.kind == "polar" and answer == "na":
        return belief.copy()
    like = likelihood_vector(question, answer, context, model, vocab)
    post = belief * like
    total = post.sum()
    if total <= 0.0:
        raise ContradictionError(question.text, answer)
    return post / total
