"""Question selection strategies over a fixed per-game pool.

The information-gain selector picks the unasked question minimizing
expected post-answer surprisal (equivalently, maximizing expected
information gain). Likelihood matrices are belief-independent, so each
selector caches them per question for the life of the game.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from twentyq.belief import entropy, likelihood_matrix
from twentyq.questions import Question, QuestionPool
from twentyq.scenes import AttributeVocabulary, Context, DEFAULT_VOCAB
from twentyq.scoring import expected_surprisal_many
from twentyq.scoring import expected_surprisal as _kernel_surprisal

STRATEGIES = ("eig", "random", "full_caption_eig", "binary_search_oracle")

# scores closer than this are a tie, broken by question text
SCORE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ScoredQuestion:
    question: Question
    expected_surprisal: float  # nats
    eig_bits: float

    def as_record(self) -> dict:
        return {
            "question": self.question.text,
            "expected_surprisal": self.expected_surprisal,
            "eig_bits": self.eig_bits,
        }


def expected_surprisal(
    question,
    belief: np.ndarray,
    answer_model,
    context: Context,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> float:
    """Objective of one candidate: expected negative log posterior target mass."""
    return _kernel_surprisal(
        belief, likelihood_matrix(question, context, answer_model, vocab)
    )


def score_questions(
    belief: np.ndarray,
    context: Context,
    questions,
    model,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    matrices: dict | None = None,
) -> list[ScoredQuestion]:
    """Score every question against the current belief, preserving order.

    matrices, when given, caches likelihood matrices across calls keyed by
    question tokens.
    """
    questions = list(questions)
    if not questions:
        return []
    h_prior = entropy(belief, "nats")
    stacks: dict[int, tuple[list[int], list[np.ndarray]]] = {}
    for i, q in enumerate(questions):
        if matrices is not None and q.tokens in matrices:
            mat = matrices[q.tokens]
        else:
            mat = likelihood_matrix(q, context, model, vocab)
            if matrices is not None:
                matrices[q.tokens] = mat
        idxs, mats = stacks.setdefault(mat.shape[0], ([], []))
        idxs.append(i)
        mats.append(mat)
    scores = np.empty(len(questions), dtype=np.float64)
    for idxs, mats in stacks.values():
        scores[idxs] = expected_surprisal_many(belief, np.stack(mats))
    ln2 = math.log(2.0)
    return [
        ScoredQuestion(
            question=q,
            expected_surprisal=float(s),
            eig_bits=(h_prior - float(s)) / ln2,
        )
        for q, s in zip(questions, scores)
    ]


class EIGSelector:
    """Greedy selector: argmin expected surprisal, text tie-break, marks asked."""

    name = "eig"

    def __init__(
        self,
        pool: QuestionPool,
        context: Context,
        model,
        vocab: AttributeVocabulary = DEFAULT_VOCAB,
    ):
        self.context = context
        self.model = model
        self.vocab = vocab
        self._available: list[Question] = list(pool)
        self._matrices: dict = {}

    @property
    def available(self) -> tuple[Question, ...]:
        return tuple(self._available)

    def scored(self, belief: np.ndarray) -> list[ScoredQuestion]:
        return score_questions(
            belief, self.context, self._available, self.model, self.vocab, self._matrices
        )

    def select(self, belief: np.ndarray, rng: random.Random) -> Question | None:
        scored = self.scored(belief)
        if not scored:
            return None
        best = min(s.expected_surprisal for s in scored)
        tied = [
            s.question for s in scored if s.expected_surprisal <= best + SCORE_TOLERANCE
        ]
        choice = min(tied, key=lambda q: q.text)
        self._available.remove(choice)
        return choice


class RandomSelector:
    """Uniformly random unasked question; the no-lookahead floor."""

    name = "random"

    def __init__(
        self,
        pool: QuestionPool,
        context: Context,
        model,
        vocab: AttributeVocabulary = DEFAULT_VOCAB,
    ):
        self.context = context
        self.model = model
        self.vocab = vocab
        self._available: list[Question] = list(pool)

    @property
    def available(self) -> tuple[Question, ...]:
        return tuple(self._available)

    def select(self, belief: np.ndarray, rng: random.Random) -> Question | None:
        if not self._available:
            return None
        choice = self._available[rng.randrange(len(self._available))]
        self._available.remove(choice)
        return choice


def make_selector(
    strategy: str,
    pool: QuestionPool,
    context: Context,
    model,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
):
    """Selector for a text strategy; binary search has no pool and no selector."""
    if strategy in ("eig", "full_caption_eig"):
        return EIGSelector(pool, context, model, vocab)
    if strategy == "random":
        return RandomSelector(pool, context, model, vocab)
    raise ValueError(f"no pool selector for strategy {strategy!r}")
