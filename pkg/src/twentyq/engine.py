"""Game engine: configuration, stepwise sessions, simulated games, replay.

A GameSession runs one game turn by turn against an external answerer (a
human over HTTP, or a simulated model). run_game drives a session with a
simulated answerer end to end. Transcripts serialize with probabilities as
fixed 6-decimal strings so replays can be compared byte for byte.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from twentyq._seeds import derive_seed
from twentyq.answerers import (
    ConfigurationError,
    HeuristicAnswerer,
    OracleAnswerer,
)
from twentyq.belief import entropy, init_from_description, init_uniform, update
from twentyq.questions import build_pool
from twentyq.scenes import (
    AttributeVocabulary,
    Context,
    DEFAULT_VOCAB,
    GENERATOR_MODES,
    caption,
    context_from_record,
    context_to_record,
    gen_context,
)
from twentyq.selector import STRATEGIES, make_selector

DESCRIPTION_MODES = ("none", "provided")

ANSWERER_KINDS = ("oracle", "heuristic", "learned", "external")

STOP_REASONS = ("threshold", "max_questions", "pool_exhausted")


class StateError(RuntimeError):
    """Operation not valid in the session's current status."""


class DuplicateSubmissionError(ValueError):
    """An idempotency token was already consumed by a successful submission."""


class ReplayError(AssertionError):
    """A recorded transcript does not reproduce under recomputation."""


@dataclass(frozen=True)
class GameConfig:
    k: int = 10
    max_questions: int = 20
    entropy_threshold_bits: float = 1.0
    strategy: str = "eig"
    answerer: str = "oracle"
    epsilon: float = 0.01
    include_what: bool = False
    initial_description_mode: str = "none"
    seed: int = 0
    context_mode: str = "random"
    captions_per_scene: int = 8
    min_objects: int = 1
    max_objects: int = 3
    relation_prob: float = 0.25

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.answerer not in ANSWERER_KINDS:
            raise ValueError(f"unknown answerer {self.answerer!r}")
        if self.initial_description_mode not in DESCRIPTION_MODES:
            raise ValueError(
                f"unknown description mode {self.initial_description_mode!r}"
            )
        if self.context_mode not in GENERATOR_MODES:
            raise ValueError(f"unknown context mode {self.context_mode!r}")
        if self.max_questions < 0:
            raise ValueError("max_questions must be >= 0")
        if self.entropy_threshold_bits < 0.0:
            raise ValueError("entropy_threshold_bits must be >= 0")


@dataclass(frozen=True)
class TurnRecord:
    turn: int
    question: str
    answer: str
    posterior: tuple[float, ...]
    entropy_bits: float

    def as_record(self) -> dict:
        return {
            "turn": self.turn,
            "question": self.question,
            "answer": self.answer,
            "posterior": [f"{p:.6f}" for p in self.posterior],
            "entropy_bits": f"{self.entropy_bits:.6f}",
        }


TRANSCRIPT_SCHEMA = "twentyq.transcript.v1"


@dataclass(frozen=True)
class Transcript:
    config: GameConfig
    context: Context
    target_id: int
    initial_description: tuple[str, ...] | None
    initial_posterior: tuple[float, ...]
    turns: tuple[TurnRecord, ...]
    stop_reason: str
    guess_id: int
    win: bool

    @property
    def n_questions(self) -> int:
        return len(self.turns)

    def posterior_trajectory(self) -> list[tuple[float, ...]]:
        """Posterior after 0, 1, ... questions; frozen once the game stops."""
        return [self.initial_posterior] + [t.posterior for t in self.turns]

    def to_record(self) -> dict:
        return {
            "schema": TRANSCRIPT_SCHEMA,
            "config": asdict(self.config),
            "context": context_to_record(self.context),
            "target_id": self.target_id,
            "initial_description": (
                " ".join(self.initial_description)
                if self.initial_description is not None
                else None
            ),
            "initial_posterior": [f"{p:.6f}" for p in self.initial_posterior],
            "turns": [t.as_record() for t in self.turns],
            "stop_reason": self.stop_reason,
            "guess_id": self.guess_id,
            "win": self.win,
            "n_questions": self.n_questions,
        }


def write_transcripts(path: str, transcripts: Iterable[Transcript]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in transcripts:
            fh.write(json.dumps(t.to_record(), sort_keys=True) + "\n")


def read_transcript_records(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def make_answer_model(
    name: str,
    epsilon: float = 0.01,
    captions_per_scene: int = 8,
    learned_model=None,
):
    """Instantiate the simulated answerer named by a config."""
    if name == "oracle":
        return OracleAnswerer(epsilon)
    if name == "heuristic":
        return HeuristicAnswerer(captions_per_scene, epsilon)
    if name == "learned":
        if learned_model is None:
            raise ConfigurationError(
                "learned answerer needs trained weights (see train-answerer)"
            )
        from twentyq.answerers import LearnedAnswerer, LogisticModel

        if isinstance(learned_model, LogisticModel):
            return LearnedAnswerer(learned_model)
        return learned_model
    if name == "external":
        raise ConfigurationError(
            "external answers are injected through a session, not simulated"
        )
    raise ValueError(f"unknown answerer {name!r}")


def interpretation_model_for(config: GameConfig, learned_model=None):
    """The engine's likelihood model for decoding answers.

    External (human) answers are decoded as an epsilon-noisy oracle over
    the visible scenes; simulated answerers are decoded by their own
    distribution (a matched pair).
    """
    if config.answerer == "external":
        return OracleAnswerer(config.epsilon)
    return make_answer_model(
        config.answerer, config.epsilon, config.captions_per_scene, learned_model
    )


def _sample_answer(dist: dict[str, float], support, rng: random.Random) -> str:
    roll = rng.random()
    acc = 0.0
    last = None
    for a in support:
        p = dist.get(a, 0.0)
        if p <= 0.0:
            continue
        acc += p
        last = a
        if roll < acc:
            return a
    if last is None:
        raise ValueError("answer distribution has no positive mass")
    return last


class GameSession:
    """One stepwise game: the engine asks, an external party answers.

    The target is assigned at creation and shown to the answerer. The
    selector and belief never read it; it only scores the final guess.
    Status runs awaiting_description -> awaiting_answer -> finished (the
    first phase exists only when a description was requested).
    """

    def __init__(
        self,
        config: GameConfig,
        context: Context | None = None,
        target_id: int | None = None,
        interpret_model=None,
        vocab: AttributeVocabulary = DEFAULT_VOCAB,
    ):
        if config.strategy == "binary_search_oracle":
            raise ConfigurationError(
                "binary search partitions scene indices directly; it asks no "
                "text questions and cannot run as an interactive session"
            )
        self.config = config
        self.vocab = vocab
        self._rng = random.Random(derive_seed(config.seed, "session"))
        self.context = context if context is not None else gen_context(
            derive_seed(config.seed, "ctx"),
            config.k,
            config.context_mode,
            vocab,
            max_objects=config.max_objects,
            min_objects=config.min_objects,
            relation_prob=config.relation_prob,
        )
        self.target_id = (
            target_id if target_id is not None else self._rng.randrange(self.context.k)
        )
        if not 0 <= self.target_id < self.context.k:
            raise ValueError("target_id out of range")
        self.model = (
            interpret_model
            if interpret_model is not None
            else interpretation_model_for(config)
        )
        self.pool = build_pool(
            self.context,
            vocab,
            captions_per_scene=config.captions_per_scene,
            include_what=config.include_what,
            full_caption_mode=config.strategy == "full_caption_eig",
        )
        self.selector = make_selector(
            config.strategy, self.pool, self.context, self.model, vocab
        )
        self.belief = init_uniform(self.context.k)
        self.initial_description: tuple[str, ...] | None = None
        self.initial_posterior: tuple[float, ...] | None = None
        self.turns: list[TurnRecord] = []
        self.current_question = None
        self.stop_reason: str | None = None
        self.guess_id: int | None = None
        self._used_keys: set[str] = set()
        if config.initial_description_mode == "provided":
            self.status = "awaiting_description"
        else:
            self.status = "awaiting_answer"
            self.initial_posterior = tuple(self.belief)
            self._advance()

    @property
    def finished(self) -> bool:
        return self.status == "finished"

    @property
    def win(self) -> bool | None:
        return None if self.guess_id is None else self.guess_id == self.target_id

    def entropy_bits(self) -> float:
        return entropy(self.belief, "bits")

    def _advance(self) -> None:
        if self.entropy_bits() < self.config.entropy_threshold_bits:
            self._finish("threshold")
            return
        if len(self.turns) >= self.config.max_questions:
            self._finish("max_questions")
            return
        q = self.selector.select(self.belief, self._rng)
        if q is None:
            self._finish("pool_exhausted")
            return
        self.current_question = q

    def _finish(self, reason: str) -> None:
        self.status = "finished"
        self.current_question = None
        self.stop_reason = reason
        self.guess_id = int(np.argmax(self.belief))

    def provide_description(self, text) -> None:
        """Initialize the belief from the answerer's opening description.

        Descriptions outside the caption language carry no information and
        leave the belief uniform; an empty description is rejected.
        """
        if self.status != "awaiting_description":
            raise StateError(f"description not expected in status {self.status!r}")
        tokens = tuple(text.split()) if isinstance(text, str) else tuple(text)
        if not tokens:
            raise ValueError("description must not be empty")
        self.initial_description = tokens
        self.belief = init_from_description(self.context, tokens, self.vocab)
        self.initial_posterior = tuple(self.belief)
        self.status = "awaiting_answer"
        self._advance()

    def submit_answer(self, answer: str, idempotency_key: str | None = None) -> TurnRecord:
        if self.status != "awaiting_answer" or self.current_question is None:
            raise StateError(f"no question awaiting an answer in status {self.status!r}")
        q = self.current_question
        support = q.answer_support(self.vocab)
        if answer not in support:
            raise ValueError(
                f"answer {answer!r} not in support {support} of {q.text!r}"
            )
        if idempotency_key is not None and idempotency_key in self._used_keys:
            raise DuplicateSubmissionError(
                f"idempotency key {idempotency_key!r} already used"
            )
        self.belief = update(self.belief, self.context, q, answer, self.model, self.vocab)
        # key consumed only once the update succeeds, so failed calls are retryable
        if idempotency_key is not None:
            self._used_keys.add(idempotency_key)
        record = TurnRecord(
            turn=len(self.turns) + 1,
            question=q.text,
            answer=answer,
            posterior=tuple(self.belief),
            entropy_bits=self.entropy_bits(),
        )
        self.turns.append(record)
        self.current_question = None
        self._advance()
        return record

    def candidate_scores(self):
        """EIG of every still-askable question against the current belief."""
        if not hasattr(self.selector, "scored"):
            return []
        return self.selector.scored(self.belief)

    def build_transcript(self) -> Transcript:
        if not self.finished:
            raise StateError("game still in progress")
        return Transcript(
            config=self.config,
            context=self.context,
            target_id=self.target_id,
            initial_description=self.initial_description,
            initial_posterior=self.initial_posterior or tuple(init_uniform(self.context.k)),
            turns=tuple(self.turns),
            stop_reason=self.stop_reason,
            guess_id=self.guess_id,
            win=bool(self.win),
        )


def step_external(session: GameSession, answer: str, idempotency_key: str | None = None) -> GameSession:
    """Inject one external answer into a session (spec-shaped wrapper)."""
    session.submit_answer(answer, idempotency_key)
    return session


def provide_description(session: GameSession, text) -> GameSession:
    """Inject the external answerer's opening description."""
    session.provide_description(text)
    return session


def _run_binary_game(config: GameConfig, context: Context, target_id: int) -> Transcript:
    """Noise-free halving over the currently possible scene indices."""
    rng = random.Random(derive_seed(config.seed, "binary"))
    belief = init_uniform(context.k)
    turns: list[TurnRecord] = []
    while True:
        h = entropy(belief, "bits")
        if h < config.entropy_threshold_bits:
            reason = "threshold"
            break
        if len(turns) >= config.max_questions:
            reason = "max_questions"
            break
        possible = [i for i in range(context.k) if belief[i] > 0.0]
        if len(possible) < 2:
            reason = "pool_exhausted"
            break
        subset = sorted(rng.sample(possible, len(possible) // 2))
        answer = "yes" if target_id in subset else "no"
        keep = set(subset) if answer == "yes" else set(possible) - set(subset)
        nxt = np.zeros_like(belief)
        for i in keep:
            nxt[i] = belief[i]
        belief = nxt / nxt.sum()
        turns.append(
            TurnRecord(
                turn=len(turns) + 1,
                question="partition:" + ",".join(str(i) for i in subset),
                answer=answer,
                posterior=tuple(belief),
                entropy_bits=entropy(belief, "bits"),
            )
        )
    guess = int(np.argmax(belief))
    return Transcript(
        config=config,
        context=context,
        target_id=target_id,
        initial_description=None,
        initial_posterior=tuple(init_uniform(context.k)),
        turns=tuple(turns),
        stop_reason=reason,
        guess_id=guess,
        win=guess == target_id,
    )


def run_game(
    config: GameConfig,
    context: Context | None = None,
    target_id: int | None = None,
    answer_model=None,
    interpret_model=None,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> Transcript:
    """Simulate one full game under config (seed included in config).

    answer_model produces the answers (the simulated answerer);
    interpret_model is the engine's likelihood model for belief updates.
    By default both are built from config.answerer, a matched pair.
    """
    if config.strategy == "binary_search_oracle":
        if context is None:
            context = gen_context(
                derive_seed(config.seed, "ctx"),
                config.k,
                config.context_mode,
                vocab,
                max_objects=config.max_objects,
                min_objects=config.min_objects,
                relation_prob=config.relation_prob,
            )
        if target_id is None:
            rng = random.Random(derive_seed(config.seed, "session"))
            target_id = rng.randrange(context.k)
        return _run_binary_game(config, context, target_id)

    sampler = (
        answer_model
        if answer_model is not None
        else make_answer_model(config.answerer, config.epsilon, config.captions_per_scene)
    )
    session = GameSession(
        config,
        context=context,
        target_id=target_id,
        interpret_model=interpret_model if interpret_model is not None else sampler,
        vocab=vocab,
    )
    answer_rng = random.Random(derive_seed(config.seed, "answers"))
    target_scene = session.context.scenes[session.target_id]
    if session.status == "awaiting_description":
        desc = caption(target_scene, derive_seed(config.seed, "desc"))
        session.provide_description(desc.tokens)
    while session.status == "awaiting_answer":
        q = session.current_question
        dist = sampler.answer_dist(q, target_scene, vocab)
        answer = _sample_answer(dist, q.answer_support(vocab), answer_rng)
        session.submit_answer(answer)
    return session.build_transcript()


def replay(record: dict, interpret_model=None, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> bool:
    """Recompute a serialized transcript's posteriors from its answers.

    Returns True when every formatted posterior and entropy matches the
    record; raises ReplayError at the first divergence.
    """
    if record.get("schema") != TRANSCRIPT_SCHEMA:
        raise ValueError(f"unknown transcript schema {record.get('schema')!r}")
    config = GameConfig(**record["config"])
    context = context_from_record(record["context"])
    if config.strategy == "binary_search_oracle":
        belief = init_uniform(context.k)
        for turn in record["turns"]:
            subset = [int(i) for i in turn["question"].split(":", 1)[1].split(",")]
            possible = [i for i in range(context.k) if belief[i] > 0.0]
            keep = set(subset) if turn["answer"] == "yes" else set(possible) - set(subset)
            nxt = np.zeros_like(belief)
            for i in keep:
                nxt[i] = belief[i]
            belief = nxt / nxt.sum()
            _check_turn(turn, belief)
        return True
    model = (
        interpret_model
        if interpret_model is not None
        else interpretation_model_for(config)
    )
    pool = build_pool(
        context,
        vocab,
        captions_per_scene=config.captions_per_scene,
        include_what=config.include_what,
        full_caption_mode=config.strategy == "full_caption_eig",
    )
    by_text = pool.by_text()
    desc = record.get("initial_description")
    if desc is not None:
        belief = init_from_description(context, desc, vocab)
    else:
        belief = init_uniform(context.k)
    recorded_init = record["initial_posterior"]
    computed_init = [f"{p:.6f}" for p in belief]
    if computed_init != recorded_init:
        raise ReplayError(
            f"initial posterior mismatch: {computed_init} != {recorded_init}"
        )
    for turn in record["turns"]:
        q = by_text.get(turn["question"])
        if q is None:
            raise ReplayError(f"question {turn['question']!r} not in rebuilt pool")
        belief = update(belief, context, q, turn["answer"], model, vocab)
        _check_turn(turn, belief)
    return True


def _check_turn(turn: dict, belief: np.ndarray) -> None:
    computed = [f"{p:.6f}" for p in belief]
    if computed != turn["posterior"]:
        raise ReplayError(
            f"turn {turn['turn']}: posterior mismatch {computed} != {turn['posterior']}"
        )
    h = f"{entropy(belief, 'bits'):.6f}"
    if h != turn["entropy_bits"]:
        raise ReplayError(
            f"turn {turn['turn']}: entropy mismatch {h} != {turn['entropy_bits']}"
        )
