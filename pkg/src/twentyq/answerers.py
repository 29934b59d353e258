"""Answer models p(a|q,y): oracle, provenance heuristic, learned classifiers.

Every model exposes answer_dist(question, scene, vocab) -> dict of answer
probabilities over the question's support. The learned polar model is a
logistic classifier trained on self-supervised pairs labelled by caption
provenance: a question minted from a scene's own captions is a "yes" for
that scene, a question minted from another scene is labelled "no" even
when it happens to be true (those are the reported false negatives).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

import numpy as np

from twentyq._seeds import derive_seed
from twentyq.grammar import np_subtrees, parse
from twentyq.questions import (
    PolarQuestion,
    WhatQuestion,
    generalize_predicate,
    polar_from_np,
    polar_from_predicate,
    what_from_caption,
)
from twentyq.scenes import (
    AttributeVocabulary,
    DEFAULT_VOCAB,
    Scene,
    SceneObject,
    Relation,
    SemanticGapError,
    caption_support,
    eval_polar,
    eval_what,
    scene_from_record,
    scene_to_record,
)


class ConfigurationError(ValueError):
    """The answer model cannot serve this question kind."""


class TrainingError(RuntimeError):
    """Optimization produced a non-finite or non-improvable loss."""


# ---------------------------------------------------------------------------
# oracle


class OracleAnswerer:
    """Ground-truth answers, flipped with probability epsilon.

    Polar: 1-epsilon on the true answer, epsilon on the opposite, never
    N/A; out-of-vocabulary predicates answer "no". `what`: 1-epsilon on
    the true word ("na" when no relation matches), epsilon spread
    uniformly over the rest of the support.
    """

    def __init__(self, epsilon: float = 0.0):
        if not 0.0 <= epsilon < 0.5:
            raise ValueError("epsilon must lie in [0, 0.5)")
        self.epsilon = float(epsilon)

    def answer_dist(
        self, question, scene: Scene, vocab: AttributeVocabulary = DEFAULT_VOCAB
    ) -> dict[str, float]:
        if question.kind == "polar":
            try:
                truth = eval_polar(scene, question, vocab)
            except SemanticGapError:
                truth = "no"
            other = "no" if truth == "yes" else "yes"
            return {truth: 1.0 - self.epsilon, other: self.epsilon, "na": 0.0}
        return what_predict(question, scene, mode="oracle", epsilon=self.epsilon, vocab=vocab)


def oracle_predict(
    question,
    scene: Scene,
    epsilon: float = 0.0,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> dict[str, float]:
    return OracleAnswerer(epsilon).answer_dist(question, scene, vocab)


# ---------------------------------------------------------------------------
# provenance heuristic


def heuristic_predict(
    question, scene_id: int, epsilon: float = 0.0
) -> dict[str, float]:
    """Literal provenance rule: "yes" iff the question derives from scene_id.

    Answers "no" even when the predicate is coincidentally true of the
    scene; that is the point of the heuristic.
    """
    if not 0.0 <= epsilon < 0.5:
        raise ValueError("epsilon must lie in [0, 0.5)")
    if question.kind != "polar":
        raise ConfigurationError("heuristic rule only serves polar questions")
    hit = scene_id in question.scene_indices
    p_yes = 1.0 - epsilon if hit else epsilon
    return {"yes": p_yes, "no": 1.0 - p_yes, "na": 0.0}


class HeuristicAnswerer:
    """Provenance rule phrased over scene content, so it fits answer_dist.

    A question derives from a scene exactly when the scene's own truncated
    caption list can mint it; for scenes inside a context this coincides
    with pool provenance membership (same enumeration, same truncation).
    """

    def __init__(self, captions_per_scene: int = 8, epsilon: float = 0.0):
        if not 0.0 <= epsilon < 0.5:
            raise ValueError("epsilon must lie in [0, 0.5)")
        self.captions_per_scene = captions_per_scene
        self.epsilon = float(epsilon)
        self._cache: dict[tuple, frozenset] = {}

    def _derived(self, scene: Scene, vocab: AttributeVocabulary) -> frozenset:
        key = (scene.signature, self.captions_per_scene)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        derived = frozenset(
            q.tokens
            for q in derived_polar_questions(scene, vocab, self.captions_per_scene)
        )
        self._cache[key] = derived
        return derived

    def answer_dist(
        self, question, scene: Scene, vocab: AttributeVocabulary = DEFAULT_VOCAB
    ) -> dict[str, float]:
        if question.kind != "polar":
            raise ConfigurationError("heuristic answerer only serves polar questions")
        hit = question.tokens in self._derived(scene, vocab)
        p_yes = 1.0 - self.epsilon if hit else self.epsilon
        return {"yes": p_yes, "no": 1.0 - p_yes, "na": 0.0}


def questions_from_captions(
    caption_token_lists, vocab: AttributeVocabulary = DEFAULT_VOCAB
) -> list[PolarQuestion]:
    """Deduplicated polar questions mintable from the given captions.

    The pool's minting rule: every caption NP plus its generic-noun widening.
    """
    seen: dict[tuple[str, ...], PolarQuestion] = {}
    for tokens in caption_token_lists:
        tree = parse(tuple(tokens), vocab)
        for np_node in np_subtrees(tree):
            q = polar_from_np(np_node, vocab)
            seen.setdefault(q.tokens, q)
            widened = generalize_predicate(q.predicate, vocab)
            if widened is not None:
                wq = polar_from_predicate(widened, vocab)
                seen.setdefault(wq.tokens, wq)
    return list(seen.values())


def derived_polar_questions(
    scene: Scene,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    captions_per_scene: int = 8,
) -> list[PolarQuestion]:
    """Deduplicated polar questions mintable from one scene's captions."""
    return questions_from_captions(
        (tokens for tokens, _ in caption_support(scene, vocab)[:captions_per_scene]),
        vocab,
    )


# ---------------------------------------------------------------------------
# feature map


def _question_vocab(vocab: AttributeVocabulary) -> tuple[str, ...]:
    return (
        vocab.colors + vocab.shapes + vocab.verbs + vocab.generic_nouns + vocab.closed_class
    )


def feature_names(
    vocab: AttributeVocabulary = DEFAULT_VOCAB, interactions: bool = True
) -> list[str]:
    """Dimension labels aligned with featurize, used by model persistence."""
    names = [f"bow:{w}" for w in _question_vocab(vocab)]
    scene = (
        [f"scene_color:{c}" for c in vocab.colors]
        + [f"scene_shape:{s}" for s in vocab.shapes]
        + [f"scene_verb:{v}" for v in vocab.verbs]
        + [f"scene_pair:{c}:{s}" for c in vocab.colors for s in vocab.shapes]
    )
    names += scene
    if interactions:
        names += [n.replace("scene_", "match_", 1) for n in scene]
    return names


def feature_dim(vocab: AttributeVocabulary = DEFAULT_VOCAB, interactions: bool = True) -> int:
    return len(feature_names(vocab, interactions))


def featurize(
    question,
    scene: Scene,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    interactions: bool = True,
) -> np.ndarray:
    """Question bag-of-words concatenated with scene multi-hots.

    Scene block: color present, shape present, relation verb present, and
    (color, shape) object pair present. With interactions=True a further
    block marks agreement: each color/shape/verb/pair both mentioned by
    the question and present in the scene. Plural tokens count as their
    singular noun. Tokens outside the vocabulary are an error.
    """
    n_c, n_s, n_v = len(vocab.colors), len(vocab.shapes), len(vocab.verbs)
    qvocab = _question_vocab(vocab)
    q_index = {w: i for i, w in enumerate(qvocab)}
    c_index = {c: i for i, c in enumerate(vocab.colors)}
    s_index = {s: i for i, s in enumerate(vocab.shapes)}
    v_index = {v: i for i, v in enumerate(vocab.verbs)}

    bow = np.zeros(len(qvocab), dtype=np.float64)
    mention_c = np.zeros(n_c)
    mention_s = np.zeros(n_s)
    mention_v = np.zeros(n_v)
    mention_pair = np.zeros(n_c * n_s)
    tokens = [vocab.singular_noun(t) or t for t in question.tokens]
    for i, t in enumerate(tokens):
        if t not in q_index:
            raise SemanticGapError(f"question token {t!r} outside the vocabulary")
        bow[q_index[t]] += 1.0
        if t in c_index:
            mention_c[c_index[t]] = 1.0
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt in s_index:
                mention_pair[c_index[t] * n_s + s_index[nxt]] = 1.0
        elif t in s_index:
            mention_s[s_index[t]] = 1.0
        elif t in v_index:
            mention_v[v_index[t]] = 1.0

    present_c = np.zeros(n_c)
    present_s = np.zeros(n_s)
    present_v = np.zeros(n_v)
    present_pair = np.zeros(n_c * n_s)
    for obj in scene.objects:
        present_c[c_index[obj.color]] = 1.0
        present_s[s_index[obj.shape]] = 1.0
        present_pair[c_index[obj.color] * n_s + s_index[obj.shape]] = 1.0
    for rel in scene.relations:
        present_v[v_index[rel.verb]] = 1.0

    blocks = [bow, present_c, present_s, present_v, present_pair]
    if interactions:
        blocks += [
            mention_c * present_c,
            mention_s * present_s,
            mention_v * present_v,
            mention_pair * present_pair,
        ]
    return np.concatenate(blocks)


# ---------------------------------------------------------------------------
# logistic regression


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    interactions: bool = True
    epochs: int = 0
    learning_rate: float = 0.0
    final_loss: float = float("nan")

    def logits(self, X: np.ndarray) -> np.ndarray:
        return np.atleast_2d(X) @ self.weights + self.bias

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.logits(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)


def loss_and_grad(
    weights: np.ndarray,
    bias: float,
    X: np.ndarray,
    y: np.ndarray,
    l2: float = 0.0,
) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy and its gradient, computed without overflow."""
    z = X @ weights + bias
    # ln(1 + e^z) - y z, via logaddexp for stability
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * l2 * float(
        weights @ weights
    )
    resid = _sigmoid(z) - y
    grad_w = X.T @ resid / len(y) + l2 * weights
    grad_b = float(np.mean(resid))
    return loss, grad_w, grad_b


def train_logistic(
    X: np.ndarray,
    y: np.ndarray,
    learning_rate: float = 0.5,
    epochs: int = 60,
    batch_size: int = 64,
    rng_seed: int = 0,
    l2: float = 0.0,
    interactions: bool = True,
) -> tuple[LogisticModel, list[float]]:
    """Mini-batch gradient descent with per-epoch backtracking.

    An epoch that raises the full-batch loss by more than 1e-6 is redone
    from its start at half the step size, so the recorded epoch losses are
    monotone non-increasing. Raises TrainingError on a non-finite loss or
    when no usable step size remains.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("X must be a non-empty 2-d matrix")
    if set(np.unique(y)) - {0.0, 1.0}:
        raise ValueError("labels must be 0/1")
    n, d = X.shape
    rng = np.random.default_rng(derive_seed(rng_seed, "logistic"))
    w = np.zeros(d, dtype=np.float64)
    b = 0.0
    lr = float(learning_rate)
    prev_loss, _, _ = loss_and_grad(w, b, X, y, l2)
    losses: list[float] = []
    for epoch in range(epochs):
        order = rng.permutation(n)
        while True:
            w_try, b_try = w.copy(), b
            for start in range(0, n, batch_size):
                idx = order[start : start + batch_size]
                _, gw, gb = loss_and_grad(w_try, b_try, X[idx], y[idx], l2)
                w_try -= lr * gw
                b_try -= lr * gb
            loss, _, _ = loss_and_grad(w_try, b_try, X, y, l2)
            if not math.isfinite(loss):
                raise TrainingError(f"loss became non-finite at epoch {epoch}")
            if loss <= prev_loss + 1e-6:
                break
            lr *= 0.5
            if lr < 1e-12:
                raise TrainingError(
                    f"no step size improves the loss at epoch {epoch}"
                )
        w, b = w_try, b_try
        prev_loss = loss
        losses.append(loss)
    model = LogisticModel(
        weights=w,
        bias=b,
        interactions=interactions,
        epochs=epochs,
        learning_rate=learning_rate,
        final_loss=losses[-1] if losses else prev_loss,
    )
    return model, losses


class LearnedAnswerer:
    """Polar answer probabilities from a trained logistic classifier."""

    def __init__(self, model: LogisticModel, what_stack: "WhatStack | None" = None):
        self.model = model
        self.what_stack = what_stack

    def answer_dist(
        self, question, scene: Scene, vocab: AttributeVocabulary = DEFAULT_VOCAB
    ) -> dict[str, float]:
        if question.kind == "what":
            if self.what_stack is None:
                raise ConfigurationError(
                    "learned answerer has no trained `what` stack"
                )
            return self.what_stack.answer_dist(question, scene, vocab)
        x = featurize(question, scene, vocab, interactions=self.model.interactions)
        p_yes = float(self.model.predict_proba(x)[0])
        return {"yes": p_yes, "no": 1.0 - p_yes, "na": 0.0}


def learned_predict(
    model: LogisticModel,
    question,
    scene: Scene,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> dict[str, float]:
    return LearnedAnswerer(model).answer_dist(question, scene, vocab)


def save_model(path: str, model: LogisticModel, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> None:
    """Flat text record: metadata header, then feature-name/weight lines."""
    names = feature_names(vocab, model.interactions)
    if len(names) != len(model.weights):
        raise ValueError(
            f"model has {len(model.weights)} weights, vocabulary implies {len(names)}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# epochs={model.epochs}\n")
        fh.write(f"# learning_rate={model.learning_rate!r}\n")
        fh.write(f"# final_loss={model.final_loss!r}\n")
        fh.write(f"# interactions={int(model.interactions)}\n")
        for name, weight in zip(names, model.weights):
            fh.write(f"{name}\t{float(weight)!r}\n")
        fh.write(f"bias\t{float(model.bias)!r}\n")


def load_model(path: str, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> LogisticModel:
    meta: dict[str, str] = {}
    weights: dict[str, float] = {}
    bias = 0.0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                meta[key] = value
                continue
            name, _, value = line.partition("\t")
            if name == "bias":
                bias = float(value)
            else:
                weights[name] = float(value)
    interactions = meta.get("interactions", "1") == "1"
    names = feature_names(vocab, interactions)
    missing = [n for n in names if n not in weights]
    if missing:
        raise ValueError(f"model file missing {len(missing)} features, e.g. {missing[0]!r}")
    return LogisticModel(
        weights=np.array([weights[n] for n in names], dtype=np.float64),
        bias=bias,
        interactions=interactions,
        epochs=int(meta.get("epochs", 0)),
        learning_rate=float(meta.get("learning_rate", 0.0)),
        final_loss=float(meta.get("final_loss", "nan")),
    )


# ---------------------------------------------------------------------------
# `what` answers


def what_predict(
    question,
    scene: Scene,
    mode: str = "oracle",
    epsilon: float = 0.0,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    stack: "WhatStack | None" = None,
) -> dict[str, float]:
    """Distribution over the content vocabulary plus N/A for a `what` question."""
    if question.kind != "what":
        raise ConfigurationError("what_predict only serves `what` questions")
    support = question.answer_support(vocab)
    if mode == "oracle":
        if not 0.0 <= epsilon < 0.5:
            raise ValueError("epsilon must lie in [0, 0.5)")
        word = eval_what(scene, question, vocab)
        truth = word if word is not None else "na"
        rest = len(support) - 1
        dist = {a: (epsilon / rest if rest else 0.0) for a in support}
        dist[truth] = 1.0 - epsilon
        return dist
    if mode == "learned":
        if stack is None:
            raise ConfigurationError("learned mode needs a trained WhatStack")
        return stack.answer_dist(question, scene, vocab)
    raise ValueError(f"unknown what_predict mode {mode!r}")


@dataclass
class WhatStack:
    """One-vs-all logistic stack, softmaxed into a word distribution."""

    models: dict[str, LogisticModel]
    interactions: bool = True

    def answer_dist(
        self, question, scene: Scene, vocab: AttributeVocabulary = DEFAULT_VOCAB
    ) -> dict[str, float]:
        support = question.answer_support(vocab)
        x = featurize(question, scene, vocab, interactions=self.interactions)
        logits = np.array(
            [
                float(self.models[a].logits(x)[0]) if a in self.models else -30.0
                for a in support
            ]
        )
        exp = np.exp(logits - logits.max())
        probs = exp / exp.sum()
        return {a: float(p) for a, p in zip(support, probs)}


@dataclass(frozen=True)
class WhatTriple:
    question: WhatQuestion
    scene: Scene
    word: str


def gen_what_triples(
    n_scenes: int,
    rng_seed: int,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    na_fraction: float = 0.25,
) -> list[WhatTriple]:
    """Self-supervised (question, scene, word) triples from relational captions.

    The answer word is read off the caption itself (the relation object's
    shape noun). An na_fraction of triples pairs a question with a fresh
    scene whose relations do not match it, labelled "na".
    """
    rng = random.Random(derive_seed(rng_seed, "what-triples"))
    triples: list[WhatTriple] = []
    for _ in range(n_scenes):
        scene = _random_scene(rng, vocab, 2, 3, 1.0)
        for cap_tokens, _ in caption_support(scene, vocab):
            tree = parse(cap_tokens, vocab)
            for q in what_from_caption(tree, vocab):
                word = eval_what(scene, q, vocab)
                if word is None:
                    continue
                if rng.random() < na_fraction:
                    other = _random_scene(rng, vocab, 2, 3, 1.0)
                    if eval_what(other, q, vocab) is None:
                        triples.append(WhatTriple(q, other, "na"))
                        continue
                triples.append(WhatTriple(q, scene, word))
    return triples


def train_what_stack(
    triples,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    learning_rate: float = 0.5,
    epochs: int = 40,
    rng_seed: int = 0,
    interactions: bool = True,
) -> WhatStack:
    """One binary logistic model per answer word seen in the triples."""
    if not triples:
        raise ValueError("no triples to train on")
    X = np.stack(
        [featurize(t.question, t.scene, vocab, interactions=interactions) for t in triples]
    )
    words = sorted({t.word for t in triples})
    models: dict[str, LogisticModel] = {}
    for word in words:
        y = np.array([1.0 if t.word == word else 0.0 for t in triples])
        if y.min() == y.max():
            continue
        model, _ = train_logistic(
            X,
            y,
            learning_rate=learning_rate,
            epochs=epochs,
            rng_seed=derive_seed(rng_seed, "what", word),
            interactions=interactions,
        )
        models[word] = model
    return WhatStack(models=models, interactions=interactions)


# ---------------------------------------------------------------------------
# self-supervised polar data


@dataclass(frozen=True)
class LabeledPair:
    question: PolarQuestion
    scene: Scene
    label: str  # "yes" or "no"

    def __post_init__(self) -> None:
        if self.label not in ("yes", "no"):
            raise ValueError(f"label must be yes/no, got {self.label!r}")


@dataclass(frozen=True)
class DataReport:
    pairs: tuple[LabeledPair, ...]
    false_negatives: int
    negatives: int

    @property
    def false_negative_rate(self) -> float:
        return self.false_negatives / self.negatives if self.negatives else 0.0


def _random_scene(
    rng: random.Random,
    vocab: AttributeVocabulary,
    min_objects: int,
    max_objects: int,
    relation_prob: float,
) -> Scene:
    n_obj = rng.randint(min_objects, max_objects)
    objs = tuple(
        SceneObject(j, rng.choice(vocab.colors), rng.choice(vocab.shapes))
        for j in range(n_obj)
    )
    relations: tuple[Relation, ...] = ()
    if n_obj >= 2 and rng.random() < relation_prob:
        subject, obj = rng.sample(range(n_obj), 2)
        relations = (Relation(subject, rng.choice(vocab.verbs), obj),)
    return Scene(objects=objs, relations=relations)


def random_scenes(
    n_scenes: int,
    rng_seed: int,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    min_objects: int = 1,
    max_objects: int = 1,
    relation_prob: float = 0.0,
) -> list[Scene]:
    rng = random.Random(derive_seed(rng_seed, "scenes"))
    return [
        _random_scene(rng, vocab, min_objects, max_objects, relation_prob)
        for _ in range(n_scenes)
    ]


def gen_selfsup_data(
    scenes,
    captions=None,
    negatives_per_positive: int = 1,
    rng_seed: int = 0,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    captions_per_scene: int = 8,
) -> DataReport:
    """Label (question, scene) pairs by caption provenance, no human answers.

    Each scene's caption-derived questions are labelled "yes" for it; for
    every positive, negatives_per_positive questions drawn from other
    scenes are labelled "no". A negative whose predicate is actually true
    of the scene keeps its "no" label and is counted as a false negative.

    captions optionally gives the token lists to use per scene (parallel
    to scenes); by default each scene's most probable captions_per_scene
    captions are used.
    """
    scenes = list(scenes)
    if len(scenes) < 2:
        raise ValueError("need at least 2 scenes to draw negatives")
    if captions is None:
        caption_lists = [
            [tokens for tokens, _ in caption_support(s, vocab)[:captions_per_scene]]
            for s in scenes
        ]
    else:
        caption_lists = [list(c) for c in captions]
        if len(caption_lists) != len(scenes):
            raise ValueError("captions must be parallel to scenes")
    questions_per_scene = [
        questions_from_captions(cap_list, vocab) for cap_list in caption_lists
    ]
    rng = random.Random(derive_seed(rng_seed, "selfsup"))
    pairs: list[LabeledPair] = []
    false_negatives = 0
    negatives = 0
    for i, scene in enumerate(scenes):
        own = questions_per_scene[i]
        for q in own:
            pairs.append(LabeledPair(q, scene, "yes"))
        n_neg = negatives_per_positive * len(own)
        for _ in range(n_neg):
            j = rng.randrange(len(scenes) - 1)
            if j >= i:
                j += 1
            q = rng.choice(questions_per_scene[j])
            negatives += 1
            if eval_polar(scene, q, vocab) == "yes":
                false_negatives += 1
            pairs.append(LabeledPair(q, scene, "no"))
    return DataReport(
        pairs=tuple(pairs), false_negatives=false_negatives, negatives=negatives
    )


def question_from_tokens(tokens, vocab: AttributeVocabulary = DEFAULT_VOCAB):
    """Rebuild a question from its token sequence.

    Handles the two surfaces the pool mints: "is there <NP>" and
    "what is the <NN> <VBG>".
    """
    tokens = tuple(tokens)
    if tokens[:2] == ("is", "there"):
        tree = parse(tokens[2:], vocab)
        return polar_from_np(tree.children[0], vocab)
    if tokens[:2] == ("are", "there"):
        # plural surface drops the determiner; restore one to parse the NP
        tree = parse(("a",) + tokens[2:], vocab)
        return polar_from_np(tree.children[0], vocab)
    if tokens[:3] == ("what", "is", "the") and len(tokens) == 5:
        nn, vbg = tokens[3], tokens[4]
        return WhatQuestion(tokens=tokens, nn=nn, vbg=vbg)
    raise ValueError(f"unrecognized question surface: {' '.join(tokens)!r}")


def write_dataset(path: str, pairs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            record = {
                "question": list(pair.question.tokens),
                "scene": scene_to_record(pair.scene),
                "label": pair.label,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_dataset(path: str, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> list[LabeledPair]:
    out: list[LabeledPair] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            out.append(
                LabeledPair(
                    question=question_from_tokens(record["question"], vocab),
                    scene=scene_from_record(record["scene"]),
                    label=record["label"],
                )
            )
    return out


def pairs_to_matrix(
    pairs,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    interactions: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    X = np.stack(
        [featurize(p.question, p.scene, vocab, interactions=interactions) for p in pairs]
    )
    y = np.array([1.0 if p.label == "yes" else 0.0 for p in pairs])
    return X, y


def train_answer_model(
    pairs,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    learning_rate: float = 0.5,
    epochs: int = 60,
    batch_size: int = 64,
    rng_seed: int = 0,
    l2: float = 0.0,
    interactions: bool = True,
) -> tuple[LogisticModel, list[float]]:
    """Featurize labelled pairs and fit the polar classifier."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no pairs to train on")
    labels = {p.label for p in pairs}
    if labels != {"yes", "no"}:
        raise ValueError("training needs both yes and no pairs")
    X, y = pairs_to_matrix(pairs, vocab, interactions)
    return train_logistic(
        X,
        y,
        learning_rate=learning_rate,
        epochs=epochs,
        batch_size=batch_size,
        rng_seed=rng_seed,
        l2=l2,
        interactions=interactions,
    )


def evaluate(model: LogisticModel, pairs, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> dict:
    """Accuracy and confusion counts of a polar classifier on labelled pairs."""
    X, y = pairs_to_matrix(pairs, vocab, interactions=model.interactions)
    pred = model.predict(X)
    truth = y.astype(np.int64)
    return {
        "n": len(pairs),
        "accuracy": float(np.mean(pred == truth)),
        "true_pos": int(np.sum((pred == 1) & (truth == 1))),
        "true_neg": int(np.sum((pred == 0) & (truth == 0))),
        "false_pos": int(np.sum((pred == 1) & (truth == 0))),
        "false_neg": int(np.sum((pred == 0) & (truth == 1))),
    }
