"""Synthetic visual world: vocabulary, scenes, contexts, captions, semantics.

Scenes hold 1-3 colored shapes and at most one verb relation. Contexts are
ordered lists of k scenes. Captions are drawn from a small template
distribution whose support and probabilities are exactly enumerable, which
makes utterance likelihoods exact as well.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from twentyq._seeds import derive_seed


class CapacityError(ValueError):
    """Requested more distinct scenes than the attribute space admits."""


class SemanticGapError(ValueError):
    """A question predicate uses a word outside the scene vocabulary."""


@dataclass(frozen=True)
class AttributeVocabulary:
    """Closed word inventory for scenes, captions and questions.

    colors + shapes form the 15-word open-class core; verbs feed the
    relational captions and `what` questions; generic nouns are wildcard
    heads ("shape") that match any object.
    """

    colors: tuple[str, ...] = ("red", "green", "blue", "yellow", "magenta", "cyan", "gray")
    shapes: tuple[str, ...] = (
        "square",
        "rectangle",
        "triangle",
        "pentagon",
        "cross",
        "circle",
        "semicircle",
        "ellipse",
    )
    verbs: tuple[str, ...] = ("touching", "overlapping", "facing")
    generic_nouns: tuple[str, ...] = ("shape",)
    closed_class: tuple[str, ...] = ("is", "are", "there", "a", "an", "what", "the")

    def __post_init__(self) -> None:
        words = self.all_words()
        if len(set(words)) != len(words):
            raise ValueError("vocabulary words must be unique across lists")
        if any(w != w.lower() for w in words):
            raise ValueError("vocabulary words must be lowercase")
        if len(self.colors) + len(self.shapes) != 15:
            raise ValueError("|colors| + |shapes| must equal 15")

    def all_words(self) -> tuple[str, ...]:
        return self.colors + self.shapes + self.verbs + self.generic_nouns + self.closed_class

    def content_words(self) -> tuple[str, ...]:
        """Open-class words, the answer support for `what` questions."""
        return self.colors + self.shapes + self.verbs

    def nouns(self) -> tuple[str, ...]:
        return self.shapes + self.generic_nouns

    def is_generic_noun(self, word: str) -> bool:
        return word in self.generic_nouns

    def plural_of(self, noun: str) -> str:
        if noun.endswith(("s", "x", "sh", "ch")):
            return noun + "es"
        return noun + "s"

    def singular_noun(self, word: str) -> str | None:
        """Map a (possibly plural) token to its singular noun, else None."""
        if word in self.nouns():
            return word
        for noun in self.nouns():
            if self.plural_of(noun) == word:
                return noun
        return None


DEFAULT_VOCAB = AttributeVocabulary()


@dataclass(frozen=True)
class SceneObject:
    id: int
    color: str
    shape: str


@dataclass(frozen=True)
class Relation:
    subject_id: int
    verb: str
    object_id: int


@dataclass(frozen=True)
class Scene:
    """One candidate target: a handful of colored shapes, optionally related."""

    objects: tuple[SceneObject, ...]
    relations: tuple[Relation, ...] = ()

    def __post_init__(self) -> None:
        if not self.objects:
            raise ValueError("scene needs at least one object")
        ids = [o.id for o in self.objects]
        if ids != list(range(len(ids))):
            raise ValueError("object ids must be contiguous from 0")
        for r in self.relations:
            if r.subject_id == r.object_id:
                raise ValueError("relation subject and object must differ")
            if r.subject_id not in ids or r.object_id not in ids:
                raise ValueError("relation ids must reference scene objects")

    def object_by_id(self, oid: int) -> SceneObject:
        return self.objects[oid]

    @property
    def signature(self) -> tuple:
        """Canonical content summary; equal signatures mean equal scenes up to id order."""
        pairs = tuple(sorted((o.color, o.shape) for o in self.objects))
        rels = tuple(
            sorted(
                (
                    self.objects[r.subject_id].color,
                    self.objects[r.subject_id].shape,
                    r.verb,
                    self.objects[r.object_id].color,
                    self.objects[r.object_id].shape,
                )
                for r in self.relations
            )
        )
        return (pairs, rels)


@dataclass(frozen=True)
class Context:
    """The ordered scene set shown to both players."""

    scenes: tuple[Scene, ...]
    mode: str = "random"
    seed: int | None = None

    def __post_init__(self) -> None:
        if len(self.scenes) < 2:
            raise ValueError("context needs k >= 2 scenes")

    @property
    def k(self) -> int:
        return len(self.scenes)


@dataclass(frozen=True)
class NPPredicate:
    """Structured content of a noun phrase: optional color, head noun, optional relation.

    A generic head noun ("shape") matches any object. `relation` embeds the
    predicate of a participial modifier ("... touching a blue circle").
    """

    shape: str
    color: str | None = None
    relation: tuple[str, "NPPredicate"] | None = None
    plural: bool = False


@dataclass(frozen=True)
class Caption:
    """A grammar-generated utterance, true of its source scene."""

    tokens: tuple[str, ...]
    scene_index: int | None = None

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


GENERATOR_MODES = ("random", "split", "distinct")


def gen_context(
    rng_seed: int,
    k: int,
    mode: str = "random",
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    max_objects: int = 3,
    min_objects: int = 1,
    relation_prob: float = 0.25,
) -> Context:
    """Generate a deterministic context of k scenes in the given mode.

    random: independent scenes, repeats allowed, relations sampled when a
    scene has >= 2 objects. split: scenes balanced ceil(k/2)/floor(k/2)
    between two disjoint shape categories (square vs circle), colors random.
    distinct: single-object scenes with pairwise-distinct (color, shape)
    signatures (no relations).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if mode not in GENERATOR_MODES:
        raise ValueError(f"unknown context mode {mode!r}")
    if not 1 <= min_objects <= max_objects <= 3:
        raise ValueError("object counts must satisfy 1 <= min <= max <= 3")
    rng = random.Random(derive_seed(rng_seed, "context", mode, k))

    if mode == "distinct":
        capacity = len(vocab.colors) * len(vocab.shapes)
        if k > capacity:
            raise CapacityError(
                f"distinct mode supports at most {capacity} single-object scenes, requested {k}"
            )
        all_pairs = [(c, s) for c in vocab.colors for s in vocab.shapes]
        picked = rng.sample(all_pairs, k)
        scenes = tuple(
            Scene(objects=(SceneObject(0, color, shape),)) for color, shape in picked
        )
        return Context(scenes=scenes, mode=mode, seed=rng_seed)

    if mode == "split":
        # canonical category pair; any two disjoint shape classes work
        if "square" in vocab.shapes and "circle" in vocab.shapes:
            shape_a, shape_b = "square", "circle"
        else:
            shape_a, shape_b = vocab.shapes[0], vocab.shapes[1]
        n_a = (k + 1) // 2
        scenes = []
        for i in range(k):
            shape = shape_a if i < n_a else shape_b
            n_obj = rng.randint(min_objects, max_objects)
            objs = tuple(
                SceneObject(j, rng.choice(vocab.colors), shape) for j in range(n_obj)
            )
            scenes.append(Scene(objects=objs))
        return Context(scenes=tuple(scenes), mode=mode, seed=rng_seed)

    scenes = []
    for _ in range(k):
        n_obj = rng.randint(min_objects, max_objects)
        objs = tuple(
            SceneObject(j, rng.choice(vocab.colors), rng.choice(vocab.shapes))
            for j in range(n_obj)
        )
        relations: tuple[Relation, ...] = ()
        if n_obj >= 2 and rng.random() < relation_prob:
            subject, obj = rng.sample(range(n_obj), 2)
            relations = (Relation(subject, rng.choice(vocab.verbs), obj),)
        scenes.append(Scene(objects=objs, relations=relations))
    return Context(scenes=tuple(scenes), mode=mode, seed=rng_seed)


def _article(word: str) -> str:
    return "an" if word[0] in "aeiou" else "a"


def _caption_support_fractions(
    scene: Scene, vocab: AttributeVocabulary
) -> dict[tuple[str, ...], Fraction]:
    """Exact generative distribution over captions true of the scene.

    Templates (equiprobable among those available): "a <color> <shape>",
    "a <shape>", and with a relation present, the fully specified
    "a <color> <shape> <verb> a <color> <shape>". Object slots are filled by
    a uniformly chosen object.
    """
    n_templates = 2 + (1 if scene.relations else 0)
    t_prob = Fraction(1, n_templates)
    n_obj = len(scene.objects)
    support: dict[tuple[str, ...], Fraction] = {}

    def add(tokens: tuple[str, ...], p: Fraction) -> None:
        support[tokens] = support.get(tokens, Fraction(0)) + p

    for obj in scene.objects:
        add((_article(obj.color), obj.color, obj.shape), t_prob * Fraction(1, n_obj))
        add((_article(obj.shape), obj.shape), t_prob * Fraction(1, n_obj))
    if scene.relations:
        r_prob = t_prob * Fraction(1, len(scene.relations))
        for r in scene.relations:
            subj = scene.object_by_id(r.subject_id)
            obj = scene.object_by_id(r.object_id)
            add(
                (
                    _article(subj.color),
                    subj.color,
                    subj.shape,
                    r.verb,
                    _article(obj.color),
                    obj.color,
                    obj.shape,
                ),
                r_prob,
            )
    return support


def caption_support(scene: Scene, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> list[tuple[tuple[str, ...], float]]:
    """All captions the generator can emit for this scene, with probabilities.

    Ordered by descending probability then lexicographic tokens, so callers
    taking a prefix get a deterministic, best-first caption list.
    """
    support = _caption_support_fractions(scene, vocab)
    ordered = sorted(support.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(tokens, float(p)) for tokens, p in ordered]


def caption(
    scene: Scene,
    rng_seed: int,
    scene_index: int | None = None,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> Caption:
    """Sample one caption from the scene's generative distribution."""
    rng = random.Random(derive_seed(rng_seed, "caption"))
    support = caption_support(scene, vocab)
    roll = rng.random()
    acc = 0.0
    for tokens, p in support:
        acc += p
        if roll < acc:
            return Caption(tokens=tokens, scene_index=scene_index)
    return Caption(tokens=support[-1][0], scene_index=scene_index)


def caption_likelihood(
    utterance: Sequence[str],
    scene: Scene,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
) -> float:
    """Probability that the generator emits `utterance` for `scene`.

    0 for anything outside the generative support, which covers both
    ungrammatical token sequences and utterances false of the scene.
    """
    tokens = tuple(utterance)
    support = _caption_support_fractions(scene, vocab)
    return float(support.get(tokens, Fraction(0)))


def _check_predicate_vocab(pred: NPPredicate, vocab: AttributeVocabulary) -> None:
    if pred.color is not None and pred.color not in vocab.colors:
        raise SemanticGapError(f"unknown color word {pred.color!r}")
    if pred.shape not in vocab.nouns():
        raise SemanticGapError(f"unknown noun {pred.shape!r}")
    if pred.relation is not None:
        verb, inner = pred.relation
        if verb not in vocab.verbs:
            raise SemanticGapError(f"unknown verb {verb!r}")
        _check_predicate_vocab(inner, vocab)


def _object_matches(
    scene: Scene, obj: SceneObject, pred: NPPredicate, vocab: AttributeVocabulary
) -> bool:
    if pred.color is not None and obj.color != pred.color:
        return False
    if not vocab.is_generic_noun(pred.shape) and obj.shape != pred.shape:
        return False
    if pred.relation is None:
        return True
    verb, inner = pred.relation
    for r in sorted(scene.relations, key=lambda r: (r.subject_id, r.object_id)):
        if r.subject_id != obj.id or r.verb != verb:
            continue
        if _object_matches(scene, scene.object_by_id(r.object_id), inner, vocab):
            return True
    return False


def eval_polar(scene: Scene, question, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> str:
    """Ground-truth polar answer: does the scene satisfy the NP predicate?

    Accepts a PolarQuestion or a bare NPPredicate. Existence semantics over
    the candidate scene; relational predicates bind over scene relations.
    Raises SemanticGapError on out-of-vocabulary content words.
    """
    pred: NPPredicate = getattr(question, "predicate", question)
    _check_predicate_vocab(pred, vocab)
    for obj in scene.objects:
        if _object_matches(scene, obj, pred, vocab):
            return "yes"
    return "no"


def eval_what(scene: Scene, question, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> str | None:
    """Single-word answer to "What is the <NN> <VBG>?", or None.

    Returns the shape noun of the relation object for the first matching
    relation in (subject_id, object_id) order; ambiguity therefore resolves
    to the lowest subject id.
    """
    nn = getattr(question, "nn", None) or question[0]
    vbg = getattr(question, "vbg", None) or question[1]
    for r in sorted(scene.relations, key=lambda r: (r.subject_id, r.object_id)):
        subject = scene.object_by_id(r.subject_id)
        if r.verb != vbg:
            continue
        if vocab.is_generic_noun(nn) or subject.shape == nn:
            return scene.object_by_id(r.object_id).shape
    return None


GRID_COLUMNS = 3
CELL_SIZE = 100


def render_spec(scene: Scene) -> dict:
    """Deterministic drawing description for the UI: grid-placed glyphs plus arrows."""
    items = []
    for obj in scene.objects:
        col = obj.id % GRID_COLUMNS
        row = obj.id // GRID_COLUMNS
        items.append(
            {
                "id": obj.id,
                "glyph": obj.shape,
                "fill": obj.color,
                "x": col * CELL_SIZE + CELL_SIZE // 2,
                "y": row * CELL_SIZE + CELL_SIZE // 2,
                "size": 70,
            }
        )
    arrows = [
        {"from": r.subject_id, "to": r.object_id, "label": r.verb}
        for r in scene.relations
    ]
    rows = (len(scene.objects) + GRID_COLUMNS - 1) // GRID_COLUMNS
    return {
        "width": GRID_COLUMNS * CELL_SIZE,
        "height": rows * CELL_SIZE,
        "items": items,
        "arrows": arrows,
    }


def describe_scene(scene: Scene) -> str:
    """Exhaustive one-line text rendering, for terminal play and logs."""
    parts = [f"{_article(obj.color)} {obj.color} {obj.shape}" for obj in scene.objects]
    text = ", ".join(parts)
    clauses = []
    for r in sorted(scene.relations, key=lambda r: (r.subject_id, r.object_id)):
        subj = scene.objects[r.subject_id]
        obj = scene.objects[r.object_id]
        clauses.append(f"the {subj.shape} is {r.verb} the {obj.shape}")
    if clauses:
        text += "; " + "; ".join(clauses)
    return text


def scene_to_record(scene: Scene) -> dict:
    return {
        "objects": [[o.color, o.shape] for o in scene.objects],
        "relations": [[r.subject_id, r.verb, r.object_id] for r in scene.relations],
    }


def scene_from_record(record: dict) -> Scene:
    objects = tuple(
        SceneObject(i, color, shape) for i, (color, shape) in enumerate(record["objects"])
    )
    relations = tuple(Relation(s, v, o) for s, v, o in record.get("relations", []))
    return Scene(objects=objects, relations=relations)


def context_to_record(context: Context) -> dict:
    return {
        "mode": context.mode,
        "seed": context.seed,
        "scenes": [scene_to_record(s) for s in context.scenes],
    }


def context_from_record(record: dict) -> Context:
    return Context(
        scenes=tuple(scene_from_record(s) for s in record["scenes"]),
        mode=record.get("mode", "random"),
        seed=record.get("seed"),
    )


def write_contexts(path: str, contexts: Iterable[Context]) -> None:
    """One context per line, JSON records with fixed field names."""
    with open(path, "w", encoding="utf-8") as fh:
        for ctx in contexts:
            fh.write(json.dumps(context_to_record(ctx), sort_keys=True) + "\n")


def read_contexts(path: str) -> list[Context]:
    with open(path, encoding="utf-8") as fh:
        return [context_from_record(json.loads(line)) for line in fh if line.strip()]
