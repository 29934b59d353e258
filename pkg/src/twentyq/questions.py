"""Question minting: polar questions from caption NPs, `what` extensions, pools.

Every candidate question is grounded in a caption the generator could emit
for some scene in the context, so the pool needs no QA training data. Each
question keeps provenance: the (scene index, caption rank) pairs it was
minted from.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from twentyq.grammar import ParseTree, np_subtrees, parse
from twentyq.scenes import (
    AttributeVocabulary,
    Context,
    DEFAULT_VOCAB,
    NPPredicate,
    caption_support,
)

POLAR_ANSWERS = ("yes", "no", "na")

# nouns whose plural is the bare form ("are there sheep?"); none in the
# default vocabulary, honored when realizing hand-built plural predicates
MASS_NOUNS: frozenset[str] = frozenset()


@dataclass(frozen=True)
class PolarQuestion:
    """Yes/no existence question over one NP predicate."""

    tokens: tuple[str, ...]
    predicate: NPPredicate
    provenance: frozenset = frozenset()

    kind = "polar"

    @property
    def text(self) -> str:
        return " ".join(self.tokens).capitalize() + "?"

    @property
    def scene_indices(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.provenance)

    def answer_support(self, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> tuple[str, ...]:
        return POLAR_ANSWERS


@dataclass(frozen=True)
class WhatQuestion:
    """Open question "What is the <NN> <VBG>?" about a relation object."""

    tokens: tuple[str, ...]
    nn: str
    vbg: str
    provenance: frozenset = frozenset()

    kind = "what"

    @property
    def text(self) -> str:
        return " ".join(self.tokens).capitalize() + "?"

    @property
    def scene_indices(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.provenance)

    def answer_support(self, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> tuple[str, ...]:
        return vocab.content_words() + ("na",)


Question = PolarQuestion | WhatQuestion


def _article(word: str) -> str:
    return "an" if word[0] in "aeiou" else "a"


def _np_tokens(pred: NPPredicate, vocab: AttributeVocabulary, plural: bool) -> list[str]:
    if plural and pred.shape in MASS_NOUNS:
        noun = pred.shape
    elif plural:
        noun = vocab.plural_of(pred.shape)
    else:
        noun = pred.shape
    body = ([pred.color] if pred.color else []) + [noun]
    tokens = body if plural else [_article(body[0])] + body
    if pred.relation is not None:
        verb, inner = pred.relation
        tokens += [verb] + _np_tokens(inner, vocab, plural=False)
    return tokens


def np_to_predicate(np: ParseTree, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> NPPredicate:
    """Structured predicate of an NP parse node."""
    if np.label != "NP":
        raise ValueError(f"expected an NP node, got {np.label!r}")
    adjp = np.child("ADJP")
    color = adjp.children[0].token if adjp is not None else None
    noun_leaf = np.child("N")
    singular = vocab.singular_noun(noun_leaf.token)
    relation = None
    partp = np.child("PARTP")
    if partp is not None:
        vbg, inner = partp.children
        relation = (vbg.token, np_to_predicate(inner, vocab))
    return NPPredicate(
        shape=singular,
        color=color,
        relation=relation,
        plural=noun_leaf.token != singular,
    )


def polar_from_predicate(
    pred: NPPredicate,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    provenance: frozenset = frozenset(),
) -> PolarQuestion:
    """Surface-realize "Is there ...?" / "Are there ...?" from a predicate."""
    copula = "are" if pred.plural else "is"
    tokens = [copula, "there"] + _np_tokens(pred, vocab, plural=pred.plural)
    return PolarQuestion(tokens=tuple(tokens), predicate=pred, provenance=provenance)


def polar_from_np(
    np: ParseTree,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    provenance: frozenset = frozenset(),
) -> PolarQuestion:
    return polar_from_predicate(np_to_predicate(np, vocab), vocab, provenance)


def generalize_predicate(
    pred: NPPredicate, vocab: AttributeVocabulary = DEFAULT_VOCAB
) -> NPPredicate | None:
    """Widen the head noun to the generic wildcard ("a red square" -> "a red shape").

    Returns None when nothing else constrains the NP: the widened question
    would be the vacuous "Is there a shape?".
    """
    if vocab.is_generic_noun(pred.shape):
        return None
    if pred.color is None and pred.relation is None:
        return None
    return replace(pred, shape=vocab.generic_nouns[0])


def what_from_caption(
    tree: ParseTree,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    provenance: frozenset = frozenset(),
) -> list[WhatQuestion]:
    """One "What is the <NN> <VBG>?" per participial modifier in the caption."""
    out: list[WhatQuestion] = []

    def walk(node: ParseTree) -> None:
        if node.label == "NP":
            partp = node.child("PARTP")
            if partp is not None:
                nn = vocab.singular_noun(node.child("N").token)
                vbg = partp.children[0].token
                tokens = ("what", "is", "the", nn, vbg)
                out.append(
                    WhatQuestion(tokens=tokens, nn=nn, vbg=vbg, provenance=provenance)
                )
        for c in node.children:
            walk(c)

    walk(tree)
    return out


def entails(general: NPPredicate, specific: NPPredicate, vocab: AttributeVocabulary = DEFAULT_VOCAB) -> bool:
    """True when every object matching `specific` also matches `general`.

    Structural test: the general predicate drops or equals each constraint.
    """
    if general.color is not None and general.color != specific.color:
        return False
    if not vocab.is_generic_noun(general.shape) and general.shape != specific.shape:
        return False
    if general.relation is not None:
        if specific.relation is None:
            return False
        g_verb, g_inner = general.relation
        s_verb, s_inner = specific.relation
        if g_verb != s_verb:
            return False
        return entails(g_inner, s_inner, vocab)
    return True


@dataclass(frozen=True)
class QuestionPool:
    """Deduplicated candidate questions for one context, polar first."""

    questions: tuple[Question, ...]

    def __len__(self) -> int:
        return len(self.questions)

    def __iter__(self):
        return iter(self.questions)

    def __getitem__(self, i: int) -> Question:
        return self.questions[i]

    @property
    def polar_questions(self) -> tuple[PolarQuestion, ...]:
        return tuple(q for q in self.questions if q.kind == "polar")

    @property
    def what_questions(self) -> tuple[WhatQuestion, ...]:
        return tuple(q for q in self.questions if q.kind == "what")

    def by_text(self) -> dict[str, Question]:
        return {q.text: q for q in self.questions}

    def dump(self) -> str:
        """Candidate listing: one question per line, text / kind / scene ids."""
        lines = []
        for q in self.questions:
            ids = ",".join(str(i) for i in sorted(q.scene_indices))
            lines.append(f"{q.text}\t{q.kind}\t{ids}")
        return "\n".join(lines) + "\n"


def build_pool(
    context: Context,
    vocab: AttributeVocabulary = DEFAULT_VOCAB,
    captions_per_scene: int = 8,
    include_what: bool = False,
    full_caption_mode: bool = False,
) -> QuestionPool:
    """Mint the candidate pool from the context's enumerable captions.

    Per scene, the captions_per_scene most probable captions are parsed;
    each NP subtree (including synthetic stripped copies) becomes a polar
    question, along with its generic-noun widening ("a red square" also
    yields "a red shape"). full_caption_mode keeps only the root NP of each
    caption, unwidened. Duplicates by text are merged, unioning provenance.
    """
    if captions_per_scene < 1:
        raise ValueError("captions_per_scene must be >= 1")
    polar: dict[tuple[str, ...], PolarQuestion] = {}
    what: dict[tuple[str, ...], WhatQuestion] = {}

    def add_polar(q: PolarQuestion, tag: frozenset) -> None:
        prev = polar.get(q.tokens)
        if prev is not None:
            q = PolarQuestion(
                tokens=q.tokens,
                predicate=q.predicate,
                provenance=prev.provenance | tag,
            )
        polar[q.tokens] = q

    for scene_index, scene in enumerate(context.scenes):
        support = caption_support(scene, vocab)[:captions_per_scene]
        for caption_rank, (tokens, _) in enumerate(support):
            tree = parse(tokens, vocab)
            tag = frozenset({(scene_index, caption_rank)})
            if full_caption_mode:
                nps = [tree.children[0]]
            else:
                nps = np_subtrees(tree)
            for np in nps:
                q = polar_from_np(np, vocab, tag)
                add_polar(q, tag)
                if not full_caption_mode:
                    widened = generalize_predicate(q.predicate, vocab)
                    if widened is not None:
                        add_polar(polar_from_predicate(widened, vocab, tag), tag)
            if include_what:
                for wq in what_from_caption(tree, vocab, tag):
                    prev = what.get(wq.tokens)
                    if prev is not None:
                        wq = WhatQuestion(
                            tokens=wq.tokens,
                            nn=wq.nn,
                            vbg=wq.vbg,
                            provenance=prev.provenance | tag,
                        )
                    what[wq.tokens] = wq
    return QuestionPool(questions=tuple(polar.values()) + tuple(what.values()))
