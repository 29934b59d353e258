"""Scene domain: generation modes, captions, ground-truth evaluation."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from twentyq.answerers import question_from_tokens
from twentyq.scenes import (
    CapacityError,
    Context,
    DEFAULT_VOCAB,
    Relation,
    Scene,
    SceneObject,
    caption,
    caption_likelihood,
    caption_support,
    context_from_record,
    context_to_record,
    describe_scene,
    eval_polar,
    eval_what,
    gen_context,
    read_contexts,
    render_spec,
    scene_from_record,
    scene_to_record,
    write_contexts,
)


def scene_of(*pairs, relations=()):
    objs = tuple(SceneObject(i, c, s) for i, (c, s) in enumerate(pairs))
    return Scene(objects=objs, relations=tuple(relations))


RED_SQUARE = scene_of(("red", "square"))
TOUCHING = scene_of(
    ("red", "square"), ("blue", "circle"), relations=[Relation(0, "touching", 1)]
)


def ask(text):
    return question_from_tokens(tuple(text.lower().rstrip("?").split()))


class TestVocabulary:
    def test_open_class_size(self):
        assert len(DEFAULT_VOCAB.colors) + len(DEFAULT_VOCAB.shapes) == 15

    def test_all_words_unique_and_lowercase(self):
        words = DEFAULT_VOCAB.all_words()
        assert len(set(words)) == len(words)
        assert all(w == w.lower() for w in words)

    def test_plurals(self):
        assert DEFAULT_VOCAB.plural_of("square") == "squares"
        assert DEFAULT_VOCAB.plural_of("cross") == "crosses"
        assert DEFAULT_VOCAB.singular_noun("squares") == "square"
        assert DEFAULT_VOCAB.singular_noun("shape") == "shape"
        assert DEFAULT_VOCAB.singular_noun("red") is None


class TestSceneInvariants:
    def test_object_ids_contiguous(self):
        with pytest.raises(ValueError):
            Scene(objects=(SceneObject(1, "red", "square"),))

    def test_relation_endpoints_validated(self):
        with pytest.raises(ValueError):
            Scene(
                objects=(SceneObject(0, "red", "square"),),
                relations=(Relation(0, "touching", 0),),
            )
        with pytest.raises(ValueError):
            Scene(
                objects=(SceneObject(0, "red", "square"),),
                relations=(Relation(0, "touching", 3),),
            )

    def test_signature_ignores_object_order(self):
        a = scene_of(("red", "square"), ("blue", "circle"))
        b = scene_of(("blue", "circle"), ("red", "square"))
        assert a.signature == b.signature

    def test_context_needs_two_scenes(self):
        with pytest.raises(ValueError):
            Context(scenes=(RED_SQUARE,))


class TestGenContext:
    def test_random_mode_size_and_determinism(self):
        a = gen_context(7, k=10, mode="random")
        b = gen_context(7, k=10, mode="random")
        assert a.k == 10
        assert a == b
        assert gen_context(8, k=10, mode="random") != a

    def test_split_mode_balances_square_circle(self):
        ctx = gen_context(7, k=10, mode="split")
        shapes = [{o.shape for o in s.objects} for s in ctx.scenes]
        assert shapes[:5] == [{"square"}] * 5
        assert shapes[5:] == [{"circle"}] * 5

    def test_split_mode_odd_k(self):
        ctx = gen_context(3, k=7, mode="split")
        counts = [next(iter({o.shape for o in s.objects})) for s in ctx.scenes]
        assert counts.count("square") == 4 and counts.count("circle") == 3

    def test_distinct_mode_unique_signatures(self):
        ctx = gen_context(5, k=25, mode="distinct")
        sigs = [s.signature for s in ctx.scenes]
        assert len(set(sigs)) == 25
        assert all(len(s.objects) == 1 and not s.relations for s in ctx.scenes)

    def test_distinct_capacity_error(self):
        with pytest.raises(CapacityError):
            gen_context(1, k=200, mode="distinct")
        gen_context(1, k=56, mode="distinct")

    def test_object_count_bounds(self):
        ctx = gen_context(11, k=30, mode="random", min_objects=2, max_objects=3)
        assert all(2 <= len(s.objects) <= 3 for s in ctx.scenes)

    def test_relations_need_two_objects(self):
        ctx = gen_context(13, k=40, mode="random", max_objects=1, relation_prob=1.0)
        assert all(not s.relations for s in ctx.scenes)
        rich = gen_context(13, k=40, mode="random", min_objects=2, relation_prob=1.0)
        assert all(s.relations for s in rich.scenes)

    def test_unknown_mode_and_small_k(self):
        with pytest.raises(ValueError):
            gen_context(1, k=10, mode="weird")
        with pytest.raises(ValueError):
            gen_context(1, k=1, mode="random")


class TestCaptions:
    def test_single_object_templates(self):
        texts = {" ".join(t) for t, _ in caption_support(RED_SQUARE)}
        assert texts == {"a red square", "a square"}

    def test_relational_template_present(self):
        texts = {" ".join(t) for t, _ in caption_support(TOUCHING)}
        assert "a red square touching a blue circle" in texts
        assert all("touching" not in " ".join(t) for t, _ in caption_support(RED_SQUARE))

    def test_support_probabilities_sum_to_one(self):
        for scene in (RED_SQUARE, TOUCHING, scene_of(("red", "square"), ("red", "square"))):
            total = sum(Fraction(p).limit_denominator(10**9) for _, p in caption_support(scene))
            assert math.isclose(float(total), 1.0, abs_tol=1e-12)

    def test_sampled_caption_true_of_scene(self):
        rng = random.Random(0)
        for seed in range(40):
            ctx = gen_context(rng.getrandbits(32), k=4, mode="random", relation_prob=0.5)
            for scene in ctx.scenes:
                cap = caption(scene, seed)
                assert caption_likelihood(cap.tokens, scene) > 0.0

    def test_caption_seed_determinism(self):
        assert caption(TOUCHING, 3).tokens == caption(TOUCHING, 3).tokens

    def test_caption_records_scene_index(self):
        assert caption(RED_SQUARE, 1, scene_index=4).scene_index == 4


class TestCaptionLikelihood:
    def test_two_template_scene(self):
        assert caption_likelihood(("a", "red", "square"), RED_SQUARE) == pytest.approx(0.5)

    def test_false_of_scene(self):
        assert caption_likelihood(("a", "red", "square"), scene_of(("blue", "circle"))) == 0.0

    def test_ungrammatical(self):
        assert caption_likelihood(("xyzzy",), RED_SQUARE) == 0.0
        assert caption_likelihood(("red", "a", "square"), RED_SQUARE) == 0.0


class TestEvalPolar:
    def test_simple_yes_no(self):
        assert eval_polar(RED_SQUARE, ask("Is there a red square?")) == "yes"
        assert eval_polar(RED_SQUARE, ask("Is there a blue circle?")) == "no"

    def test_generic_noun_matches_any_shape(self):
        assert eval_polar(RED_SQUARE, ask("Is there a red shape?")) == "yes"
        assert eval_polar(RED_SQUARE, ask("Is there a blue shape?")) == "no"
        assert eval_polar(RED_SQUARE, ask("Is there a shape?")) == "yes"

    def test_relational_binding(self):
        q = ask("Is there a red square touching a blue circle?")
        assert eval_polar(TOUCHING, q) == "yes"
        unrelated = scene_of(("red", "square"), ("blue", "circle"))
        assert eval_polar(unrelated, q) == "no"

    def test_relation_direction_matters(self):
        q = ask("Is there a blue circle touching a red square?")
        assert eval_polar(TOUCHING, q) == "no"

    def test_agrees_with_bruteforce_enumeration(self):
        # independent oracle: direct quantifier expansion over objects/relations
        def naive(scene, pred):
            def obj_ok(obj, p):
                if p.color is not None and obj.color != p.color:
                    return False
                return DEFAULT_VOCAB.is_generic_noun(p.shape) or obj.shape == p.shape

            def np_ok(p):
                for obj in scene.objects:
                    if not obj_ok(obj, p):
                        continue
                    if p.relation is None:
                        return True
                    verb, inner = p.relation
                    for r in scene.relations:
                        if (
                            r.subject_id == obj.id
                            and r.verb == verb
                            and obj_ok(scene.objects[r.object_id], inner)
                        ):
                            return True
                return False

            return "yes" if np_ok(pred) else "no"

        rng = random.Random(42)
        questions = [
            ask("Is there a red square?"),
            ask("Is there a square?"),
            ask("Is there a red shape?"),
            ask("Is there a red square touching a blue circle?"),
            ask("Is there a shape touching a blue circle?"),
            ask("Is there a gray pentagon?"),
        ]
        for _ in range(120):
            ctx = gen_context(rng.getrandbits(32), k=2, mode="random", relation_prob=0.6)
            for scene in ctx.scenes:
                for q in questions:
                    assert eval_polar(scene, q) == naive(scene, q.predicate)


class TestEvalWhat:
    def test_relation_lookup(self):
        q = question_from_tokens(("what", "is", "the", "square", "touching"))
        assert eval_what(TOUCHING, q) == "circle"

    def test_no_relation_returns_none(self):
        q = question_from_tokens(("what", "is", "the", "square", "touching"))
        assert eval_what(RED_SQUARE, q) is None

    def test_ambiguity_lowest_subject_id(self):
        scene = Scene(
            objects=(
                SceneObject(0, "red", "square"),
                SceneObject(1, "blue", "square"),
                SceneObject(2, "green", "circle"),
            ),
            relations=(Relation(1, "touching", 2), Relation(0, "touching", 1)),
        )
        q = question_from_tokens(("what", "is", "the", "square", "touching"))
        assert eval_what(scene, q) == "square"  # subject 0 beats subject 1


class TestRenderSpec:
    def test_single_primitive(self):
        spec = render_spec(RED_SQUARE)
        assert len(spec["items"]) == 1
        assert spec["items"][0]["fill"] == "red"
        assert spec["items"][0]["glyph"] == "square"
        assert spec["arrows"] == []

    def test_three_primitives(self):
        spec = render_spec(scene_of(("red", "square"), ("blue", "circle"), ("gray", "cross")))
        assert len(spec["items"]) == 3

    def test_relation_arrow(self):
        spec = render_spec(TOUCHING)
        assert spec["arrows"] == [{"from": 0, "to": 1, "label": "touching"}]


class TestSerialization:
    def test_scene_round_trip(self):
        for scene in (RED_SQUARE, TOUCHING):
            assert scene_from_record(scene_to_record(scene)) == scene

    def test_context_file_round_trip(self, tmp_path):
        ctxs = [gen_context(s, k=4, mode="random", relation_prob=0.5) for s in range(5)]
        path = tmp_path / "contexts.jsonl"
        write_contexts(str(path), ctxs)
        assert read_contexts(str(path)) == ctxs

    def test_describe_scene_mentions_everything(self):
        text = describe_scene(TOUCHING)
        assert "a red square" in text and "a blue circle" in text
        assert "touching" in text
