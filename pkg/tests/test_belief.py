"""Belief vectors: init, conditioning, entropy, contradiction handling."""

import math

import numpy as np
import pytest

from twentyq.answerers import OracleAnswerer, question_from_tokens
from twentyq.belief import (
    ContradictionError,
    entropy,
    init_from_description,
    init_uniform,
    likelihood_matrix,
    likelihood_vector,
    update,
)
from twentyq.scenes import Context, Scene, SceneObject


def scene_of(*pairs):
    objs = tuple(SceneObject(i, c, s) for i, (c, s) in enumerate(pairs))
    return Scene(objects=objs, relations=())


def ask(text):
    return question_from_tokens(tuple(text.lower().rstrip("?").split()))


# one red square, three blue circles: "is there a red square" isolates scene 0
FOUR = Context(
    scenes=(
        scene_of(("red", "square")),
        scene_of(("blue", "circle")),
        scene_of(("blue", "circle"), ("green", "triangle")),
        scene_of(("yellow", "circle")),
    )
)
RED_SQUARE_Q = ask("is there a red square")


class TestInit:
    def test_uniform(self):
        b = init_uniform(10)
        assert b.shape == (10,)
        assert np.allclose(b, 0.1)

    def test_uniform_rejects_degenerate_game(self):
        with pytest.raises(ValueError):
            init_uniform(1)


class TestUpdate:
    def test_noise_free_yes_isolates_unique_satisfier(self):
        post = update(init_uniform(4), FOUR, RED_SQUARE_Q, "yes", OracleAnswerer())
        assert np.allclose(post, [1.0, 0.0, 0.0, 0.0])

    def test_noisy_yes_hand_value(self):
        # yes-likelihoods (0.9, 0.1, 0.1, 0.1) over a uniform prior
        post = update(
            init_uniform(4), FOUR, RED_SQUARE_Q, "yes", OracleAnswerer(epsilon=0.1)
        )
        expected = np.array([0.9, 0.1, 0.1, 0.1]) / 1.2
        assert np.allclose(post, expected)
        assert post[0] == pytest.approx(0.75)
        assert post[1] == pytest.approx(1.0 / 12.0)

    def test_na_is_identity(self):
        prior = np.array([0.4, 0.3, 0.2, 0.1])
        post = update(prior, FOUR, RED_SQUARE_Q, "na", OracleAnswerer(epsilon=0.1))
        assert np.array_equal(post, prior)
        assert post is not prior

    def test_returns_fresh_vector(self):
        prior = init_uniform(4)
        before = prior.copy()
        update(prior, FOUR, RED_SQUARE_Q, "yes", OracleAnswerer())
        assert np.array_equal(prior, before)

    def test_update_order_commutes(self):
        model = OracleAnswerer(epsilon=0.2)
        q2 = ask("is there a circle")
        a = update(init_uniform(4), FOUR, RED_SQUARE_Q, "yes", model)
        a = update(a, FOUR, q2, "no", model)
        b = update(init_uniform(4), FOUR, q2, "no", model)
        b = update(b, FOUR, RED_SQUARE_Q, "yes", model)
        assert np.allclose(a, b, atol=1e-9)

    def test_contradiction_names_question_and_answer(self):
        q = ask("is there a circle")
        prior = np.array([1.0, 0.0, 0.0, 0.0])  # scene 0 has no circle
        with pytest.raises(ContradictionError) as exc:
            update(prior, FOUR, q, "yes", OracleAnswerer())
        assert exc.value.question_text == q.text
        assert exc.value.answer == "yes"
        assert "Is there a circle?" in str(exc.value)
        assert "yes" in str(exc.value)

    def test_contradiction_is_a_value_error(self):
        assert issubclass(ContradictionError, ValueError)

    def test_unsupported_answer_rejected(self):
        with pytest.raises(ValueError, match="support"):
            update(init_uniform(4), FOUR, RED_SQUARE_Q, "maybe", OracleAnswerer())

    def test_noise_keeps_all_scenes_alive(self):
        model = OracleAnswerer(epsilon=0.1)
        post = update(init_uniform(4), FOUR, RED_SQUARE_Q, "no", model)
        assert (post > 0.0).all()
        assert post.sum() == pytest.approx(1.0)


class TestLikelihoods:
    def test_vector_matches_model(self):
        vec = likelihood_vector(RED_SQUARE_Q, "yes", FOUR, OracleAnswerer(epsilon=0.1))
        assert np.allclose(vec, [0.9, 0.1, 0.1, 0.1])

    def test_matrix_rows_follow_answer_support(self):
        mat = likelihood_matrix(RED_SQUARE_Q, FOUR, OracleAnswerer(epsilon=0.1))
        support = RED_SQUARE_Q.answer_support()
        assert mat.shape == (len(support), 4)
        for i, a in enumerate(support):
            assert np.allclose(
                mat[i], likelihood_vector(RED_SQUARE_Q, a, FOUR, OracleAnswerer(epsilon=0.1))
            )

    def test_matrix_columns_sum_to_one(self):
        mat = likelihood_matrix(RED_SQUARE_Q, FOUR, OracleAnswerer(epsilon=0.3))
        assert np.allclose(mat.sum(axis=0), 1.0)


class TestEntropy:
    def test_uniform_entropy(self):
        assert entropy(init_uniform(10)) == pytest.approx(math.log(10.0))
        assert entropy(init_uniform(10), unit="bits") == pytest.approx(math.log2(10.0))

    def test_point_mass_is_zero(self):
        assert entropy(np.array([1.0, 0.0, 0.0])) == 0.0

    def test_never_negative_at_near_point_mass(self):
        b = np.array([1.0 - 1e-16, 1e-16, 0.0])
        assert entropy(b) >= 0.0

    def test_fair_coin_is_one_bit(self):
        assert entropy(np.array([0.5, 0.5]), unit="bits") == pytest.approx(1.0)

    def test_unknown_unit_rejected(self):
        with pytest.raises(ValueError):
            entropy(init_uniform(4), unit="trits")


class TestInitFromDescription:
    def test_unique_satisfier_gets_full_mass(self):
        post = init_from_description(FOUR, "a red square")
        assert np.allclose(post, [1.0, 0.0, 0.0, 0.0])

    def test_shared_caption_splits_by_likelihood(self):
        ctx = Context(
            scenes=(scene_of(("blue", "circle")), scene_of(("blue", "circle")))
        )
        post = init_from_description(ctx, "a blue circle")
        assert np.allclose(post, [0.5, 0.5])

    def test_ungrammatical_falls_back_to_uniform(self):
        post = init_from_description(FOUR, "square red a")
        assert np.allclose(post, 0.25)

    def test_unproducible_description_falls_back_to_uniform(self):
        post = init_from_description(FOUR, "a purple hexagon")
        assert np.allclose(post, 0.25)

    def test_accepts_token_list(self):
        post = init_from_description(FOUR, ["a", "red", "square"])
        assert np.allclose(post, [1.0, 0.0, 0.0, 0.0])

    def test_generic_description_weights_simpler_scenes(self):
        # "a circle" is likelier from a one-object scene than a two-object one
        post = init_from_description(FOUR, "a circle")
        assert post[0] == 0.0
        assert post[1] == post[3]
        assert post[2] < post[1]
        assert post.sum() == pytest.approx(1.0)
