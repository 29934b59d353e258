"""HTTP service: routes, idempotent answers, expiry, debug gating."""

import json

import pytest
from fastapi.testclient import TestClient

from twentyq.answerers import OracleAnswerer
from twentyq.engine import GameConfig, GameSession, replay
from twentyq.service import SESSION_TTL_SECONDS, create_app


@pytest.fixture()
def client():
    return TestClient(create_app(seed=0))


def new_game(client, **overrides):
    body = {"seed": 1234, "epsilon": 0.0, **overrides}
    resp = client.post("/v1/games", json=body)
    assert resp.status_code == 201, resp.text
    return resp.json()


def shadow_session(state, **overrides):
    """Local mirror of a service game created with an explicit seed."""
    kwargs = dict(
        k=state["k"],
        strategy=state["strategy"],
        include_what=state["include_what"],
        answerer="external",
        max_questions=state["max_questions"],
        seed=1234,
        epsilon=0.0,
    )
    kwargs.update(overrides)
    return GameSession(GameConfig(**kwargs))


def truthful_answer(session):
    dist = OracleAnswerer().answer_dist(
        session.current_question, session.context.scenes[session.target_id]
    )
    return max(dist, key=dist.get)


def play_to_finish(client, state, **overrides):
    local = shadow_session(state, **overrides)
    game_id = state["game_id"]
    while state["status"] == "awaiting_answer":
        answer = truthful_answer(local)
        resp = client.post(f"/v1/games/{game_id}/answers", json={"answer": answer})
        assert resp.status_code == 200, resp.text
        state = resp.json()
        local.submit_answer(answer)
    return state, local


class TestCreateGame:
    def test_reports_initial_state(self, client):
        state = new_game(client)
        assert state["status"] == "awaiting_answer"
        assert state["k"] == 10
        assert len(state["scenes"]) == 10
        assert state["turn"] == 0
        q = state["question"]
        assert q["turn"] == 1
        assert q["kind"] == "polar"
        assert set(q["answers"]) == {"yes", "no", "na"}
        assert state["guess"] is None

    def test_designates_the_answerers_target(self, client):
        state = new_game(client)
        assert 0 <= state["target_id"] < state["k"]
        assert state["target_id"] == shadow_session(state).target_id
        again = client.get(f"/v1/games/{state['game_id']}").json()
        assert again["target_id"] == state["target_id"]

    def test_answers_cross_origin_preflight(self, client):
        resp = client.options(
            "/v1/games",
            headers={
                "Origin": "http://localhost:8080",
                "Access-Control-Request-Method": "POST",
            },
        )
        assert resp.status_code == 200
        assert resp.headers["access-control-allow-origin"] == "*"

    def test_scene_specs_are_drawable(self, client):
        state = new_game(client, k=4)
        for spec in state["scenes"]:
            assert spec["width"] > 0 and spec["height"] > 0
            for item in spec["items"]:
                assert {"id", "glyph", "fill", "x", "y"} <= set(item)

    def test_game_ids_unique(self, client):
        ids = {new_game(client)["game_id"] for _ in range(3)}
        assert len(ids) == 3

    def test_binary_search_rejected(self, client):
        resp = client.post("/v1/games", json={"strategy": "binary_search_oracle"})
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "invalid_config"

    def test_degenerate_k_rejected(self, client):
        resp = client.post("/v1/games", json={"k": 1})
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "invalid_config"

    def test_unknown_strategy_rejected(self, client):
        resp = client.post("/v1/games", json={"strategy": "dfs"})
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "invalid_config"

    def test_malformed_body_rejected(self, client):
        resp = client.post("/v1/games", json={"k": "ten"})
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "invalid_request"


class TestFetchGame:
    def test_round_trip(self, client):
        state = new_game(client)
        fetched = client.get(f"/v1/games/{state['game_id']}")
        assert fetched.status_code == 200
        assert fetched.json() == state

    def test_unknown_game_404(self, client):
        resp = client.get("/v1/games/deadbeef")
        assert resp.status_code == 404
        assert resp.json()["error"]["code"] == "unknown_game"


class TestAnswerFlow:
    def test_truthful_play_finds_target(self, client):
        state = new_game(client)
        final, local = play_to_finish(client, state)
        assert final["status"] == "finished"
        assert final["guess"]["scene_id"] == local.target_id
        assert final["guess"]["stop_reason"] == "threshold"

    def test_na_consumes_turn_without_information(self, client):
        state = new_game(client, max_questions=3)
        game_id = state["game_id"]
        for turn in (1, 2, 3):
            resp = client.post(f"/v1/games/{game_id}/answers", json={"answer": "na"})
            assert resp.status_code == 200
            state = resp.json()
            assert state["turn"] == turn
        assert state["status"] == "finished"
        assert state["guess"]["stop_reason"] == "max_questions"

    def test_invalid_answer_does_not_consume_turn(self, client):
        state = new_game(client)
        game_id = state["game_id"]
        resp = client.post(f"/v1/games/{game_id}/answers", json={"answer": "maybe"})
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "invalid_answer"
        after = client.get(f"/v1/games/{game_id}").json()
        assert after["turn"] == 0
        assert after["question"] == state["question"]

    def test_answer_after_finish_409(self, client):
        state = new_game(client, max_questions=0)
        assert state["status"] == "finished"
        resp = client.post(
            f"/v1/games/{state['game_id']}/answers", json={"answer": "yes"}
        )
        assert resp.status_code == 409
        assert resp.json()["error"]["code"] == "wrong_state"

    def test_contradiction_reported(self, client):
        # play truthfully to a point mass, then assert the opposite
        state = new_game(client, entropy_threshold_bits=0.0, max_questions=50)
        local = shadow_session(state, entropy_threshold_bits=0.0, max_questions=50)
        game_id = state["game_id"]
        while local.entropy_bits() > 0.0 and state["status"] == "awaiting_answer":
            answer = truthful_answer(local)
            state = client.post(
                f"/v1/games/{game_id}/answers", json={"answer": answer}
            ).json()
            local.submit_answer(answer)
        assert state["status"] == "awaiting_answer"
        lie = "no" if truthful_answer(local) == "yes" else "yes"
        resp = client.post(f"/v1/games/{game_id}/answers", json={"answer": lie})
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "contradiction"
        # the failed update must not consume the turn
        after = client.get(f"/v1/games/{game_id}").json()
        assert after["turn"] == state["turn"]


class TestIdempotency:
    def test_replay_returns_identical_bytes_without_consuming_turn(self, client):
        state = new_game(client)
        game_id = state["game_id"]
        body = {"answer": "na", "idempotency_key": f"{game_id}-t1"}
        first = client.post(f"/v1/games/{game_id}/answers", json=body)
        second = client.post(f"/v1/games/{game_id}/answers", json=body)
        assert first.status_code == second.status_code == 200
        assert first.content == second.content
        assert client.get(f"/v1/games/{game_id}").json()["turn"] == 1

    def test_fresh_key_advances(self, client):
        state = new_game(client)
        game_id = state["game_id"]
        client.post(
            f"/v1/games/{game_id}/answers",
            json={"answer": "na", "idempotency_key": "a"},
        )
        resp = client.post(
            f"/v1/games/{game_id}/answers",
            json={"answer": "na", "idempotency_key": "b"},
        )
        assert resp.json()["turn"] == 2

    def test_failed_submission_leaves_key_usable(self, client):
        state = new_game(client)
        game_id = state["game_id"]
        bad = client.post(
            f"/v1/games/{game_id}/answers",
            json={"answer": "maybe", "idempotency_key": "k"},
        )
        assert bad.status_code == 422
        good = client.post(
            f"/v1/games/{game_id}/answers",
            json={"answer": "na", "idempotency_key": "k"},
        )
        assert good.status_code == 200
        assert good.json()["turn"] == 1


class TestDescriptionFlow:
    def test_description_phase(self, client):
        state = new_game(client, describe=True)
        assert state["status"] == "awaiting_description"
        assert state["question"] is None
        game_id = state["game_id"]
        resp = client.post(
            f"/v1/games/{game_id}/description", json={"text": "a red square"}
        )
        assert resp.status_code == 200
        assert resp.json()["status"] in ("awaiting_answer", "finished")

    def test_second_description_409(self, client):
        state = new_game(client, describe=True)
        game_id = state["game_id"]
        client.post(f"/v1/games/{game_id}/description", json={"text": "a red square"})
        resp = client.post(
            f"/v1/games/{game_id}/description", json={"text": "a blue circle"}
        )
        assert resp.status_code == 409
        assert resp.json()["error"]["code"] == "wrong_state"

    def test_empty_description_422(self, client):
        state = new_game(client, describe=True)
        resp = client.post(
            f"/v1/games/{state['game_id']}/description", json={"text": "  "}
        )
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "invalid_description"

    def test_description_without_describe_mode_409(self, client):
        state = new_game(client)
        resp = client.post(
            f"/v1/games/{state['game_id']}/description", json={"text": "a red square"}
        )
        assert resp.status_code == 409


class TestTranscript:
    def test_unavailable_while_running(self, client):
        state = new_game(client)
        resp = client.get(f"/v1/games/{state['game_id']}/transcript")
        assert resp.status_code == 409
        assert resp.json()["error"]["code"] == "game_in_progress"

    def test_stable_bytes_and_replayable(self, client):
        state = new_game(client)
        final, _ = play_to_finish(client, state)
        game_id = state["game_id"]
        a = client.get(f"/v1/games/{game_id}/transcript")
        b = client.get(f"/v1/games/{game_id}/transcript")
        assert a.status_code == 200
        assert a.content == b.content
        record = json.loads(a.content)
        assert record["win"] is True
        assert replay(record) is True

    def test_log_file_written_once(self, tmp_path):
        log = tmp_path / "games.jsonl"
        client = TestClient(create_app(seed=0, transcript_log=str(log)))
        state = new_game(client)
        play_to_finish(client, state)
        client.get(f"/v1/games/{state['game_id']}/transcript")
        client.get(f"/v1/games/{state['game_id']}")
        lines = log.read_text().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["win"] is True


class TestExpiry:
    def test_idle_games_are_purged(self):
        fake_now = [0.0]
        client = TestClient(create_app(clock=lambda: fake_now[0], ttl_seconds=100.0))
        state = new_game(client)
        game_id = state["game_id"]
        fake_now[0] = 99.0
        assert client.get(f"/v1/games/{game_id}").status_code == 200
        # access refreshed the timer; idle past the ttl kills it
        fake_now[0] = 200.0
        assert client.get(f"/v1/games/{game_id}").status_code == 404

    def test_default_ttl_constant(self):
        assert SESSION_TTL_SECONDS == 1800


class TestDebugGating:
    def test_no_internals_by_default(self, client):
        state = new_game(client)
        assert "debug" not in state
        after = client.post(
            f"/v1/games/{state['game_id']}/answers", json={"answer": "na"}
        ).json()
        assert "debug" not in after

    def test_debug_app_exposes_belief(self):
        client = TestClient(create_app(debug=True, seed=0))
        state = new_game(client)
        dbg = state["debug"]
        assert len(dbg["posterior"]) == state["k"]
        assert dbg["posterior"][0] == "0.100000"
        assert dbg["entropy_bits"] == f"{3.321928:.6f}"
        assert 1 <= len(dbg["top_questions"]) <= 5
        for item in dbg["top_questions"]:
            float(item["eig_bits"])

    def test_debug_na_keeps_entropy(self):
        client = TestClient(create_app(debug=True, seed=0))
        state = new_game(client)
        after = client.post(
            f"/v1/games/{state['game_id']}/answers", json={"answer": "na"}
        ).json()
        assert after["debug"]["entropy_bits"] == state["debug"]["entropy_bits"]


class TestIsolation:
    def test_games_do_not_share_state(self, client):
        a = new_game(client)
        b = new_game(client, seed=77)
        client.post(f"/v1/games/{a['game_id']}/answers", json={"answer": "na"})
        assert client.get(f"/v1/games/{b['game_id']}").json()["turn"] == 0
        assert client.get(f"/v1/games/{a['game_id']}").json()["turn"] == 1
