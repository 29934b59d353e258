"""HTTP game service: the question engine plays against a human answerer.

All routes live under /v1/. Sessions are in-memory, guarded by per-game
locks, and expire after 30 idle minutes (clock injectable for tests).
Belief internals (posterior, entropy, per-question scores) are exposed only
when the app is created with debug=True. Answer submissions accept an
idempotency key; resubmitting a key replays the original response byte for
byte instead of consuming a second turn.
"""

from __future__ import annotations

import json
import random
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from twentyq.belief import ContradictionError
from twentyq.engine import (
    DuplicateSubmissionError,
    GameConfig,
    GameSession,
    StateError,
)
from twentyq.scenes import render_spec

SESSION_TTL_SECONDS = 30 * 60
API_PREFIX = "/v1"


class ApiError(Exception):
    """Structured 4xx failure: {"error": {"code", "message"}}."""

    def __init__(self, status_code: int, code: str, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.message = message


class CreateGameRequest(BaseModel):
    k: int = 10
    strategy: str = "eig"
    include_what: bool = False
    epsilon: float = 0.01
    entropy_threshold_bits: float = 1.0
    max_questions: int = 20
    context_mode: str = "random"
    describe: bool = False
    seed: int | None = None


class AnswerRequest(BaseModel):
    answer: str
    idempotency_key: str | None = None


class DescriptionRequest(BaseModel):
    text: str


@dataclass
class _Entry:
    session: GameSession
    last_access: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    answer_cache: dict[str, str] = field(default_factory=dict)
    transcript_bytes: bytes | None = None
    logged: bool = False


def _state_payload(game_id: str, session: GameSession, debug: bool) -> dict:
    payload = {
        "game_id": game_id,
        "status": session.status,
        "k": session.context.k,
        # the scene the human answers for; the selector itself never sees it
        "target_id": session.target_id,
        "strategy": session.config.strategy,
        "include_what": session.config.include_what,
        "turn": len(session.turns),
        "max_questions": session.config.max_questions,
        "scenes": [render_spec(s) for s in session.context.scenes],
        "question": None,
        "guess": None,
    }
    q = session.current_question
    if q is not None:
        payload["question"] = {
            "turn": len(session.turns) + 1,
            "text": q.text,
            "kind": q.kind,
            "answers": list(q.answer_support(session.vocab)),
        }
    if session.status == "finished":
        payload["guess"] = {
            "scene_id": session.guess_id,
            "stop_reason": session.stop_reason,
        }
    if debug:
        ranked = sorted(
            session.candidate_scores(), key=lambda s: (s.expected_surprisal, s.question.text)
        )
        payload["debug"] = {
            "posterior": [f"{p:.6f}" for p in session.belief.tolist()],
            "entropy_bits": f"{session.entropy_bits():.6f}",
            "top_questions": [
                {"text": s.question.text, "eig_bits": f"{s.eig_bits:.6f}"}
                for s in ranked[:5]
            ],
        }
    return payload


def create_app(
    debug: bool = False,
    clock=None,
    ttl_seconds: float = SESSION_TTL_SECONDS,
    seed: int | None = None,
    transcript_log: str | None = None,
) -> FastAPI:
    """Build the service app; clock/ttl/seed are injectable for tests."""
    app = FastAPI(title="twentyq", docs_url=None, redoc_url=None)
    # the browser client may be served from any static host
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    now = clock if clock is not None else time.monotonic
    store: dict[str, _Entry] = {}
    store_lock = threading.Lock()
    id_rng = random.Random(seed)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"error": {"code": "invalid_request", "message": str(exc.errors())}},
        )

    def _purge() -> None:
        cutoff = now() - ttl_seconds
        with store_lock:
            for game_id in [g for g, e in store.items() if e.last_access < cutoff]:
                del store[game_id]

    def _get(game_id: str) -> _Entry:
        _purge()
        with store_lock:
            entry = store.get(game_id)
        if entry is None:
            raise ApiError(404, "unknown_game", f"no active game {game_id!r}")
        entry.last_access = now()
        return entry

    def _log_if_finished(entry: _Entry) -> None:
        if transcript_log is None or not entry.session.finished or entry.logged:
            return
        record = entry.session.build_transcript().to_record()
        with store_lock:
            with open(transcript_log, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        entry.logged = True

    @app.post(f"{API_PREFIX}/games", status_code=201)
    def create_game(req: CreateGameRequest):
        if req.strategy == "binary_search_oracle":
            raise ApiError(
                422,
                "invalid_config",
                "binary_search_oracle needs ground truth and cannot be played over HTTP",
            )
        game_seed = req.seed if req.seed is not None else id_rng.getrandbits(63)
        try:
            config = GameConfig(
                k=req.k,
                max_questions=req.max_questions,
                entropy_threshold_bits=req.entropy_threshold_bits,
                strategy=req.strategy,
                answerer="external",
                epsilon=req.epsilon,
                include_what=req.include_what,
                initial_description_mode="provided" if req.describe else "none",
                seed=game_seed,
                context_mode=req.context_mode,
            )
            session = GameSession(config)
        except ValueError as exc:
            raise ApiError(422, "invalid_config", str(exc))
        game_id = uuid.UUID(int=id_rng.getrandbits(128)).hex
        with store_lock:
            store[game_id] = _Entry(session=session, last_access=now())
        _purge()
        return _state_payload(game_id, session, debug)

    @app.get(f"{API_PREFIX}/games/{{game_id}}")
    def get_game(game_id: str):
        entry = _get(game_id)
        with entry.lock:
            return _state_payload(game_id, entry.session, debug)

    @app.post(f"{API_PREFIX}/games/{{game_id}}/answers")
    def post_answer(game_id: str, req: AnswerRequest):
        entry = _get(game_id)
        with entry.lock:
            key = req.idempotency_key
            if key is not None and key in entry.answer_cache:
                return Response(
                    content=entry.answer_cache[key], media_type="application/json"
                )
            try:
                entry.session.submit_answer(req.answer, idempotency_key=key)
            except StateError as exc:
                raise ApiError(409, "wrong_state", str(exc))
            except DuplicateSubmissionError as exc:
                raise ApiError(409, "duplicate_submission", str(exc))
            except ContradictionError as exc:
                raise ApiError(422, "contradiction", str(exc))
            except ValueError as exc:
                raise ApiError(422, "invalid_answer", str(exc))
            payload = _state_payload(game_id, entry.session, debug)
            # render once so a replayed key returns the original bytes
            body = json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
            if key is not None:
                entry.answer_cache[key] = body
            _log_if_finished(entry)
            return Response(content=body, media_type="application/json")

    @app.post(f"{API_PREFIX}/games/{{game_id}}/description")
    def post_description(game_id: str, req: DescriptionRequest):
        entry = _get(game_id)
        with entry.lock:
            try:
                entry.session.provide_description(req.text)
            except StateError as exc:
                raise ApiError(409, "wrong_state", str(exc))
            except ValueError as exc:
                raise ApiError(422, "invalid_description", str(exc))
            _log_if_finished(entry)
            return _state_payload(game_id, entry.session, debug)

    @app.get(f"{API_PREFIX}/games/{{game_id}}/transcript")
    def get_transcript(game_id: str):
        entry = _get(game_id)
        with entry.lock:
            if not entry.session.finished:
                raise ApiError(409, "game_in_progress", "transcript available once finished")
            if entry.transcript_bytes is None:
                record = entry.session.build_transcript().to_record()
                entry.transcript_bytes = json.dumps(record, sort_keys=True).encode("utf-8")
            return Response(
                content=entry.transcript_bytes, media_type="application/json"
            )

    return app
