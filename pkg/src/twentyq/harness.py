"""Batch simulation and metric reproduction.

Winning-rate curves with normal-approximation confidence intervals, the
entropy-after-one-question table, the stopping-threshold sweep, and the
polar-vs-what comparison. Paired designs reuse per-game seeds, which pins
(context, target) across arms; pairing is verified by hashing them.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from twentyq._seeds import derive_seed
from twentyq.belief import entropy, init_uniform
from twentyq.engine import GameConfig, Transcript, run_game, write_transcripts
from twentyq.scenes import context_to_record


def proportion_ci(p: float, n: int) -> tuple[float, float]:
    """95% normal-approximation interval, clipped to [0, 1]."""
    p = float(p)
    half = 1.96 * math.sqrt(p * (1.0 - p) / n)
    return max(0.0, p - half), min(1.0, p + half)


def mean_ci(values) -> tuple[float, float, float, float]:
    """(mean, std, lo, hi) with a normal-approximation 95% interval."""
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    half = 1.96 * std / math.sqrt(len(arr)) if len(arr) > 1 else 0.0
    return mean, std, mean - half, mean + half


def _pairing_digest(transcripts) -> str:
    """Hash of the (context, target) sequence, for cross-arm pairing checks."""
    h = hashlib.sha256()
    for t in transcripts:
        record = json.dumps(context_to_record(t.context), sort_keys=True)
        h.update(record.encode("utf-8"))
        h.update(f":{t.target_id};".encode("utf-8"))
    return h.hexdigest()


@dataclass(frozen=True)
class CurvePoint:
    t: int
    win_rate: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class BatchResult:
    n_games: int
    curve: tuple[CurvePoint, ...]
    win_rate: float
    win_ci: tuple[float, float]
    mean_questions: float
    pairing_digest: str
    transcripts: tuple[Transcript, ...]

    def win_at(self, t: int) -> CurvePoint:
        return self.curve[min(t, len(self.curve) - 1)]

    def curve_csv(self) -> str:
        lines = ["t,win_rate,ci_lo,ci_hi"]
        for p in self.curve:
            lines.append(f"{p.t},{p.win_rate:.6f},{p.ci_lo:.6f},{p.ci_hi:.6f}")
        return "\n".join(lines) + "\n"


def game_seeds(base_seed: int, n_games: int) -> list[int]:
    """Per-game seeds; arms sharing base_seed share (context, target) pairs."""
    return [derive_seed(base_seed, "game", i) for i in range(n_games)]


def simulate_batch(
    n_games: int,
    config: GameConfig,
    context_mode: str | None = None,
    seed: int = 0,
    transcript_path: str | None = None,
    answer_model=None,
    interpret_model=None,
) -> BatchResult:
    """Run n_games under per-game derived seeds and aggregate the win curve.

    The curve point at t is the fraction of games whose posterior argmax
    after t questions equals the target, with the posterior frozen once a
    game stops early.
    """
    if n_games < 1:
        raise ValueError("n_games must be >= 1")
    if context_mode is not None:
        config = replace(config, context_mode=context_mode)
    transcripts: list[Transcript] = []
    for game_seed in game_seeds(seed, n_games):
        transcripts.append(
            run_game(
                replace(config, seed=game_seed),
                answer_model=answer_model,
                interpret_model=interpret_model,
            )
        )
    horizon = config.max_questions
    wins_at = np.zeros(horizon + 1, dtype=np.int64)
    for t in transcripts:
        traj = t.posterior_trajectory()
        for step in range(horizon + 1):
            posterior = traj[min(step, len(traj) - 1)]
            if int(np.argmax(posterior)) == t.target_id:
                wins_at[step] += 1
    curve = []
    for step in range(horizon + 1):
        p = wins_at[step] / n_games
        lo, hi = proportion_ci(p, n_games)
        curve.append(CurvePoint(t=step, win_rate=float(p), ci_lo=lo, ci_hi=hi))
    final_p = float(np.mean([t.win for t in transcripts]))
    result = BatchResult(
        n_games=n_games,
        curve=tuple(curve),
        win_rate=final_p,
        win_ci=proportion_ci(final_p, n_games),
        mean_questions=float(np.mean([t.n_questions for t in transcripts])),
        pairing_digest=_pairing_digest(transcripts),
        transcripts=tuple(transcripts),
    )
    if transcript_path is not None:
        write_transcripts(transcript_path, transcripts)
    return result


@dataclass(frozen=True)
class EntropyStat:
    mean: float
    std: float
    ci_lo: float
    ci_hi: float
    n: int


def entropy_after_one(
    strategy: str,
    context_mode: str,
    n_games: int = 1000,
    seed: int = 0,
    k: int = 10,
    epsilon: float = 0.0,
) -> EntropyStat:
    """Mean belief entropy (bits) after exactly one question from uniform."""
    config = GameConfig(
        k=k,
        max_questions=1,
        entropy_threshold_bits=1.0,
        strategy=strategy,
        answerer="oracle",
        epsilon=epsilon,
        context_mode=context_mode,
    )
    values = []
    for game_seed in game_seeds(seed, n_games):
        t = run_game(replace(config, seed=game_seed))
        if not t.turns:
            raise RuntimeError("game stopped before asking its one question")
        values.append(t.turns[0].entropy_bits)
    mean, std, lo, hi = mean_ci(values)
    return EntropyStat(mean=mean, std=std, ci_lo=lo, ci_hi=hi, n=n_games)


def table1(n_games: int = 1000, seed: int = 0, k: int = 10) -> list[dict]:
    """Entropy-after-one-question table: context effects plus the binary bound."""
    baseline = entropy(init_uniform(k), "bits")
    rows = [
        {
            "row": "uniform_no_questions",
            "mean": baseline,
            "std": 0.0,
            "ci_lo": baseline,
            "ci_hi": baseline,
            "n": 0,
        }
    ]
    for name, strategy, mode in (
        ("random_context_eig", "eig", "random"),
        ("split_context_eig", "eig", "split"),
        ("binary_search", "binary_search_oracle", "random"),
    ):
        stat = entropy_after_one(strategy, mode, n_games=n_games, seed=seed, k=k)
        rows.append(
            {
                "row": name,
                "mean": stat.mean,
                "std": stat.std,
                "ci_lo": stat.ci_lo,
                "ci_hi": stat.ci_hi,
                "n": stat.n,
            }
        )
    return rows


def table1_csv(rows: list[dict]) -> str:
    lines = ["row,mean_entropy_bits,std,ci_lo,ci_hi,n"]
    for r in rows:
        lines.append(
            f"{r['row']},{r['mean']:.6f},{r['std']:.6f},{r['ci_lo']:.6f},{r['ci_hi']:.6f},{r['n']}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepRow:
    threshold_bits: float
    mean_questions: float
    win_rate: float
    win_ci: tuple[float, float]
    pairing_digest: str


def threshold_sweep(
    thresholds,
    config: GameConfig,
    n_games: int = 1000,
    seed: int = 0,
) -> list[SweepRow]:
    """Accuracy-efficiency tradeoff: one row per threshold, paired seeds."""
    thresholds = list(thresholds)
    if thresholds != sorted(thresholds, reverse=True):
        raise ValueError("thresholds must be sorted descending")
    rows = []
    for threshold in thresholds:
        batch = simulate_batch(
            n_games, replace(config, entropy_threshold_bits=threshold), seed=seed
        )
        rows.append(
            SweepRow(
                threshold_bits=threshold,
                mean_questions=batch.mean_questions,
                win_rate=batch.win_rate,
                win_ci=batch.win_ci,
                pairing_digest=batch.pairing_digest,
            )
        )
    return rows


def sweep_csv(rows: list[SweepRow]) -> str:
    lines = ["threshold_bits,mean_questions,win_rate,ci_lo,ci_hi"]
    for r in rows:
        lines.append(
            f"{r.threshold_bits},{r.mean_questions:.4f},{r.win_rate:.6f},"
            f"{r.win_ci[0]:.6f},{r.win_ci[1]:.6f}"
        )
    return "\n".join(lines) + "\n"


def relation_rich_config(**overrides) -> GameConfig:
    """Default comparison setup: k=25, every scene relation-bearing, 20 questions.

    Noise 0.15 keeps the 20-question budget binding; near zero noise both
    arms saturate at a 100% win rate and the comparison says nothing.
    """
    base = dict(
        k=25,
        max_questions=20,
        entropy_threshold_bits=0.0,
        strategy="eig",
        answerer="oracle",
        epsilon=0.15,
        context_mode="random",
        min_objects=2,
        max_objects=3,
        relation_prob=1.0,
    )
    base.update(overrides)
    return GameConfig(**base)


@dataclass(frozen=True)
class WhatComparison:
    polar_win: float
    polar_ci: tuple[float, float]
    what_win: float
    what_ci: tuple[float, float]
    n_games: int
    paired: bool


def compare_what(
    config: GameConfig | None = None,
    n_games: int = 1000,
    seed: int = 0,
) -> WhatComparison:
    """Paired win rates at the 20-question budget, polar-only vs polar+what."""
    if config is None:
        config = relation_rich_config()
    polar = simulate_batch(n_games, replace(config, include_what=False), seed=seed)
    withwhat = simulate_batch(n_games, replace(config, include_what=True), seed=seed)
    if polar.pairing_digest != withwhat.pairing_digest:
        raise RuntimeError("comparison arms diverged: unequal (context, target) pairs")
    t = config.max_questions
    p_point = polar.win_at(t)
    w_point = withwhat.win_at(t)
    return WhatComparison(
        polar_win=p_point.win_rate,
        polar_ci=(p_point.ci_lo, p_point.ci_hi),
        what_win=w_point.win_rate,
        what_ci=(w_point.ci_lo, w_point.ci_hi),
        n_games=n_games,
        paired=True,
    )


def compare_csv(result: WhatComparison) -> str:
    lines = ["arm,win_rate,ci_lo,ci_hi,n"]
    lines.append(
        f"polar_only,{result.polar_win:.6f},{result.polar_ci[0]:.6f},"
        f"{result.polar_ci[1]:.6f},{result.n_games}"
    )
    lines.append(
        f"polar_and_what,{result.what_win:.6f},{result.what_ci[0]:.6f},"
        f"{result.what_ci[1]:.6f},{result.n_games}"
    )
    return "\n".join(lines) + "\n"
