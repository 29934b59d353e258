"""Scoring-kernel benchmark: compiled extension vs numpy fallback.

Times expected_surprisal_many on identical random likelihood stacks,
checks the two backends agree, and prints per-call latency plus speedup.

    python3 benchmarks/bench_eig.py
    python3 benchmarks/bench_eig.py --questions 2048 --answers 4 --scenes 100
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from twentyq import _eig_fallback

try:
    from twentyq import _eigcore
except ImportError:
    _eigcore = None

DEFAULT_SHAPES = ((64, 3, 10), (512, 3, 25), (2048, 4, 100))


def make_workload(n_questions: int, n_answers: int, n_scenes: int, seed: int):
    rng = np.random.default_rng(seed)
    stack = rng.random((n_questions, n_answers, n_scenes))
    stack /= stack.sum(axis=1, keepdims=True)  # each scene column is an answer dist
    prior = rng.random(n_scenes)
    prior /= prior.sum()
    return np.ascontiguousarray(prior), np.ascontiguousarray(stack)


def best_of(kernel, prior: np.ndarray, stack: np.ndarray, repeats: int):
    out = np.empty(stack.shape[0], dtype=np.float64)
    kernel.expected_surprisal_many(prior, stack, out)  # warmup
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        kernel.expected_surprisal_many(prior, stack, out)
        best = min(best, time.perf_counter() - t0)
    return best, out.copy()


def run_shape(n_questions: int, n_answers: int, n_scenes: int, repeats: int, seed: int):
    prior, stack = make_workload(n_questions, n_answers, n_scenes, seed)
    t_pure, out_pure = best_of(_eig_fallback, prior, stack, repeats)
    row = {
        "shape": f"{n_questions}x{n_answers}x{n_scenes}",
        "pure_us": t_pure * 1e6,
        "pure_us_per_q": t_pure * 1e6 / n_questions,
    }
    if _eigcore is not None:
        t_comp, out_comp = best_of(_eigcore, prior, stack, repeats)
        drift = float(np.max(np.abs(out_comp - out_pure)))
        if drift > 1e-12:
            raise SystemExit(f"backends disagree by {drift:.3e} on {row['shape']}")
        row["compiled_us"] = t_comp * 1e6
        row["compiled_us_per_q"] = t_comp * 1e6 / n_questions
        row["speedup"] = t_pure / t_comp
    return row


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--questions", type=int, default=None)
    parser.add_argument("--answers", type=int, default=3)
    parser.add_argument("--scenes", type=int, default=25)
    parser.add_argument("--repeats", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if args.questions is not None:
        shapes = ((args.questions, args.answers, args.scenes),)
    else:
        shapes = DEFAULT_SHAPES

    if _eigcore is None:
        print("compiled extension not built; timing the fallback only")
        header = f"{'shape (q x a x y)':>18} {'pure us':>10}"
    else:
        header = (
            f"{'shape (q x a x y)':>18} {'pure us':>10} {'compiled us':>12} {'speedup':>8}"
        )
    print(header)
    for shape in shapes:
        row = run_shape(*shape, repeats=args.repeats, seed=args.seed)
        if "speedup" in row:
            print(
                f"{row['shape']:>18} {row['pure_us']:>10.1f} "
                f"{row['compiled_us']:>12.1f} {row['speedup']:>7.1f}x"
            )
        else:
            print(f"{row['shape']:>18} {row['pure_us']:>10.1f}")


if __name__ == "__main__":
    main()
