"""Command-line entry points.

Subcommands cover batch simulation, the entropy table, the threshold sweep,
the polar-vs-what comparison, answer-classifier data/training/evaluation, an
interactive terminal game against a human answerer, and the HTTP service.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from twentyq.engine import GameConfig, GameSession
from twentyq.scenes import DEFAULT_VOCAB, describe_scene


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=10, help="scenes per context")
    parser.add_argument("--games", type=int, default=1000, help="number of games")
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    parser.add_argument(
        "--strategy",
        default="eig",
        choices=("eig", "random", "full_caption_eig", "binary_search_oracle"),
    )
    parser.add_argument(
        "--answerer", default="oracle", choices=("oracle", "heuristic", "learned")
    )
    parser.add_argument("--epsilon", type=float, default=0.01, help="answer noise rate")
    parser.add_argument(
        "--threshold-bits", type=float, default=1.0, help="stop below this entropy"
    )
    parser.add_argument(
        "--mode", default="random", choices=("random", "split", "distinct"),
        help="context generator mode",
    )


def _config_from(args: argparse.Namespace, **overrides) -> GameConfig:
    base = dict(
        k=args.k,
        entropy_threshold_bits=args.threshold_bits,
        strategy=args.strategy,
        answerer=args.answerer,
        epsilon=args.epsilon,
        context_mode=args.mode,
        seed=args.seed,
    )
    base.update(overrides)
    return GameConfig(**base)


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_simulate(args: argparse.Namespace) -> int:
    from twentyq import harness

    config = _config_from(
        args,
        max_questions=args.max_questions,
        include_what=args.what,
        initial_description_mode="provided" if args.describe else "none",
    )
    answer_model = None
    if config.answerer == "learned":
        from twentyq.answerers import ConfigurationError, LearnedAnswerer, load_model

        if not args.model:
            raise ConfigurationError(
                "--answerer learned needs --model WEIGHTS (see train-answerer)"
            )
        answer_model = LearnedAnswerer(load_model(args.model))
    result = harness.simulate_batch(
        args.games,
        config,
        seed=args.seed,
        transcript_path=args.out,
        answer_model=answer_model,
        interpret_model=answer_model,
    )
    print(
        f"games={result.n_games} strategy={config.strategy} "
        f"win_rate={result.win_rate:.4f} "
        f"ci=({result.win_ci[0]:.4f},{result.win_ci[1]:.4f}) "
        f"mean_questions={result.mean_questions:.2f}"
    )
    if args.curve_out:
        _write_or_print(result.curve_csv(), args.curve_out)
    if args.out:
        print(f"wrote {args.out}")
    return 0


def cmd_table1(args: argparse.Namespace) -> int:
    from twentyq import harness

    rows = harness.table1(n_games=args.games, seed=args.seed, k=args.k)
    _write_or_print(harness.table1_csv(rows), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    from twentyq import harness

    thresholds = [float(x) for x in args.thresholds.split(",")]
    config = _config_from(args, max_questions=args.max_questions)
    rows = harness.threshold_sweep(thresholds, config, n_games=args.games, seed=args.seed)
    _write_or_print(harness.sweep_csv(rows), args.out)
    return 0


def cmd_compare_what(args: argparse.Namespace) -> int:
    from twentyq import harness

    config = harness.relation_rich_config(
        k=args.k,
        epsilon=args.epsilon,
        entropy_threshold_bits=args.threshold_bits,
        seed=args.seed,
    )
    result = harness.compare_what(config, n_games=args.games, seed=args.seed)
    _write_or_print(harness.compare_csv(result), args.out)
    return 0


def cmd_gen_data(args: argparse.Namespace) -> int:
    from twentyq import answerers

    scenes = answerers.random_scenes(args.scenes, rng_seed=args.seed)
    report = answerers.gen_selfsup_data(
        scenes, negatives_per_positive=args.negatives, rng_seed=args.seed
    )
    answerers.write_dataset(args.out, report.pairs)
    print(
        f"pairs={len(report.pairs)} negatives={report.negatives} "
        f"false_negatives={report.false_negatives} "
        f"false_negative_rate={report.false_negative_rate:.4f}"
    )
    print(f"wrote {args.out}")
    return 0


def cmd_train_answerer(args: argparse.Namespace) -> int:
    from twentyq import answerers

    pairs = answerers.read_dataset(args.data)
    n_holdout = int(len(pairs) * args.holdout)
    train, heldout = pairs[n_holdout:], pairs[:n_holdout]
    model, losses = answerers.train_answer_model(
        train,
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch_size,
        rng_seed=args.seed,
        l2=args.l2,
        interactions=not args.no_interactions,
    )
    answerers.save_model(args.out, model)
    line = f"epochs={len(losses)} final_loss={losses[-1]:.6f}"
    if heldout:
        stats = answerers.evaluate(model, heldout)
        line += f" heldout_accuracy={stats['accuracy']:.4f}"
    print(line)
    print(f"wrote {args.out}")
    return 0


def cmd_eval_answerer(args: argparse.Namespace) -> int:
    from twentyq import answerers

    model = answerers.load_model(args.model)
    pairs = answerers.read_dataset(args.data)
    stats = answerers.evaluate(model, pairs)
    for key, count in sorted(stats.items()):
        print(f"{key}={count}")
    return 0


def cmd_play(args: argparse.Namespace) -> int:
    config = _config_from(
        args,
        answerer="external",
        include_what=args.what,
        initial_description_mode="provided" if args.describe else "none",
        max_questions=args.max_questions,
    )
    session = GameSession(config)
    print(f"Think of one of these {config.k} scenes (keep it secret):")
    for i, scene in enumerate(session.context.scenes):
        print(f"  {i}: {describe_scene(scene)}")
    if session.status == "awaiting_description":
        text = input("Describe your scene in a few words: ").strip()
        session.provide_description(text)
    while session.status == "awaiting_answer":
        question = session.current_question
        print(f"Q{len(session.turns) + 1}: {question.text}")
        allowed = question.answer_support()
        while True:
            raw = input(f"  answer {'/'.join(allowed)}: ").strip().lower()
            alias = {"y": "yes", "n": "no", "": "na", "n/a": "na"}
            answer = alias.get(raw, raw)
            if answer in allowed:
                break
            print("  unrecognized answer, try again")
        session.submit_answer(answer)
        print(f"  entropy now {session.entropy_bits():.3f} bits")
    guess = session.guess_id
    print(f"My guess: scene {guess}: {describe_scene(session.context.scenes[guess])}")
    verdict = input("Was I right? [y/n]: ").strip().lower()
    print("Good game." if verdict.startswith("y") else "Well played, you got me.")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from twentyq.service import create_app

    bind = args.bind or os.environ.get("TWENTYQ_BIND", "127.0.0.1:8000")
    host, _, port = bind.rpartition(":")
    debug = args.debug or os.environ.get("TWENTYQ_DEBUG", "") == "1"
    app = create_app(debug=debug)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twentyq",
        description="20-questions over grammar-described scenes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a batch of simulated games")
    _add_common(p)
    p.add_argument("--max-questions", type=int, default=20)
    p.add_argument("--what", action="store_true", help="include what-questions")
    p.add_argument("--describe", action="store_true", help="start from a description")
    p.add_argument("--out", default=None, help="transcript JSONL path")
    p.add_argument("--curve-out", default=None, help="win-curve CSV path")
    p.add_argument(
        "--model", default=None, help="trained weights, required for --answerer learned"
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table1", help="entropy after one question, by setup")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--games", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sweep", help="stopping-threshold sweep")
    _add_common(p)
    p.add_argument("--max-questions", type=int, default=20)
    p.add_argument("--thresholds", default="3.0,2.0,1.0,0.5,0.1")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare-what", help="polar-only vs polar+what win rates")
    p.add_argument("--k", type=int, default=25)
    p.add_argument("--games", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.15)
    p.add_argument("--threshold-bits", type=float, default=0.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare_what)

    p = sub.add_parser("gen-data", help="self-supervised answer-classifier data")
    p.add_argument("--scenes", type=int, default=1250)
    p.add_argument("--negatives", type=int, default=1, help="negatives per positive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train-answerer", help="fit the logistic answer classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--holdout", type=float, default=0.2)
    p.add_argument("--no-interactions", action="store_true")
    p.set_defaults(func=cmd_train_answerer)

    p = sub.add_parser("eval-answerer", help="evaluate a saved classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_eval_answerer)

    p = sub.add_parser("play", help="answer questions yourself in the terminal")
    _add_common(p)
    p.add_argument("--max-questions", type=int, default=20)
    p.add_argument("--what", action="store_true")
    p.add_argument("--describe", action="store_true")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("serve", help="run the HTTP game service")
    p.add_argument("--bind", default=None, help="host:port (default env TWENTYQ_BIND)")
    p.add_argument("--debug", action="store_true", help="expose belief internals")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    from twentyq.answerers import ConfigurationError

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, OSError) as exc:
        print(f"twentyq: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
