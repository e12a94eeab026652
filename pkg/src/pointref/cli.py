"""Command-line entry point.

Subcommands: gen (synthesize a dataset), parse (instruction → program),
point (trajectory → per-object scores), reason (single-shot end-to-end),
train, eval, and serve (HTTP service). Machine-readable JSON goes to stdout;
diagnostics go to stderr. Exit codes: 0 success, 1 usage or domain error,
2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .datagen import GeneratorConfig, generate_dataset, read_dataset, write_dataset
from .embeddings import DEFAULT_DIM
from .gesture import estimate_pointing, trajectory_from_dict
from .instruction import step_to_dict
from .pipeline import (
    evaluate_split,
    make_embedder,
    program_for,
    resolve,
    train_on_dataset,
)
from .reasoner import TrainConfig, load_params, save_params
from .scene import scene_from_dict
from .vocab import DEFAULT_LEXICON, Lexicon, load_lexicon

LEXICON_ENV_VAR = "REF_NSM_LEXICON"


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors (2 is reserved for I/O)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _read_json(path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed JSON ({exc})") from None


def _load_lexicon(args) -> Lexicon:
    path = args.lexicon or os.environ.get(LEXICON_ENV_VAR)
    if path:
        return load_lexicon(path)
    return DEFAULT_LEXICON


def _make_embedder(args, lexicon: Lexicon):
    return make_embedder(mode=args.embed_mode, dim=args.dim,
                         path=args.embeddings, lexicon=lexicon)


def _emit(payload) -> None:
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")


# --- subcommand handlers ------------------------------------------------------

def _cmd_gen(args) -> int:
    if args.train <= 0:
        raise ValueError("--train must be at least 1")
    if args.val < 0 or args.generalization < 0:
        raise ValueError("split sizes must be non-negative")
    lexicon = _load_lexicon(args)
    config = GeneratorConfig(seed=args.seed, train_size=args.train,
                             val_size=args.val,
                             generalization_size=args.generalization)
    dataset = generate_dataset(config, lexicon)
    write_dataset(dataset, args.out)
    _emit({"out": str(args.out),
           "episodes": len(dataset.episodes),
           "splits": {k: len(v) for k, v in dataset.splits.items()}})
    return 0


def _cmd_parse(args) -> int:
    lexicon = _load_lexicon(args)
    embedder = _make_embedder(args, lexicon)
    conllu = _read_text(args.conllu) if args.conllu else None
    steps = program_for(instruction=args.instruction, conllu=conllu,
                        lexicon=lexicon, embedder=embedder)
    _emit({"steps": [step_to_dict(s) for s in steps]})
    return 0


def _cmd_point(args) -> int:
    scene = scene_from_dict(_read_json(args.scene))
    trajectory = trajectory_from_dict(_read_json(args.trajectory))
    result = estimate_pointing(trajectory, scene)
    _emit(result.to_dict())
    return 0


def _cmd_reason(args) -> int:
    lexicon = _load_lexicon(args)
    embedder = _make_embedder(args, lexicon)
    params = load_params(args.params)
    scene = scene_from_dict(_read_json(args.scene))
    trajectory = None
    if args.trajectory:
        trajectory = trajectory_from_dict(_read_json(args.trajectory))
    conllu = _read_text(args.conllu) if args.conllu else None
    result = resolve(scene, params, lexicon, embedder,
                     instruction=args.instruction, conllu=conllu,
                     trajectory=trajectory, click=args.click,
                     no_gesture=args.no_gesture, trace=args.trace)
    _emit(result)
    return 0


def _cmd_train(args) -> int:
    dataset = read_dataset(args.data)
    embedder = _make_embedder(args, dataset.lexicon)
    config = TrainConfig(lr=args.lr, epochs=args.epochs,
                         batch_size=args.batch_size, seed=args.seed,
                         init_noise=args.init_noise)
    params, history = train_on_dataset(dataset, embedder, config)
    save_params(params, args.out)
    summary = {"params": str(args.out), "epochs": args.epochs,
               "episodes": len(dataset.splits.get("train", []))}
    if history:
        summary["final_loss"] = history[-1]["loss"]
        summary["final_accuracy"] = history[-1]["accuracy"]
    _emit(summary)
    return 0


def _cmd_eval(args) -> int:
    dataset = read_dataset(args.data)
    embedder = _make_embedder(args, dataset.lexicon)
    params = load_params(args.params)
    result = evaluate_split(params, dataset, args.split, embedder,
                            no_gesture=args.no_gesture,
                            demonstrative_only=args.demonstrative_only)
    _emit({"accuracy": result["accuracy"], "n": result["count"]})
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    lexicon = _load_lexicon(args)
    params = load_params(args.params) if args.params else None
    dim = params.dim if params is not None else args.dim
    embedder = make_embedder(mode=args.embed_mode, dim=dim,
                             path=args.embeddings, lexicon=lexicon)
    app = create_app(params=params, lexicon=lexicon, embedder=embedder)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --- argument wiring ----------------------------------------------------------

def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="random seed for generation/training")
    common.add_argument("--embeddings", default=None,
                        help="embedding vector file (for --embed-mode file)")
    common.add_argument("--embed-mode", choices=("hash", "file", "onehot"),
                        default="hash", help="embedding source")
    common.add_argument("--dim", type=int, default=DEFAULT_DIM,
                        help="embedding dimension for hash mode")
    common.add_argument("--lexicon", default=None,
                        help=f"lexicon JSON path (default ${LEXICON_ENV_VAR})")

    parser = _Parser(prog="pointref",
                     description="Multimodal referring-expression resolver")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common],
                       help="generate a synthetic dataset")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--train", type=int, default=500)
    p.add_argument("--val", type=int, default=100)
    p.add_argument("--generalization", type=int, default=0,
                   help="episodes drawn from the held-out name pool")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("parse", parents=[common],
                       help="instruction to typed program")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--instruction", help="instruction text")
    group.add_argument("--conllu", help="CoNLL-U file with a parsed sentence")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("point", parents=[common],
                       help="score objects from a pointing trajectory")
    p.add_argument("--trajectory", required=True, help="trajectory JSON file")
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.set_defaults(func=_cmd_point)

    p = sub.add_parser("reason", parents=[common],
                       help="resolve one scene + instruction (+ pointing)")
    p.add_argument("--scene", required=True, help="scene JSON file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--instruction", help="instruction text")
    group.add_argument("--conllu", help="CoNLL-U file with a parsed sentence")
    p.add_argument("--trajectory", default=None, help="trajectory JSON file")
    p.add_argument("--click", type=float, nargs=2, metavar=("X", "Y"),
                   default=None, help="explicit pointed ground location")
    p.add_argument("--no-gesture", action="store_true",
                   help="ignore all pointing evidence")
    p.add_argument("--params", required=True, help="trained params JSON")
    p.add_argument("--trace", action="store_true",
                   help="include the per-step reasoning trace")
    p.set_defaults(func=_cmd_reason)

    p = sub.add_parser("train", parents=[common], help="train the reasoner")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="where to write params JSON")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--init-noise", type=float, default=0.01)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", parents=[common], help="evaluate on a split")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--split", required=True,
                   help="train, val, or generalization")
    p.add_argument("--params", required=True, help="trained params JSON")
    p.add_argument("--no-gesture", action="store_true",
                   help="ignore pointing evidence (ablation)")
    p.add_argument("--demonstrative-only", action="store_true",
                   help="restrict to episodes whose instruction has a demonstrative")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--params", default=None, help="trained params JSON")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"pointref: I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, RuntimeError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"pointref: error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
