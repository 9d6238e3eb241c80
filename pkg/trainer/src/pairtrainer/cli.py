"""Command-line entry points: ``pairtrainer train`` and ``pairtrainer serve``."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import TrainerError
from .model import ModelConfig
from .serve import GenerationServer
from .train import TrainConfig, train


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairtrainer",
        description="Train and serve the two-decoder generation model",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="subcommand", required=True)

    train_cmd = commands.add_parser(
        "train", help="fine-tune on a pair directory per its manifest"
    )
    train_cmd.add_argument("pairs_dir", help="directory holding pair files + manifest.json")
    train_cmd.add_argument("--out", required=True, help="checkpoint directory to write")
    train_cmd.add_argument("--seed", type=int, default=0)
    train_cmd.add_argument("--lr", type=_nonneg_float, default=3e-3)
    train_cmd.add_argument("--batch-size", type=_positive_int, default=16)
    train_cmd.add_argument("--d-model", type=_positive_int, default=64)
    train_cmd.add_argument("--hidden", type=_positive_int, default=128)

    serve_cmd = commands.add_parser(
        "serve", help="serve a checkpoint over the generation wire protocol"
    )
    serve_cmd.add_argument("checkpoint", help="checkpoint directory written by train")
    serve_cmd.add_argument("--host", default="127.0.0.1")
    serve_cmd.add_argument("--port", type=int, default=8000)
    serve_cmd.add_argument("--temperature", type=_nonneg_float, default=0.0)
    serve_cmd.add_argument("--seed", type=int, default=0)
    return parser


def cmd_train(args: argparse.Namespace) -> int:
    config = TrainConfig(
        model=ModelConfig(d_model=args.d_model, hidden=args.hidden),
        learning_rate=args.lr,
        batch_size=args.batch_size,
        seed=args.seed,
    )
    _, state = train(args.pairs_dir, args.out, config)
    for record in state.history:
        print(
            f"iteration {record.iteration} {record.task}: "
            f"loss {record.losses[0]:.4f} -> {record.losses[-1]:.4f}",
            file=sys.stderr,
        )
    print(f"checkpoint written to {args.out}", file=sys.stderr)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    server = GenerationServer.from_checkpoint(
        args.checkpoint,
        host=args.host,
        port=args.port,
        temperature=args.temperature,
        seed=args.seed,
    )
    print(f"serving on {server.url}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    handler = {"train": cmd_train, "serve": cmd_serve}[args.subcommand]
    try:
        return handler(args)
    except (TrainerError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
