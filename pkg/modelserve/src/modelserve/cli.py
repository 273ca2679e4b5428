"""CLI: `modelserve --config serve.json` to serve, `modelserve finetune ...` to train."""

from __future__ import annotations

import argparse
import sys

from .server import ServeConfig, serve


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "finetune":
        parser = argparse.ArgumentParser(prog="modelserve finetune")
        parser.add_argument("--data", required=True, help="tuning pairs JSONL (with #meta header)")
        parser.add_argument("--model", default="tiny-seq2seq", help="base model id or directory")
        parser.add_argument("--out", required=True, help="output model directory")
        parser.add_argument("--device", default="cpu")
        args = parser.parse_args(argv[1:])
        from .finetune import finetune

        try:
            summary = finetune(args.data, args.model, args.out, device=args.device)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(
            f"trained on {summary['pairs']} pairs: "
            f"loss {summary['loss_before']:.4f} -> {summary['loss_after']:.4f}"
        )
        return 0

    parser = argparse.ArgumentParser(prog="modelserve", description=__doc__)
    parser.add_argument("--config", required=True, help="serve config JSON")
    args = parser.parse_args(argv)
    serve(ServeConfig.from_json_file(args.config))
    return 0


def entrypoint() -> None:
    sys.exit(main())
