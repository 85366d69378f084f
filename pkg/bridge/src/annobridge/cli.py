"""annobridge command line: ner, cot, judge."""
from __future__ import annotations

import argparse
import logging
import sys

from .client import LlmClient
from .cot import extract_cot
from .judge import judge_answers
from .ner import annotate_ner
from .records import BridgeError


def _client_from(args: argparse.Namespace) -> LlmClient:
    return LlmClient(
        endpoint=args.endpoint,
        model=args.model,
        api_key_env=args.api_key_env,
        requests_per_second=args.rps,
        timeout=args.timeout,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annobridge",
        description="Produce annotation files for the poisoning core.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    ner = sub.add_parser("ner", help="emit NER annotations for a corpus")
    ner.add_argument("--corpus", required=True)
    ner.add_argument("--out", required=True)
    ner.add_argument("--backend", choices=("regex", "spacy"), default="regex")
    ner.add_argument("--model", default="en_core_web_sm", help="spacy model name")

    def add_llm_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--endpoint", required=True, help="chat-completions base URL")
        p.add_argument("--model", required=True)
        p.add_argument("--api-key-env", default="ANNOBRIDGE_API_KEY")
        p.add_argument("--rps", type=float, default=None, help="max requests per second")
        p.add_argument("--timeout", type=float, default=60.0)
        p.add_argument("--spend", help="write a token spend report here")

    cot = sub.add_parser("cot", help="extract reasoning-chain entities per query")
    cot.add_argument("--queries", required=True)
    cot.add_argument("--out", required=True)
    add_llm_flags(cot)

    judge = sub.add_parser("judge", help="judge predictions against gold answers")
    judge.add_argument("--queries", required=True)
    judge.add_argument("--responses", required=True)
    judge.add_argument("--out", required=True)
    add_llm_flags(judge)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "ner":
            count = annotate_ner(args.corpus, args.out, backend=args.backend, model=args.model)
            print(f"wrote {args.out} ({count} mentions)", file=sys.stderr)
            return 0
        client = _client_from(args)
        if args.command == "cot":
            summary = extract_cot(args.queries, args.out, client)
        else:
            summary = judge_answers(args.queries, args.responses, args.out, client)
        if args.spend:
            client.spend.write(args.spend)
        print(f"wrote {args.out}: {summary}", file=sys.stderr)
        return 0
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
