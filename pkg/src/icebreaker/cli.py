"""Command line interface.

Subcommands:
    index     build a corpus index and persist it as JSON
    respond   one-shot reply: conversation lines on stdin, reply + trace out
    eval      run the labeled-instance evaluation and emit the report
    serve     start the HTTP service
    rerank    rank a candidate file against a context file

Exit codes: 0 on success, 1 on usage errors, 2 on data or config errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from icebreaker import data as default_data
from icebreaker.evaluation import (
    InstanceLoadError,
    load_instances,
    render_text,
    report_to_json,
    run_eval,
)
from icebreaker.kg import KgLoadError
from icebreaker.pipeline import (
    ConversationSession,
    COMPUTER,
    HUMAN,
    NoReplyError,
    PatternLoadError,
    Resources,
    respond,
)
from icebreaker.ranking import ALL_METHODS, RankParams, build_rerank_state, rank_with_method
from icebreaker.retrieval import (
    CorpusLoadError,
    RetrievalCaps,
    build_index,
    load_corpus,
)
from icebreaker.service import ConfigError, ServiceConfig, create_app, load_config_file

USAGE_ERROR = 1
DATA_ERROR = 2

_DATA_ERRORS = (
    ConfigError,
    CorpusLoadError,
    KgLoadError,
    PatternLoadError,
    InstanceLoadError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    UnicodeDecodeError,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; this interface reserves 2
    # for data problems, so usage errors must exit 1 instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file; flags override it")
    shared.add_argument("--corpus", help="query/reply corpus (TSV)")
    shared.add_argument("--kg", help="entity graph file (TSV)")
    shared.add_argument("--patterns", help="stalemate pattern file")
    shared.add_argument("--mu", type=float, help="PageRank restart weight")
    shared.add_argument("--alpha-x", type=float, dest="alpha_x", help="query-side mixing weight")
    shared.add_argument("--alpha-y", type=float, dest="alpha_y", help="reply-side mixing weight")
    shared.add_argument("--tol", type=float, help="outer-loop convergence tolerance")

    parser = _Parser(prog="icebreaker", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_index = sub.add_parser("index", parents=[shared], help="build and persist a corpus index")
    p_index.add_argument("--out", required=True, help="output JSON path")

    sub.add_parser(
        "respond",
        parents=[shared],
        help="read conversation lines from stdin (last line is the current "
        "human utterance, earlier lines alternate speakers) and print the "
        "reply with its trace as JSON",
    )

    p_eval = sub.add_parser("eval", parents=[shared], help="run the ranking evaluation")
    p_eval.add_argument("--fixtures", help="labeled instances (JSON lines)")
    p_eval.add_argument("--report", help="also write the report as JSON to this path")

    p_serve = sub.add_parser("serve", parents=[shared], help="start the HTTP service")
    p_serve.add_argument("--host")
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--auto-create-sessions", action="store_true", default=None)
    p_serve.add_argument("--ui-dir", help="static directory to serve at /")

    p_rerank = sub.add_parser("rerank", parents=[shared], help="rank candidates against a context")
    p_rerank.add_argument(
        "--context", required=True, help="file of context utterances, one per line"
    )
    p_rerank.add_argument(
        "--candidates", required=True, help="file of candidate replies, one per line"
    )
    p_rerank.add_argument("--method", default="bi_pagerank_hits", choices=ALL_METHODS)

    return parser


def _merge_settings(args) -> dict:
    settings = load_config_file(args.config) if args.config else {}
    for flag, key in (
        ("corpus", "corpus"),
        ("kg", "kg"),
        ("patterns", "patterns"),
        ("mu", "mu"),
        ("alpha_x", "alpha_x"),
        ("alpha_y", "alpha_y"),
        ("tol", "tol"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            settings[key] = value
    for flag in ("host", "port", "auto_create_sessions", "ui_dir"):
        value = getattr(args, flag, None)
        if value is not None:
            settings[flag] = value
    return settings


def _params_from(settings: dict) -> RankParams:
    params = RankParams()
    overrides = {}
    if "mu" in settings:
        overrides["mu"] = float(settings["mu"])
    if "alpha_x" in settings:
        overrides["alpha_x"] = float(settings["alpha_x"])
    if "alpha_y" in settings:
        overrides["alpha_y"] = float(settings["alpha_y"])
    if "tol" in settings:
        overrides["global_tol"] = float(settings["tol"])
    try:
        return dataclasses.replace(params, **overrides) if overrides else params
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _caps_from(settings: dict) -> RetrievalCaps:
    overrides = {
        key: int(settings[key])
        for key in ("per_entity", "total", "min_len")
        if key in settings
    }
    try:
        return dataclasses.replace(RetrievalCaps(), **overrides) if overrides else RetrievalCaps()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _resources_from(settings: dict) -> Resources:
    return Resources.load(
        settings.get("corpus"),
        settings.get("kg"),
        settings.get("patterns"),
        params=_params_from(settings),
        caps=_caps_from(settings),
    )


def _print_json(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n")


def _cmd_index(args) -> int:
    settings = _merge_settings(args)
    corpus = settings.get("corpus") or str(default_data.corpus_path())
    index = build_index(load_corpus(corpus))
    payload = {
        "pairs": [
            {"id": p.id, "query": p.query_text, "reply": p.reply_text}
            for p in index.pairs
        ],
        "doc_count": index.stats.doc_count,
        "doc_freq": index.stats.doc_freq,
        "query_postings": {t: list(ps) for t, ps in index.query_postings.items()},
        "reply_postings": {t: list(ps) for t, ps in index.reply_postings.items()},
    }
    Path(args.out).write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    sys.stdout.write(
        f"indexed {len(index.pairs)} pairs, "
        f"{len(index.reply_postings)} reply tokens -> {args.out}\n"
    )
    return 0


def _cmd_respond(args) -> int:
    settings = _merge_settings(args)
    resources = _resources_from(settings)
    lines = [line.strip() for line in sys.stdin.read().splitlines() if line.strip()]
    if not lines:
        sys.stderr.write("respond: no utterances on stdin\n")
        return USAGE_ERROR
    session = ConversationSession("oneshot")
    # The last line is the utterance to answer; earlier lines alternate
    # speakers backwards from it (..., computer, human).
    history, current = lines[:-1], lines[-1]
    for offset, text in enumerate(history):
        speaker = COMPUTER if (len(history) - offset) % 2 == 1 else HUMAN
        session.append(speaker, text)
    try:
        reply, trace = respond(session, current, resources)
    except NoReplyError as exc:
        _print_json({"error": "no_reply", "trace": exc.trace.to_dict(resources.index)})
        return DATA_ERROR
    _print_json({"reply": reply, "trace": trace.to_dict(resources.index)})
    return 0


def _cmd_eval(args) -> int:
    settings = _merge_settings(args)
    fixtures = args.fixtures or str(default_data.eval_instances_path())
    instances = load_instances(fixtures)
    report = run_eval(instances, params=_params_from(settings))
    sys.stdout.write(render_text(report))
    if args.report:
        Path(args.report).write_text(report_to_json(report), encoding="utf-8")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    settings = _merge_settings(args)
    config = ServiceConfig(
        corpus_path=settings.get("corpus"),
        kg_path=settings.get("kg"),
        patterns_path=settings.get("patterns"),
        params=_params_from(settings),
        caps=_caps_from(settings),
        host=settings.get("host", "127.0.0.1"),
        port=int(settings.get("port", 8000)),
        auto_create_sessions=bool(settings.get("auto_create_sessions", False)),
        ui_dir=settings.get("ui_dir"),
    ).validate()
    app = create_app(config=config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def _cmd_rerank(args) -> int:
    settings = _merge_settings(args)
    context = [
        line.strip()
        for line in Path(args.context).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    candidates = [
        line.strip()
        for line in Path(args.candidates).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if not context or not candidates:
        sys.stderr.write("rerank: context and candidates must be nonempty\n")
        return DATA_ERROR
    state = build_rerank_state(context, candidates)
    ranked = rank_with_method(args.method, state, _params_from(settings))
    _print_json(
        {
            "method": ranked.method,
            "ranking": [
                {"index": cid, "text": candidates[cid], "score": score}
                for cid, score in zip(ranked.candidate_ids, ranked.scores)
            ],
        }
    )
    return 0


_COMMANDS = {
    "index": _cmd_index,
    "respond": _cmd_respond,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
    "rerank": _cmd_rerank,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse handles --help (code 0) and usage errors (code 1 via _Parser).
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _DATA_ERRORS as exc:
        sys.stderr.write(f"icebreaker {args.command}: {exc}\n")
        return DATA_ERROR
    except ValueError as exc:
        sys.stderr.write(f"icebreaker {args.command}: {exc}\n")
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
