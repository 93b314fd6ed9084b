"""Command-line front end: ``hmmner convert|train|tag|eval|inspect``.

Exit status is 0 on success, 1 when decoding or evaluation fails and 2 for
usage, format and I/O errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import corpus
from .decoder import DecodeError
from .evaluation import score
from .features import SEP, GazetteerSet, PseudoToken, observation_key
from .model import END, load_model, save_model
from .pipeline import convert, external_pos_tagger, tag_tweets, train_from_iob

log = logging.getLogger("hmmner")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    raw: str | None = None
    annotations: str | None = None
    iob: str | None = None
    gazetteers: str | None = None
    model: str | None = None
    output: str | None = None
    pos_command: str | None = None
    pos_file: str | None = None
    suffix_max_len: int = 10
    rare_threshold: int = 2
    emission_mode: str = "tag"
    aldt: str = "dots"
    workers: int = 1
    log_level: str = "WARNING"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        values = {}
        if getattr(args, "config", None):
            with open(args.config, encoding="utf-8") as fh:
                values = json.load(fh)
            unknown = set(values) - {f.name for f in dataclasses.fields(cls)}
            if unknown:
                raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for f in dataclasses.fields(cls):
            flag = getattr(args, f.name, None)
            if flag is not None:
                values[f.name] = flag
        return cls(**values)

    def require(self, *names: str) -> None:
        missing = [n for n in names if not getattr(self, n)]
        if missing:
            raise UsageError("missing required setting(s): " + ", ".join(missing))

    def check_inputs(self, *names: str) -> None:
        for name in names:
            path = getattr(self, name)
            if path and not Path(path).exists():
                raise FileNotFoundError(f"{name} path does not exist: {path}")


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(output: str, command: str, config: RunConfig,
                   inputs: dict[str, str | None], extra: dict | None = None) -> None:
    manifest = {
        "command": command,
        "config": dataclasses.asdict(config),
        "inputs": {k: {"path": v, "sha256": _sha256(v)}
                   for k, v in sorted(inputs.items()) if v and Path(v).is_file()},
    }
    if extra:
        manifest.update(extra)
    with open(output + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="\n")


def read_pos_file(path: str) -> list[list[str]]:
    """One tag per line, blank line after each tweet."""
    groups, cur = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                cur.append(line)
            else:
                groups.append(cur)
                cur = []
    if cur:
        groups.append(cur)
    return groups


def _pos_for(cfg: RunConfig, tweets) -> list[list[str]] | None:
    words = [[t.surface for t in corpus.tokenize(tw.text)] for tw in tweets]
    if cfg.pos_command:
        tags = external_pos_tagger(cfg.pos_command)(words)
    elif cfg.pos_file:
        tags = read_pos_file(cfg.pos_file)
        # tweets without tokens may be absent from the POS file
        it = iter(tags)
        tags = [next(it, []) if w else [] for w in words]
    else:
        return None
    for tw, w, t in zip(tweets, words, tags):
        if len(w) != len(t):
            raise corpus.FormatError(
                f"tweet {tw.tweet_id}: {len(w)} tokens but {len(t)} POS tags")
    return tags


def _gazetteers(cfg: RunConfig) -> GazetteerSet:
    if cfg.gazetteers:
        return GazetteerSet.load(cfg.gazetteers)
    log.warning("no gazetteer directory given; gazetteer X-tags disabled")
    return GazetteerSet()


def cmd_convert(cfg: RunConfig) -> int:
    cfg.require("raw", "annotations")
    cfg.check_inputs("raw", "annotations", "pos_file")
    with open(cfg.raw, encoding="utf-8") as fh:
        tweets = corpus.parse_raw_file(fh)
    with open(cfg.annotations, encoding="utf-8") as fh:
        annotations = corpus.parse_annotation_file(fh)
    report = corpus.IngestReport()
    sentences = convert(tweets, annotations, report)
    pos = _pos_for(cfg, tweets)
    if pos is not None:
        for sent, tags in zip(sentences, pos):
            sent.pos_tags = tags
    out = _open_out(cfg.output)
    try:
        corpus.write_iob_file(sentences, out)
    finally:
        if out is not sys.stdout:
            out.close()
    summary = {k: v for k, v in dataclasses.asdict(report).items() if k != "messages"}
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    if cfg.output and cfg.output != "-":
        write_manifest(cfg.output, "convert", cfg,
                       {"raw": cfg.raw, "annotations": cfg.annotations,
                        "pos_file": cfg.pos_file},
                       {"ingest_report": summary})
    return EXIT_OK


def cmd_train(cfg: RunConfig) -> int:
    cfg.require("iob", "model")
    cfg.check_inputs("iob", "gazetteers")
    with open(cfg.iob, encoding="utf-8") as fh:
        sentences = corpus.read_iob_file(fh)
    if not any(s.tokens for s in sentences):
        raise corpus.FormatError("training corpus is empty")
    model = train_from_iob(sentences, _gazetteers(cfg),
                           suffix_max_len=cfg.suffix_max_len,
                           rare_threshold=cfg.rare_threshold,
                           emission_mode=cfg.emission_mode,
                           aldt_means_all_digits=cfg.aldt == "digits")
    save_model(model, cfg.model)
    summary = model.summary()
    print(json.dumps(summary, sort_keys=True))
    write_manifest(cfg.model, "train", cfg,
                   {"iob": cfg.iob, "model": cfg.model}, {"summary": summary})
    return EXIT_OK


def cmd_tag(cfg: RunConfig) -> int:
    cfg.require("raw", "model")
    cfg.check_inputs("raw", "model", "gazetteers", "pos_file")
    model = load_model(cfg.model)
    with open(cfg.raw, encoding="utf-8") as fh:
        tweets = corpus.parse_raw_file(fh)
    pos = _pos_for(cfg, tweets)
    _, spans = tag_tweets(tweets, model, _gazetteers(cfg), pos, workers=cfg.workers)
    out = _open_out(cfg.output)
    try:
        corpus.emit_annotation_file(tweets, spans, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if cfg.output and cfg.output != "-":
        write_manifest(cfg.output, "tag", cfg,
                       {"raw": cfg.raw, "model": cfg.model, "pos_file": cfg.pos_file})
    return EXIT_OK


def cmd_eval(gold: str, predicted: str, machine: bool) -> int:
    for path in (gold, predicted):
        if not Path(path).exists():
            raise FileNotFoundError(f"no such file: {path}")
    with open(gold, encoding="utf-8") as fh:
        gold_spans = corpus.parse_annotation_file(fh)
    with open(predicted, encoding="utf-8") as fh:
        pred_spans = corpus.parse_annotation_file(fh)
    report = score(gold_spans, pred_spans)
    sys.stdout.write(report.to_lines() if machine else report.to_table())
    return EXIT_OK


def _parse_key(words: list[str]) -> str:
    if len(words) == 3:
        return observation_key(PseudoToken(*words))
    if len(words) == 1 and words[0].count(SEP) == 2:
        return words[0]
    raise UsageError("a key is WORD XTAG META or a single SEP-joined string")


def _format_row(labels, values) -> str:
    lines = [f"  {label:<16} {v:.6g}" for label, v in zip(labels, values)]
    lines.append(f"  {'(sum)':<16} {float(np.sum(values)):.12f}")
    return "\n".join(lines)


def cmd_inspect(model_path: str, query: list[str]) -> int:
    if not query:
        raise UsageError("query required: summary | transition T2 T1 | "
                         "emission KEY | suffix KEY")
    model = load_model(model_path)
    kind, rest = query[0], query[1:]
    labels = model.labels
    if kind == "summary" and not rest:
        print(json.dumps(model.summary(), sort_keys=True, indent=2))
    elif kind == "transition" and len(rest) == 2:
        t2, t1 = rest
        for tag in (t2, t1):
            if tag not in model.inventory.index:
                raise UsageError(f"unknown tag {tag!r}")
        targets = [*labels, END]
        row = [model.transition_prob(t2, t1, t) for t in targets]
        print(f"P(t | {t2}, {t1})")
        print(_format_row(targets, row))
    elif kind == "emission" and rest:
        key = _parse_key(rest)
        if model.is_known(key):
            print(f"P({key} | t), known key")
            print(_format_row(labels, [model.emission_prob(key, t) for t in labels]))
        else:
            s = model.suffixes.longest_suffix(key)
            print(f"unknown key {key}; suffix {s!r}, P(t | suffix)")
            print(_format_row(labels, model.suffixes.distribution(key)))
    elif kind == "suffix" and rest:
        key = _parse_key(rest)
        s = model.suffixes.longest_suffix(key)
        print(f"longest stored suffix {s!r}, P(t | suffix)")
        print(_format_row(labels, model.suffixes.distribution(key)))
    else:
        raise UsageError(f"bad query: {' '.join(query)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmmner", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file of settings; flags override it")
        p.add_argument("--gazetteers", "-g", help="directory of gazetteer lists")
        p.add_argument("-o", "--output", help="output file (default stdout)")

    def pos_opts(p):
        p.add_argument("--pos", dest="pos_command",
                       help="external POS tagger command (token per line in, tag per line out)")
        p.add_argument("--pos-file", help="POS tags, one per line, blank line between tweets")

    p = sub.add_parser("convert", help="raw + annotation files to an IOB file")
    p.add_argument("raw", nargs="?")
    p.add_argument("annotations", nargs="?")
    common(p)
    pos_opts(p)

    p = sub.add_parser("train", help="train a model from an IOB file")
    p.add_argument("iob", nargs="?")
    common(p)
    p.add_argument("-m", "--model", help="model file to write")
    p.add_argument("--suffix-max-len", type=int)
    p.add_argument("--rare-threshold", type=int)
    p.add_argument("--emission-mode", choices=["tag", "observed"])
    p.add_argument("--aldt", choices=["dots", "digits"],
                   help="whether the ALDT meta-tag marks all-dot or all-digit tokens")

    p = sub.add_parser("tag", help="tag a raw tweet file")
    p.add_argument("raw", nargs="?")
    common(p)
    pos_opts(p)
    p.add_argument("-m", "--model", help="model file")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("eval", help="score predicted against gold annotations")
    p.add_argument("gold")
    p.add_argument("predicted")
    p.add_argument("--lines", action="store_true", help="TYPE<TAB>P<TAB>R<TAB>F output")

    p = sub.add_parser("inspect", help="probe a model")
    p.add_argument("model")
    p.add_argument("query", nargs="*")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "eval":
            return cmd_eval(args.gold, args.predicted, args.lines)
        if args.command == "inspect":
            return cmd_inspect(args.model, args.query)
        cfg = RunConfig.from_args(args)
        logging.getLogger().setLevel(min(level, getattr(logging, cfg.log_level.upper())))
        return {"convert": cmd_convert, "train": cmd_train, "tag": cmd_tag}[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hmmner: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DecodeError as exc:
        print(f"hmmner: decoding failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError, subprocess.SubprocessError) as exc:
        print(f"hmmner: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
