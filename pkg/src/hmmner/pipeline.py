"""Train and tag end to end, from corpus files to annotation spans."""
from __future__ import annotations

import logging
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Sequence

from .corpus import (EntitySpan, IngestReport, IobSentence, RawTweet,
                     iob_to_spans, spans_to_iob)
from .decoder import DEFAULT_POS, decode_tweet
from .evaluation import repair_orphan_i
from .features import GazetteerSet, featurize_sentence
from .model import HMMModel, train

log = logging.getLogger(__name__)


def convert(tweets: Sequence[RawTweet],
            annotations: Mapping[str, Sequence[EntitySpan]],
            report: IngestReport | None = None) -> list[IobSentence]:
    """IOB sentences for ``tweets``; annotations for unknown ids are skipped."""
    if report is None:
        report = IngestReport()
    known = {t.tweet_id for t in tweets}
    for tweet_id in sorted(set(annotations) - known):
        report.unknown_tweets += 1
        report.note(f"annotations for unknown tweet {tweet_id!r} skipped")
    sentences = []
    for tweet in tweets:
        report.tweets += 1
        sentences.append(spans_to_iob(tweet, annotations.get(tweet.tweet_id, ()), report))
    return sentences


def train_from_iob(sentences: Sequence[IobSentence], gaz: GazetteerSet | None,
                   suffix_max_len: int = 10, rare_threshold: int = 2,
                   emission_mode: str = "tag",
                   aldt_means_all_digits: bool = False) -> HMMModel:
    data = []
    for sent in sentences:
        if not sent.tokens:
            continue
        if sent.pos_tags is None:
            raise ValueError(f"sentence {sent.tweet_id or ''} has no POS column")
        obs = featurize_sentence(sent.tokens, sent.pos_tags, gaz, aldt_means_all_digits)
        data.append((obs, sent.labels))
    return train(data, suffix_max_len=suffix_max_len, rare_threshold=rare_threshold,
                 emission_mode=emission_mode,
                 aldt_means_all_digits=aldt_means_all_digits)


def external_pos_tagger(command: str):
    """Build a batch POS tagger around a shell command.

    The command reads one token per line with a blank line after each
    tweet and must answer with one tag per line in the same layout.
    """
    argv = shlex.split(command)

    def tag_batch(batch: Sequence[Sequence[str]]) -> list[list[str]]:
        payload = "".join("".join(f"{w}\n" for w in words) + "\n" for words in batch)
        proc = subprocess.run(argv, input=payload, capture_output=True,
                              text=True, check=True)
        lines = proc.stdout.split("\n")
        out, pos = [], 0
        for words in batch:
            tags = lines[pos:pos + len(words)]
            if len(tags) != len(words) or any(not t.strip() for t in tags):
                raise ValueError(f"POS command {command!r} returned a malformed answer")
            pos += len(words)
            if pos < len(lines) and lines[pos] == "":
                pos += 1
            out.append([t.strip() for t in tags])
        return out

    return tag_batch


def tag_tweets(tweets: Sequence[RawTweet], model: HMMModel, gaz: GazetteerSet | None,
               pos_tags: Sequence[Sequence[str]] | None = None,
               workers: int = 1) -> tuple[list[IobSentence], dict[str, list[EntitySpan]]]:
    """Decode, repair orphan I- runs and convert labels back to spans.

    Output order follows ``tweets`` whatever ``workers`` is.
    """
    if pos_tags is not None and len(pos_tags) != len(tweets):
        raise ValueError("need one POS tag list per tweet")

    def run(i: int) -> IobSentence:
        tags = pos_tags[i] if pos_tags is not None else None
        sent = decode_tweet(tweets[i], tags, gaz, model)
        sent.labels = repair_orphan_i(sent.labels)
        return sent

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            sentences = list(pool.map(run, range(len(tweets))))
    else:
        sentences = [run(i) for i in range(len(tweets))]
    spans = {s.tweet_id: iob_to_spans(s) for s in sentences}
    return sentences, spans


__all__ = ["convert", "train_from_iob", "tag_tweets", "external_pos_tagger",
           "DEFAULT_POS"]
