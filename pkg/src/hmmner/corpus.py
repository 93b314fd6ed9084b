"""Reading and writing tweet corpora.

Three file formats are handled here:

* raw tweet file: ``tweet_id<TAB>user_id<TAB>text``, one tweet per line;
* annotation file: ``tweet_id<TAB>user_id<TAB>NE-tag<TAB>raw string<TAB>start<TAB>length``;
* IOB interchange file: ``surface<TAB>POS<TAB>label`` per token, blank line
  between tweets, optionally preceded by a ``# id<TAB>tweet_id<TAB>user_id``
  header line.

Character offsets count Unicode code points, not bytes.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

log = logging.getLogger(__name__)

OUTSIDE = "O"
_LABEL_RE = re.compile(r"^(?:O|([BI])-(\S+))$")
_TOKEN_RE = re.compile(r"\S+")
_ID_PREFIX = "# id\t"


class FormatError(ValueError):
    """Malformed input record. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class RawTweet:
    tweet_id: str
    user_id: str
    text: str

    def __post_init__(self):
        if not self.tweet_id:
            raise ValueError("tweet_id must be non-empty")


@dataclass(frozen=True, order=True)
class EntitySpan:
    start_index: int
    length: int
    ne_tag: str
    raw_string: str = field(compare=False, default="")

    def __post_init__(self):
        if self.start_index < 0:
            raise ValueError(f"negative start_index {self.start_index}")
        if self.length < 1:
            raise ValueError(f"span length must be >= 1, got {self.length}")

    @property
    def end(self) -> int:
        return self.start_index + self.length

    def key(self) -> tuple[str, int, int]:
        """Identity used for exact-match comparison."""
        return (self.ne_tag, self.start_index, self.length)


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int


@dataclass
class IobSentence:
    tokens: list[Token]
    labels: list[str]
    text: str = ""
    pos_tags: list[str] | None = None
    tweet_id: str | None = None
    user_id: str | None = None

    def __post_init__(self):
        if len(self.labels) != len(self.tokens):
            raise ValueError(
                f"{len(self.labels)} labels for {len(self.tokens)} tokens")
        if self.pos_tags is not None and len(self.pos_tags) != len(self.tokens):
            raise ValueError(
                f"{len(self.pos_tags)} POS tags for {len(self.tokens)} tokens")

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


@dataclass
class IngestReport:
    """Counters for problems tolerated while converting annotations."""

    tweets: int = 0
    spans: int = 0
    dropped_spans: int = 0
    string_mismatches: int = 0
    unknown_tweets: int = 0
    messages: list[str] = field(default_factory=list)

    def note(self, message: str) -> None:
        log.warning(message)
        self.messages.append(message)


def split_label(label: str) -> tuple[str, str | None]:
    """``"B-LOC"`` -> ``("B", "LOC")``; ``"O"`` -> ``("O", None)``."""
    m = _LABEL_RE.match(label)
    if m is None:
        raise ValueError(f"not an IOB label: {label!r}")
    if m.group(1) is None:
        return OUTSIDE, None
    return m.group(1), m.group(2)


def is_label(label: str) -> bool:
    return _LABEL_RE.match(label) is not None


def _lines(stream: TextIO | Iterable[str]):
    for lineno, line in enumerate(stream, 1):
        yield lineno, line.rstrip("\r\n")


def parse_raw_file(stream: TextIO | Iterable[str]) -> list[RawTweet]:
    tweets = []
    seen = set()
    for lineno, line in _lines(stream):
        if not line.strip():
            continue
        fields = line.split("\t", 2)
        if len(fields) != 3:
            raise FormatError(f"expected 3 fields, got {len(fields)}", lineno)
        tweet_id, user_id, text = fields
        if not tweet_id:
            raise FormatError("empty tweet id", lineno)
        if tweet_id in seen:
            raise FormatError(f"duplicate tweet id {tweet_id!r}", lineno)
        seen.add(tweet_id)
        tweets.append(RawTweet(tweet_id, user_id, text))
    return tweets


def parse_annotation_file(
        stream: TextIO | Iterable[str]) -> dict[str, list[EntitySpan]]:
    """Group annotation rows by tweet id, each group sorted by start offset.

    The user id column is not kept on the span; it is recoverable from the
    raw file.
    """
    spans: dict[str, list[EntitySpan]] = {}
    for lineno, line in _lines(stream):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise FormatError(f"expected 6 fields, got {len(fields)}", lineno)
        tweet_id, _user, tag, raw, start, length = fields
        try:
            start_i, length_i = int(start), int(length)
        except ValueError:
            raise FormatError(
                f"non-integer index/length {start!r}/{length!r}", lineno) from None
        if start_i < 0:
            raise FormatError(f"negative start index {start_i}", lineno)
        if length_i < 1:
            raise FormatError(f"length must be >= 1, got {length_i}", lineno)
        if not tag:
            raise FormatError("empty NE tag", lineno)
        spans.setdefault(tweet_id, []).append(
            EntitySpan(start_i, length_i, tag, raw))
    for group in spans.values():
        group.sort()
    return spans


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, keeping punctuation attached to the token."""
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def spans_to_iob(tweet: RawTweet, spans: Sequence[EntitySpan],
                 report: IngestReport | None = None,
                 tokens: list[Token] | None = None) -> IobSentence:
    """Label each token B-/I-/O from character-offset spans.

    A token that overlaps a span at all, even partially, is part of it.
    Spans touching no token are dropped and recorded in ``report``.
    """
    text = tweet.text
    if tokens is None:
        tokens = tokenize(text)
    labels = [OUTSIDE] * len(tokens)
    ordered = sorted(spans)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start_index < prev.end:
            raise ValueError(
                f"overlapping spans in tweet {tweet.tweet_id}: "
                f"{prev.key()} and {cur.key()}")
    for span in ordered:
        if span.end > len(text):
            raise ValueError(
                f"span {span.key()} runs past end of tweet {tweet.tweet_id} "
                f"(length {len(text)})")
        actual = text[span.start_index:span.end]
        if report is not None:
            report.spans += 1
            if span.raw_string and span.raw_string != actual:
                report.string_mismatches += 1
                report.note(f"tweet {tweet.tweet_id}: annotated string "
                            f"{span.raw_string!r} != text {actual!r}")
        covered = [i for i, tok in enumerate(tokens)
                   if tok.start < span.end and span.start_index < tok.end]
        if not covered:
            if report is not None:
                report.dropped_spans += 1
                report.note(f"tweet {tweet.tweet_id}: span {span.key()} "
                            f"covers no token, dropped")
            else:
                log.warning("tweet %s: span %s covers no token, dropped",
                            tweet.tweet_id, span.key())
            continue
        for j, i in enumerate(covered):
            if labels[i] != OUTSIDE:
                # two spans inside one whitespace token
                raise ValueError(
                    f"tweet {tweet.tweet_id}: token {tokens[i].surface!r} "
                    f"is covered by two spans")
            labels[i] = ("B-" if j == 0 else "I-") + span.ne_tag
    return IobSentence(tokens, labels, text,
                       tweet_id=tweet.tweet_id, user_id=tweet.user_id)


def iob_to_spans(sentence: IobSentence) -> list[EntitySpan]:
    spans = []
    start_tok = None
    cur_type = None

    def close(last: int):
        first = sentence.tokens[start_tok]
        end = sentence.tokens[last].end
        raw = sentence.text[first.start:end] if sentence.text else ""
        spans.append(EntitySpan(first.start, end - first.start, cur_type, raw))

    for i, label in enumerate(sentence.labels):
        prefix, ne_type = split_label(label)
        if prefix == "I":
            if cur_type != ne_type:
                raise ValueError(
                    f"orphan {label} at token {i}; repair the sequence first")
            continue
        if cur_type is not None:
            close(i - 1)
        if prefix == "B":
            start_tok, cur_type = i, ne_type
        else:
            start_tok, cur_type = None, None
    if cur_type is not None:
        close(len(sentence.labels) - 1)
    return spans


def emit_annotation_file(tweets: Sequence[RawTweet],
                         spans: Mapping[str, Sequence[EntitySpan]],
                         out: TextIO) -> None:
    """Write 6-column rows in tweet order, then by start offset."""
    for tweet in tweets:
        for span in sorted(spans.get(tweet.tweet_id, ())):
            raw = span.raw_string or tweet.text[span.start_index:span.end]
            out.write(f"{tweet.tweet_id}\t{tweet.user_id}\t{span.ne_tag}\t"
                      f"{raw}\t{span.start_index}\t{span.length}\n")


def format_annotation_file(tweets, spans) -> str:
    import io
    buf = io.StringIO()
    emit_annotation_file(tweets, spans, buf)
    return buf.getvalue()


# IOB interchange file

def write_iob_file(sentences: Iterable[IobSentence], out: TextIO,
                   default_pos: str = "-") -> None:
    for sent in sentences:
        if sent.tweet_id is not None:
            out.write(f"{_ID_PREFIX}{sent.tweet_id}\t{sent.user_id or ''}\n")
        pos = sent.pos_tags or [default_pos] * len(sent.tokens)
        for tok, tag, label in zip(sent.tokens, pos, sent.labels):
            out.write(f"{tok.surface}\t{tag}\t{label}\n")
        out.write("\n")


def read_iob_file(stream: TextIO | Iterable[str]) -> list[IobSentence]:
    """Read a CoNLL-style interchange file.

    Token offsets are rebuilt by joining surfaces with single spaces, which
    is enough for training; the original spacing is not recorded.
    """
    sentences = []
    rows: list[tuple[str, str, str]] = []
    ident: tuple[str, str] | None = None

    def flush():
        nonlocal rows, ident
        if rows or ident is not None:
            tokens, pos = [], []
            offset = 0
            for surface, tag, _ in rows:
                tokens.append(Token(surface, offset, offset + len(surface)))
                pos.append(tag)
                offset += len(surface) + 1
            text = " ".join(r[0] for r in rows)
            sentences.append(IobSentence(
                tokens, [r[2] for r in rows], text, pos,
                tweet_id=ident[0] if ident else None,
                user_id=ident[1] if ident else None))
        rows, ident = [], None

    for lineno, line in _lines(stream):
        if not line.strip():
            flush()
            continue
        if line.startswith(_ID_PREFIX):
            if rows:
                flush()
            parts = line[len(_ID_PREFIX):].split("\t")
            ident = (parts[0], parts[1] if len(parts) > 1 else "")
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(
                f"expected 3 columns (surface, POS, label), got {len(fields)}",
                lineno)
        surface, pos, label = fields
        if not surface or not pos:
            raise FormatError("empty surface or POS column", lineno)
        if not is_label(label):
            raise FormatError(f"bad IOB label {label!r}", lineno)
        rows.append((surface, pos, label))
    flush()
    return sentences
