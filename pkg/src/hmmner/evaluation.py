"""Post-processing of decoder output and entity-level scoring."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import OUTSIDE, EntitySpan, split_label

log = logging.getLogger(__name__)


def repair_orphan_i(labels: Sequence[str]) -> list[str]:
    """Replace I-XXX runs that do not continue an entity with O.

    A run is orphaned when it starts the sentence or follows anything other
    than B-XXX/I-XXX of the same type (normally an O).
    """
    out = []
    open_type = None
    for label in labels:
        prefix, ne_type = split_label(label)
        if prefix == "B":
            open_type = ne_type
        elif prefix == "I" and ne_type == open_type:
            pass
        else:
            open_type = None
            label = OUTSIDE
        out.append(label)
    return out


@dataclass
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return 100.0 * self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return 100.0 * self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f_measure(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


@dataclass
class EvalReport:
    """Per-type and overall counts; P/R/F are percentages."""

    per_type: dict[str, Counts] = field(default_factory=dict)
    overall: Counts = field(default_factory=Counts)
    duplicates: int = 0

    @property
    def precision(self) -> float:
        return self.overall.precision

    @property
    def recall(self) -> float:
        return self.overall.recall

    @property
    def f_measure(self) -> float:
        return self.overall.f_measure

    def rows(self) -> list[tuple[str, Counts]]:
        return [*sorted(self.per_type.items()), ("ALL", self.overall)]

    def to_lines(self) -> str:
        """Machine-readable ``TYPE<TAB>P<TAB>R<TAB>F`` lines."""
        return "".join(f"{name}\t{c.precision:.2f}\t{c.recall:.2f}\t{c.f_measure:.2f}\n"
                       for name, c in self.rows())

    def to_table(self) -> str:
        width = max([4, *(len(name) for name in self.per_type)])
        lines = [f"{'TYPE':<{width}}  {'TP':>6} {'FP':>6} {'FN':>6}  "
                 f"{'P':>6} {'R':>6} {'F':>6}"]
        for name, c in self.rows():
            lines.append(f"{name:<{width}}  {c.tp:>6} {c.fp:>6} {c.fn:>6}  "
                         f"{c.precision:>6.2f} {c.recall:>6.2f} {c.f_measure:>6.2f}")
        return "\n".join(lines) + "\n"


def score(gold: Mapping[str, Sequence[EntitySpan]],
          predicted: Mapping[str, Sequence[EntitySpan]]) -> EvalReport:
    """Exact-match scoring: same tweet, NE type, start and length."""
    report = EvalReport()

    def bucket(tag):
        return report.per_type.setdefault(tag, Counts())

    for tweet_id in sorted(set(gold) | set(predicted)):
        gold_keys = {s.key() for s in gold.get(tweet_id, ())}
        pred_list = [s.key() for s in predicted.get(tweet_id, ())]
        pred_keys = set(pred_list)
        if len(pred_keys) != len(pred_list):
            report.duplicates += len(pred_list) - len(pred_keys)
            log.warning("tweet %s: %d duplicate predicted spans counted once",
                        tweet_id, len(pred_list) - len(pred_keys))
        for key in pred_keys:
            if key in gold_keys:
                bucket(key[0]).tp += 1
            else:
                bucket(key[0]).fp += 1
        for key in gold_keys - pred_keys:
            bucket(key[0]).fn += 1
    for c in report.per_type.values():
        report.overall.tp += c.tp
        report.overall.fp += c.fp
        report.overall.fn += c.fn
    return report


def token_accuracy(gold: Sequence[Sequence[str]],
                   predicted: Sequence[Sequence[str]]) -> float:
    right = total = 0
    for g, p in zip(gold, predicted, strict=True):
        if len(g) != len(p):
            raise ValueError("label sequences differ in length")
        right += sum(a == b for a, b in zip(g, p))
        total += len(g)
    return right / total if total else 0.0
