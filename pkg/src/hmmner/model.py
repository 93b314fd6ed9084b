"""Trigram HMM parameters over pseudo-token observations.

Tag transitions are maximum-likelihood trigram, bigram and unigram
estimates mixed by deleted interpolation. Emissions are relative
frequencies of observation keys per tag. Keys never seen in training are
scored by a suffix model built from rare training keys.

Each training sentence is padded with two start tags and one end tag, so a
sentence ``t1..tn`` contributes the trigrams ``(S1, S2, t1)``,
``(S2, t1, t2)``, ..., ``(t_{n-1}, t_n, END)``.
"""
from __future__ import annotations

import hashlib
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import OUTSIDE, split_label
from .features import SEP, PseudoToken, observation_key

log = logging.getLogger(__name__)

START1 = "<S1>"
START2 = "<S2>"
END = "</S>"
BOUNDARY_TAGS = (START1, START2, END)

FORMAT_NAME = "hmmner-model"
FORMAT_VERSION = 1

EMISSION_MODES = ("tag", "observed")


def _label_sort_key(label: str):
    prefix, ne_type = split_label(label)
    if prefix == OUTSIDE:
        return (0, "", "")
    return (1, ne_type, prefix)


class TagInventory:
    """NE labels plus the three boundary tags.

    Labels take indices ``0..K-1`` (``O`` first, then ``B-``/``I-`` pairs by
    type name); ``START1``, ``START2`` and ``END`` follow as ``K``, ``K+1``
    and ``K+2``.
    """

    def __init__(self, labels: Sequence[str]):
        labels = list(labels)
        for label in labels:
            if label in BOUNDARY_TAGS:
                raise ValueError(f"{label} is a reserved boundary tag")
            split_label(label)
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels")
        self.labels = labels
        self.all_tags = labels + list(BOUNDARY_TAGS)
        self.index = {tag: i for i, tag in enumerate(self.all_tags)}

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> "TagInventory":
        return cls(sorted(set(labels), key=_label_sort_key))

    def __len__(self):
        return len(self.labels)

    @property
    def start1(self) -> int:
        return len(self.labels)

    @property
    def start2(self) -> int:
        return len(self.labels) + 1

    @property
    def end(self) -> int:
        return len(self.labels) + 2

    def __eq__(self, other):
        return isinstance(other, TagInventory) and self.labels == other.labels


@dataclass
class EventCounts:
    """Raw counts gathered from a labelled corpus (tags as strings)."""

    unigram: Counter = field(default_factory=Counter)
    bigram: Counter = field(default_factory=Counter)
    trigram: Counter = field(default_factory=Counter)
    emission: dict[str, Counter] = field(default_factory=dict)
    sentences: int = 0

    @property
    def total(self) -> int:
        """Number of predicted positions, end tags included."""
        return sum(self.unigram.values())

    def labels(self) -> set[str]:
        return {t for t in self.unigram if t not in BOUNDARY_TAGS}


def count_events(training: Iterable[tuple[Sequence[PseudoToken], Sequence[str]]]
                 ) -> EventCounts:
    """Count tag n-grams and (key, tag) emissions.

    Unigrams count tags in predicted positions (``t1..tn`` and END). Bigrams
    and trigrams run over the padded sequence.
    """
    counts = EventCounts()
    for obs, labels in training:
        if len(obs) != len(labels):
            raise ValueError(
                f"{len(obs)} observations but {len(labels)} labels")
        for label in labels:
            try:
                split_label(label)
            except ValueError:
                raise ValueError(f"unknown label format {label!r}") from None
        counts.sentences += 1
        padded = [START1, START2, *labels, END]
        for i in range(2, len(padded)):
            counts.unigram[padded[i]] += 1
        for i in range(1, len(padded)):
            counts.bigram[padded[i - 1], padded[i]] += 1
        for i in range(2, len(padded)):
            counts.trigram[padded[i - 2], padded[i - 1], padded[i]] += 1
        for p, label in zip(obs, labels):
            key = p if isinstance(p, str) else observation_key(p)
            counts.emission.setdefault(key, Counter())[label] += 1
    return counts


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def fit_lambdas(counts: EventCounts) -> tuple[float, float, float]:
    """Deleted interpolation weights ``(unigram, bigram, trigram)``.

    Each seen trigram votes with its count for whichever of the three
    leave-one-out estimates is largest; ties go to the higher order.
    """
    if not counts.trigram:
        raise ValueError("no trigrams counted; corpus is empty")
    ctx3 = Counter()
    for (a, b, _), n in counts.trigram.items():
        ctx3[a, b] += n
    ctx2 = Counter()
    for (b, _), n in counts.bigram.items():
        ctx2[b] += n
    total = counts.total
    votes = [0, 0, 0]
    for (a, b, c), n in sorted(counts.trigram.items()):
        tri = _ratio(n - 1, ctx3[a, b] - 1)
        bi = _ratio(counts.bigram[b, c] - 1, ctx2[b] - 1)
        uni = _ratio(counts.unigram[c] - 1, total - 1)
        if tri >= bi and tri >= uni:
            votes[2] += n
        elif bi >= uni:
            votes[1] += n
        else:
            votes[0] += n
    s = sum(votes)
    return (votes[0] / s, votes[1] / s, votes[2] / s)


class TransitionModel:
    """Interpolated ``P(t | t_-2, t_-1)`` as a dense array.

    ``probs[a, b, c]`` is the probability of tag ``c`` after ``a, b``, all
    indices in the inventory's full tag space (boundary tags included).
    """

    def __init__(self, inventory: TagInventory, counts: EventCounts,
                 lambdas: tuple[float, float, float]):
        self.inventory = inventory
        self.lambdas = lambdas
        n = len(inventory.all_tags)
        idx = inventory.index
        uni = np.zeros(n)
        bi = np.zeros((n, n))
        tri = np.zeros((n, n, n))
        for t, c in counts.unigram.items():
            uni[idx[t]] = c
        for (a, b), c in counts.bigram.items():
            bi[idx[a], idx[b]] = c
        for (a, b, t), c in counts.trigram.items():
            tri[idx[a], idx[b], idx[t]] = c
        self.total = uni.sum()
        ctx2 = bi.sum(axis=1)
        ctx3 = tri.sum(axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            p_uni = uni / self.total
            p_bi = np.where(ctx2[:, None] > 0, bi / ctx2[:, None], 0.0)
            p_tri = np.where(ctx3[:, :, None] > 0, tri / ctx3[:, :, None], 0.0)
        l1, l2, l3 = lambdas
        self.probs = l3 * p_tri + l2 * p_bi[None, :, :] + l1 * p_uni[None, None, :]
        self.context_counts = ctx3

    def prob(self, t2: str, t1: str, t: str) -> float:
        i = self.inventory.index
        return float(self.probs[i[t2], i[t1], i[t]])

    def seen_contexts(self) -> list[tuple[str, str]]:
        tags = self.inventory.all_tags
        a, b = np.nonzero(self.context_counts)
        return [(tags[i], tags[j]) for i, j in zip(a, b)]


class EmissionModel:
    """Per-tag relative frequencies of observation keys.

    In ``"tag"`` mode ``P(o|t) = C(o,t) / C(t)``. ``"observed"`` mode
    divides by ``C(o)`` instead, for comparison experiments; it does not
    normalise per tag.
    """

    def __init__(self, inventory: TagInventory, emission: dict[str, Counter],
                 mode: str = "tag"):
        if mode not in EMISSION_MODES:
            raise ValueError(f"emission mode must be one of {EMISSION_MODES}")
        self.inventory = inventory
        self.mode = mode
        k = len(inventory)
        self.counts: dict[str, np.ndarray] = {}
        tag_counts = np.zeros(k)
        for key in sorted(emission):
            row = np.zeros(k)
            for label, c in emission[key].items():
                row[inventory.index[label]] = c
            self.counts[key] = row
            tag_counts += row
        self.tag_counts = tag_counts

    def __contains__(self, key: str) -> bool:
        return key in self.counts

    def frequency(self, key: str) -> int:
        row = self.counts.get(key)
        return 0 if row is None else int(row.sum())

    def vector(self, key: str) -> np.ndarray:
        row = self.counts[key]
        if self.mode == "tag":
            den = self.tag_counts
        else:
            den = np.full_like(row, row.sum())
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, row / den, 0.0)

    def prob(self, key: str, tag: str) -> float:
        if key not in self.counts:
            return 0.0
        return float(self.vector(key)[self.inventory.index[tag]])

    def tag_priors(self) -> np.ndarray:
        return self.tag_counts / self.tag_counts.sum()


class SuffixModel:
    """``P(t | suffix)`` from rare training keys, smoothed towards shorter suffixes.

    ``P(t|s_k) = (MLE(t|s_k) + theta * P(t|s_{k-1})) / (1 + theta)``, with
    the empty suffix carrying the tag distribution of rare-key events and
    ``theta`` the sample standard deviation of the overall tag priors.
    """

    def __init__(self, inventory: TagInventory, suffix_counts: dict[str, np.ndarray],
                 theta: float, max_len: int, rare_threshold: int,
                 fallback_prior: np.ndarray | None = None):
        self.inventory = inventory
        self.suffix_counts = suffix_counts
        self.theta = theta
        self.max_len = max_len
        self.rare_threshold = rare_threshold
        if "" in suffix_counts and suffix_counts[""].sum() > 0:
            base = suffix_counts[""] / suffix_counts[""].sum()
        else:
            if fallback_prior is None:
                raise ValueError("suffix model needs rare events or a fallback prior")
            base = np.asarray(fallback_prior, dtype=float)
        self.prior = base
        self.probs: dict[str, np.ndarray] = {"": base}
        for s in sorted(suffix_counts, key=lambda s: (len(s), s)):
            if not s:
                continue
            row = suffix_counts[s]
            mle = row / row.sum()
            self.probs[s] = (mle + theta * self.probs[s[1:]]) / (1.0 + theta)

    def longest_suffix(self, key: str) -> str:
        for k in range(min(self.max_len, len(key)), 0, -1):
            s = key[len(key) - k:]
            if s in self.probs:
                return s
        return ""

    def distribution(self, key: str) -> np.ndarray:
        return self.probs[self.longest_suffix(key)]

    def scores(self, key: str) -> np.ndarray:
        """Emission-like scores ``P(t|s) / P(t)``; zero where the prior is zero."""
        dist = self.distribution(key)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.prior > 0, dist / self.prior, 0.0)


def build_suffix_model(inventory: TagInventory, emission: EmissionModel,
                       max_len: int = 10, rare_threshold: int = 2) -> SuffixModel:
    k = len(inventory)
    counts: dict[str, np.ndarray] = {}
    for key, row in emission.counts.items():
        if row.sum() > rare_threshold:
            continue
        for n in range(0, min(max_len, len(key)) + 1):
            s = key[len(key) - n:]
            if s not in counts:
                counts[s] = np.zeros(k)
            counts[s] += row
    priors = emission.tag_priors()
    theta = float(np.std(priors, ddof=1)) if k > 1 else 0.0
    if not counts:
        log.warning("no rare keys (frequency <= %d); unknown keys scored by tag "
                    "priors alone", rare_threshold)
    return SuffixModel(inventory, counts, theta, max_len, rare_threshold,
                       fallback_prior=priors)


class HMMModel:
    """A fitted tagger: transitions, emissions and the suffix fallback."""

    def __init__(self, counts: EventCounts, lambdas: tuple[float, float, float] | None = None,
                 suffix_max_len: int = 10, rare_threshold: int = 2,
                 emission_mode: str = "tag", suffix_counts: dict[str, np.ndarray] | None = None,
                 aldt_means_all_digits: bool = False):
        if not counts.trigram:
            raise ValueError("cannot build a model from an empty corpus")
        self.counts = counts
        # featurisation switch, kept with the model so tagging matches training
        self.aldt_means_all_digits = aldt_means_all_digits
        self.inventory = TagInventory.from_labels(counts.labels())
        self.lambdas = fit_lambdas(counts) if lambdas is None else tuple(lambdas)
        self.transitions = TransitionModel(self.inventory, counts, self.lambdas)
        self.emissions = EmissionModel(self.inventory, counts.emission, emission_mode)
        if suffix_counts is None:
            self.suffixes = build_suffix_model(
                self.inventory, self.emissions, suffix_max_len, rare_threshold)
        else:
            priors = self.emissions.tag_priors()
            theta = float(np.std(priors, ddof=1)) if len(self.inventory) > 1 else 0.0
            self.suffixes = SuffixModel(self.inventory, suffix_counts, theta,
                                        suffix_max_len, rare_threshold, priors)
        with np.errstate(divide="ignore"):
            self.log_transitions = np.log(self.transitions.probs)

    @property
    def labels(self) -> list[str]:
        return self.inventory.labels

    @property
    def emission_mode(self) -> str:
        return self.emissions.mode

    def transition_prob(self, t2: str, t1: str, t: str) -> float:
        """``P(t | t2, t1)`` where ``t2`` is two positions back."""
        return self.transitions.prob(t2, t1, t)

    def emission_prob(self, key: str, tag: str) -> float:
        return self.emissions.prob(key, tag)

    def suffix_prob(self, key: str, tag: str) -> float:
        return float(self.suffixes.scores(key)[self.inventory.index[tag]])

    def is_known(self, key: str) -> bool:
        return key in self.emissions

    def emission_scores(self, key: str) -> np.ndarray:
        """Scores over the K labels, routing unknown keys to the suffix model."""
        if key in self.emissions:
            return self.emissions.vector(key)
        return self.suffixes.scores(key)

    def summary(self) -> dict:
        return {
            "labels": len(self.inventory),
            "sentences": self.counts.sentences,
            "tokens": self.counts.total - self.counts.sentences,
            "vocabulary": len(self.emissions.counts),
            "lambdas": list(self.lambdas),
            "suffixes": len(self.suffixes.probs),
            "theta": self.suffixes.theta,
        }


def train(training: Iterable[tuple[Sequence[PseudoToken], Sequence[str]]],
          suffix_max_len: int = 10, rare_threshold: int = 2,
          emission_mode: str = "tag", aldt_means_all_digits: bool = False) -> HMMModel:
    counts = count_events(training)
    if counts.sentences == 0 or not counts.trigram:
        raise ValueError("training corpus is empty")
    return HMMModel(counts, suffix_max_len=suffix_max_len,
                    rare_threshold=rare_threshold, emission_mode=emission_mode,
                    aldt_means_all_digits=aldt_means_all_digits)


# Model file.
#
#   hmmner-model<TAB>1
#   sha256<TAB><hex digest of everything after this line>
#   [config]      key<TAB>value
#   [tags]        label
#   [lambdas]     unigram, bigram, trigram weight as float.hex
#   [unigram]     tag<TAB>count
#   [bigram]      tag<TAB>tag<TAB>count
#   [trigram]     tag<TAB>tag<TAB>tag<TAB>count
#   [emission]    key<TAB>label<TAB>count
#   [suffix]      suffix<TAB>label<TAB>count
#   [end]
#
# Rows are sorted, so equal models give byte-identical files.

_SECTIONS = ("config", "tags", "lambdas", "unigram", "bigram", "trigram",
             "emission", "suffix")


def dumps_model(model: HMMModel) -> str:
    c = model.counts
    lines = ["[config]",
             f"suffix_max_len\t{model.suffixes.max_len}",
             f"rare_threshold\t{model.suffixes.rare_threshold}",
             f"emission_mode\t{model.emission_mode}",
             f"aldt_means_all_digits\t{int(model.aldt_means_all_digits)}",
             f"sentences\t{c.sentences}",
             "[tags]", *model.labels,
             "[lambdas]", *(float(x).hex() for x in model.lambdas),
             "[unigram]"]
    lines += [f"{t}\t{n}" for t, n in sorted(c.unigram.items())]
    lines.append("[bigram]")
    lines += [f"{a}\t{b}\t{n}" for (a, b), n in sorted(c.bigram.items())]
    lines.append("[trigram]")
    lines += [f"{a}\t{b}\t{t}\t{n}" for (a, b, t), n in sorted(c.trigram.items())]
    lines.append("[emission]")
    for key in sorted(c.emission):
        lines += [f"{key}\t{t}\t{n}" for t, n in sorted(c.emission[key].items())]
    lines.append("[suffix]")
    labels = model.labels
    for s in sorted(model.suffixes.suffix_counts):
        row = model.suffixes.suffix_counts[s]
        lines += [f"{s}\t{labels[j]}\t{int(row[j])}" for j in np.nonzero(row)[0]]
    lines.append("[end]")
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return f"{FORMAT_NAME}\t{FORMAT_VERSION}\nsha256\t{digest}\n{body}"


def loads_model(text: str) -> HMMModel:
    try:
        return _loads_model(text)
    except (KeyError, IndexError) as exc:
        raise ValueError(f"malformed model file: {exc}") from None


def _loads_model(text: str) -> HMMModel:
    head, sep, rest = text.partition("\n")
    parts = head.split("\t")
    if len(parts) != 2 or parts[0] != FORMAT_NAME:
        raise ValueError("not a model file (bad header)")
    try:
        version = int(parts[1])
    except ValueError:
        raise ValueError(f"bad model version {parts[1]!r}") from None
    if version > FORMAT_VERSION:
        raise ValueError(f"model version {version} is newer than supported "
                         f"version {FORMAT_VERSION}")
    digest_line, _, body = rest.partition("\n")
    dparts = digest_line.split("\t")
    if len(dparts) != 2 or dparts[0] != "sha256":
        raise ValueError("model file missing checksum line")
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != dparts[1]:
        raise ValueError("model checksum mismatch (file truncated or edited)")

    sections: dict[str, list[str]] = {}
    current = None
    for line in body.split("\n"):
        if line.startswith("[") and line.endswith("]") and line[1:-1] in (*_SECTIONS, "end"):
            current = line[1:-1]
            sections[current] = []
        elif line:
            if current is None:
                raise ValueError("model data before first section")
            sections[current].append(line)
    if "end" not in sections or any(s not in sections for s in _SECTIONS):
        raise ValueError("model file is incomplete")

    config = dict(line.split("\t", 1) for line in sections["config"])
    counts = EventCounts(sentences=int(config["sentences"]))
    for line in sections["unigram"]:
        t, n = line.split("\t")
        counts.unigram[t] = int(n)
    for line in sections["bigram"]:
        a, b, n = line.split("\t")
        counts.bigram[a, b] = int(n)
    for line in sections["trigram"]:
        a, b, t, n = line.split("\t")
        counts.trigram[a, b, t] = int(n)
    for line in sections["emission"]:
        key, t, n = line.split("\t")
        counts.emission.setdefault(key, Counter())[t] = int(n)
    lambdas = tuple(float.fromhex(x) for x in sections["lambdas"])
    labels = sections["tags"]
    index = {t: i for i, t in enumerate(labels)}
    suffix_counts: dict[str, np.ndarray] = {}
    for line in sections["suffix"]:
        s, t, n = line.split("\t")
        if s not in suffix_counts:
            suffix_counts[s] = np.zeros(len(labels))
        suffix_counts[s][index[t]] = int(n)
    model = HMMModel(counts, lambdas=lambdas,
                     suffix_max_len=int(config["suffix_max_len"]),
                     rare_threshold=int(config["rare_threshold"]),
                     emission_mode=config["emission_mode"],
                     suffix_counts=suffix_counts,
                     aldt_means_all_digits=bool(int(config.get("aldt_means_all_digits", 0))))
    if model.labels != labels:
        raise ValueError("tag section disagrees with counts")
    return model


def save_model(model: HMMModel, path: str | os.PathLike) -> None:
    if not str(path):
        raise ValueError("empty model path")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(model))


def load_model(path: str | os.PathLike) -> HMMModel:
    if not str(path):
        raise ValueError("empty model path")
    with open(path, encoding="utf-8", newline="") as fh:
        return loads_model(fh.read())
