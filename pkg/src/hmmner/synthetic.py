"""Synthetic tweet corpora drawn from a known first-order label HMM.

Words come from per-label pools with Zipf-like weights, so a held-out
sample contains unseen words. Gazetteer lists cover part of each name pool,
which ties the gazetteer X-tags to the labels without making them decisive.
The generator exposes its exact parameters (``initial``, ``transition``,
``emission_prob``) so that a Bayes-optimal tagger can be computed for it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import EntitySpan, IobSentence, RawTweet, Token

_CONS = "bcdfghjklmnprstvwyz"
_VOWELS = "aeiou"
MONTHS = ["january", "february", "march", "april", "may", "june", "july",
          "august", "september", "october", "november", "december"]
DAYS = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"]
_O_POS = ("NN", "VB", "JJ", "IN", "DT", "RB", "PRP", "VBD")

# How words for an entity type look. Types beyond the first four reuse
# these shapes with their own pools.
STYLES = ("person", "location", "organization", "date")
DEFAULT_TYPES = ("PERSON", "LOCATION", "ORGANIZATION", "DATE")


@dataclass
class SyntheticSentence:
    words: list[str]
    pos: list[str]
    labels: list[str]

    def to_iob(self, tweet_id: str = "", user_id: str = "") -> IobSentence:
        tokens, offset = [], 0
        for w in self.words:
            tokens.append(Token(w, offset, offset + len(w)))
            offset += len(w) + 1
        return IobSentence(tokens, list(self.labels), " ".join(self.words),
                           list(self.pos), tweet_id or None, user_id or None)

    def to_tweet(self, tweet_id: str, user_id: str = "u0") -> RawTweet:
        return RawTweet(tweet_id, user_id, " ".join(self.words))


def _zipf(n: int, s: float = 1.0) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


class SyntheticGenerator:
    """Known label HMM plus word pools and matching gazetteer lists.

    Labels are ``O`` and ``B-``/``I-`` for each type (9 labels for the
    default four types). Sentence length is uniform on
    ``[min_len, max_len]`` and independent of the labels.
    """

    def __init__(self, seed: int = 0, ne_types=DEFAULT_TYPES, min_len: int = 6,
                 max_len: int = 16, gazetteer_coverage: float = 0.6,
                 pool_size: int = 800, shared: float = 0.15, zipf_s: float = 0.6):
        self.rng = np.random.default_rng(seed)
        self.ne_types = tuple(ne_types)
        self.min_len, self.max_len = min_len, max_len
        self.labels = ["O"] + [f"{p}-{t}" for t in self.ne_types for p in "BI"]
        self.index = {label: i for i, label in enumerate(self.labels)}
        self._used: set[str] = set()
        self.gazetteers: dict[str, list[str]] = {
            "bperson": [], "iperson": [], "blocation": [], "ilocation": [],
            "months": list(MONTHS), "days": list(DAYS)}
        self.shared = shared
        self.zipf_s = zipf_s
        self._build_transitions()
        self._build_emissions(gazetteer_coverage, pool_size)

    # parameters

    def _build_transitions(self):
        k, t = len(self.labels), len(self.ne_types)
        a = np.zeros((k, k))
        init = np.zeros(k)
        init[0] = 0.7
        for j, _ in enumerate(self.ne_types):
            init[1 + 2 * j] = 0.3 / t
        a[0] = init.copy()
        a[0, 0] = 0.8
        a[0, 1::2] = 0.2 / t
        for j, _ in enumerate(self.ne_types):
            b, i = 1 + 2 * j, 2 + 2 * j
            for row, stay in ((b, 0.55), (i, 0.25)):
                a[row, i] = stay
                a[row, 0] = 1.0 - stay - 0.04
                others = [1 + 2 * m for m in range(t) if m != j]
                if others:
                    a[row, others] = 0.04 / len(others)
                else:
                    a[row, 0] += 0.04
        self.initial = init
        self.transition = a

    def _word(self, syllables: int, cap: bool) -> str:
        for attempt in range(10_000):
            # short word spaces run out; lengthen after repeated collisions
            n = syllables + attempt // 50
            w = "".join(self.rng.choice(list(_CONS)) + self.rng.choice(list(_VOWELS))
                        for _ in range(n))
            w = w + self.rng.choice(["", "n", "r", "sh", "t"])
            w = w.capitalize() if cap else w
            if w.lower() not in self._used and w.lower() not in MONTHS + DAYS:
                self._used.add(w.lower())
                return w
        raise RuntimeError("word pool exhausted")

    def _pool(self, n, syllables=(2, 3), cap=True):
        return [self._word(int(self.rng.integers(*syllables, endpoint=True)), cap)
                for _ in range(n)]

    def _gaz_part(self, pool, coverage):
        chosen = self.rng.random(len(pool)) < coverage
        return [w for w, c in zip(pool, chosen) if c]

    def _build_emissions(self, coverage, pool_size):
        # label -> (tokens [(word, pos)], probabilities)
        em: dict[str, tuple[list[tuple[str, str]], np.ndarray]] = {}
        zs = self.zipf_s
        names = self._pool(pool_size)
        n_shared = int(self.shared * pool_size)
        common = self._pool(pool_size * 2, (1, 3), cap=False)
        o_tokens = [(w, _O_POS[i % len(_O_POS)]) for i, w in enumerate(common)]
        o_probs = list(_zipf(len(o_tokens)) * 0.80)
        caps = common[:60]
        o_tokens += [(w.capitalize(), "NNP") for w in caps]
        o_probs += list(_zipf(len(caps)) * 0.05)
        # capitalised words that are also names elsewhere
        o_tokens += [(w, "NNP") for w in names[:n_shared]]
        o_probs += list(_zipf(n_shared, zs) * 0.03)
        tags = common[60:120]
        o_tokens += [("#" + w, "NN") for w in tags]
        o_probs += list(_zipf(len(tags)) * 0.04)
        o_tokens += [("@" + w + str(i), "NNP") for i, w in enumerate(common[120:160])]
        o_probs += list(_zipf(40) * 0.04)
        o_tokens += [(str(n), "CD") for n in range(2, 60)]
        o_probs += list(_zipf(58) * 0.04)
        em["O"] = (o_tokens, np.array(o_probs))

        for j, ne_type in enumerate(self.ne_types):
            style = STYLES[j % len(STYLES)]
            b_label, i_label = f"B-{ne_type}", f"I-{ne_type}"
            if style == "person":
                first = names if j == 0 else self._pool(pool_size)
                last = self._pool(pool_size)
                self.gazetteers["bperson"] += self._gaz_part(first, coverage)
                self.gazetteers["iperson"] += self._gaz_part(last, coverage)
                em[b_label] = ([(w, "NNP") for w in first], _zipf(len(first), zs))
                em[i_label] = ([(w, "NNP") for w in last], _zipf(len(last), zs))
            elif style == "location":
                head = names[:n_shared] + self._pool(pool_size - n_shared)
                tail = self._pool(pool_size // 4)
                self.gazetteers["blocation"] += self._gaz_part(head, coverage)
                self.gazetteers["ilocation"] += self._gaz_part(tail, coverage)
                toks = [(w, "NNP") for w in head] + [("#" + w, "NNP") for w in head[:40]]
                probs = np.concatenate([_zipf(len(head), zs) * 0.85, _zipf(40) * 0.15])
                em[b_label] = (toks, probs)
                em[i_label] = ([(w, "NNP") for w in tail], _zipf(len(tail)))
            elif style == "organization":
                acr = sorted({"".join(self.rng.choice(list("ABCDEFGHIJKLMNOPRSTUVW"),
                                                      size=int(self.rng.integers(2, 5))))
                              for _ in range(pool_size)} - {w.upper() for w in self._used})
                self._used.update(a.lower() for a in acr)
                heads = self._pool(pool_size // 3)
                toks = [(a, "NNP") for a in acr] + [(w, "NNP") for w in heads]
                probs = np.concatenate([_zipf(len(acr), zs) * 0.6, _zipf(len(heads), zs) * 0.4])
                em[b_label] = (toks, probs)
                suffixes = self._pool(15)
                em[i_label] = ([(w, "NNP") for w in suffixes], _zipf(len(suffixes)))
            else:
                toks = ([(m.capitalize(), "NNP") for m in MONTHS]
                        + [(d.capitalize(), "NNP") for d in DAYS])
                em[b_label] = (toks, np.full(len(toks), 1.0 / len(toks)))
                nums = [(str(d), "CD") for d in range(1, 32)] + \
                       [(str(y), "CD") for y in range(1990, 2026)]
                em[i_label] = (nums, np.full(len(nums), 1.0 / len(nums)))

        self.emissions = {}
        self._lookup: dict[tuple[str, str], np.ndarray] = {}
        for label in self.labels:
            toks, probs = em[label]
            probs = np.asarray(probs, dtype=float)
            probs = probs / probs.sum()
            self.emissions[label] = (toks, probs)
            for tok, p in zip(toks, probs):
                row = self._lookup.setdefault(tok, np.zeros(len(self.labels)))
                row[self.index[label]] += p

    def emission_prob(self, word: str, pos: str) -> np.ndarray:
        """``P((word, pos) | label)`` for every label."""
        return self._lookup.get((word, pos), np.zeros(len(self.labels)))

    # sampling

    def sample(self, n_sentences: int) -> list[SyntheticSentence]:
        out = []
        k = len(self.labels)
        for _ in range(n_sentences):
            n = int(self.rng.integers(self.min_len, self.max_len, endpoint=True))
            labels = [int(self.rng.choice(k, p=self.initial))]
            for _ in range(n - 1):
                labels.append(int(self.rng.choice(k, p=self.transition[labels[-1]])))
            words, pos = [], []
            for li in labels:
                toks, probs = self.emissions[self.labels[li]]
                w, p = toks[int(self.rng.choice(len(toks), p=probs))]
                words.append(w)
                pos.append(p)
            out.append(SyntheticSentence(words, pos, [self.labels[i] for i in labels]))
        return out


def gold_spans(sentences, prefix="t") -> tuple[list[RawTweet], dict[str, list[EntitySpan]]]:
    """Raw tweets and gold annotations for synthetic sentences."""
    from .corpus import iob_to_spans
    tweets, spans = [], {}
    for i, s in enumerate(sentences):
        tid = f"{prefix}{i}"
        tweets.append(s.to_tweet(tid))
        spans[tid] = iob_to_spans(s.to_iob(tid, "u0"))
    return tweets, spans
