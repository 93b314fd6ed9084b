"""Second-order Viterbi decoding."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .corpus import IobSentence, RawTweet, tokenize
from .features import GazetteerSet, PseudoToken, featurize_sentence, observation_key
from .model import HMMModel

DEFAULT_POS = "-"


class DecodeError(RuntimeError):
    pass


def viterbi_path(log_trans: np.ndarray, log_emit: np.ndarray,
                 start1: int, start2: int, end: int) -> tuple[list[int], float]:
    """Best label indices and their log score.

    ``log_trans[a, b, c]`` is ``log P(c | a, b)`` over a tag space that
    contains the labels ``0..K-1`` and the three boundary indices.
    ``log_emit`` has shape ``(n, K)``. States are label pairs; only labels
    with finite emission at a position are expanded, which is exact since
    the others cannot lie on a finite path. Ties go to the lowest index.
    """
    n, _ = log_emit.shape
    if n == 0:
        raise DecodeError("cannot decode an empty sequence")
    active = []
    for i in range(n):
        idx = np.flatnonzero(np.isfinite(log_emit[i]))
        if idx.size == 0:
            raise DecodeError(f"no label can emit the observation at position {i}")
        active.append(idx)

    # delta[p, c]: best score of a prefix ending in labels (prev[p], cur[c])
    prev = np.array([start2])
    cur = active[0]
    delta = (log_trans[start1, start2, cur] + log_emit[0, cur])[None, :]
    if not np.isfinite(delta).any():
        raise DecodeError("no finite path at position 0")
    steps = []
    for i in range(1, n):
        nxt = active[i]
        cand = delta[:, :, None] + log_trans[np.ix_(prev, cur, nxt)]
        back = cand.argmax(axis=0)
        delta = np.take_along_axis(cand, back[None], axis=0)[0] + log_emit[i, nxt][None, :]
        if not np.isfinite(delta).any():
            raise DecodeError(f"no finite path at position {i}")
        steps.append(back)
        prev, cur = cur, nxt

    final = delta + log_trans[np.ix_(prev, cur, [end])][:, :, 0]
    flat = int(final.argmax())
    best = float(final.flat[flat])
    if not np.isfinite(best):
        raise DecodeError("no finite path reaches the end of the sentence")
    p, c = divmod(flat, final.shape[1])

    # walk the backpointers; positions are indices into the active sets
    path = [c]
    for back in reversed(steps):
        path.append(p)
        p, c = back[p, c], p
    path.reverse()
    return [int(active[i][j]) for i, j in enumerate(path)], best


def emission_matrix(obs: Sequence[PseudoToken | str], model: HMMModel) -> np.ndarray:
    rows = [model.emission_scores(o if isinstance(o, str) else observation_key(o))
            for o in obs]
    with np.errstate(divide="ignore"):
        return np.log(np.array(rows))


def viterbi(obs: Sequence[PseudoToken | str], model: HMMModel,
            with_score: bool = False):
    """Most probable label sequence for ``obs`` (pseudo-tokens or keys)."""
    if len(obs) == 0:
        raise DecodeError("cannot decode an empty sequence")
    inv = model.inventory
    path, score = viterbi_path(model.log_transitions, emission_matrix(obs, model),
                               inv.start1, inv.start2, inv.end)
    labels = [inv.labels[i] for i in path]
    return (labels, score) if with_score else labels


PosTagger = Callable[[list[str]], list[str]]


def decode_tweet(tweet: RawTweet, pos_tags: Sequence[str] | PosTagger | None,
                 gaz: GazetteerSet | None, model: HMMModel) -> IobSentence:
    """Tokenise, featurise and decode one tweet.

    ``pos_tags`` is a tag list aligned with the whitespace tokens, a callable
    producing one, or None to use the placeholder tag.
    """
    tokens = tokenize(tweet.text)
    surfaces = [t.surface for t in tokens]
    if pos_tags is None:
        pos = [DEFAULT_POS] * len(tokens)
    elif callable(pos_tags):
        pos = list(pos_tags(surfaces))
    else:
        pos = list(pos_tags)
    if not tokens:
        return IobSentence([], [], tweet.text, [], tweet.tweet_id, tweet.user_id)
    obs = featurize_sentence(tokens, pos, gaz, model.aldt_means_all_digits)
    labels = viterbi(obs, model)
    return IobSentence(tokens, labels, tweet.text, pos, tweet.tweet_id, tweet.user_id)
