import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import P
from hmmner.corpus import RawTweet
from hmmner.decoder import DecodeError, decode_tweet, viterbi, viterbi_path
from hmmner.features import GazetteerSet
from hmmner.model import END, START1, START2, BOUNDARY_TAGS, train
from oracles import brute_force_best, dense_brute_force, sequence_log_score

TOL = 1e-9


def test_degenerate_model_returns_only_path():
    m = train([([P("a"), P("b"), P("c")], ["B-X", "I-X", "O"])] * 4)
    keys = [P(w).key for w in "abc"]
    assert viterbi(keys, m) == ["B-X", "I-X", "O"]


def test_length_one_closed_form(hand_corpus):
    m = train(hand_corpus)
    key = P("Modi", "NNP", "ICAP").key

    def value(t):
        return (m.emission_prob(key, t) * m.transition_prob(START1, START2, t)
                * m.transition_prob(START2, t, END))
    expected = max(m.labels, key=value)
    labels, score = viterbi([key], m, with_score=True)
    assert labels == [expected]
    assert score == pytest.approx(math.log(value(expected)), abs=TOL)


def test_empty_observation_rejected(hand_corpus):
    with pytest.raises(DecodeError):
        viterbi([], train(hand_corpus))


def test_unreachable_column_reported():
    lt = np.zeros((5, 5, 5))
    le = np.array([[0.0, 0.0], [-np.inf, -np.inf]])
    with pytest.raises(DecodeError, match="position 1"):
        viterbi_path(lt, le, 2, 3, 4)


def test_ties_broken_by_lowest_index():
    lt = np.log(np.full((5, 5, 5), 0.5))
    le = np.zeros((3, 2))
    path, _ = viterbi_path(lt, le, 2, 3, 4)
    assert path == [0, 0, 0]


def random_dense_model(rng, k, zero_frac):
    n_all = k + 3
    t = rng.random((n_all, n_all, k + 1))
    t[rng.random(t.shape) < zero_frac] = 0.0
    t /= np.maximum(t.sum(axis=2, keepdims=True), 1e-300)
    full = np.zeros((n_all, n_all, n_all))
    full[:, :, :k] = t[:, :, :k]
    full[:, :, k + 2] = t[:, :, k]
    with np.errstate(divide="ignore"):
        return np.log(full)


@pytest.mark.parametrize("seed", range(40))
def test_dense_matches_exhaustive(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 5))
    n = int(rng.integers(1, 7))
    lt = random_dense_model(rng, k, zero_frac=0.2)
    emit = rng.random((n, k))
    emit[rng.random(emit.shape) < 0.2] = 0.0
    with np.errstate(divide="ignore"):
        le = np.log(emit)
    best, totals = dense_brute_force(lt, le, k, k + 1, k + 2)
    if not np.isfinite(best):
        with pytest.raises(DecodeError):
            viterbi_path(lt, le, k, k + 1, k + 2)
        return
    path, score = viterbi_path(lt, le, k, k + 1, k + 2)
    assert score == pytest.approx(best, abs=TOL)
    idx = sum(p * k ** (n - 1 - i) for i, p in enumerate(path))
    assert totals[idx] == pytest.approx(best, abs=TOL)


@st.composite
def model_and_sentence(draw):
    labels = draw(st.lists(st.sampled_from(["O", "B-A", "I-A", "B-B"]),
                           min_size=1, max_size=4, unique=True))
    vocab = draw(st.lists(st.sampled_from("abcdeXY"), min_size=1, max_size=5, unique=True))
    sents = []
    for _ in range(draw(st.integers(1, 8))):
        n = draw(st.integers(1, 6))
        sents.append(([P(w) for w in draw(st.lists(st.sampled_from(vocab), min_size=n, max_size=n))],
                      draw(st.lists(st.sampled_from(labels), min_size=n, max_size=n))))
    # test words may be unseen in training
    test = draw(st.lists(st.sampled_from(vocab + ["zz", "Q"]), min_size=1, max_size=6))
    return sents, [P(w).key for w in test]


@settings(max_examples=200, deadline=None)
@given(model_and_sentence())
def test_viterbi_matches_brute_force(case):
    sents, keys = case
    m = train(sents)
    best, argbest = brute_force_best(m, keys)
    if not math.isfinite(best):
        with pytest.raises(DecodeError):
            viterbi(keys, m)
        return
    labels, score = viterbi(keys, m, with_score=True)
    assert score == pytest.approx(best, abs=TOL)
    assert sequence_log_score(m, keys, labels) == pytest.approx(best, abs=TOL)
    assert labels in argbest
    assert not set(labels) & set(BOUNDARY_TAGS)


@settings(max_examples=100, deadline=None)
@given(model_and_sentence(), st.floats(0.01, 100))
def test_emission_scaling_keeps_argmax(case, c):
    sents, keys = case
    m = train(sents)
    try:
        labels = viterbi(keys, m)
    except DecodeError:
        return
    inv = m.inventory
    from hmmner.decoder import emission_matrix
    le = emission_matrix(keys, m) + math.log(c)
    path, _ = viterbi_path(m.log_transitions, le, inv.start1, inv.start2, inv.end)
    assert [inv.labels[i] for i in path] == labels


def test_decode_tweet_empty(hand_corpus):
    sent = decode_tweet(RawTweet("T", "U", "   "), None, None, train(hand_corpus))
    assert sent.tokens == [] and sent.labels == []


def test_decode_tweet_recovers_training_labels():
    gaz = GazetteerSet({"bperson": ["modi"], "blocation": ["delhi"]})
    text = "Modi visits Delhi today"
    pos = ["NNP", "VBZ", "NNP", "NN"]
    from hmmner.features import featurize_sentence
    from hmmner.corpus import tokenize
    obs = featurize_sentence(tokenize(text), pos, gaz)
    m = train([(obs, ["B-PER", "O", "B-LOC", "O"])] * 5)
    sent = decode_tweet(RawTweet("T", "U", text), pos, gaz, m)
    assert sent.labels == ["B-PER", "O", "B-LOC", "O"]
    again = decode_tweet(RawTweet("T", "U", text), pos, gaz, m)
    assert again.labels == sent.labels


def test_decode_tweet_pos_callable(hand_corpus):
    m = train(hand_corpus)
    sent = decode_tweet(RawTweet("T", "U", "Modi spoke"),
                        lambda words: ["NNP", "VBD"][:len(words)], None, m)
    assert sent.pos_tags == ["NNP", "VBD"]
    assert sent.labels == ["B-PER", "O"]
