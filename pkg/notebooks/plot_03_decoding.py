"""
Decoding a tweet
================

Viterbi over label pairs, then the orphan I- repair, then back to
character spans.
"""

from hmmner.corpus import RawTweet, iob_to_spans, tokenize
from hmmner.decoder import decode_tweet, viterbi
from hmmner.evaluation import repair_orphan_i
from hmmner.features import GazetteerSet, featurize_sentence
from hmmner.model import train

gaz = GazetteerSet({"bperson": ["modi", "rahul"], "blocation": ["delhi", "mumbai"]})
corpus = [
    ("Modi visits Delhi today", ["NNP", "VBZ", "NNP", "NN"],
     ["B-PER", "O", "B-LOC", "O"]),
    ("Rahul spoke in Mumbai", ["NNP", "VBD", "IN", "NNP"],
     ["B-PER", "O", "O", "B-LOC"]),
    ("nothing to see here", ["NN", "TO", "VB", "RB"], ["O"] * 4),
]
data = [(featurize_sentence(tokenize(t), p, gaz), l) for t, p, l in corpus]
model = train(data * 3)

tweet = RawTweet("42", "u7", "Rahul visits Delhi")
sent = decode_tweet(tweet, ["NNP", "VBZ", "NNP"], gaz, model)
print(list(zip(sent.surfaces, sent.labels)))
print(iob_to_spans(sent))

# the raw decoder output with its log score
keys = [p.key for p in featurize_sentence(sent.tokens, sent.pos_tags, gaz)]
print(viterbi(keys, model, with_score=True))

# an I- with no matching B- or I- before it is turned into O
print(repair_orphan_i(["O", "I-LOC", "I-LOC", "B-PER", "I-PER"]))
