"""
Training and inspecting a model
===============================

We train on a synthetic corpus, then look at the smoothing weights, one
transition row and the suffix fallback for a word never seen in training.
"""

import numpy as np

from hmmner.features import GazetteerSet, PseudoToken
from hmmner.model import dumps_model, loads_model
from hmmner.pipeline import train_from_iob
from hmmner.synthetic import SyntheticGenerator

gen = SyntheticGenerator(seed=0)
gaz = GazetteerSet(gen.gazetteers)
model = train_from_iob([s.to_iob() for s in gen.sample(1000)], gaz)
print(model.summary())

# lambdas are (unigram, bigram, trigram)
print("lambdas", model.lambdas, "sum", sum(model.lambdas))

# P(t | <S2>, B-PERSON) over every target tag
targets = [*model.labels, "</S>"]
row = [model.transition_prob("<S2>", "B-PERSON", t) for t in targets]
for t, p in zip(targets, row):
    print(f"  {t:<16}{p:.4f}")
print("row sum", np.sum(row))

# an unseen capitalised word falls back to its suffix distribution
key = PseudoToken("Zarvonik", "NNP", "ICAP").key
print("known?", model.is_known(key))
print("longest stored suffix", repr(model.suffixes.longest_suffix(key)))
print({t: round(float(p), 3) for t, p in zip(model.labels, model.suffixes.distribution(key))})

# the text format round-trips exactly
text = dumps_model(model)
assert dumps_model(loads_model(text)) == text
print(text.splitlines()[0], len(text), "bytes")
