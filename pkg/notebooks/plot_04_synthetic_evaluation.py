"""
End-to-end evaluation on synthetic tweets
=========================================

The generator is a known first-order label HMM, so we can compare our
tagger with the best any tagger could do on the same data.
"""

import numpy as np

from hmmner.corpus import iob_to_spans
from hmmner.evaluation import score, token_accuracy
from hmmner.features import GazetteerSet
from hmmner.pipeline import tag_tweets, train_from_iob
from hmmner.synthetic import SyntheticGenerator, gold_spans

gen = SyntheticGenerator(seed=7)
train_set, test_set = gen.sample(2000), gen.sample(500)
gaz = GazetteerSet(gen.gazetteers)
model = train_from_iob([s.to_iob() for s in train_set], gaz)

tweets, gold = gold_spans(test_set)
sents, pred = tag_tweets(tweets, model, gaz, [s.pos for s in test_set])
print("token accuracy", token_accuracy([s.labels for s in test_set],
                                       [s.labels for s in sents]))
print(score(gold, pred).to_table())


# oracle: first-order Viterbi with the generator's true parameters
def oracle(sent):
    with np.errstate(divide="ignore"):
        le = np.log([gen.emission_prob(w, p) for w, p in zip(sent.words, sent.pos)])
        la, li = np.log(gen.transition), np.log(gen.initial)
    d, backs = li + le[0], []
    for row in le[1:]:
        c = d[:, None] + la
        backs.append(c.argmax(axis=0))
        d = c.max(axis=0) + row
    path = [int(d.argmax())]
    for b in reversed(backs):
        path.append(int(b[path[-1]]))
    return [gen.labels[i] for i in reversed(path)]


oracle_spans = {}
for i, s in enumerate(test_set):
    iob = s.to_iob(f"t{i}")
    iob.labels = oracle(s)
    oracle_spans[f"t{i}"] = iob_to_spans(iob)
print("oracle")
print(score(gold, oracle_spans).to_table())
