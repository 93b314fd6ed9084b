"""
Pseudo-tokens: word, X-tag and meta-tag
=======================================

Every token the tagger sees is a triplet. The X-tag is a gazetteer code
when the token is found in a list, otherwise its POS tag. The meta-tag
describes the token's surface shape.
"""

from hmmner.corpus import tokenize
from hmmner.features import GazetteerSet, assign_meta_tag, featurize_sentence

# a few shapes
for token in ["Delhi", "BJP", "#Delhi", "@user", "2015", "3pm", "Modi,", "..."]:
    print(f"{token:>10}  {assign_meta_tag(token)}")

# gazetteers are plain word lists; matching ignores case and leading or
# trailing , . : # @
gaz = GazetteerSet({"bperson": ["Modi", "Ram"], "blocation": ["Delhi"],
                    "months": ["January"]})

text = "#Modi visits Delhi in January"
tokens = tokenize(text)
pos = ["NNP", "VBZ", "NNP", "IN", "NNP"]
for p in featurize_sentence(tokens, pos, gaz):
    print(p.word, p.x_tag, p.meta_tag, sep="\t")
