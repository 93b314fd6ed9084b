"""Trigram HMM named-entity tagger for short social-media texts."""
from .corpus import (EntitySpan, FormatError, IngestReport, IobSentence, RawTweet,
                     Token, emit_annotation_file, iob_to_spans, parse_annotation_file,
                     parse_raw_file, read_iob_file, spans_to_iob, tokenize,
                     write_iob_file)
from .decoder import DecodeError, decode_tweet, viterbi
from .evaluation import EvalReport, repair_orphan_i, score
from .features import (GazetteerSet, PseudoToken, assign_meta_tag, assign_x_tag,
                       featurize_sentence, observation_key)
from .model import (HMMModel, TagInventory, build_suffix_model, count_events,
                    fit_lambdas, load_model, save_model, train)
from .pipeline import convert, tag_tweets, train_from_iob

__version__ = "0.1.0"
