"""Toxic span detection: annotation cleaning, offset-exact WordPiece,
a multi-depth transformer token classifier, ensembling and span F1."""

from .corpus import Comment, Span, offsets_to_spans, parse_tsd_csv, spans_to_offsets, write_tsd_csv
from .encoder import EncoderConfig, backward, forward, init_parameters, predict_labels
from .ensemble import VoteConfig, majority_vote
from .labeling import LabeledSequence, labels_to_offsets, offsets_to_labels, whitespace_fill
from .metrics import EvalResult, brute_force_f1, comment_f1, evaluate_corpus
from .spanclean import CleanReport, clean_offsets
from .tokenizer import TokenAlignment, Vocab, build_vocab, load_vocab, tokenize
from .training import Checkpoint, TrainConfig, layer_selection, predict_corpus, train

__version__ = "0.1.0"
