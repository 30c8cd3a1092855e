# %% [markdown]
# # Training on a planted-lexicon corpus
#
# In this synthetic corpus toxicity is exactly membership in a five-word
# list. A small multi-depth encoder trained from scratch should learn it
# within a few epochs.

# %%
import logging

from toxicspans import EncoderConfig, TrainConfig, build_vocab, evaluate_corpus, predict_corpus, train
from toxicspans.synthetic import PLANTED_LEXICON, planted_lexicon_corpus

logging.basicConfig(level=logging.INFO, format="%(message)s")

corpus = planted_lexicon_corpus(32, seed=0)
print(PLANTED_LEXICON)
print(corpus[0].text, corpus[0].toxic_offsets)

# %%
vocab = build_vocab([c.text for c in corpus], min_count=1)
config = EncoderConfig.last_n(3, vocab_size=len(vocab), hidden_dim=32, num_blocks=3, num_heads=4, max_len=32)
settings = TrainConfig(learning_rate=1e-3, num_epochs=15, seed=0)
ckpt = train(config, corpus, corpus, vocab, settings)
print(f"best epoch {ckpt.epoch}, F1 {ckpt.trial_f1:.4f}")

# %% [markdown]
# Held-out sentences from a different seed use the same lexicon.

# %%
held_out = planted_lexicon_corpus(16, seed=42)
preds = predict_corpus(ckpt.params, ckpt.encoder_config, held_out, vocab)
print("held-out F1:", round(evaluate_corpus([c.toxic_offsets for c in held_out], preds).mean_f1, 4))

# %% [markdown]
# Checkpoints are a small self-describing binary file.

# %%
import tempfile
from pathlib import Path

from toxicspans.checkpoint import load_checkpoint, save_checkpoint

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "model.ckpt"
    save_checkpoint(path, ckpt)
    restored = load_checkpoint(path)
    print(path.stat().st_size, "bytes, epoch", restored.epoch, restored.encoder_config.depth_set)
