# %% [markdown]
# # Which blocks should feed the classifier?
#
# The head concatenates the hidden states of the last N blocks, so its
# input width is N times the hidden size. Here we train one model per N
# and compare trial F1. On a toy corpus the differences are mostly noise.

# %%
from toxicspans import EncoderConfig, TrainConfig, build_vocab, layer_selection
from toxicspans.synthetic import planted_lexicon_corpus

train_corpus = planted_lexicon_corpus(32, seed=0)
trial_corpus = planted_lexicon_corpus(16, seed=1)
vocab = build_vocab([c.text for c in train_corpus + trial_corpus], min_count=1)
base = EncoderConfig(vocab_size=len(vocab), hidden_dim=32, num_blocks=3, num_heads=4, max_len=32)

for n in (1, 2, 3):
    print(n, EncoderConfig.last_n(n, **{k: v for k, v in base.to_dict().items() if k != "depth_set"}).head_dim)

# %%
rows = layer_selection(base, train_corpus, trial_corpus, vocab, TrainConfig(learning_rate=1e-3, num_epochs=20))
print(" N  depth set  trial F1  epoch")
for r in rows:
    print(f"{r['last_n']:>2}  {str(r['depth_set']):<9}  {r['trial_f1']:.4f}    {r['best_epoch']}")
