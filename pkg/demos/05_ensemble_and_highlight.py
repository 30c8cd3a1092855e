# %% [markdown]
# # Voting and looking at the result
#
# Several models trained with different seeds vote per character. A
# character survives when a strict majority predicted it.

# %%
from toxicspans import EncoderConfig, TrainConfig, build_vocab, evaluate_corpus, majority_vote, predict_corpus, train
from toxicspans.ensemble import vote_corpus
from toxicspans.highlight import render_html, render_terminal
from toxicspans.synthetic import planted_lexicon_corpus

print(majority_vote([{1, 2}, {2, 3}, {2, 4}]))

# %%
train_corpus = planted_lexicon_corpus(32, seed=0)
test_corpus = planted_lexicon_corpus(16, seed=7)
vocab = build_vocab([c.text for c in train_corpus], min_count=1)
gold = [c.toxic_offsets for c in test_corpus]

members = []
for seed in range(3):
    config = EncoderConfig.last_n(3, vocab_size=len(vocab), hidden_dim=32, num_blocks=3, num_heads=4, max_len=32)
    ckpt = train(config, train_corpus, train_corpus, vocab, TrainConfig(learning_rate=1e-3, num_epochs=8, seed=seed))
    preds = predict_corpus(ckpt.params, ckpt.encoder_config, test_corpus, vocab)
    members.append(preds)
    print(f"seed {seed}: F1 {evaluate_corpus(gold, preds).mean_f1:.4f}")

voted = vote_corpus(members)
print(f"vote:   F1 {evaluate_corpus(gold, voted).mean_f1:.4f}")

# %% [markdown]
# Underline marks gold, red marks predictions.

# %%
for c, pred in list(zip(test_corpus, voted))[:5]:
    print(render_terminal(c.text, c.toxic_offsets, pred))

page = render_html([(c.id, c.text, c.toxic_offsets, p) for c, p in zip(test_corpus, voted)])
print(page[:200])
