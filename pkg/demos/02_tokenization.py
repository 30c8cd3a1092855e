# %% [markdown]
# # WordPiece with exact character offsets
#
# Every piece keeps the code-point range it came from, so token labels map
# back onto the original comment without drift.

# %%
from toxicspans.tokenizer import demo_vocab, tokenize

vocab = demo_vocab()
text = "Could you please kill yourself?"
for tok in tokenize(text, vocab):
    piece = vocab.pieces[tok.piece_id]
    print(f"{piece:>10}  [{tok.start:>2}, {tok.end:>2}]  {text[tok.start:tok.end + 1]!r}")

# %% [markdown]
# Unknown words fall back to `[UNK]` but still cover their characters.
# Lowercasing never changes the string length.

# %%
for tok in tokenize("Ünïcode İdiots", vocab):
    print(vocab.pieces[tok.piece_id], tok.start, tok.end)

# %% [markdown]
# ## Labels in, offsets out
#
# A token is toxic when any of its characters is. Decoding adds the
# whitespace between two consecutive toxic tokens.

# %%
from toxicspans import LabeledSequence, labels_to_offsets, offsets_to_labels

gold = range(17, 30)
seq = offsets_to_labels(tokenize(text, vocab), gold)
print(seq.labels)
print(labels_to_offsets(text, seq, fill=False))
print(labels_to_offsets(text, seq))
