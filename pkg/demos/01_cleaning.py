# %% [markdown]
# # Cleaning crowd-sourced span annotations
#
# Annotators often mark a leading space, a single stray letter, or a word
# minus its first character. `clean_offsets` repairs each maximal group of
# offsets and reports what it changed.

# %%
from toxicspans import clean_offsets, offsets_to_spans

text = "You are an idiot"
raw_rows = {
    "leading space": range(10, 16),
    "stray letter": [4],
    "clipped first letter": range(1, 16),
}

for label, raw in raw_rows.items():
    cleaned, report = clean_offsets(text, raw)
    print(f"{label:>22}: {offsets_to_spans(sorted(raw))} -> {offsets_to_spans(cleaned)}")
    print(f"{'':>22}  {report.summary()}")

# %% [markdown]
# Cleaning is idempotent: a second run changes nothing.

# %%
cleaned, _ = clean_offsets(text, range(1, 16))
again, report = clean_offsets(text, cleaned)
assert again == cleaned
print("second pass:", report.summary())

# %% [markdown]
# A stricter variant drops partially marked words instead of growing them.

# %%
print(clean_offsets("what a stupid idea", range(8, 13), discard_partial=True)[0])
print(clean_offsets("what a stupid idea", range(8, 13))[0])
