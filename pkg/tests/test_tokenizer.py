import pytest
from hypothesis import given, settings, strategies as st

from toxicspans.tokenizer import (
    UNK,
    Vocab,
    VocabError,
    basic_split,
    build_vocab,
    demo_vocab,
    load_vocab,
    lowercase,
    tokenize,
    wordpiece_word,
)


def vocab_of(*pieces):
    return Vocab(["[PAD]", "[UNK]", *pieces])


def greedy_oracle(word, vocab):
    """Longest-match by scanning every vocab piece at each cursor."""
    out, cursor = [], 0
    while cursor < len(word):
        best = None
        for piece in vocab.pieces:
            if piece in ("[PAD]", "[UNK]"):
                continue
            if cursor == 0:
                if piece.startswith("##"):
                    continue
                body = piece
            else:
                if not piece.startswith("##"):
                    continue
                body = piece[2:]
            if body and word.startswith(body, cursor) and (best is None or len(body) > len(best[1])):
                best = (piece, body)
        if best is None:
            return [(UNK, 0, len(word) - 1)]
        out.append((best[0], cursor, cursor + len(best[1]) - 1))
        cursor += len(best[1])
    return out


def test_load_vocab(tmp_path):
    path = tmp_path / "v.txt"
    path.write_text("[PAD]\n[UNK]\nthe\n", encoding="utf-8")
    v = load_vocab(path)
    assert [v["[PAD]"], v["[UNK]"], v["the"]] == [0, 1, 2]


def test_load_vocab_duplicate(tmp_path):
    path = tmp_path / "v.txt"
    path.write_text("[PAD]\n[UNK]\nthe\nthe\n", encoding="utf-8")
    with pytest.raises(VocabError, match="duplicate"):
        load_vocab(path)


def test_load_vocab_empty(tmp_path):
    path = tmp_path / "v.txt"
    path.write_text("", encoding="utf-8")
    with pytest.raises(VocabError):
        load_vocab(path)


def test_basic_split():
    assert basic_split("you, fool") == [("you", 0, 2), (",", 3, 3), ("fool", 5, 8)]
    assert basic_split("") == []
    assert basic_split("a  b") == [("a", 0, 0), ("b", 3, 3)]
    assert basic_split("a!@#!@") == [("a", 0, 0), ("!", 1, 1), ("@", 2, 2), ("#", 3, 3), ("!", 4, 4), ("@", 5, 5)]


def test_basic_split_keeps_symbols_inside_words():
    # '$' and '+' are symbols (S*), not punctuation, so they stay in the word
    assert basic_split("$5+x") == [("$5+x", 0, 3)]


@pytest.mark.parametrize(
    "pieces, word, expected",
    [
        (("un", "##aff", "##able"), "unaffable", [("un", 0, 1), ("##aff", 2, 4), ("##able", 5, 8)]),
        (("cat", "##s"), "cats", [("cat", 0, 2), ("##s", 3, 3)]),
        (("cat",), "cat?", [(UNK, 0, 3)]),
    ],
)
def test_wordpiece_examples(pieces, word, expected):
    vocab = vocab_of(*pieces)
    assert wordpiece_word(word, vocab) == expected
    assert greedy_oracle(word, vocab) == expected


def test_wordpiece_long_word_is_unk():
    vocab = vocab_of("a", "##a")
    assert wordpiece_word("a" * 100, vocab)[-1] == ("##a", 99, 99)
    assert wordpiece_word("a" * 101, vocab) == [(UNK, 0, 100)]


PIECES = ["a", "b", "ab", "abc", "##a", "##b", "##c", "##bc", "##ca", "c", "ba"]


@settings(max_examples=300)
@given(st.text("abcd", min_size=1, max_size=12), st.sets(st.sampled_from(PIECES)))
def test_wordpiece_matches_oracle_and_is_greedy(word, pieces):
    vocab = vocab_of(*sorted(pieces))
    got = wordpiece_word(word, vocab)
    assert got == greedy_oracle(word, vocab)
    if got[0][0] != UNK:
        assert "".join(p.removeprefix("##") for p, _, _ in got) == word
        for piece, s, e in got:
            prefix = "##" if s else ""
            longer = [word[s:k] for k in range(e + 2, len(word) + 1)]
            assert not any(prefix + x in vocab for x in longer)


def test_tokenize_examples():
    vocab = vocab_of("the", "cat", "##s")
    toks = tokenize("The cats", vocab)
    assert [(vocab.pieces[t.piece_id], t.start, t.end) for t in toks] == [
        ("the", 0, 2), ("cat", 4, 6), ("##s", 7, 7)
    ]
    assert [t.is_continuation for t in toks] == [False, False, True]
    assert tokenize("", vocab) == []
    idiot = vocab_of("idiot")
    assert [(t.piece_id, t.start, t.end) for t in tokenize("IDIOT", idiot)] == [(2, 0, 4)]


def test_lowercase_is_length_preserving():
    text = "İSTANBUL ẞtraße ΣΑΣ"
    low = lowercase(text)
    assert len(low) == len(text)
    assert low[0] == "İ"
    assert low[1:8] == "stanbul"


@settings(max_examples=200)
@given(st.text(max_size=40))
def test_tokens_tile_words(text):
    vocab = demo_vocab()
    toks = tokenize(text, vocab)
    assert toks == tokenize(text, vocab)
    covered = []
    for t in toks:
        assert 0 <= t.start <= t.end < len(text)
        covered.extend(range(t.start, t.end + 1))
    assert covered == sorted(set(covered))
    words = basic_split(lowercase(text))
    assert covered == [i for _, s, e in words for i in range(s, e + 1)]


def test_build_vocab_covers_corpus():
    texts = ["You are an idiot", "what an idiot!", "Ünïcode wörds"]
    vocab = build_vocab(texts, min_count=2)
    assert "idiot" in vocab and "an" in vocab and "you" not in vocab
    for text in texts:
        assert all(vocab.pieces[t.piece_id] != UNK for t in tokenize(text, vocab))


def test_demo_vocab_loads():
    v = demo_vocab()
    assert v.pieces[:2] == ("[PAD]", "[UNK]")
    assert "idiot" in v and "##s" in v
