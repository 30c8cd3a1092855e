from toxicspans.highlight import render_html, render_terminal, segments

U, R, UR, RESET = "\x1b[4m", "\x1b[31m", "\x1b[4;31m", "\x1b[0m"


def test_segments():
    assert segments("abcdef", [1, 2, 3], [2, 3, 4]) == [
        ("a", False, False), ("b", True, False), ("cd", True, True), ("e", False, True), ("f", False, False)
    ]


def test_overlap_carries_both_styles():
    out = render_terminal("abcd", [0, 1], [1, 2])
    assert out == f"{U}a{RESET}{UR}b{RESET}{R}c{RESET}d"


def test_plain_text_when_nothing_marked():
    assert render_terminal("hello", [], []) == "hello"
    assert '<p data-id="0">hello</p>' in render_html([(0, "hello", [], [])])


def test_boundaries():
    text = "idiot you idiot"
    out = render_terminal(text, [0, 1, 2, 3, 4, 10, 11, 12, 13, 14], [0, 14])
    assert out.startswith(f"{UR}i{RESET}{U}diot{RESET} you ")
    assert out.endswith(f"{U}idio{RESET}{UR}t{RESET}")


def test_html_markup_and_escaping():
    page = render_html([(3, "<a> & b", [0, 1, 2], [1, 2, 3, 4])])
    assert '<u class="gold">&lt;</u><u class="gold"><span class="pred">a&gt;</span></u>' in page
    assert '<span class="pred"> &amp;</span> b' in page
    assert page.startswith("<!DOCTYPE html>")
