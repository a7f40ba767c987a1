from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geodetic_forge.errors import ParseError
from geodetic_forge.graphs import subdivided_inverse
from geodetic_forge.words import Letter, LetterOrder, format_word, parse_word, word_inverse

letters = st.builds(
    Letter,
    st.sampled_from("abc"),
    st.integers(1, 3),
    st.one_of(st.none(), st.integers(1, 7)),
    st.one_of(st.none(), st.integers(1, 3)),
)


@given(letters)
def test_letter_token_roundtrip(x):
    assert Letter.parse(str(x)) == x


def test_letter_forms():
    assert str(Letter("a", 1, 2)) == "a_1_2"
    assert str(Letter("b", 2)) == "b_2"
    assert str(Letter("c", 1, 3, 2)) == "f2.c_1_3"
    with pytest.raises(ValueError):
        Letter("d", 1)
    with pytest.raises(ValueError):
        Letter("a", 0)


def test_parse_word_and_empty():
    assert parse_word("_") == ()
    assert parse_word("") == ()
    assert parse_word("a_1_1 a_1_3") == (Letter("a", 1, 1), Letter("a", 1, 3))
    assert format_word(()) == "_"
    with pytest.raises(ParseError):
        parse_word("a_1_1 zz")


def test_word_inverse_examples():
    n = 1
    inv = {x: subdivided_inverse(x, n) for x in [Letter(k, 1, j) for k in "abc" for j in (1, 2, 3)]}
    assert word_inverse((), inv) == ()
    assert word_inverse(parse_word("a_1_2"), inv) == parse_word("a_1_2")
    # sub-edge b_{1,j} runs backwards as c_{1,j}
    assert word_inverse(parse_word("b_1_1 b_1_2"), inv) == parse_word("c_1_2 c_1_1")


@given(st.lists(st.sampled_from([Letter(k, 1, j) for k in "abc" for j in range(1, 6)]), max_size=12))
def test_word_inverse_is_involution(word):
    inv = {x: subdivided_inverse(x, 2) for x in [Letter(k, 1, j) for k in "abc" for j in range(1, 6)]}
    assert word_inverse(word_inverse(word, inv), inv) == tuple(word)


def test_only_centre_a_letter_is_self_inverse():
    n = 2
    fixed = [j for j in range(1, 6) if subdivided_inverse(Letter("a", 1, j), n) == Letter("a", 1, j)]
    assert fixed == [n + 1]
    assert all(subdivided_inverse(Letter("b", 1, j), n).klass == "c" for j in range(1, 6))


def test_letter_order_shortlex():
    alphabet = parse_word("c_1_1 a_1_2 b_1_1 a_1_1")
    order = LetterOrder.canonical(alphabet)
    assert [str(x) for x in order.letters()] == ["a_1_1", "a_1_2", "b_1_1", "c_1_1"]
    assert order.reversed().letters() == order.letters()[::-1]
    short, long_ = parse_word("c_1_1"), parse_word("a_1_1 a_1_1")
    assert order.word_key(short) < order.word_key(long_)
    with pytest.raises(ValueError):
        LetterOrder.from_sequence(["x", "x"])
