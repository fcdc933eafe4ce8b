import pytest
from hypothesis import given, strategies as st

from specsynth.sexpr import SexprError, parse, parse_one, to_text


def test_parse_atoms():
    assert parse("foo -12 0 bar") == ["foo", -12, 0, "bar"]


def test_parse_nested():
    assert parse_one("(a (b 1) (c (d 2 3)))") == ["a", ["b", 1], ["c", ["d", 2, 3]]]


def test_comments_and_whitespace():
    text = "; header\n(a ; mid\n 1)\n"
    assert parse(text) == [["a", 1]]


def test_unbalanced_close_reports_position():
    with pytest.raises(SexprError) as ei:
        parse("(a 1)\n  )")
    assert ei.value.line == 2 and ei.value.col == 3


def test_unclosed_open():
    with pytest.raises(SexprError):
        parse("(a (b 1)")


def test_parse_one_rejects_many():
    with pytest.raises(SexprError):
        parse_one("(a) (b)")


sym = st.from_regex(r"[a-z][a-z0-9?*=<>+-]{0,6}", fullmatch=True).filter(
    lambda s: not s.lstrip("-").isdigit())
form = st.recursive(
    st.integers(-999, 999) | sym,
    lambda inner: st.lists(inner, max_size=4),
    max_leaves=20)


@given(form)
def test_print_parse_roundtrip(f):
    assert parse_one(to_text(f)) == f
