import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lugmis.preprocess import (
    CleaningConfig,
    StopwordList,
    clean_text,
    default_stopwords,
    load_stopwords,
    prepare_text,
    remove_stopwords,
)

ALL = CleaningConfig.all_on()
NONE = CleaningConfig(False, False, False, False, False, False, False, False)


@pytest.mark.parametrize("raw, expected", [
    # rt, mention, entity and URL each become a space, then spaces collapse
    ("RT @MinOfHealthUG Corona &amp; COVID19 https://t.co/x", "corona covid19"),
    ("", ""),
    ("Ssenyiga akubye wansi \U0001F637", "ssenyiga akubye wansi"),
    ("Mail me: info@health.go.ug now!", "mail me now"),
    ("#StaySafeUG tusaba", "#staysafeug tusaba"),
    ("start rtv kirt rt.", "start rtv kirt"),
    ("a&b", "a b"),
    ("visit www.who.int/covid today", "visit today"),
    ("#rt is a hashtag", "#rt is a hashtag"),
])
def test_examples(raw, expected):
    assert clean_text(raw, ALL) == expected


def test_rule_switches_are_independent():
    raw = "RT @x Hello"
    assert clean_text(raw, NONE) == "RT @x Hello"
    only_lower = CleaningConfig(True, False, False, False, False, False, False, False)
    assert clean_text(raw, only_lower) == "rt @x hello"


def test_keep_non_ascii_when_switched_off():
    cfg = CleaningConfig(True, True, True, True, True, True, False, False)
    assert clean_text("Ekyalo ky'Abaganda été", cfg) == "ekyalo ky abaganda été"


text_st = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80)
mixed_st = st.lists(st.sampled_from(
    ["RT", "rt", "@who_ug", "#covid", "#", "&amp;", "&", "https://t.co/ab", "a@b.co", "nga", "Corona", "\U0001F637",
     "é", " ", "\t", ".", "!!", "x", "kirt"]), max_size=20).map(" ".join)


@settings(max_examples=300, deadline=None)
@given(st.one_of(text_st, mixed_st))
def test_idempotent(raw):
    once = clean_text(raw, ALL)
    assert clean_text(once, ALL) == once


@settings(max_examples=300, deadline=None)
@given(st.one_of(text_st, mixed_st))
def test_ascii_only_and_never_longer(raw):
    out = clean_text(raw, ALL)
    assert out.isascii()
    assert len(out) <= len(raw)


def test_remove_stopwords_examples():
    assert remove_stopwords(["nga", "covid", "eri"], {"nga", "eri"}) == ["covid"]
    assert remove_stopwords([], {"nga"}) == []
    assert remove_stopwords(["nga", "eri"], StopwordList(frozenset({"nga", "eri"}))) == []


def test_load_stopwords(tmp_path):
    p = tmp_path / "sw.txt"
    p.write_text("Nga\nnga\n# comment\n")
    assert set(load_stopwords(p)) == {"nga"}
    p.write_text("")
    assert len(load_stopwords(p)) == 0
    p.write_text("nga\neri\n")
    assert len(load_stopwords(p)) == 2


def test_load_stopwords_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_stopwords(tmp_path / "absent.txt")


def test_stopword_entries_validated():
    with pytest.raises(ValueError):
        StopwordList(frozenset({"Nga"}))
    with pytest.raises(ValueError):
        StopwordList(frozenset({"mu maaso"}))


def test_bundled_lists():
    lug = default_stopwords(include_english=False)
    both = default_stopwords()
    assert "nga" in lug and len(lug) > 50
    assert "the" in both and "the" not in lug


def test_prepare_text_removes_stopwords_after_cleaning():
    cfg = CleaningConfig.all_on(StopwordList(frozenset({"nga"})))
    assert prepare_text("Nga Corona!", cfg) == "corona"
