import pytest
from hypothesis import given, strategies as st

from conftest import TWO_CARS_REVERSED_TEXT, TWO_CARS_TEXT
from mwpaug.errors import NoQuestionFound, UnsupportedQuestionShape
from mwpaug.identify import find_number_mentions
from mwpaug.transform import (
    DEFAULT_EN_TABLE,
    DEFAULT_ZH_TABLE,
    declarative_to_question,
    join_units,
    load_pronoun_tables,
    locate_question,
    match_pronoun,
    question_to_declarative,
    segment_discourse,
    transform_problem,
    unit_index_at,
)


# --- segmentation -----------------------------------------------------------

def test_segmentation_is_lossless_en():
    text = "One, two. Three? Four! Tail without terminator"
    units = segment_discourse(text, "en")
    assert join_units(units) == text
    assert [u.terminator for u in units] == [",", ".", "?", "!", ""]


def test_segmentation_is_lossless_zh():
    text = "甲有5个，乙有3个。一共多少？"
    units = segment_discourse(text, "zh")
    assert join_units(units) == text
    assert [u.terminator for u in units] == ["，", "。", "？"]


def test_decimal_point_is_not_a_terminator():
    units = segment_discourse("It ran 3.5 km. How far back?", "en")
    assert len(units) == 2
    assert "3.5" in units[0].text


def test_question_units_flagged():
    units = segment_discourse("Two cars. How many hours?", "en")
    assert [u.is_question for u in units] == [False, True]


def test_unit_index_at_offsets():
    text = "ab, cd. ef?"
    units = segment_discourse(text, "en")
    assert unit_index_at(units, 0) == 0
    assert unit_index_at(units, text.index("cd")) == 1
    assert unit_index_at(units, len(text) - 1) == 2


ascii_text = st.text(
    alphabet=st.characters(min_codepoint=32, max_codepoint=126), max_size=60
)


@given(ascii_text)
def test_segmentation_lossless_property(text):
    assert join_units(segment_discourse(text, "en")) == text


@given(st.text(max_size=60))
def test_segmentation_lossless_property_zh(text):
    assert join_units(segment_discourse(text, "zh")) == text


# --- pronoun matching --------------------------------------------------------

def test_longest_pattern_wins_zh():
    entry, start, end = match_pronoun("乙比甲多多少个", True, DEFAULT_ZH_TABLE)
    assert entry.pattern == "多少"
    assert "乙比甲多多少个"[start:end] == "多少"


def test_last_unit_only_patterns():
    # 多 alone only counts in the final unit
    assert match_pronoun("乙比甲多3个", False, DEFAULT_ZH_TABLE) is None
    hit = match_pronoun("乙比甲多", True, DEFAULT_ZH_TABLE)
    assert hit is not None and hit[0].pattern == "多"


def test_en_patterns_are_word_bounded():
    assert match_pronoun("somewhat longer", True, DEFAULT_EN_TABLE) is None
    hit = match_pronoun("so what remains", True, DEFAULT_EN_TABLE)
    assert hit is not None and hit[0].pattern == "what"


def test_locate_question_picks_last_bearing_unit():
    units = segment_discourse(
        "How many at first? He sold 3. How many are left?", "en"
    )
    match = locate_question(units, DEFAULT_EN_TABLE)
    assert match.unit_index == 2


def test_locate_question_raises_when_absent():
    units = segment_discourse("He sold 3 apples.", "en")
    with pytest.raises(NoQuestionFound):
        locate_question(units, DEFAULT_EN_TABLE)


def test_load_pronoun_tables(tmp_path):
    path = tmp_path / "pronouns.tsv"
    path.write_text(
        "# comment line\n"
        "zh\t多少\t-\n"
        "zh\t=\tlast\t={answer}\n"
        "en\thow many\t-\n",
        encoding="utf-8",
    )
    tables = load_pronoun_tables(str(path))
    assert [e.pattern for e in tables["zh"].entries] == ["多少", "="]
    assert tables["zh"].entries[1].last_unit_only
    assert tables["zh"].entries[1].template == "={answer}"
    assert [e.pattern for e in tables["en"].entries] == ["how many"]


# --- question -> declarative --------------------------------------------------

def en_q2d(question, answer):
    units = segment_discourse(question, "en")
    match = locate_question(units, DEFAULT_EN_TABLE)
    return question_to_declarative(
        units[match.unit_index].text, match.start, match.end,
        match.entry, answer, "en",
    )


def test_q2d_there_existential():
    assert en_q2d("How many birds are there?", "12") == "There are 12 birds"
    assert en_q2d("How many birds are there in the tree?", "12") == (
        "There are 12 birds in the tree"
    )


def test_q2d_subject_have():
    assert en_q2d("How many apples does Tom have?", "5") == "Tom has 5 apples"
    assert en_q2d("How many apples did Tom have?", "5") == "Tom had 5 apples"


def test_q2d_generic_auxiliary():
    assert en_q2d("How many hours later would the two cars meet?", "10") == (
        "10 hours later the two cars would meet"
    )
    assert en_q2d("How old is John?", "30") == "John is 30"


def test_q2d_what_copula():
    assert en_q2d("What is the sum?", "42") == "The sum is 42"


def test_q2d_unsupported_shape_raises():
    with pytest.raises(UnsupportedQuestionShape):
        en_q2d("What happened next?", "3")


def test_q2d_zh_replaces_pronoun_span():
    out = question_to_declarative("一共有多少个苹果", 3, 5, DEFAULT_ZH_TABLE.entries[0], "8", "zh")
    assert out == "一共有8个苹果"


def test_q2d_zh_equals_template():
    entry = [e for e in DEFAULT_ZH_TABLE.entries if e.pattern == "="][0]
    text = "12+7*3="
    start = text.index("=", 5)
    out = question_to_declarative(text, start, start + 1, entry, "33", "zh")
    assert out == "12+7*3=33"


# --- declarative -> question ---------------------------------------------------

def test_d2q_copula_fronting():
    text = "The distance between city A and B is 660 km"
    start = text.index("660")
    out, pronoun = declarative_to_question(text, (start, start + 3), "en")
    assert out == "What is the distance between city A and B"
    assert pronoun == "what"


def test_d2q_copula_blocked_by_second_number_in_predicate():
    text = "The price is 3 boxes at 4 dollars"
    start = text.index("3")
    out, _ = declarative_to_question(
        text, (start, start + 1), "en",
        other_spans=[(text.index("4"), text.index("4") + 1)],
    )
    assert "how many" in out


def test_d2q_in_place_pronoun():
    text = "the car starting from A drives 32 km/h"
    start = text.index("32")
    out, pronoun = declarative_to_question(text, (start, start + 2), "en")
    assert out == "the car starting from A drives how many km/h"
    assert pronoun == "how many"


def test_d2q_how_much_before_stop_words():
    text = "he paid 12 to the clerk"
    start = text.index("12")
    out, pronoun = declarative_to_question(text, (start, start + 2), "en")
    assert pronoun == "how much"
    assert out == "he paid how much to the clerk"


def test_d2q_zh():
    text = "小明有5个苹果"
    out, pronoun = declarative_to_question(text, (3, 4), "zh")
    assert out == "小明有多少个苹果"
    assert pronoun == "多少"


# --- whole-problem transform ----------------------------------------------------

def test_transform_reproduces_reversed_two_cars(two_cars_record):
    mentions = find_number_mentions(TWO_CARS_TEXT, "en")
    target = [m for m in mentions if m.surface == "660"][0]
    result = transform_problem(TWO_CARS_TEXT, "en", target, "10", mentions=mentions)
    assert result.text == TWO_CARS_REVERSED_TEXT


def test_transform_moves_declarative_before_question():
    mentions = find_number_mentions(TWO_CARS_TEXT, "en")
    target = [m for m in mentions if m.surface == "32"][0]
    result = transform_problem(TWO_CARS_TEXT, "en", target, "10", mentions=mentions)
    assert result.text.endswith("The car starting from A drives how many km/h?")
    assert "10 hours later the two cars would meet." in result.text
    assert "660" in result.text and "34" in result.text
    assert "32" not in result.text


def test_transform_zh_round():
    text = "小明有5个苹果，小红有3个苹果，两人一共有多少个苹果？"
    mentions = find_number_mentions(text, "zh")
    result = transform_problem(text, "zh", mentions[0], "8", mentions=mentions)
    assert result.text == "小红有3个苹果，两人一共有8个苹果。小明有多少个苹果？"


def test_transform_combined_unit():
    text = "Tom read 12 pages yesterday. How many pages are left from the 30 pages?"
    mentions = find_number_mentions(text, "en")
    target = [m for m in mentions if m.surface == "30"][0]
    result = transform_problem(text, "en", target, "18", mentions=mentions)
    assert result.combined
    assert result.text.count("?") == 1
    assert result.text.endswith("?")
    assert "18" in result.text and "30" not in result.text


def test_transform_appends_exactly_one_question():
    mentions = find_number_mentions(TWO_CARS_TEXT, "en")
    for target in mentions:
        result = transform_problem(TWO_CARS_TEXT, "en", target, "10", mentions=mentions)
        assert result.text.count("?") == 1
        assert result.text.endswith("?")
