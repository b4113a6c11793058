from fractions import Fraction

from mwpaug.expr import parse_equation
from mwpaug.identify import (
    ACCEPTED,
    REJECTED,
    align_and_filter,
    constant_value_set,
    find_number_mentions,
    is_pure_arithmetic,
)


def mentions_of(text, language="en"):
    return find_number_mentions(text, language)


def filter_map(text, equation_text, language="en", constants=None):
    """mention surface -> (status, reason) for the mention-side candidates."""
    eq = parse_equation(equation_text)
    kwargs = {}
    if constants is not None:
        kwargs["constant_values"] = constants
    out = {}
    for cand in align_and_filter(mentions_of(text, language), eq, **kwargs):
        if cand.mention is not None:
            out[cand.mention.surface] = (cand.status, cand.reason)
    return out


def equation_side(text, equation_text, language="en"):
    eq = parse_equation(equation_text)
    return [
        (c.leaf_path, c.reason)
        for c in align_and_filter(mentions_of(text, language), eq)
        if c.mention is None
    ]


def test_mentions_have_spans_and_values():
    text = "Tom has 3 apples and 4.5 kg of pears, 50% of them ripe."
    ms = mentions_of(text)
    assert [m.surface for m in ms] == ["3", "4.5", "50%"]
    assert [m.value for m in ms] == [3, Fraction(9, 2), Fraction(1, 2)]
    for m in ms:
        assert text[m.start:m.end] == m.surface


def test_mentions_carry_sentence_index():
    ms = mentions_of("He walked 2 km. Then he ran 3 km. How far in total?")
    assert [m.sentence_index for m in ms] == [0, 1]


def test_bracket_fraction_is_one_mention():
    ms = mentions_of("Sue ate ((2)/(5)) of the cake. How much is left?")
    assert [m.surface for m in ms] == ["((2)/(5))"]
    assert ms[0].value == Fraction(2, 5)


def test_accepted_numbers_align_one_to_one():
    out = filter_map(
        "The trip is 660 km at 32 km/h plus 34 km/h. How many hours?",
        "x=660/(32+34)",
    )
    assert out == {
        "660": (ACCEPTED, None),
        "32": (ACCEPTED, None),
        "34": (ACCEPTED, None),
    }


def test_rule_insignificant_number_absent_from_equation():
    out = filter_map("Lesson 5: a farm has 12 hens and 3 coops. How many per coop?", "x=12/3")
    assert out["5"] == (REJECTED, "INSIGNIFICANT")
    assert out["12"] == (ACCEPTED, None)


def test_rule_one_duplicate_in_text():
    # both textual 2s could be the equation's 2; reversal would be ambiguous
    text = ("A has 4 piles of 2 apples and B has 2 apples. "
            "B gave 1 apple to A. How many apples does A have?")
    out = filter_map(text, "x=4*2+1")
    twos = [v for k, v in out.items() if k == "2"]
    assert out["2"] == (REJECTED, "R1_TEXT_DUP")
    assert len([m for m in mentions_of(text) if m.surface == "2"]) == 2
    assert out["4"] == (ACCEPTED, None)
    assert out["1"] == (ACCEPTED, None)
    assert twos  # the duplicate pair is reported, not silently dropped


def test_rule_two_duplicate_in_equation():
    out = filter_map("A square of side 2. What is its area?", "x=2*2")
    assert out["2"] == (REJECTED, "R2_EQ_DUP")


def test_rule_three_number_under_power():
    out = filter_map("A cube of side 4. What is its volume?", "x=4^3")
    assert out["4"] == (REJECTED, "R3_POWER")
    # the exponent 3 never appears in the text, still reported equation-side
    eq_side = equation_side("A cube of side 4. What is its volume?", "x=4^3")
    assert any(reason == "R3_POWER" for _, reason in eq_side)


def test_rule_four_constants_stay_put():
    eq_side = equation_side("A circle of radius 5. What is the circumference?", "x=2*pi*5")
    reasons = [reason for _, reason in eq_side]
    assert "R4_CONSTANT" in reasons  # pi
    out = filter_map("A circle of radius 5. What is the circumference?", "x=2*pi*5")
    assert out["5"] == (ACCEPTED, None)


def test_rule_four_configurable_value_set():
    text = "Half of 8 is what?"
    constants = constant_value_set(("pi", "1", "2"))
    eq = parse_equation("x=8/2")
    cands = align_and_filter(mentions_of(text), eq, constants)
    eq_side = [(c.leaf_path, c.reason) for c in cands if c.mention is None]
    assert ("R4_CONSTANT" in [r for _, r in eq_side])


def test_unaligned_equation_number():
    # equation needs a 7 the text never states
    eq_side = equation_side("Bob bought 3 pens. How much did he pay?", "x=3*7")
    assert ("UNALIGNED" in [r for _, r in eq_side])


def test_rules_fire_in_precedence_order():
    # a value that is both duplicated in text and under a power reports R1
    text = "With 2 boxes of 2 books. How many?"
    out = filter_map(text, "x=2^2")
    assert out["2"] == (REJECTED, "R1_TEXT_DUP")


def test_constant_value_set_contents():
    values = constant_value_set(("pi", "1"))
    assert Fraction(314, 100) in values
    assert Fraction(1) in values


def test_pure_arithmetic_filter_en():
    assert is_pure_arithmetic("Calculate: 12+7*3=", "en")
    assert is_pure_arithmetic("Find the value of (3+4)*2.", "en")
    assert not is_pure_arithmetic(
        "Tom bought 3 apples for 12 dollars. How much each?", "en"
    )


def test_pure_arithmetic_filter_zh():
    assert is_pure_arithmetic("计算：12+7*3=", "zh")
    assert is_pure_arithmetic("直接写出得数：45÷9+3", "zh")
    assert not is_pure_arithmetic("小明买了3个苹果，花了12元，每个多少元？", "zh")


def test_pure_arithmetic_threshold_configurable():
    text = "ab 1+2"
    assert is_pure_arithmetic(text, "en", keywords=(), k=4)
    assert not is_pure_arithmetic(text, "en", keywords=(), k=2)
