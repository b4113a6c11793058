from fractions import Fraction

import pytest

from mwpaug.errors import UnalignedNumber
from mwpaug.expr import parse_equation
from mwpaug.template import slot_map, templatize


def F(n, d=1):
    return Fraction(n, d)


def test_slots_follow_text_order():
    t = templatize(parse_equation("x=660/(32+34)"), [F(660), F(32), F(34)])
    assert t.text == "x=temp0/(temp1+temp2)"
    assert t.slot_values == {"temp0": 660, "temp1": 32, "temp2": 34}


def test_slots_keep_first_mention_index():
    # the answer 10 is mentioned last in the rewritten text
    t = templatize(parse_equation("x=10*(32+34)"), [F(32), F(34), F(10)])
    assert t.text == "x=temp2*(temp0+temp1)"


def test_duplicate_mentions_share_a_slot():
    assert slot_map([F(2), F(3), F(2)]) == {F(2): "temp0", F(3): "temp1"}
    t = templatize(parse_equation("x=2+2"), [F(2), F(3), F(2)])
    assert t.text == "x=temp0+temp0"


def test_constants_stay_verbatim():
    t = templatize(parse_equation("x=pi*5"), [F(5)])
    assert t.text == "x=pi*temp0"


def test_unaligned_number_rejected():
    with pytest.raises(UnalignedNumber):
        templatize(parse_equation("x=3*7"), [F(3)])
