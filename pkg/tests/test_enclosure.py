"""Enclosure arithmetic soundness and the transcendental kernels."""

from fractions import Fraction as F

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qforms.enclosure import (
    Enclosure,
    ceil_sqrt,
    log_enclosure,
    sqrt_enclosure,
)

from conftest import mpf_to_fraction

rationals = st.fractions(
    min_value=F(-1000), max_value=F(1000), max_denominator=999
)
pads = st.fractions(min_value=F(0), max_value=F(3), max_denominator=50)


def widen(x: F, below: F, above: F) -> Enclosure:
    return Enclosure(x - below, x + above)


@given(rationals, rationals, pads, pads, pads, pads)
@settings(max_examples=300)
def test_arithmetic_soundness(a, b, pa, pb, pc, pd):
    ea = widen(a, pa, pb)
    eb = widen(b, pc, pd)
    assert (ea + eb).contains(a + b)
    assert (ea - eb).contains(a - b)
    assert (ea * eb).contains(a * b)
    if not eb.contains(0):
        assert (ea / eb).contains(a / b)
    assert (-ea).contains(-a)
    assert ea.abs().contains(abs(a))


@given(rationals, pads, pads)
@settings(max_examples=200)
def test_outward_round_contains(a, pa, pb):
    e = widen(a, pa, pb)
    rounded = e.outward_round(16)
    assert rounded.contains_enclosure(e)
    assert rounded.width <= e.width + F(2, 1 << 16)


def test_inverted_interval_rejected():
    with pytest.raises(ValueError):
        Enclosure(F(1), F(0))


def test_division_by_zero_interval_rejected():
    with pytest.raises(ZeroDivisionError):
        Enclosure.point(1) / Enclosure(F(-1), F(1))


@pytest.mark.parametrize(
    "x",
    [
        F(2),
        F(3),
        F(1, 2),
        F(5, 7),
        F(10) ** 20 + 7,
        F(1, 10 ** 12),
        F(99, 98),
        F(2) ** 300,
    ],
)
def test_log_enclosure_contains_oracle(x):
    mp.mp.prec = 400
    enc = log_enclosure(x, 64)
    assert enc.width <= F(1, 1 << 64)
    oracle_mpf = mp.log(mp.mpf(x.numerator)) - mp.log(mp.mpf(x.denominator))
    oracle = mpf_to_fraction(oracle_mpf)
    slack = F(1, 1 << 300)  # far above mpmath's round-off at prec 400
    assert enc.lo - slack <= oracle <= enc.hi + slack


def test_log_enclosure_tight_brackets():
    # exact rational comparison against a high-precision dyadic oracle
    mp.mp.prec = 300
    for x in (F(2), F(3, 2), F(7, 5)):
        enc = log_enclosure(x, 128)
        oracle = mp.log(mp.mpf(x.numerator)) - mp.log(mp.mpf(x.denominator))
        o = mpf_to_fraction(oracle)
        slack = F(1, 1 << 250)
        assert enc.lo - slack <= o <= enc.hi + slack
        assert enc.width <= F(1, 1 << 128)


def test_log_enclosure_one_is_exact():
    assert log_enclosure(F(1), 32) == Enclosure.point(0)


def test_log_enclosure_rejects_nonpositive():
    with pytest.raises(ValueError):
        log_enclosure(F(0), 32)
    with pytest.raises(ValueError):
        log_enclosure(F(-3), 32)


def test_log_additivity_cross_check():
    a, b = F(7, 3), F(15, 4)
    lhs = log_enclosure(a * b, 96)
    rhs = log_enclosure(a, 96) + log_enclosure(b, 96)
    # both contain the same real number, so they must overlap
    assert lhs.lo <= rhs.hi and rhs.lo <= lhs.hi


@pytest.mark.parametrize("x", [F(2), F(5, 4), F(49), F(1, 3), F(10) ** 12 + 1])
def test_sqrt_enclosure(x):
    enc = sqrt_enclosure(x, 80)
    assert enc.width <= F(1, 1 << 80)
    assert enc.lo * enc.lo <= x <= enc.hi * enc.hi


def test_sqrt_zero():
    assert sqrt_enclosure(F(0), 10) == Enclosure.point(0)


@given(st.fractions(min_value=F(0), max_value=F(10) ** 6, max_denominator=997))
@settings(max_examples=200)
def test_ceil_sqrt(x):
    k = ceil_sqrt(x)
    assert F(k * k) >= x
    if k > 0:
        assert F((k - 1) * (k - 1)) < x
