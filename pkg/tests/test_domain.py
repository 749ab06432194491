import pytest

from absint.domain import (
    NEG_INF,
    POS_INF,
    AbstractState,
    Interval,
    UnknownVariableError,
    UniverseMismatchError,
    arith,
    eval_expr,
    filter_state,
    join,
    leq,
    meet,
    state_join,
    state_leq,
    state_widen,
    widen,
)
from absint.lang.parser import parse_guard_text
from absint.lang.syntax import BinOp, IntLit, Read, Var

from oracles import concretize

BOT = Interval.bottom()
TOP = Interval.top()


def iv(lo, hi):
    return Interval(lo, hi)


def st(**kwargs):
    return AbstractState.make(tuple(kwargs), {k: v for k, v in kwargs.items()})


class TestLatticeOps:
    def test_bottom_is_least(self):
        assert leq(BOT, iv(3, 5))
        assert leq(BOT, BOT)
        assert not leq(iv(3, 5), BOT)

    def test_leq_containment(self):
        assert leq(iv(1, 2), iv(0, 4))
        assert not leq(iv(0, 4), iv(1, 2))

    def test_leq_matches_enumeration(self):
        # [0,4] <= [1,2] must agree with subset inclusion of concretizations
        window = (-20, 20)
        a, b = iv(0, 4), iv(1, 2)
        assert leq(a, b) == (concretize(a, window) <= concretize(b, window)) == False
        assert leq(b, a) == (concretize(b, window) <= concretize(a, window)) == True

    def test_join(self):
        assert join(iv(0, 3), iv(2, 4)) == iv(0, 4)
        assert join(BOT, iv(1, 2)) == iv(1, 2)
        assert join(iv(1, 2), BOT) == iv(1, 2)
        assert join(iv(NEG_INF, 2), iv(5, POS_INF)) == TOP

    def test_meet(self):
        assert meet(iv(0, 6), iv(NEG_INF, 4)) == iv(0, 4)
        assert meet(iv(0, 1), iv(5, 9)) == BOT
        assert meet(iv(3, 3), iv(3, 3)) == iv(3, 3)


class TestWidening:
    def test_unstable_bounds_jump_to_infinity(self):
        assert widen(iv(6, 7), iv(9, 10)) == iv(6, POS_INF)

    def test_dropping_lower_bound_goes_to_neg_inf(self):
        # a shrinking lower bound must widen all the way down, even when
        # both operands are already unbounded above
        assert widen(iv(1000000, POS_INF), iv(999998, POS_INF)) == TOP

    def test_bottom_neutral(self):
        assert widen(BOT, iv(1, 1)) == iv(1, 1)
        assert widen(iv(1, 1), BOT) == iv(1, 1)

    def test_stable_bounds_kept(self):
        assert widen(iv(1, POS_INF), iv(1, 5)) == iv(1, POS_INF)
        assert widen(iv(0, 5), iv(0, 3)) == iv(0, 5)


class TestArith:
    def test_division_by_zero_interval_is_bottom(self):
        assert arith("/", iv(1, 3), iv(0, 0)) == BOT

    def test_division_straddling_zero_is_top(self):
        assert arith("/", iv(1, 3), iv(-2, 3)) == TOP

    def test_add_with_infinity(self):
        assert arith("+", iv(NEG_INF, 7), iv(1, 1)) == iv(NEG_INF, 8)

    def test_mul_with_infinity(self):
        assert arith("*", iv(NEG_INF, 1), iv(2, 2)) == iv(NEG_INF, 2)

    def test_bottom_propagates(self):
        for op in "+-*/":
            assert arith(op, BOT, iv(1, 2)) == BOT
            assert arith(op, iv(1, 2), BOT) == BOT

    def test_divisor_touching_zero_at_endpoint(self):
        # [4,8] / [0,2] behaves like division by [1,2]
        assert arith("/", iv(4, 8), iv(0, 2)) == iv(2, 8)
        assert arith("/", iv(4, 8), iv(-2, 0)) == iv(-8, -2)

    def test_truncation_toward_zero(self):
        assert arith("/", iv(-7, 7), iv(2, 2)) == iv(-3, 3)


class TestEvalExpr:
    def test_var_plus_const(self):
        s = st(x=iv(1, 2))
        assert eval_expr(s, BinOp("+", Var("x"), IntLit(1))) == iv(2, 3)

    def test_read_is_top(self):
        s = st(x=iv(1, 2))
        assert eval_expr(s, Read()) == TOP

    def test_bottom_state_is_strict(self):
        s = AbstractState.bottom(("x",))
        assert eval_expr(s, IntLit(5)) == BOT

    def test_unknown_variable(self):
        s = st(x=iv(1, 2))
        with pytest.raises(UnknownVariableError):
            eval_expr(s, Var("nope"))


class TestFilter:
    def test_read_comparison_changes_nothing(self):
        s = st(x=iv(5, 7), y=iv(6, 8))
        assert filter_state(s, parse_guard_text("!(read() == 0)")) == s

    def test_negated_equality_splits_and_joins(self):
        s = st(x=iv(5, 10), y=iv(5, POS_INF))
        assert filter_state(s, parse_guard_text("!(y == 6)")) == s

    def test_impossible_equality_is_bottom(self):
        s = st(x=iv(5, 9), y=iv(10, 12))
        out = filter_state(s, parse_guard_text("y == 16"))
        assert out == AbstractState.bottom(("x", "y"))
        assert out.render() == "{x : bot, y : bot}"

    def test_conjunction_intersects_branch_filters(self):
        s = st(x=iv(5, 10), y=iv(4, 9))
        out = filter_state(s, parse_guard_text("(y <= 8) && (x <= y)"))
        assert out == st(x=iv(5, 9), y=iv(4, 8))

    def test_var_vs_var_tightens_left_side_only(self):
        s = st(x=iv(5, 10), y=iv(4, 9))
        out = filter_state(s, parse_guard_text("x <= y"))
        assert out == st(x=iv(5, 9), y=iv(4, 9))

    def test_strict_comparison_uses_integer_bounds(self):
        s = st(x=iv(0, 10))
        assert filter_state(s, parse_guard_text("x < 5")) == st(x=iv(0, 4))
        assert filter_state(s, parse_guard_text("x > 5")) == st(x=iv(6, 10))

    def test_constant_on_the_left(self):
        s = st(x=iv(0, 10))
        assert filter_state(s, parse_guard_text("5 <= x")) == st(x=iv(5, 10))

    def test_false_guard_is_bottom(self):
        s = st(x=iv(0, 10))
        assert filter_state(s, parse_guard_text("false")).is_bottom

    def test_bottom_in_bottom_out(self):
        s = AbstractState.bottom(("x",))
        assert filter_state(s, parse_guard_text("x < 5")).is_bottom


class TestStates:
    def test_bottom_normalization(self):
        s = AbstractState.make(("x", "y"), {"x": iv(1, 2), "y": BOT})
        assert s.is_bottom
        assert s.get("x") == BOT

    def test_pointwise_widen(self):
        a = st(i=iv(1, 1), j=iv(0, 0))
        b = st(i=iv(2, 2), j=iv(1, 1))
        assert state_widen(a, b) == st(i=iv(1, POS_INF), j=iv(0, POS_INF))

    def test_join_with_bottom_state(self):
        a = AbstractState.bottom(("i",))
        b = st(i=iv(4, 5))
        assert state_join(a, b) == b
        assert state_join(b, a) == b

    def test_state_leq(self):
        assert state_leq(st(i=iv(1, 1)), st(i=iv(1, POS_INF)))
        assert not state_leq(st(i=iv(0, 1)), st(i=iv(1, POS_INF)))

    def test_universe_mismatch_rejected(self):
        with pytest.raises(UniverseMismatchError):
            state_join(st(i=iv(1, 1)), st(j=iv(1, 1)))

    def test_render(self):
        s = st(x=iv(1, 4), y=BOT)
        assert s.render() == "{x : bot, y : bot}"
        assert st(x=iv(1, 4), y=iv(-1, 3)).render() == "{x : [1, 4], y : [-1, 3]}"
        assert st(x=iv(NEG_INF, POS_INF)).render() == "{x : [-inf, inf]}"
