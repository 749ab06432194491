"""Algebraic laws of the interval lattice and brute-force soundness of
arithmetic and filtering.  The acceptance suite reruns these at full
volume; here hypothesis shrinks counterexamples for us."""

import random

import hypothesis
import hypothesis.strategies as strat
import pytest

from absint.domain import (
    NEG_INF,
    POS_INF,
    AbstractState,
    Interval,
    arith,
    eval_expr,
    filter_state,
    join,
    leq,
    meet,
    widen,
)
from absint.lang.syntax import And, Cmp, IntLit, Not, Or, Read, TrueLit, Var

from oracles import concrete_cmp, concrete_op, concretize

BOUND = 8
WINDOW = (-40, 40)


def bounds():
    return strat.one_of(
        strat.integers(min_value=-BOUND, max_value=BOUND),
        strat.sampled_from([NEG_INF, POS_INF]),
    )


@strat.composite
def intervals(draw):
    if draw(strat.integers(0, 9)) == 0:
        return Interval.bottom()
    lo = draw(bounds())
    hi = draw(bounds())
    if lo == POS_INF:
        lo = -BOUND
    if hi == NEG_INF:
        hi = BOUND
    if lo != NEG_INF and hi != POS_INF and lo > hi:
        lo, hi = hi, lo
    return Interval(lo, hi)


@hypothesis.given(intervals(), intervals())
def test_join_meet_commutative(a, b):
    assert join(a, b) == join(b, a)
    assert meet(a, b) == meet(b, a)


@hypothesis.given(intervals(), intervals(), intervals())
def test_join_meet_associative(a, b, c):
    assert join(join(a, b), c) == join(a, join(b, c))
    assert meet(meet(a, b), c) == meet(a, meet(b, c))


@hypothesis.given(intervals())
def test_idempotence(a):
    assert join(a, a) == a
    assert meet(a, a) == a


@hypothesis.given(intervals(), intervals())
def test_absorption(a, b):
    # a join (a meet b) = a = a meet (a join b)
    assert join(a, meet(a, b)) == a
    assert meet(a, join(a, b)) == a


@hypothesis.given(intervals(), intervals())
def test_order_consistency(a, b):
    # a <= b  iff  a join b = b  iff  a meet b = a
    assert leq(a, b) == (join(a, b) == b) == (meet(a, b) == a)


@hypothesis.given(intervals(), intervals())
def test_widening_covers_both_operands(a, b):
    w = widen(a, b)
    assert leq(a, w)
    assert leq(b, w)


@hypothesis.given(strat.lists(intervals(), min_size=1, max_size=12))
def test_widening_stabilizes_within_two_changes_per_bound(chain):
    acc = chain[0]
    lo_changes = hi_changes = 0
    for nxt in chain[1:]:
        new = widen(acc, nxt)
        lo_changes += new.lo != acc.lo
        hi_changes += new.hi != acc.hi
        acc = new
    # each bound leaves bottom at most once and jumps to infinity at most once
    assert lo_changes <= 2 and hi_changes <= 2


@hypothesis.given(intervals(), intervals(), strat.sampled_from("+-*/"))
def test_arith_sound_vs_enumeration(a, b, op):
    out = arith(op, a, b)
    for x in concretize(a, (-BOUND, BOUND)):
        for y in concretize(b, (-BOUND, BOUND)):
            r = concrete_op(op, x, y)
            if r is not None:
                assert out.contains(r), f"{x} {op} {y} = {r} outside {out}"


# --- filtering soundness over random two-variable states -------------------


def random_state(rng):
    def rand_iv():
        if rng.random() < 0.05:
            return Interval.bottom()
        lo = rng.randint(-BOUND, BOUND)
        hi = rng.randint(lo, BOUND)
        if rng.random() < 0.15:
            lo = NEG_INF
        if rng.random() < 0.15:
            hi = POS_INF
        return Interval(lo, hi)

    return AbstractState.make(("x", "y"), {"x": rand_iv(), "y": rand_iv()})


def random_guard(rng, depth=0):
    ops = ["<", "<=", "==", ">", ">="]
    r = rng.random()
    if depth < 2 and r < 0.15:
        return And(random_guard(rng, depth + 1), random_guard(rng, depth + 1))
    if depth < 2 and r < 0.3:
        return Or(random_guard(rng, depth + 1), random_guard(rng, depth + 1))
    if depth < 2 and r < 0.45:
        return Not(random_guard(rng, depth + 1))
    def atom():
        k = rng.random()
        if k < 0.5:
            return Var(rng.choice(("x", "y")))
        if k < 0.9:
            return IntLit(rng.randint(-BOUND, BOUND))
        return Read()
    return Cmp(rng.choice(ops), atom(), atom())


def eval_guard_concrete(guard, store, read_value):
    if isinstance(guard, TrueLit):
        return True
    if isinstance(guard, Not):
        return not eval_guard_concrete(guard.inner, store, read_value)
    if isinstance(guard, And):
        return eval_guard_concrete(guard.lhs, store, read_value) and eval_guard_concrete(
            guard.rhs, store, read_value
        )
    if isinstance(guard, Or):
        return eval_guard_concrete(guard.lhs, store, read_value) or eval_guard_concrete(
            guard.rhs, store, read_value
        )
    if isinstance(guard, Cmp):
        def val(e):
            if isinstance(e, IntLit):
                return e.value
            if isinstance(e, Var):
                return store[e.name]
            return read_value
        return concrete_cmp(guard.op, val(guard.lhs), val(guard.rhs))
    raise TypeError(guard)


def check_filter_sound(state, guard):
    """Every concrete store satisfying the guard stays in the filtered state."""
    out = filter_state(state, guard)
    xs = concretize(state.get("x"), (-BOUND, BOUND))
    ys = concretize(state.get("y"), (-BOUND, BOUND))
    for x in xs:
        for y in ys:
            store = {"x": x, "y": y}
            # a read() can take any value; check a handful of witnesses
            if any(eval_guard_concrete(guard, store, rv) for rv in (-9, -1, 0, 1, 9)):
                assert out.get("x").contains(x) and out.get("y").contains(y), (
                    f"store {store} satisfies {guard} but left the filtered state"
                )


@pytest.mark.parametrize("seed", range(8))
def test_filter_sound_vs_enumeration(seed):
    rng = random.Random(seed)
    for _ in range(200):
        check_filter_sound(random_state(rng), random_guard(rng))


@hypothesis.given(intervals())
def test_bottom_strictness(a):
    bot = Interval.bottom()
    for op in "+-*/":
        assert arith(op, a, bot).is_bottom
        assert arith(op, bot, a).is_bottom
    assert meet(a, bot).is_bottom
    # join and widen treat bottom as neutral instead
    assert join(a, bot) == a
    assert widen(a, bot) == a
