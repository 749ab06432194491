"""Interval abstract domain over unbounded integers.

Values are intervals [lo, hi] with lo, hi drawn from Z extended with
-inf/+inf, plus a bottom element for the empty interval.  Abstract states
map every program variable to an interval and are bottom-normalized: if
any variable is empty the whole state is the bottom state.

The lattice operations (leq, join, meet), interval arithmetic, guard
filtering and the widening operator live here.  Everything is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from absint.lang.syntax import BinOp, BoolExpr, Cmp, Expr, IntLit, Read, Var
from absint.lang.syntax import And, Not, Or, Paren, TrueLit

NEG_INF = float("-inf")
POS_INF = float("inf")

class UnknownVariableError(KeyError):
    """An expression mentions a variable outside the state's universe."""


class UniverseMismatchError(ValueError):
    """Two states over different variable universes were combined."""


def render_bound(b) -> str:
    if b == NEG_INF:
        return "-inf"
    if b == POS_INF:
        return "inf"
    return str(b)


@dataclass(frozen=True)
class Interval:
    """A closed integer interval, or bottom (the empty interval).

    ``lo``/``hi`` are python ints or +-inf floats; both are None exactly
    for the bottom interval.
    """

    lo: object
    hi: object

    def __post_init__(self):
        if (self.lo is None) != (self.hi is None):
            raise ValueError("half-initialized interval")
        if self.lo is not None:
            if self.lo == POS_INF or self.hi == NEG_INF:
                raise ValueError("degenerate bounds")
            if self.lo > self.hi:
                raise ValueError(f"empty range [{self.lo}, {self.hi}]; use Interval.bottom()")

    @staticmethod
    def bottom() -> "Interval":
        return _BOTTOM

    @staticmethod
    def top() -> "Interval":
        return _TOP

    @staticmethod
    def const(n: int) -> "Interval":
        return Interval(n, n)

    @property
    def is_bottom(self) -> bool:
        return self.lo is None

    def contains(self, n: int) -> bool:
        return not self.is_bottom and self.lo <= n <= self.hi

    def render(self) -> str:
        if self.is_bottom:
            return "bot"
        return f"[{render_bound(self.lo)}, {render_bound(self.hi)}]"

    def __str__(self) -> str:
        return self.render()


_BOTTOM = Interval(None, None)
_TOP = Interval(NEG_INF, POS_INF)


def leq(a: Interval, b: Interval) -> bool:
    """Partial order: true iff every concrete value of a is a value of b."""
    if a.is_bottom:
        return True
    if b.is_bottom:
        return False
    return b.lo <= a.lo and a.hi <= b.hi


def join(a: Interval, b: Interval) -> Interval:
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def meet(a: Interval, b: Interval) -> Interval:
    if a.is_bottom or b.is_bottom:
        return _BOTTOM
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        return _BOTTOM
    return Interval(lo, hi)


def widen(a: Interval, b: Interval) -> Interval:
    """[a1,a2] widened by [b1,b2]: unstable bounds jump straight to infinity.

    Bottom is neutral on either side.
    """
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    lo = NEG_INF if b.lo < a.lo else a.lo
    hi = POS_INF if b.hi > a.hi else a.hi
    return Interval(lo, hi)


def _mul_bound(x, y):
    # 0 * +-inf is 0 here: keeps [0,0] * anything at [0,0], which is tight.
    if x == 0 or y == 0:
        return 0
    if x in (NEG_INF, POS_INF) or y in (NEG_INF, POS_INF):
        return POS_INF if (x > 0) == (y > 0) else NEG_INF
    return x * y


def _div_trunc(x, y):
    # Truncation toward zero, on unbounded ints (y != 0).
    if x in (NEG_INF, POS_INF) and y in (NEG_INF, POS_INF):
        return POS_INF if (x > 0) == (y > 0) else NEG_INF
    if x in (NEG_INF, POS_INF):
        return POS_INF if (x > 0) == (y > 0) else NEG_INF
    if y in (NEG_INF, POS_INF):
        return 0
    q = abs(x) // abs(y)
    return q if (x >= 0) == (y >= 0) else -q


def arith(op: str, a: Interval, b: Interval) -> Interval:
    """Sound interval arithmetic for +, -, *, /.

    Division: a divisor of exactly [0,0] yields bottom (no valid result);
    a divisor spanning both negative and positive values yields top; a
    divisor touching zero only at an endpoint is refined to exclude it.
    Quotients truncate toward zero.
    """
    if a.is_bottom or b.is_bottom:
        return _BOTTOM
    if op == "+":
        return Interval(a.lo + b.lo, a.hi + b.hi)
    if op == "-":
        return Interval(a.lo - b.hi, a.hi - b.lo)
    if op == "*":
        cands = [_mul_bound(x, y) for x in (a.lo, a.hi) for y in (b.lo, b.hi)]
        return Interval(min(cands), max(cands))
    if op == "/":
        if b.lo == 0 and b.hi == 0:
            return _BOTTOM
        if b.lo < 0 < b.hi:
            return _TOP
        d = b
        if d.lo == 0:
            d = Interval(1, d.hi)
        elif d.hi == 0:
            d = Interval(d.lo, -1)
        cands = [_div_trunc(x, y) for x in (a.lo, a.hi) for y in (d.lo, d.hi)]
        return Interval(min(cands), max(cands))
    raise ValueError(f"unknown operator {op!r}")


# ---------------------------------------------------------------------------
# Abstract states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbstractState:
    """Total map from the program's variables to intervals, in universe order.

    Bottom-normalized on construction: one empty variable empties them all.
    """

    env: tuple

    @staticmethod
    def make(universe: Iterable[str], values: Mapping[str, Interval]) -> "AbstractState":
        universe = tuple(universe)
        missing = [v for v in universe if v not in values]
        if missing:
            raise UniverseMismatchError(f"missing variables: {missing}")
        extra = [v for v in values if v not in universe]
        if extra:
            raise UniverseMismatchError(f"variables outside universe: {extra}")
        ivals = tuple(values[v] for v in universe)
        if any(i.is_bottom for i in ivals):
            ivals = tuple(_BOTTOM for _ in universe)
        return AbstractState(tuple(zip(universe, ivals)))

    @staticmethod
    def top(universe: Iterable[str]) -> "AbstractState":
        return AbstractState(tuple((v, _TOP) for v in universe))

    @staticmethod
    def bottom(universe: Iterable[str]) -> "AbstractState":
        return AbstractState(tuple((v, _BOTTOM) for v in universe))

    @property
    def universe(self) -> tuple:
        return tuple(v for v, _ in self.env)

    @property
    def is_bottom(self) -> bool:
        return any(i.is_bottom for _, i in self.env)

    def get(self, var: str) -> Interval:
        for v, i in self.env:
            if v == var:
                return i
        raise UnknownVariableError(var)

    def set(self, var: str, ival: Interval) -> "AbstractState":
        if var not in self.universe:
            raise UnknownVariableError(var)
        return AbstractState.make(
            self.universe, {v: (ival if v == var else i) for v, i in self.env}
        )

    def as_dict(self) -> dict:
        return dict(self.env)

    def render(self) -> str:
        return "{" + ", ".join(f"{v} : {i.render()}" for v, i in self.env) + "}"

    def __str__(self) -> str:
        return self.render()


def _check_universes(a: AbstractState, b: AbstractState) -> None:
    if a.universe != b.universe:
        raise UniverseMismatchError(f"{a.universe} vs {b.universe}")


def state_join(a: AbstractState, b: AbstractState) -> AbstractState:
    _check_universes(a, b)
    return AbstractState.make(
        a.universe, {v: join(i, b.get(v)) for v, i in a.env}
    )


def state_meet(a: AbstractState, b: AbstractState) -> AbstractState:
    _check_universes(a, b)
    return AbstractState.make(
        a.universe, {v: meet(i, b.get(v)) for v, i in a.env}
    )


def state_widen(a: AbstractState, b: AbstractState) -> AbstractState:
    _check_universes(a, b)
    return AbstractState.make(
        a.universe, {v: widen(i, b.get(v)) for v, i in a.env}
    )


def state_leq(a: AbstractState, b: AbstractState) -> bool:
    _check_universes(a, b)
    if a.is_bottom:
        return True
    return all(leq(i, b.get(v)) for v, i in a.env)


# ---------------------------------------------------------------------------
# Expression evaluation and guard filtering
# ---------------------------------------------------------------------------


def eval_expr(state: AbstractState, e: Expr) -> Interval:
    """Compositional interval evaluation; read() is any integer."""
    if state.is_bottom:
        return _BOTTOM
    if isinstance(e, IntLit):
        return Interval.const(e.value)
    if isinstance(e, Var):
        return state.get(e.name)
    if isinstance(e, Read):
        return _TOP
    if isinstance(e, BinOp):
        return arith(e.op, eval_expr(state, e.lhs), eval_expr(state, e.rhs))
    raise TypeError(f"not an expression: {e!r}")


_NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}

# Interval of values y with "y OP n" true, for filtering against a constant.
def _cmp_window(op: str, n: int) -> Interval:
    if op == "<":
        return Interval(NEG_INF, n - 1)
    if op == "<=":
        return Interval(NEG_INF, n)
    if op == "==":
        return Interval(n, n)
    if op == ">":
        return Interval(n + 1, POS_INF)
    if op == ">=":
        return Interval(n, POS_INF)
    raise ValueError(f"unknown comparison {op!r}")


def _var_vs_interval_window(op: str, rhs: Interval) -> Interval:
    # Values of the left variable compatible with "lhs OP rhs" for some
    # rhs value; only the left side is tightened.
    if rhs.is_bottom:
        return _BOTTOM
    if op == "<":
        return Interval(NEG_INF, rhs.hi - 1) if rhs.hi != POS_INF else _TOP
    if op == "<=":
        return Interval(NEG_INF, rhs.hi) if rhs.hi != POS_INF else _TOP
    if op == "==":
        return rhs
    if op == ">":
        return Interval(rhs.lo + 1, POS_INF) if rhs.lo != NEG_INF else _TOP
    if op == ">=":
        return Interval(rhs.lo, POS_INF) if rhs.lo != NEG_INF else _TOP
    raise ValueError(f"unknown comparison {op!r}")


def _filter_cmp(state: AbstractState, c: Cmp) -> AbstractState:
    lhs, rhs = c.lhs, c.rhs
    # read() can produce any value, so such comparisons never refine anything.
    if isinstance(lhs, Read) or isinstance(rhs, Read):
        return state
    if isinstance(lhs, IntLit) and isinstance(rhs, IntLit):
        ok = {
            "<": lhs.value < rhs.value,
            "<=": lhs.value <= rhs.value,
            "==": lhs.value == rhs.value,
            ">": lhs.value > rhs.value,
            ">=": lhs.value >= rhs.value,
        }[c.op]
        return state if ok else AbstractState.bottom(state.universe)
    if isinstance(lhs, IntLit):
        # n OP x  ==>  x OP' n with the comparison flipped around.
        flipped = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "=="}[c.op]
        return _filter_cmp(state, Cmp(flipped, rhs, lhs))
    if isinstance(rhs, IntLit):
        cur = state.get(lhs.name)
        return state.set(lhs.name, meet(cur, _cmp_window(c.op, rhs.value)))
    # var vs var: tighten the left variable against the right one's interval.
    cur = state.get(lhs.name)
    window = _var_vs_interval_window(c.op, state.get(rhs.name))
    return state.set(lhs.name, meet(cur, window))


def filter_state(state: AbstractState, b: BoolExpr) -> AbstractState:
    """Restrict a state by a guard; a sound over-approximation of the
    stores satisfying it.

    Conjunctions filter each side on the original state and intersect;
    disjunctions join; negation is pushed down to comparisons, with
    ``!(x == n)`` split into the two strict sides and joined.
    """
    if state.is_bottom:
        return state
    if isinstance(b, TrueLit):
        return state
    if isinstance(b, Paren):
        return filter_state(state, b.inner)
    if isinstance(b, And):
        return state_meet(filter_state(state, b.lhs), filter_state(state, b.rhs))
    if isinstance(b, Or):
        return state_join(filter_state(state, b.lhs), filter_state(state, b.rhs))
    if isinstance(b, Not):
        inner = b.inner
        while isinstance(inner, Paren):
            inner = inner.inner
        if isinstance(inner, Not):
            return filter_state(state, inner.inner)
        if isinstance(inner, TrueLit):
            return AbstractState.bottom(state.universe)
        if isinstance(inner, And):
            return filter_state(state, Or(Not(inner.lhs), Not(inner.rhs)))
        if isinstance(inner, Or):
            return filter_state(state, And(Not(inner.lhs), Not(inner.rhs)))
        if isinstance(inner, Cmp):
            if inner.op == "==":
                lt = Cmp("<", inner.lhs, inner.rhs)
                gt = Cmp(">", inner.lhs, inner.rhs)
                return filter_state(state, Or(lt, gt))
            return filter_state(state, Cmp(_NEGATED[inner.op], inner.lhs, inner.rhs))
        raise TypeError(f"not a guard: {inner!r}")
    if isinstance(b, Cmp):
        return _filter_cmp(state, b)
    raise TypeError(f"not a guard: {b!r}")
