import pytest

from absint.lang import parse_imp

# Small programs exercised throughout the suite.  The first three are the
# worked examples embedded in the prompt templates; the fourth is the
# guarded count-up used in the equation-system docs.

BRANCH_DOUBLE = """\
x := read();
if (x < 3) then
    x := x - 1;
    x := x * 2;
else
    x := x + 2;
end"""

LOOP_SUM = """\
i := 1;
j := 0;
while (i <= 5) do
    j := j + i;
    i := i + 1;
end"""

NESTED_LOOPS = """\
y := 7;
while (true) do
    x := read();
    while (x <= y) do
        x := x + 1;
    end
end"""

GUARDED_COUNTUP = """\
{P0}
a := read();
{P1}
if (a > 6) then
    [if_then]
    {P2}
    a := 0;
    {P3}
else
    [if_else]
    {P4}
    skip;
    {P5}
end [endif]
{P6}
while (a < 6) do
    [while_true]
    {P7}
    a := a + 1;
    {P8}
end [while_false]
{P9}"""


@pytest.fixture
def branch_double():
    return parse_imp(BRANCH_DOUBLE)


@pytest.fixture
def loop_sum():
    return parse_imp(LOOP_SUM)


@pytest.fixture
def nested_loops():
    return parse_imp(NESTED_LOOPS)


@pytest.fixture
def guarded_countup():
    return parse_imp(GUARDED_COUNTUP)
