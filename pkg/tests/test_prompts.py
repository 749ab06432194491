import hashlib
import re

from absint.audit import parse_response
from absint.domain import Interval
from absint.lang import parse_imp
from absint.prompts import MARKER, STRATEGIES, build_prompt, template_text

# the templates are versioned data: byte drift is an intentional act
TEMPLATE_SHA256 = {
    "compositional": "3a9e7600bb4d69ad912be957062c015b3df4e9d935c367df1981bf0b7cdef067",
    "transitional": "bbfae9a257cca8860bc927fcdce09aa1f0b9cb45a71bf582b95673bf08053d34",
}


class TestTemplates:
    def test_bytes_are_frozen(self):
        for strategy in STRATEGIES:
            digest = hashlib.sha256(template_text(strategy).encode("utf-8")).hexdigest()
            assert digest == TEMPLATE_SHA256[strategy], strategy

    def test_single_marker(self):
        for strategy in STRATEGIES:
            assert template_text(strategy).count(MARKER) == 1

    def test_transitional_explains_the_worklist(self):
        text = template_text("transitional")
        assert "worklist" in text
        assert "fixed point equations" in text
        assert "[endif]" in text and "[if_end]" not in text


class TestBuildPrompt:
    def test_program_is_the_only_varying_part(self, loop_sum, branch_double):
        # note: loop_sum is also a worked example inside the template, so
        # only the trailing occurrence is the injected program
        def unfill(text, prog):
            idx = text.rindex(prog.render())
            return text[:idx] + MARKER + text[idx + len(prog.render()):]

        a = build_prompt("compositional", loop_sum)
        b = build_prompt("compositional", branch_double)
        template = template_text("compositional")
        head = template[: template.index(MARKER)]
        assert a.startswith(head) and b.startswith(head)
        assert unfill(a, loop_sum) == unfill(b, branch_double) == template

    def test_deterministic(self, guarded_countup):
        for strategy in STRATEGIES:
            assert build_prompt(strategy, guarded_countup) == build_prompt(
                strategy, guarded_countup
            )

    def test_closing_line_precedes_program(self, guarded_countup):
        out = build_prompt("compositional", guarded_countup)
        closing = "Now, please solve this, outputting the intermediary steps you take:"
        assert closing in out
        assert out.index(closing) < out.index("{P0}\na := read();")

    def test_ascii_fallback(self, loop_sum):
        out = build_prompt("transitional", loop_sum, ascii_fallback=True)
        for symbol in ("⊥", "∇", "⊔", "⊓"):
            assert symbol not in out
        assert "nabla" in out and "bot" in out


class TestWorkedExamplesAreConsistent:
    """The teaching examples embedded in the templates must agree with
    what the analyzers actually compute."""

    def _example_block(self, strategy, n):
        text = template_text(strategy)
        pattern = rf"Example {n}:.*?(?=Example {n + 1}:|Now, please solve)"
        return re.search(pattern, text, re.DOTALL).group(0)

    def test_loop_example_output_parses_to_its_final_map(self):
        block = self._example_block("compositional", 2)
        parsed = parse_response(block, "compositional")
        assert parsed.diagnostics == []
        assert sorted(parsed.final_map) == list(range(7))
        assert parsed.final_map[3].get("i") == Interval(1, 5)
        assert parsed.final_map[3].get("j") == Interval(0, float("inf"))
        assert parsed.final_map[6].get("i") == Interval(6, float("inf"))

    def test_every_compositional_example_matches_the_analyzer(self):
        from absint.compositional import run_compositional

        sources = {
            1: "x := read();\nif (x < 3) then\n    x := x - 1;\n    x := x * 2;\nelse\n    x := x + 2;\nend",
            2: "i := 1;\nj := 0;\nwhile (i <= 5) do\n    j := j + i;\n    i := i + 1;\nend",
            3: "y := 7;\nwhile (true) do\n    x := read();\n    while (x <= y) do\n        x := x + 1;\n    end\nend",
        }
        for n, src in sources.items():
            prog = parse_imp(src)
            want = run_compositional(prog).invariant_map
            parsed = parse_response(self._example_block("compositional", n), "compositional")
            assert parsed.final_map == want, f"example {n}"

    def test_every_transitional_example_matches_the_solver(self):
        from absint.transitional import run_transitional

        sources = {
            1: "x := read();\nif (x < 3) then\n    x := x - 1;\n    x := x * 2;\nelse\n    x := x + 2;\nend",
            2: "i := 1;\nj := 0;\nwhile (i <= 5) do\n    j := j + i;\n    i := i + 1;\nend",
            3: "y := 7;\nwhile (true) do\n    x := read();\n    while (x <= y) do\n        x := x + 1;\n    end\nend",
        }
        for n, src in sources.items():
            prog = parse_imp(src)
            _, want, _ = run_transitional(prog)
            parsed = parse_response(self._example_block("transitional", n), "transitional")
            assert parsed.final_map == want, f"example {n}"
            assert len(parsed.fpes) == prog.n_locations
