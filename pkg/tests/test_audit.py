import pytest

from absint.audit import (
    FuzzConfig,
    audit_response,
    check_fpes,
    check_map_soundness,
    check_steps,
    parse_response,
    parse_state_text,
)
from absint.audit.report import report_json, report_table, score_map, term_diff
from absint.audit.soundness import replay_witness
from absint.compositional import run_compositional, trace_text
from absint.domain import NEG_INF, POS_INF, AbstractState, Interval
from absint.lang import parse_imp
from absint.transitional import derive_fpes, parse_equation_text, run_transitional, step_log_text

import seeded_errors

FAST_FUZZ = FuzzConfig(runs=120, seed=9, max_loop_iters=300)


def iv(lo, hi):
    return Interval(lo, hi)


class TestStateParsing:
    def test_plain(self):
        s = parse_state_text("{x : [1, 4], y : bot}")
        assert s.is_bottom  # one empty variable empties the state

    def test_notation_variants(self):
        a = parse_state_text("{i : [-inf, inf], j : [0, 5]}")
        b = parse_state_text("{ i:[-inf,inf] , j:[0,5] }")
        assert a == b

    def test_universe_coercion(self):
        s = parse_state_text("{x : [1, 2]}", universe=("x", "y"))
        assert s.get("y") == Interval.top()

    def test_rejects_junk(self):
        from absint.audit.parsing import StateParseError

        with pytest.raises(StateParseError):
            parse_state_text("{x : [1, 2] whoops}")
        with pytest.raises(StateParseError):
            parse_state_text("{x : [2, 1]}")


class TestResponseParsing:
    def test_empty_response(self):
        parsed = parse_response("", "compositional")
        assert parsed.final_map is None
        assert parsed.steps == []

    def test_garbage_degrades_to_diagnostics(self):
        parsed = parse_response(
            "the answer is\n{P0} -> {x : [oops, 3]}\nnonsense", "compositional"
        )
        assert parsed.final_map is None
        assert parsed.diagnostics

    def test_last_answer_block_wins(self):
        text = (
            "the answer is\n{P0} -> {x : [0, 1]}\n\n"
            "Wait, correcting myself. The answer is\n{P0} -> {x : [0, 9]}\n"
        )
        parsed = parse_response(text, "compositional")
        assert parsed.final_map[0].get("x") == iv(0, 9)

    def test_latex_flavored_map(self):
        text = "the answer is\n$\\{P_0\\}$ $\\mapsto$ $\\{x : [-\\inf, 3]\\}$"
        parsed = parse_response(text, "compositional")
        assert parsed.final_map[0].get("x") == iv(NEG_INF, 3)

    def test_self_parse_compositional(self, loop_sum):
        result = run_compositional(loop_sum)
        parsed = parse_response(trace_text(result), "compositional")
        assert parsed.diagnostics == []
        assert {loc: s for loc, s in parsed.final_map.items()} == result.invariant_map
        ops = [s.op for s in parsed.steps]
        assert ops.count("widen") == 2
        assert ops.count("fixpoint_claim") == 1

    def test_self_parse_transitional(self, branch_double):
        sys, m, log = run_transitional(branch_double)
        parsed = parse_response(step_log_text(sys, m, log), "transitional")
        assert parsed.diagnostics == []
        assert len(parsed.fpes) == 8
        updates = [s for s in parsed.steps if s.op == "worklist_update"]
        assert len(updates) >= 8
        assert {loc: s for loc, s in parsed.final_map.items()} == m


class TestMapSoundness:
    def test_reference_is_all_inclusion(self, loop_sum):
        ref = run_compositional(loop_sum).invariant_map
        verdicts = check_map_soundness(loop_sum, dict(ref), ref, FAST_FUZZ)
        assert all(v.status == "sound_by_inclusion" for v in verdicts.values())

    def test_tight_but_true_claim_survives_fuzz(self, loop_sum):
        # at the loop head j never exceeds 10 concretely, so the claim holds
        # even though it is below the reference result
        ref = run_compositional(loop_sum).invariant_map
        claimed = dict(ref)
        claimed[3] = AbstractState.make(("i", "j"), {"i": iv(1, 5), "j": iv(0, 10)})
        verdicts = check_map_soundness(loop_sum, claimed, ref, FAST_FUZZ)
        assert verdicts[3].status == "sound_by_fuzz_only"

    def test_overtight_claim_is_refuted_with_replayable_witness(self, loop_sum):
        # after j := j + i the accumulator does reach 15
        ref = run_compositional(loop_sum).invariant_map
        claimed = dict(ref)
        claimed[4] = AbstractState.make(("i", "j"), {"i": iv(1, 5), "j": iv(0, 10)})
        verdicts = check_map_soundness(loop_sum, claimed, ref, FAST_FUZZ)
        assert verdicts[4].status == "unsound"
        witness = verdicts[4].witness
        assert witness.store["j"] > 10
        assert replay_witness(loop_sum, witness, claimed[4])

    def test_exit_pin_is_fuzz_only(self, loop_sum):
        # i leaves the loop at exactly 6; [6,6] is true but not above the
        # reference, which widened to [6, inf]
        ref = run_compositional(loop_sum).invariant_map
        claimed = dict(ref)
        claimed[6] = AbstractState.make(("i", "j"), {"i": iv(6, 6), "j": iv(0, POS_INF)})
        verdicts = check_map_soundness(loop_sum, claimed, ref, FAST_FUZZ)
        assert verdicts[6].status == "sound_by_fuzz_only"

    def test_missing_location(self, loop_sum):
        ref = run_compositional(loop_sum).invariant_map
        claimed = dict(ref)
        del claimed[5]
        verdicts = check_map_soundness(loop_sum, claimed, ref, FAST_FUZZ)
        assert verdicts[5].status == "missing"
        assert score_map(verdicts, loop_sum.n_locations, True) == "6/7"

    def test_bottom_claim_at_reachable_location_is_unsound(self, loop_sum):
        ref = run_compositional(loop_sum).invariant_map
        claimed = dict(ref)
        claimed[1] = AbstractState.bottom(("i", "j"))
        verdicts = check_map_soundness(loop_sum, claimed, ref, FAST_FUZZ)
        assert verdicts[1].status == "unsound"


class TestFpeChecking:
    def test_reference_against_itself(self, guarded_countup):
        sys = derive_fpes(guarded_countup)
        out = check_fpes(sys.equations, sys.equations)
        assert all(v["status"] == "correct" for v in out.values())
        assert len(out) == 10

    def test_swapped_join_arguments_still_correct(self, guarded_countup):
        sys = derive_fpes(guarded_countup)
        swapped = parse_equation_text("M({P6}) = M({P5}) U M({P3})")
        out = check_fpes([swapped], sys.equations)
        assert out[6]["status"] == "correct"

    def test_wrong_join_operand_reports_location_diff(self, loop_sum):
        sys = derive_fpes(loop_sum)
        # the loop head should join {P2} and {P5}; {P4} is wrong
        bad = parse_equation_text("M({P3}) = Filter(i <= 5, M({P2}) U M({P4}))")
        out = check_fpes([bad], sys.equations)
        assert out[3]["status"] == "incorrect"
        assert "location reference {P4} where {P5} belongs" in out[3]["diff"]

    def test_missing_equations_scored_missing(self, loop_sum):
        sys = derive_fpes(loop_sum)
        out = check_fpes([], sys.equations)
        assert all(v["status"] == "missing" for v in out.values())

    def test_term_diff_spots_guard_changes(self):
        a = parse_equation_text("M({P2}) = Filter(a > 5, M({P1}))")
        b = parse_equation_text("M({P2}) = Filter(a > 6, M({P1}))")
        assert "guard" in term_diff(a.rhs, b.rhs)


class TestStepChecking:
    def test_widen_mistake_listing(self):
        # the understated widening: dropping lower bounds must go to -inf
        text = (
            "{x : [1000000, inf], y : [50000, inf], z : [0, 0]} nabla "
            "{x : [999998, inf], y : [49998, inf], z : [0, 0]} results in "
            "{x : [1000000, inf], y : [50000, inf], z : [0, 0]}.\n"
            "We are at a fixed point.\n"
        )
        parsed = parse_response(text, "compositional")
        verdicts = check_steps(parsed.steps)
        widen = next(v for v in verdicts if v.op == "widen")
        assert widen.match is False
        assert widen.recomputed.get("x") == Interval.top()
        claim = next(v for v in verdicts if v.op == "fixpoint_claim")
        assert claim.match is False

    def test_correct_join_matches(self):
        parsed = parse_response("{x : [0, 3]} U {x : [2, 4]} = {x : [0, 4]}.", "compositional")
        verdicts = check_steps(parsed.steps)
        assert verdicts[0].op == "join" and verdicts[0].match is True

    def test_filter_inflation_mismatch(self):
        parsed = parse_response(
            "Filtering {i : [0, 0]} by i <= 9 results in {i : [0, 9]}.", "compositional"
        )
        verdicts = check_steps(parsed.steps)
        assert verdicts[0].match is False
        assert verdicts[0].recomputed.get("i") == iv(0, 0)

    def test_unscorable_step_counted_separately(self):
        parsed = parse_response(
            "Filtering {i : [0, 0]} by i ~ 9 results in {i : [0, 0]}.", "compositional"
        )
        assert parsed.steps == [] or all(s.guard is None for s in parsed.steps)
        assert parsed.diagnostics


class TestAuditEndToEnd:
    def test_reference_compositional_is_clean(self, guarded_countup):
        text = trace_text(run_compositional(guarded_countup))
        report = audit_response(guarded_countup, text, "compositional", fuzz=FAST_FUZZ)
        assert report.scores["im_sound"] == "10/10"
        assert report.error_tags == ()
        assert all(v.match for v in report.step_verdicts)

    def test_reference_transitional_is_clean(self, nested_loops):
        sys, m, log = run_transitional(nested_loops)
        report = audit_response(
            nested_loops, step_log_text(sys, m, log), "transitional", fuzz=FAST_FUZZ
        )
        assert report.scores == {"im_sound": "8/8", "fpe_correct": "8/8"}
        assert report.error_tags == ()

    def test_empty_response_scores_dash(self, loop_sum):
        report = audit_response(loop_sum, "", "compositional", fuzz=FAST_FUZZ)
        assert report.scores["im_sound"] == "-"
        assert not report.map_present

    def test_truncation_tag(self, loop_sum):
        report = audit_response(
            loop_sum, "partial reasoning", "compositional",
            finish_reason="length", fuzz=FAST_FUZZ,
        )
        assert "truncation" in report.error_tags

    def test_report_serialization(self, loop_sum):
        text = trace_text(run_compositional(loop_sum))
        report = audit_response(loop_sum, text, "compositional", fuzz=FAST_FUZZ)
        doc = report_json(report)
        assert '"im_sound": "7/7"' in doc
        table = report_table(report)
        assert "invariant map       7/7" in table


def _comp_trace(prog):
    return trace_text(run_compositional(prog))


def _trans_log(prog):
    sys, m, log = run_transitional(prog)
    return step_log_text(sys, m, log)


PROGRAMS = {
    "guarded_countup": (
        "a := read();\nif (a > 6) then\n    a := 0;\nelse\n    skip;\nend\n"
        "while (a < 6) do\n    a := a + 1;\nend"
    ),
    "loop_sum": "i := 1;\nj := 0;\nwhile (i <= 5) do\n    j := j + i;\n    i := i + 1;\nend",
    "count_up": "i := read();\ni := 0;\nwhile (i < 10) do\n    i := i + 2;\nend",
}


class TestSeededErrors:
    @pytest.mark.parametrize("program_name", sorted(PROGRAMS))
    @pytest.mark.parametrize("mutation", seeded_errors.COMPOSITIONAL_MUTATIONS, ids=lambda m: m[0])
    def test_compositional_mutations_detected(self, program_name, mutation):
        name, mutate, expected_tag = mutation
        prog = parse_imp(PROGRAMS[program_name])
        mutated = mutate(_comp_trace(prog), prog)
        if mutated is None:
            pytest.skip(f"{program_name} has no {name} site")
        report = audit_response(prog, mutated, "compositional", fuzz=FAST_FUZZ)
        assert expected_tag in report.error_tags, report.tag_evidence

    @pytest.mark.parametrize("program_name", ["loop_sum", "count_up", "guarded_countup"])
    def test_wrong_join_operand_detected(self, program_name):
        prog = parse_imp(PROGRAMS[program_name])
        mutated = seeded_errors.wrong_join_operand(_trans_log(prog), prog)
        assert mutated is not None
        report = audit_response(prog, mutated, "transitional", fuzz=FAST_FUZZ)
        assert "control_flow" in report.error_tags

    @pytest.mark.parametrize("program_name", sorted(PROGRAMS))
    def test_unmutated_traces_raise_nothing(self, program_name):
        prog = parse_imp(PROGRAMS[program_name])
        comp = audit_response(prog, _comp_trace(prog), "compositional", fuzz=FAST_FUZZ)
        trans = audit_response(prog, _trans_log(prog), "transitional", fuzz=FAST_FUZZ)
        assert comp.error_tags == () and trans.error_tags == ()
        assert all(v.match for v in comp.step_verdicts)
        assert all(v.match for v in trans.step_verdicts)
