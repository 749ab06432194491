"""Soundness verdicts for claimed invariant maps.

A claimed state is accepted outright when it covers the reference
analysis result (reference inclusion is a sufficient condition: the
reference is sound, so anything above it is too).  Otherwise seeded
concrete runs look for a refutation: a store observed at the location
outside the claimed state.  A found witness is replayable — it carries
the full input stream of the run.  No witness after the configured runs
leaves the weaker verdict sound_by_fuzz_only.

Verdict order: sound_by_inclusion > sound_by_fuzz_only > unsound;
locations absent from the claim are 'missing' and score as not sound.
"""

from __future__ import annotations

from dataclasses import dataclass

from absint.concrete import InputSource, compile_program, run_seed
from absint.domain import AbstractState, state_leq
from absint.lang.annotate import AnnotatedProgram

SOUND_STATUSES = ("sound_by_inclusion", "sound_by_fuzz_only")


@dataclass
class FuzzConfig:
    runs: int = 1000
    seed: int = 0
    max_loop_iters: int = 10_000


@dataclass
class Witness:
    location: int
    store: dict
    run_index: int
    reads: list
    max_loop_iters: int


@dataclass
class LocationVerdict:
    status: str  # sound_by_inclusion | sound_by_fuzz_only | unsound | missing
    witness: Witness = None


def _claim_table(claimed: dict, locations) -> dict:
    """Per-location var->interval probes; None marks a bottom claim (any
    visit refutes it)."""
    table = {}
    for loc in locations:
        state = claimed.get(loc)
        if state is None:
            continue
        table[loc] = None if state.is_bottom else dict(state.env)
    return table


def fuzz_violations(prog: AnnotatedProgram, claimed: dict, fuzz: FuzzConfig, locations=None) -> dict:
    """Run the concrete oracle; first witness per checked location."""
    compiled = compile_program(prog)
    check = _claim_table(claimed, prog.locations if locations is None else locations)
    witnesses = {}
    pending = set(check)
    if not pending:
        return witnesses

    for run_index in range(fuzz.runs):
        source = InputSource(run_seed(fuzz.seed, run_index), compiled.constants)
        run_hits = []

        def observe(loc, store, run_hits=run_hits):
            probe = check.get(loc, False)
            if probe is False or loc not in pending:
                return
            if probe is None:
                run_hits.append((loc, dict(store)))
                return
            for var, ival in probe.items():
                value = store[var]
                if ival.is_bottom or value < ival.lo or value > ival.hi:
                    run_hits.append((loc, dict(store)))
                    return

        outcome = compiled.run(source, observe, fuzz.max_loop_iters)
        for loc, store in run_hits:
            if loc in pending:
                pending.discard(loc)
                witnesses[loc] = Witness(
                    location=loc,
                    store=store,
                    run_index=run_index,
                    reads=outcome.reads,
                    max_loop_iters=fuzz.max_loop_iters,
                )
        if not pending:
            break
    return witnesses


def replay_witness(prog: AnnotatedProgram, witness: Witness, claimed_state: AbstractState) -> bool:
    """Re-execute the witness run and confirm the recorded store really is
    visited at the location and really escapes the claimed state."""
    from absint.concrete import ReplaySource

    compiled = compile_program(prog)
    seen = []

    def observe(loc, store):
        if loc == witness.location:
            seen.append(dict(store))

    compiled.run(ReplaySource(witness.reads), observe, witness.max_loop_iters)
    if witness.store not in seen:
        return False
    if claimed_state.is_bottom:
        return True
    return any(
        not claimed_state.get(var).contains(value) for var, value in witness.store.items()
    )


def check_map_soundness(
    prog: AnnotatedProgram,
    claimed: dict,
    ref: dict,
    fuzz: FuzzConfig = None,
) -> dict:
    """Per-location verdicts for a claimed map against the reference map."""
    fuzz = fuzz or FuzzConfig()
    verdicts = {}
    needs_fuzz = []
    for loc in prog.locations:
        state = claimed.get(loc)
        if state is None:
            verdicts[loc] = LocationVerdict("missing")
        elif state_leq(ref[loc], state):
            verdicts[loc] = LocationVerdict("sound_by_inclusion")
        else:
            needs_fuzz.append(loc)
    if needs_fuzz:
        witnesses = fuzz_violations(prog, claimed, fuzz, locations=needs_fuzz)
        for loc in needs_fuzz:
            if loc in witnesses:
                verdicts[loc] = LocationVerdict("unsound", witnesses[loc])
            else:
                verdicts[loc] = LocationVerdict("sound_by_fuzz_only")
    return verdicts
