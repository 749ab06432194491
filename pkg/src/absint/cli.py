"""Command-line pipeline: annotate and analyze programs, build prompts,
query models (with record/replay cassettes), audit responses, and roll
audit reports up into a scoreboard with a figure.

Exit codes are operational only: a missing file or an unparseable
program is an error, an unsound model answer is data.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from absint.audit.report import audit_response, report_json, report_table
from absint.audit.soundness import FuzzConfig
from absint.cfront import CTranslationError, translate_c_full
from absint.compositional import run_compositional, trace_json, trace_text
from absint.lang import ImpSyntaxError, parse_imp
from absint.llm import Cassette, CassetteMissError, LlmClient, ModelConfig, load_providers
from absint.prompts import STRATEGIES, build_prompt
from absint.transitional import render_system, run_transitional, step_log_json, step_log_text


def load_program(path: Path):
    text = Path(path).read_text("utf-8")
    if str(path).endswith(".c"):
        return translate_c_full(text).program
    return parse_imp(text)


def _map_lines(invariant_map) -> str:
    return "\n".join(
        f"{{P{loc}}} -> {state.render()}" for loc, state in sorted(invariant_map.items())
    ) + "\n"


# --- subcommands -------------------------------------------------------------


def cmd_annotate(args) -> int:
    prog = load_program(args.file)
    text = prog.render() + "\n"
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args) -> int:
    prog = load_program(args.file)
    if args.strategy == "compositional":
        result = run_compositional(prog)
        invariant_map = result.invariant_map
        text, doc = trace_text(result), trace_json(result)
    else:
        system, invariant_map, log = run_transitional(prog)
        text, doc = step_log_text(system, invariant_map, log), step_log_json(
            system, invariant_map, log
        )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = Path(args.file).stem
        (out / f"{stem}.{args.strategy}.map.txt").write_text(_map_lines(invariant_map), "utf-8")
        (out / f"{stem}.{args.strategy}.trace.txt").write_text(text, "utf-8")
        (out / f"{stem}.{args.strategy}.trace.json").write_text(doc, "utf-8")
        if args.strategy == "transitional":
            (out / f"{stem}.equations.txt").write_text(render_system(system) + "\n", "utf-8")
    else:
        sys.stdout.write(_map_lines(invariant_map))
    return 0


def cmd_prompt(args) -> int:
    prog = load_program(args.file)
    text = build_prompt(args.strategy, prog, ascii_fallback=args.ascii)
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _unit_dir(out_dir: Path, program_path: Path, strategy: str, model: str) -> Path:
    safe_model = model.replace("/", "_")
    return out_dir / Path(program_path).stem / strategy / safe_model


def cmd_query(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text("utf-8"))
    out_dir = Path(args.out or manifest.get("out_dir", "runs"))
    out_dir.mkdir(parents=True, exist_ok=True)
    model = manifest["model"]
    cfg = ModelConfig(
        provider=model["provider"],
        model=model["model"],
        temperature=model.get("temperature", 0.0),
        max_output_tokens=model.get("max_output_tokens", 4096),
        timeout=model.get("timeout", 120.0),
    )
    strategy = manifest["strategy"]
    seed = manifest.get("seed", 0)
    manifest_root = Path(args.manifest).resolve().parent

    def resolve(p):
        path = Path(p)
        return path if path.is_absolute() else manifest_root / path

    cassette = Cassette(resolve(manifest["cassette"])) if manifest.get("cassette") else None
    providers_path = manifest.get("providers_config")
    providers = load_providers(resolve(providers_path) if providers_path else None)
    client = LlmClient(providers=providers)

    def one(program_path):
        prog = load_program(program_path)
        prompt = build_prompt(strategy, prog)
        completion = client.complete(cfg, prompt, mode=args.mode, cassette=cassette)
        unit = _unit_dir(out_dir, program_path, strategy, cfg.model)
        unit.mkdir(parents=True, exist_ok=True)
        (unit / "prompt.txt").write_text(prompt, "utf-8")
        (unit / "response.txt").write_text(completion.text, "utf-8")
        meta = {
            "program": str(program_path),
            "strategy": strategy,
            "provider": cfg.provider,
            "model": cfg.model,
            "temperature": cfg.temperature,
            "finish_reason": completion.finish_reason,
            "token_counts": completion.token_counts,
            "seed": seed,
            "fuzz_runs": manifest.get("fuzz_runs", 1000),
            "max_loop_iters": manifest.get("max_loop_iters", 10_000),
        }
        (unit / "meta.json").write_text(
            json.dumps(meta, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        return unit

    programs = [resolve(p) for p in manifest["corpus"]]
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        list(pool.map(one, programs))
    stamp = dict(manifest)
    stamp["created"] = datetime.now(timezone.utc).isoformat()
    stamp["seed"] = seed
    (out_dir / "run_manifest.json").write_text(
        json.dumps(stamp, indent=2, sort_keys=True) + "\n", "utf-8"
    )
    return 0


def _audit_unit(unit: Path, jobs=1) -> None:
    meta = json.loads((unit / "meta.json").read_text("utf-8"))
    prog = load_program(meta["program"])
    fuzz = FuzzConfig(
        runs=meta.get("fuzz_runs", 1000),
        seed=meta.get("seed", 0),
        max_loop_iters=meta.get("max_loop_iters", 10_000),
    )
    report = audit_response(
        prog,
        (unit / "response.txt").read_text("utf-8"),
        meta["strategy"],
        finish_reason=meta.get("finish_reason"),
        fuzz=fuzz,
    )
    (unit / "report.json").write_text(report_json(report), "utf-8")
    (unit / "report.txt").write_text(report_table(report), "utf-8")


def cmd_audit(args) -> int:
    if args.run:
        units = sorted(p.parent for p in Path(args.run).glob("*/*/*/meta.json"))
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            list(pool.map(_audit_unit, units))
        return 0
    if not (args.response and args.file and args.strategy):
        print("audit needs either --run DIR or RESPONSE FILE --strategy", file=sys.stderr)
        return 2
    prog = load_program(args.file)
    fuzz = FuzzConfig(runs=args.fuzz_runs, seed=args.seed, max_loop_iters=args.max_loop_iters)
    report = audit_response(
        prog,
        Path(args.response).read_text("utf-8"),
        args.strategy,
        finish_reason=args.finish_reason,
        fuzz=fuzz,
    )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report_json(report), "utf-8")
        (out / "report.txt").write_text(report_table(report), "utf-8")
    else:
        sys.stdout.write(report_table(report))
    return 0


def _collect_rows(run_dir: Path):
    rows = []
    for report_path in sorted(Path(run_dir).glob("*/*/*/report.json")):
        doc = json.loads(report_path.read_text("utf-8"))
        unit = report_path.parent
        model = unit.name
        strategy = unit.parent.name
        program = unit.parent.parent.name
        rows.append(
            {
                "program": program,
                "strategy": strategy,
                "model": model,
                "im_sound": doc["scores"]["im_sound"],
                "fpe_correct": doc["scores"]["fpe_correct"],
                "tags": " ".join(doc["tags"]),
            }
        )
    rows.sort(key=lambda r: (r["program"], r["strategy"], r["model"]))
    return rows


def _sound_fraction(cell: str):
    if cell in ("-", ""):
        return None
    x, _, y = cell.partition("/")
    return int(x) / int(y) if y and int(y) else None


def _write_figure(rows, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels, values = [], []
    for row in rows:
        frac = _sound_fraction(row["im_sound"])
        if frac is None:
            continue
        labels.append(f"{row['program']}\n{row['strategy'][:5]}/{row['model'][:12]}")
        values.append(frac)
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(labels) + 2), 4))
    if values:
        ax.bar(range(len(values)), values, color="#4878a8")
        ax.set_xticks(range(len(values)))
        ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("sound locations / total")
    ax.set_title("invariant map soundness")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": "absint"})
    plt.close(fig)


def cmd_score(args) -> int:
    rows = _collect_rows(args.run)
    out = Path(args.out or args.run)
    out.mkdir(parents=True, exist_ok=True)
    fields = ["program", "strategy", "model", "im_sound", "fpe_correct", "tags"]
    with open(out / "scores.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    widths = {f: max([len(f)] + [len(r[f]) for r in rows]) for f in fields}
    lines = ["  ".join(f.ljust(widths[f]) for f in fields)]
    for row in rows:
        lines.append("  ".join(row[f].ljust(widths[f]) for f in fields))
    table = "\n".join(lines) + "\n"
    (out / "scores.txt").write_text(table, "utf-8")
    _write_figure(rows, out / "scores.png")
    sys.stdout.write(table)
    return 0


# --- argument plumbing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="absint",
        description="Interval-domain program analysis and LLM reasoning-trace auditing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="print a program with canonical locations/directives")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_annotate)

    p = sub.add_parser("analyze", help="compute the invariant map and trace")
    p.add_argument("file")
    p.add_argument("--strategy", choices=STRATEGIES, required=True)
    p.add_argument("--out", help="directory for map/trace files (default: map to stdout)")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("prompt", help="emit the analysis prompt for a program")
    p.add_argument("file")
    p.add_argument("--strategy", choices=STRATEGIES, required=True)
    p.add_argument("--ascii", action="store_true", help="spell math symbols in ASCII")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_prompt)

    p = sub.add_parser("query", help="query a model over a manifest of programs")
    p.add_argument("manifest")
    p.add_argument("--mode", choices=("live", "record", "replay"), default="replay")
    p.add_argument("--out", help="output directory (overrides manifest out_dir)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("audit", help="audit stored responses")
    p.add_argument("response", nargs="?")
    p.add_argument("file", nargs="?")
    p.add_argument("--strategy", choices=STRATEGIES)
    p.add_argument("--run", help="audit every unit under a query output directory")
    p.add_argument("--finish-reason")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuzz-runs", type=int, default=1000)
    p.add_argument("--max-loop-iters", type=int, default=10_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("score", help="aggregate audit reports into a scoreboard")
    p.add_argument("run")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_score)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ImpSyntaxError, CTranslationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CassetteMissError as exc:
        print(f"error: cassette miss: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
