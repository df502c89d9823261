"""Command-line entry point.

One subcommand per pipeline stage: ``parse``, ``validate``, ``normalize``,
``dataset-stats``, ``extract-ehr``, ``rules-classify``, ``fewshot-select``,
``extract``, ``eval``, ``adhere``. Every subcommand supports
``--format json-lines`` for machine-readable, byte-stable output; progress
and notes go to standard error only. Exit status is 0 on success, 1 on an
operational error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, time, timedelta
from pathlib import Path

from . import adherence, dataset, evaluation, grammar, normalize, rulebase
from .grammar import NonvalidMtcError
from .icl import (
    HttpCompletionClient,
    PromptStrategy,
    ReplayClient,
    exclude_fewshot,
    fewshot_from_dugs,
    iter_extract_corpus,
    select_fewshot,
)


def _emit(obj: dict, out=None) -> None:
    print(json.dumps(obj, sort_keys=True), file=out or sys.stdout)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _read_config(path: str | None) -> dict:
    if not path:
        return {}
    config = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(config, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return config


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--format",
        choices=("text", "json-lines"),
        default="text",
        help="output format (json-lines is machine-readable and byte-stable)",
    )
    sub.add_argument("--config", help="JSON config file for defaults")


def cmd_parse(args) -> int:
    mtc = grammar.parse_mtc(args.text)
    record = grammar.mtc_to_dict(mtc)
    if args.format == "json-lines":
        _emit(record)
    else:
        print(json.dumps(record, indent=2, sort_keys=True))
    return 0


def _read_lines(args) -> list[str]:
    if args.text is not None:
        return [args.text]
    return Path(args.file).read_text(encoding="utf-8").splitlines()


def cmd_validate(args) -> int:
    lines = _read_lines(args)
    flags = [grammar.is_valid(line) for line in lines]
    rate = sum(flags) / len(flags) if flags else 1.0
    if args.format == "json-lines":
        for line, valid in zip(lines, flags):
            _emit({"text": line, "valid": valid})
        _emit({"validity_rate": rate})
    else:
        print(f"{rate:g}")
    return 0


def cmd_normalize(args) -> int:
    for raw in _read_lines(args):
        result = normalize.normalize_raw_output(raw)
        if args.format == "json-lines":
            _emit(
                {
                    "raw": raw,
                    "candidates": list(result.candidates),
                    "dropped": [{"segment": d.segment, "reason": d.reason} for d in result.dropped],
                }
            )
        else:
            print("; ".join(result.candidates))
    return 0


def cmd_dataset_stats(args) -> int:
    stats = dataset.dataset_stats(dataset.load_dugs(args.file))
    if args.format == "json-lines":
        _emit(stats.to_dict())
        return 0
    print(f"guidelines: {stats.n_dugs}")
    for source, count in sorted(stats.dugs_per_source.items()):
        print(f"  {source}: {count}")
    print(f"constraint instances: {stats.n_mtcs}")
    for source, dist in sorted(stats.type_distribution.items()):
        shares = ", ".join(f"type {t}: {pct:.2f}%" for t, pct in sorted(dist.items()))
        print(f"  {source}: {shares}")
    return 0


def cmd_extract_ehr(args) -> int:
    report_text = Path(args.file).read_text(encoding="utf-8")
    dugs = dataset.extract_ehr_statements(
        report_text, min_tokens=args.min_tokens, max_tokens=args.max_tokens
    )
    if args.out:
        dataset.dump_dugs(dugs, args.out)
        _note(f"wrote {len(dugs)} statements to {args.out}")
    for dug in dugs:
        if args.format == "json-lines":
            _emit(dug.to_dict())
        else:
            print(f"{dug.id}\t{'; '.join(dug.label_strings)}\t{dug.text}")
    return 0


def cmd_rules_classify(args) -> int:
    dugs = dataset.load_dugs(args.file)
    rules = rulebase.load_type_rules(args.rules) if args.rules else rulebase.default_type_rules()
    preds = rulebase.classify_corpus(dugs, rules)
    for pred in preds:
        if args.format == "json-lines":
            _emit({"dug_id": pred.dug_id, "types": sorted(pred.types)})
        else:
            types = ",".join(str(t) for t in sorted(pred.types)) or "-"
            print(f"{pred.dug_id}\t{types}")
    if args.eval:
        report = rulebase.evaluate_type_classifier(dugs, preds)
        if args.format == "json-lines":
            _emit(report.to_dict())
        else:
            for t, m in sorted(report.per_type.items()):
                print(
                    f"type {t}: precision {m.precision:.3f}  recall {m.recall:.3f}  "
                    f"f1 {m.f1:.3f}  support {m.support}"
                )
            print(
                f"macro: precision {report.macro_precision:.3f}  "
                f"recall {report.macro_recall:.3f}  f1 {report.macro_f1:.3f}"
            )
    return 0


def cmd_fewshot_select(args) -> int:
    pool = dataset.load_dugs(args.file)
    fewshot = select_fewshot(pool, k=args.k, seed=args.seed)
    if fewshot.gaps:
        _note(f"pool lacks strata: {', '.join(fewshot.gaps)}")
    lines = [json.dumps(pair.to_dict(), sort_keys=True) for pair in fewshot.pairs]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        _note(f"wrote {len(lines)} few-shot examples to {args.out}")
    for line in lines:
        print(line)
    return 0


def _build_client(args, config: dict):
    if args.client == "replay":
        if not args.fixtures:
            raise ValueError("--client replay requires --fixtures DIR")
        return ReplayClient(args.fixtures)
    http_config = config.get("http", {})
    base_url = args.base_url or http_config.get("base_url")
    if not base_url:
        raise ValueError("--client http requires --base-url (or http.base_url in --config)")
    return HttpCompletionClient(
        base_url,
        model=args.model or http_config.get("model", ""),
        use_messages=args.use_messages or bool(http_config.get("use_messages")),
        timeout=float(http_config.get("timeout", 60.0)),
        max_attempts=int(http_config.get("max_attempts", 3)),
        backoff=float(http_config.get("backoff", 1.0)),
    )


def cmd_extract(args) -> int:
    config = _read_config(args.config)
    dugs = dataset.load_dugs(args.file)
    fewshot = fewshot_from_dugs(dataset.load_dugs(args.fewshot))
    kept = exclude_fewshot(dugs, fewshot)
    if len(kept) != len(dugs):
        _note(f"excluded {len(dugs) - len(kept)} few-shot guideline(s) from extraction")
    if args.strategy == "specialized":
        types = tuple(int(t) for t in args.types.split(",")) if args.types else ()
        strategy = PromptStrategy.specialized(types) if types else PromptStrategy.specialized()
    else:
        strategy = PromptStrategy(args.strategy)
    client = _build_client(args, config)
    decoding = config.get("decoding", {})
    records = iter_extract_corpus(
        kept,
        strategy,
        fewshot,
        client,
        parallelism=args.parallelism,
        temperature=args.temperature if args.temperature is not None else float(decoding.get("temperature", 0.0)),
        max_tokens=args.max_tokens if args.max_tokens is not None else int(decoding.get("max_tokens", 256)),
    )
    out_fp = open(args.out, "w", encoding="utf-8") if args.out else None
    failures = 0
    try:
        for record in records:
            if record.failed:
                failures += 1
            line = json.dumps(record.to_dict(), sort_keys=True)
            print(line)
            if out_fp:
                out_fp.write(line + "\n")
    finally:
        if out_fp:
            out_fp.close()
    if failures:
        _note(f"{failures} record(s) marked failed after retries")
    return 0


def cmd_eval(args) -> int:
    gold = dataset.load_dugs(args.gold)
    records = []
    for lineno, line in enumerate(
        Path(args.pred).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        record = json.loads(line)
        if not isinstance(record, dict):
            raise ValueError(f"{args.pred}:{lineno}: prediction record must be a JSON object")
        records.append(record)
    report = evaluation.evaluate(gold, records)
    if args.out:
        Path(args.out).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        _note(f"wrote report to {args.out}")
    if args.format == "json-lines":
        _emit(report.to_dict())
    else:
        print(report.format_table())
    return 0


def _parse_when(value: str) -> datetime:
    return datetime.fromisoformat(value.replace("Z", "+00:00"))


def _tolerances(args, config: dict) -> adherence.ToleranceConfig:
    section = config.get("adherence", {})

    def minutes(flag_value, key, default_td):
        if flag_value is not None:
            return timedelta(minutes=flag_value)
        if key in section:
            return timedelta(minutes=float(section[key]))
        return default_td

    day_parts = adherence.DEFAULT_TOLERANCES.day_part_windows
    if "day_part_windows" in section:
        day_parts = {
            grammar.DayPart(name): (time.fromisoformat(lo), time.fromisoformat(hi))
            for name, (lo, hi) in section["day_part_windows"].items()
        }
    return adherence.ToleranceConfig(
        dependency_tolerance=minutes(
            args.dependency_tolerance_min, "dependency_tolerance_min",
            adherence.DEFAULT_TOLERANCES.dependency_tolerance,
        ),
        imprecision_horizon=minutes(
            args.imprecision_horizon_min, "imprecision_horizon_min",
            adherence.DEFAULT_TOLERANCES.imprecision_horizon,
        ),
        consistency_tolerance=minutes(
            args.consistency_tolerance_min, "consistency_tolerance_min",
            adherence.DEFAULT_TOLERANCES.consistency_tolerance,
        ),
        day_part_windows=day_parts,
    )


def cmd_adhere(args) -> int:
    config = _read_config(args.config)
    mtc = grammar.parse_mtc(args.mtc)
    window = (
        _parse_when(args.window_start) if args.window_start else None,
        _parse_when(args.window_end) if args.window_end else None,
    )
    timeline = adherence.load_timeline(args.timeline, window)
    verdict = adherence.check(mtc, timeline, _tolerances(args, config))
    if args.format == "json-lines":
        _emit(
            {
                "mtc": grammar.serialize(mtc),
                "status": verdict.status.value,
                "explanation": verdict.explanation,
            }
        )
    else:
        print(f"{verdict.status.value}: {verdict.explanation}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtc", description="Medical temporal constraint toolkit"
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("parse", help="parse one constraint string")
    p.add_argument("text")
    _add_common(p)
    p.set_defaults(func=cmd_parse)

    p = subs.add_parser("validate", help="grammar validity of candidate strings")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--file", help="file with one candidate per line")
    group.add_argument("--text", help="a single candidate string")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = subs.add_parser("normalize", help="post-process raw completion output")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--file", help="file with one raw output per line")
    group.add_argument("--text", help="a single raw output")
    _add_common(p)
    p.set_defaults(func=cmd_normalize)

    p = subs.add_parser("dataset-stats", help="corpus counts and type distribution")
    p.add_argument("--file", required=True, help="corpus file (JSON lines)")
    _add_common(p)
    p.set_defaults(func=cmd_dataset_stats)

    p = subs.add_parser("extract-ehr", help="mine labeled statements from a medical report")
    p.add_argument("--file", required=True, help="plain-text report")
    p.add_argument("--min-tokens", type=int, default=4)
    p.add_argument("--max-tokens", type=int, default=60)
    p.add_argument("--out", help="also write the statements as a corpus file")
    _add_common(p)
    p.set_defaults(func=cmd_extract_ehr)

    p = subs.add_parser("rules-classify", help="phrase-pattern constraint-type baseline")
    p.add_argument("--file", required=True, help="corpus file (JSON lines)")
    p.add_argument("--rules", help="rule table (type<TAB>pattern); default: bundled table")
    p.add_argument("--eval", action="store_true", help="also score against gold labels")
    _add_common(p)
    p.set_defaults(func=cmd_rules_classify)

    p = subs.add_parser("fewshot-select", help="pick the stratified few-shot examples")
    p.add_argument("--file", required=True, help="pool corpus file (JSON lines)")
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the selection to a file")
    _add_common(p)
    p.set_defaults(func=cmd_fewshot_select)

    p = subs.add_parser("extract", help="run a prompting strategy over a corpus")
    p.add_argument("--file", required=True, help="corpus file (JSON lines)")
    p.add_argument("--fewshot", required=True, help="few-shot examples file (corpus format)")
    p.add_argument("--strategy", choices=("simple", "guided", "specialized"), default="specialized")
    p.add_argument("--types", help="comma-separated types for specialized (default 1,2,3,4,6,7)")
    p.add_argument("--client", choices=("http", "replay"), default="replay")
    p.add_argument("--fixtures", help="replay fixtures directory")
    p.add_argument("--base-url", help="completion service URL (http client)")
    p.add_argument("--model", default="", help="model name sent to the service")
    p.add_argument("--use-messages", action="store_true", help="send messages instead of prompt")
    p.add_argument("--temperature", type=float, default=None)
    p.add_argument("--max-tokens", type=int, default=None)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="run seed (recorded; decoding is greedy)")
    p.add_argument("--out", help="also write records to a file")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = subs.add_parser("eval", help="score extraction records against gold")
    p.add_argument("--gold", required=True, help="gold corpus file (JSON lines)")
    p.add_argument("--pred", required=True, help="extraction records file (JSON lines)")
    p.add_argument("--out", help="write the machine-readable report to a file")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("adhere", help="check one constraint against an event timeline")
    p.add_argument("--mtc", required=True, help="constraint string")
    p.add_argument("--timeline", required=True, help="timeline file (JSON lines)")
    p.add_argument("--window-start", help="ISO-8601 start of the evaluation window")
    p.add_argument("--window-end", help="ISO-8601 end of the evaluation window")
    p.add_argument("--dependency-tolerance-min", type=float, default=None)
    p.add_argument("--imprecision-horizon-min", type=float, default=None)
    p.add_argument("--consistency-tolerance-min", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_adhere)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NonvalidMtcError as exc:
        print(f"nonvalid: {exc.reason}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
