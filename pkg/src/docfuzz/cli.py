"""Command-line surface for the documentation-constraint pipeline.

Stages are independent commands wired through file artifacts::

    normalize -> (external parser produces trees) -> mine / rules -> extract -> fuzz
                                                                  \\-> score

Every artifact embeds digests of the inputs it was derived from; consuming a
stale artifact prints a warning naming the command to rerun.  Exit status is
0 on success, 1 on validation errors, and 2 on harness errors.
"""

from __future__ import annotations

import argparse
import sys

from docfuzz.artifacts import check_freshness, dump_canonical, input_digests, load_json
from docfuzz.corpus import CorpusError
from docfuzz.deptree import MalformedTreeError
from docfuzz.evaluator import HarnessError, SubprocessEvaluator, TargetProfile
from docfuzz.extract import api_constraints_from_obj, doc_bugs_to_obj, extract, result_to_obj
from docfuzz.fuzz import GeneratorConfig, campaign
from docfuzz.miner import dump_patterns, mine
from docfuzz.pipeline import load_annotated_sample, prepare_corpus
from docfuzz.rulegen import (
    construct_rules,
    rules_from_obj,
    rules_to_obj,
    score,
    select_thresholds,
)

__all__ = ["main"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")


def _load_config(args: argparse.Namespace) -> dict:
    if getattr(args, "config", None):
        return load_json(args.config)
    return {}


def _opt(args: argparse.Namespace, config: dict, section: str, key: str, default=None):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    return config.get(section, {}).get(key, default)


def _path(args, config, key: str, required: bool = True):
    value = _opt(args, config, "paths", key)
    if value is None and required:
        raise SystemExit(f"error: missing --{key.replace('_', '-')} (or paths.{key} in config)")
    return value


def _prepare(args, config):
    return prepare_corpus(
        _path(args, config, "corpus"),
        _path(args, config, "keywords"),
        _path(args, config, "trees"),
    )


def cmd_normalize(args) -> int:
    config = _load_config(args)
    corpus = _path(args, config, "corpus")
    keywords = _path(args, config, "keywords")
    from docfuzz.corpus import load_corpus
    from docfuzz.normalize import KeywordTable, normalize

    docs = load_corpus(corpus)
    table = KeywordTable.from_file(keywords)
    sentences = {}
    warnings: list[str] = []
    for doc in docs:
        names = frozenset(doc.param_names)
        for param, pdoc in sorted(doc.param_docs.items()):
            for sentence in pdoc.sentences:
                norm = normalize(sentence, table, names)
                sentences[sentence.tree_ref] = {
                    "api": doc.api_name,
                    "param": param,
                    "raw": sentence.raw_text,
                    "tokens": list(norm.texts()),
                }
                warnings.extend(norm.warnings)
    artifact = {
        "sentences": sentences,
        "warnings": sorted(set(warnings)),
        "input_digests": input_digests({"corpus": corpus, "keywords": keywords}),
    }
    dump_canonical(artifact, args.out)
    print(f"normalized {len(sentences)} sentences -> {args.out}")
    return 0


def cmd_mine(args) -> int:
    config = _load_config(args)
    prepared = _prepare(args, config)
    forest = {
        f"{p.api}::{p.param}": list(p.trees) for p in prepared.all_params() if p.trees
    }
    min_support = int(_opt(args, config, "miner", "min_support", 2))
    max_size = int(_opt(args, config, "miner", "max_size", 7))
    comparator = _opt(args, config, "miner", "support_comparator", ">=")
    patterns = mine(forest, min_support, max_size, comparator)
    dump_patterns(patterns, args.out)
    print(f"mined {len(patterns)} frequent patterns -> {args.out}")
    return 0


def cmd_rules(args) -> int:
    config = _load_config(args)
    prepared = _prepare(args, config)
    annotations = _path(args, config, "annotations")
    sample = load_annotated_sample(prepared, annotations)

    max_size = int(_opt(args, config, "miner", "max_size", 7))
    meta: dict = {}
    if args.support_grid or args.confidence_grid:
        supports = [int(v) for v in (args.support_grid or "2,3").split(",")]
        confidences = [float(v) for v in (args.confidence_grid or "0.5,0.9").split(",")]
        choice = select_thresholds(
            sample, supports, confidences, max_size=max_size, fold_seed=int(args.seed or 0)
        )
        min_support, min_confidence = choice.min_support, choice.min_confidence
        meta["threshold_selection"] = {
            "fold_seed": choice.fold_seed,
            "trials": list(choice.trials),
        }
        print(f"selected min_support={min_support} min_confidence={min_confidence}")
    else:
        min_support = int(_opt(args, config, "miner", "min_support", 2))
        min_confidence = float(_opt(args, config, "miner", "min_confidence", 0.9))

    comparator = _opt(args, config, "miner", "support_comparator", ">=")
    rules = construct_rules(sample, min_support, min_confidence, max_size, comparator)
    artifact = {
        "rules": rules_to_obj(rules),
        "thresholds": {
            "min_support": min_support,
            "min_confidence": min_confidence,
            "max_size": max_size,
        },
        **meta,
        "input_digests": input_digests(
            {
                "corpus": _path(args, config, "corpus"),
                "keywords": _path(args, config, "keywords"),
                "trees": _path(args, config, "trees"),
                "annotations": annotations,
            }
        ),
    }
    dump_canonical(artifact, args.out)
    print(f"constructed {len(rules)} rules -> {args.out}")
    return 0


def cmd_extract(args) -> int:
    config = _load_config(args)
    prepared = _prepare(args, config)
    rules_path = _path(args, config, "rules")
    rules_artifact = load_json(rules_path)
    for warning in check_freshness(rules_artifact, "rules"):
        print(f"warning: {warning} (rerun `docfuzz rules`)", file=sys.stderr)
    rules = rules_from_obj(rules_artifact["rules"])

    result = extract(prepared, rules, jobs=int(args.jobs or 1))
    artifact = result_to_obj(result)
    artifact["input_digests"] = input_digests(
        {
            "corpus": _path(args, config, "corpus"),
            "keywords": _path(args, config, "keywords"),
            "trees": _path(args, config, "trees"),
            "rules": rules_path,
        }
    )
    dump_canonical(artifact, args.out)
    n_constraints = sum(
        1 for c in result.constraints.values() if not c.is_empty()
    )
    print(f"extracted constraints for {n_constraints} parameters -> {args.out}")
    if args.bugs_out:
        dump_canonical(doc_bugs_to_obj(result.doc_bugs), args.bugs_out)
        print(f"documentation bugs: {len(result.doc_bugs)} -> {args.bugs_out}")
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_fuzz(args) -> int:
    config = _load_config(args)
    constraints_path = _path(args, config, "constraints")
    artifact = load_json(constraints_path)
    for warning in check_freshness(artifact, "constraints"):
        print(f"warning: {warning} (rerun `docfuzz extract`)", file=sys.stderr)
    constraints = api_constraints_from_obj(artifact)

    profile_obj = config.get("profile", {})
    if args.profile:
        profile_obj = load_json(args.profile)
    if not profile_obj.get("command"):
        raise SystemExit("error: fuzz needs a target profile with a worker command")

    gen_cfg = GeneratorConfig(
        max_iter=int(_opt(args, config, "generator", "max_iter", 2000)),
        conform_ratio=float(_opt(args, config, "generator", "conform_ratio", 0.5)),
        optional_ratio=float(_opt(args, config, "generator", "optional_ratio", 0.2)),
        mutation_p=float(_opt(args, config, "generator", "mutation_p", 0.4)),
        seed=int(_opt(args, config, "generator", "seed", 0)),
        timeout_ms=int(_opt(args, config, "generator", "timeout_ms", 10_000)),
    )
    profile = TargetProfile(
        target_id=profile_obj.get("target_id", "target"),
        command=tuple(profile_obj["command"]),
        abort_is_exception=bool(profile_obj.get("abort_is_exception", False)),
        timeout_ms=gen_cfg.timeout_ms,
    )
    apis = args.apis.split(",") if args.apis else None
    report = campaign(
        constraints,
        gen_cfg,
        SubprocessEvaluator(profile),
        apis=apis,
        baseline=bool(args.baseline),
        findings_dir=_path(args, config, "findings_dir", required=False),
        jobs=int(args.jobs or 1),
    )
    if args.report_out:
        dump_canonical(report.to_obj(), args.report_out)
    _print_report(report, args.format or "text")
    if report.apis and all(r.aborted for r in report.apis.values()):
        print("harness error: every API campaign aborted on harness failures", file=sys.stderr)
        return 2
    return 0


def _print_report(report, fmt: str) -> None:
    if fmt == "json":
        from docfuzz.artifacts import canonical_json

        print(canonical_json(report.to_obj()), end="")
        return
    mode = "baseline" if report.baseline else "guided"
    print(f"{mode} campaign, seed {report.config.seed}, {report.config.max_iter} inputs per API")
    for api, r in sorted(report.apis.items()):
        counts = " ".join(f"{k}={v}" for k, v in sorted(r.counts.items()))
        line = f"  {api}: {counts} passing={r.passing_ratio:.3f} bugs={len(r.bugs)}"
        if r.aborted:
            line += f"  [{r.aborted}]"
        print(line)
    print(f"total bug-triggering inputs: {report.total_bugs}; passing ratio {report.passing_ratio():.3f}")


def cmd_score(args) -> int:
    config = _load_config(args)
    extracted_path = _path(args, config, "extracted")
    truth_path = _path(args, config, "truth")
    from docfuzz.constraints import annotations_from_obj, constraint_from_obj

    extracted_obj = load_json(extracted_path)
    extracted = {}
    for api, entry in extracted_obj["apis"].items():
        for name, c in entry["params"].items():
            extracted[(api, name)] = constraint_from_obj(name, c)
    truth = annotations_from_obj(load_json(truth_path))
    report = score(extracted, truth)
    if args.out:
        dump_canonical(report.to_obj(), args.out)
    if (args.format or "text") == "json":
        from docfuzz.artifacts import canonical_json

        print(canonical_json(report.to_obj()), end="")
    else:
        o = report.overall
        print(
            f"precision={_fmt(o.precision)} recall={_fmt(o.recall)} f1={o.f1:.3f} "
            f"({report.evaluated_params} parameters evaluated, "
            f"{report.excluded_params} without constraints excluded)"
        )
        for cat, m in sorted(report.per_category.items()):
            if m.n_truth or m.n_extracted:
                print(
                    f"  {cat}: precision={_fmt(m.precision)} recall={_fmt(m.recall)} f1={m.f1:.3f}"
                )
    return 0


def _fmt(v: float | None) -> str:
    return "n/a" if v is None else f"{v:.3f}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docfuzz",
        description="Extract API parameter constraints from documentation and fuzz with them",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="tokenize and normalize a corpus")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--keywords")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("mine", help="mine frequent embedded subtrees")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--keywords")
    p.add_argument("--trees")
    p.add_argument("--min-support", dest="min_support", type=int)
    p.add_argument("--max-size", dest="max_size", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_mine)

    p = sub.add_parser("rules", help="construct extraction rules from annotations")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--keywords")
    p.add_argument("--trees")
    p.add_argument("--annotations")
    p.add_argument("--min-support", dest="min_support", type=int)
    p.add_argument("--min-confidence", dest="min_confidence", type=float)
    p.add_argument("--max-size", dest="max_size", type=int)
    p.add_argument("--support-grid", dest="support_grid",
                   help="comma-separated support grid; enables cross-validated selection")
    p.add_argument("--confidence-grid", dest="confidence_grid",
                   help="comma-separated confidence grid")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_rules)

    p = sub.add_parser("extract", help="apply rules to a corpus")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--keywords")
    p.add_argument("--trees")
    p.add_argument("--rules")
    p.add_argument("--out", required=True)
    p.add_argument("--bugs-out", dest="bugs_out")
    p.add_argument("--jobs", type=int)
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("fuzz", help="run a constraint-guided campaign")
    _add_common(p)
    p.add_argument("--constraints")
    p.add_argument("--profile", help="target profile JSON (command, abort_is_exception)")
    p.add_argument("--findings-dir", dest="findings_dir")
    p.add_argument("--report-out", dest="report_out")
    p.add_argument("--apis", help="comma-separated API subset")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--conform-ratio", dest="conform_ratio", type=float)
    p.add_argument("--optional-ratio", dest="optional_ratio", type=float)
    p.add_argument("--mutation-p", dest="mutation_p", type=float)
    p.add_argument("--timeout-ms", dest="timeout_ms", type=int)
    p.add_argument("--baseline", action="store_true")
    p.add_argument("--jobs", type=int)
    p.add_argument("--format", choices=("text", "json"))
    p.set_defaults(fn=cmd_fuzz)

    p = sub.add_parser("score", help="score extracted constraints against ground truth")
    _add_common(p)
    p.add_argument("--extracted")
    p.add_argument("--truth")
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "json"))
    p.set_defaults(fn=cmd_score)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except HarnessError as exc:
        print(f"harness error: {exc}", file=sys.stderr)
        return 2
    except (CorpusError, MalformedTreeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
