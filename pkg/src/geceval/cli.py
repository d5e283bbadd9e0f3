"""Command-line entry point.

Every subcommand prints a human-readable summary on standard output; with
``--out`` it also writes a machine-readable report plus a run manifest
(``<out>.manifest.json``) recording the resolved options, input digests,
seed, tool version, and the report's own digest. Reports contain no
timestamps, so identical inputs and seed reproduce identical report bytes.

Exit codes: 0 success, 1 domain errors (bad data, failed preconditions),
2 usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .analysis import (
    correlate_profiles,
    profile_system,
    read_profile_tsv,
    write_profile_tsv,
)
from .clients import (
    ConstantJudge,
    HttpChatJudge,
    HttpMetaJudge,
    HttpPerplexity,
    MappingJudge,
    UnigramPerplexity,
)
from .corpus import (
    AnnotatedSentence,
    Corpus,
    Sentence,
    parse_m2,
    read_hypothesis_file,
    write_m2,
    write_sentences,
)
from .ensemble import EnsembleConfig, Fallback, ensemble_corpus
from .errors import ConfigurationError, ContractViolation, GecEvalError
from .events import record_run
from .extraction import extract_edits
from .judge import DEFAULT_SEED, build_cases, run_llm_stage
from .metrics import (
    DEFAULT_BETA,
    gleu_from_counts,
    gleu_sentence_counts,
    precision_recall_f,
    score_errant,
    score_gleu,
    score_pt_errant,
    score_scribendi,
    unit_weight,
)
from .service import SERVICE_TOKEN_ENV, create_app
from .stats import permutation_test


# --- shared I/O helpers -------------------------------------------------------

def _read_sentences(path: str) -> list[Sentence]:
    return read_hypothesis_file(Path(path).read_text(encoding="utf-8"))


def _read_corpus(path: str) -> Corpus:
    return parse_m2(Path(path).read_text(encoding="utf-8"))


def _check_sources_match(sources: Sequence[Sentence], refs: Corpus):
    if len(sources) != len(refs):
        raise ContractViolation(
            f"{len(sources)} source sentences vs {len(refs)} reference blocks")
    for i, (src, sent) in enumerate(zip(sources, refs)):
        if src.tokens != sent.source.tokens:
            raise ContractViolation(
                f"source line {i + 1} differs from the reference corpus source")


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    """Order-preserving map, threaded when jobs > 1."""
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _sha256_file(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(args: argparse.Namespace, input_paths: Sequence[str]) -> dict:
    options = {
        k: v for k, v in sorted(vars(args).items())
        if k != "func" and not k.startswith("_") and not callable(v)
    }
    return {
        "subcommand": args.subcommand,
        "options": options,
        "input_digests": {p: _sha256_file(p) for p in input_paths},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _emit(out: str | None, report_text: str, manifest: dict):
    """Write the machine-readable report and its manifest next to it."""
    if out is None:
        return
    Path(out).write_text(report_text, encoding="utf-8")
    manifest["report_digest"] = _sha256_text(report_text)
    Path(out + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _json_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _print_rows(rows: Sequence[tuple[str, object]]):
    width = max(len(label) for label, _ in rows) + 2
    for label, value in rows:
        print(f"{label:<{width}}{value}")


# --- score --------------------------------------------------------------------

def _tag_weight_provider(path: str):
    """Per-tag weights from a two-column file: TAG WEIGHT (default 1.0)."""
    table: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ConfigurationError(f"{path}:{lineno}: expected 'TAG WEIGHT'")
        table[parts[0]] = float(parts[1])

    def weigh(edit, source):
        return table.get(edit.tag.render(), 1.0)

    return weigh


def _gleu_references(args, sources: Sequence[Sentence]) -> list[list[Sentence]]:
    """Reference sets from plain-text files or from an M2 file's annotators.

    From M2, each annotator id present anywhere becomes one set; where a
    sentence lacks that annotator, its lowest-id annotator's correction
    stands in (the source itself if unannotated).
    """
    if args.ref_txt:
        sets = [_read_sentences(p) for p in args.ref_txt]
        for p, ref in zip(args.ref_txt, sets):
            if len(ref) != len(sources):
                raise ContractViolation(
                    f"reference file {p} has {len(ref)} sentences, "
                    f"expected {len(sources)}")
        return sets
    refs = _read_corpus(args.ref)
    _check_sources_match(sources, refs)
    annotator_ids = sorted({a for sent in refs for a in sent.annotators})
    if not annotator_ids:
        return [[sent.source for sent in refs]]

    def correction_for(sent: AnnotatedSentence, ann: int) -> Sentence:
        if ann in sent.edits_by_annotator:
            return sent.correction(ann)
        if sent.annotators:
            return sent.correction(sent.annotators[0])
        return sent.source

    return [[correction_for(sent, ann) for sent in refs]
            for ann in annotator_ids]


def _edit_report_dict(report, metric: str, sentences: int) -> dict:
    return {
        "metric": metric,
        "beta": report.beta,
        "sentences": sentences,
        "tp": report.tp,
        "fp": report.fp,
        "fn": report.fn,
        "precision": report.precision,
        "recall": report.recall,
        "f_beta": report.f_beta,
        "per_type": {tag.render(): {"tp": v[0], "fp": v[1], "fn": v[2]}
                     for tag, v in sorted(report.per_type.items(),
                                          key=lambda kv: kv[0].render())},
        "per_sentence": [list(t) for t in report.per_sentence],
        "selected_annotators": list(report.selected_annotators),
    }


def _print_edit_report(report, metric: str, sentences: int):
    _print_rows([
        ("metric", metric),
        ("sentences", sentences),
        ("tp / fp / fn", f"{report.tp:g} / {report.fp:g} / {report.fn:g}"),
        ("precision", f"{report.precision:.4f}"),
        ("recall", f"{report.recall:.4f}"),
        (f"f{report.beta:g}", f"{report.f_beta:.4f}"),
    ])
    if report.per_type:
        print()
        print(f"{'type':<16}{'tp':>8}{'fp':>8}{'fn':>8}")
        for tag, (tp, fp, fn) in sorted(report.per_type.items(),
                                        key=lambda kv: kv[0].render()):
            print(f"{tag.render():<16}{tp:>8g}{fp:>8g}{fn:>8g}")


def cmd_score(args) -> int:
    sources = _read_sentences(args.src)
    hyps = _read_sentences(args.hyp)
    inputs = [args.src, args.hyp]

    if args.metric in ("errant", "pt-errant"):
        if not args.ref:
            args._parser.error(f"--metric {args.metric} requires --ref M2FILE")
        inputs.append(args.ref)
        refs = _read_corpus(args.ref)
        _check_sources_match(sources, refs)
        hyp_edits = _pmap(lambda pair: extract_edits(*pair),
                          list(zip(sources, hyps)), args.jobs)
        if args.metric == "pt-errant":
            weigh = (_tag_weight_provider(args.weights)
                     if args.weights else unit_weight)
            if args.weights:
                inputs.append(args.weights)
            report = score_pt_errant(hyp_edits, refs, weigh, args.beta,
                                     annotator=args.annotator)
        else:
            report = score_errant(hyp_edits, refs, args.beta,
                                  annotator=args.annotator)
        _print_edit_report(report, args.metric, len(sources))
        payload = _edit_report_dict(report, args.metric, len(sources))

    elif args.metric == "gleu":
        if not args.ref and not args.ref_txt:
            args._parser.error("--metric gleu requires --ref or --ref-txt")
        inputs += [args.ref] if args.ref else list(args.ref_txt)
        references = _gleu_references(args, sources)
        report = score_gleu(sources, hyps, references, n_max=args.n_max)
        _print_rows([
            ("metric", "gleu"),
            ("sentences", len(sources)),
            ("reference sets", len(references)),
            ("corpus score", f"{report.corpus_score:.4f}"),
            ("brevity penalty", f"{report.brevity_penalty:.4f}"),
        ])
        payload = {
            "metric": "gleu",
            "sentences": len(sources),
            "n_max": report.n_max,
            "corpus_score": report.corpus_score,
            "brevity_penalty": report.brevity_penalty,
            "per_sentence": list(report.per_sentence),
        }

    else:  # scribendi
        if args.ppl_endpoint:
            ppl = HttpPerplexity(args.ppl_endpoint)
        else:
            # offline stand-in: deterministic unigram model over the sources
            ppl = UnigramPerplexity(s.text for s in sources)
        report = score_scribendi(sources, hyps, ppl)
        counts = {v: report.per_sentence.count(v) for v in (-1, 0, 1)}
        _print_rows([
            ("metric", "scribendi"),
            ("sentences", len(sources)),
            ("mean score", f"{report.score:.4f}"),
            ("improved (+1)", counts[1]),
            ("unchanged (0)", counts[0]),
            ("worsened (-1)", counts[-1]),
        ])
        payload = {
            "metric": "scribendi",
            "sentences": len(sources),
            "score": report.score,
            "per_sentence": list(report.per_sentence),
        }

    _emit(args.out, _json_report(payload), _manifest(args, inputs))
    return 0


# --- extract ------------------------------------------------------------------

def cmd_extract(args) -> int:
    sources = _read_sentences(args.src)
    hyps = _read_sentences(args.hyp)
    if len(sources) != len(hyps):
        raise ContractViolation(
            f"{len(sources)} source lines vs {len(hyps)} hypothesis lines")
    edit_sets = _pmap(lambda pair: extract_edits(*pair),
                      list(zip(sources, hyps)), args.jobs)
    corpus = Corpus(tuple(
        AnnotatedSentence(source=s, edits_by_annotator={0: tuple(edits)})
        for s, edits in zip(sources, edit_sets)))
    text = write_m2(corpus)
    if args.out:
        _emit(args.out, text, _manifest(args, [args.src, args.hyp]))
    else:
        sys.stdout.write(text)
    return 0


# --- ensemble -----------------------------------------------------------------

def cmd_ensemble(args) -> int:
    if len(args.hyp) < 2:
        raise ConfigurationError("ensembling requires at least two --hyp files")
    sources = _read_sentences(args.src)
    per_system = [_read_sentences(p) for p in args.hyp]
    priority = None
    if args.priority:
        priority = tuple(int(x) for x in args.priority.split(","))
    config = EnsembleConfig(
        fallback=Fallback(args.fallback),
        priority=priority,
        ngram_n=args.ngram_n,
        vote_threshold=args.vote_threshold,
    )
    ppl = HttpPerplexity(args.ppl_endpoint) if args.ppl_endpoint else None
    judge = HttpMetaJudge(args.judge_endpoint) if args.judge_endpoint else None
    combined = ensemble_corpus(sources, per_system, config, ppl, judge)
    text = write_sentences(combined)
    if args.out:
        _emit(args.out, text, _manifest(args, [args.src, *args.hyp]))
    else:
        sys.stdout.write(text)
    return 0


# --- analyze / correlate ------------------------------------------------------

def cmd_analyze(args) -> int:
    sources = _read_sentences(args.src)
    hyps = _read_sentences(args.hyp)
    refs = _read_corpus(args.ref)
    _check_sources_match(sources, refs)
    hyp_edits = [extract_edits(s, h) for s, h in zip(sources, hyps)]
    profile = profile_system(hyp_edits, refs, annotator=args.annotator)
    text = write_profile_tsv(profile)
    sys.stdout.write(text)
    low = [row.tag for row in profile.rows.values() if row.low_support]
    if low:
        print(f"low-support types (gold_count < 5): {', '.join(sorted(low))}",
              file=sys.stderr)
    _emit(args.out, text, _manifest(args, [args.src, args.hyp, args.ref]))
    return 0


def cmd_correlate(args) -> int:
    profile_a = read_profile_tsv(Path(args.table_a).read_text(encoding="utf-8"))
    profile_b = read_profile_tsv(Path(args.table_b).read_text(encoding="utf-8"))
    result = correlate_profiles(profile_a, profile_b, field=args.field)
    _print_rows([
        ("field", args.field),
        ("common rows", result.n),
        ("spearman rho", f"{result.rho:.6f}"),
        ("p-value", f"{result.p_value:.6g}"),
    ])
    payload = {"field": args.field, "rho": result.rho,
               "p_value": result.p_value, "n": result.n}
    _emit(args.out, _json_report(payload),
          _manifest(args, [args.table_a, args.table_b]))
    return 0


# --- sigtest ------------------------------------------------------------------

def _flatten_gleu(contrib) -> list[float]:
    flat: list[float] = []
    for nums, dens, h, r in contrib:
        flat.extend(nums)
        flat.extend(dens)
        flat.append(h)
        flat.append(r)
    return flat


def _gleu_reducer(n_sets: int, n_max: int):
    size = 2 * n_max + 2

    def reduce(vector) -> float:
        sets = []
        for k in range(n_sets):
            seg = vector[k * size:(k + 1) * size]
            sets.append((seg[:n_max], seg[n_max:2 * n_max],
                         seg[2 * n_max], seg[2 * n_max + 1]))
        return gleu_from_counts(sets)

    return reduce


def cmd_sigtest(args) -> int:
    sources = _read_sentences(args.src)
    hyp_a = _read_sentences(args.hyp_a)
    hyp_b = _read_sentences(args.hyp_b)
    inputs = [args.src, args.hyp_a, args.hyp_b]

    if args.metric == "errant":
        if not args.ref:
            args._parser.error("--metric errant requires --ref M2FILE")
        inputs.append(args.ref)
        refs = _read_corpus(args.ref)
        _check_sources_match(sources, refs)
        edits_a = _pmap(lambda pair: extract_edits(*pair),
                        list(zip(sources, hyp_a)), args.jobs)
        edits_b = _pmap(lambda pair: extract_edits(*pair),
                        list(zip(sources, hyp_b)), args.jobs)
        report_a = score_errant(edits_a, refs, args.beta)
        report_b = score_errant(edits_b, refs, args.beta)
        contrib_a = report_a.per_sentence
        contrib_b = report_b.per_sentence
        beta = args.beta

        def reducer(v):
            return precision_recall_f(v[0], v[1], v[2], beta)[2]

        score_a, score_b = report_a.f_beta, report_b.f_beta
    else:  # gleu
        if not args.ref and not args.ref_txt:
            args._parser.error("--metric gleu requires --ref or --ref-txt")
        inputs += [args.ref] if args.ref else list(args.ref_txt)
        references = _gleu_references(args, sources)
        per_sentence_refs = list(zip(*references))
        contrib_a = [_flatten_gleu(gleu_sentence_counts(s, h, refs_i, args.n_max))
                     for s, h, refs_i in zip(sources, hyp_a, per_sentence_refs)]
        contrib_b = [_flatten_gleu(gleu_sentence_counts(s, h, refs_i, args.n_max))
                     for s, h, refs_i in zip(sources, hyp_b, per_sentence_refs)]
        reducer = _gleu_reducer(len(references), args.n_max)
        score_a = score_gleu(sources, hyp_a, references, args.n_max).corpus_score
        score_b = score_gleu(sources, hyp_b, references, args.n_max).corpus_score

    result = permutation_test(contrib_a, contrib_b, reducer,
                              iterations=args.iterations, seed=args.seed)
    _print_rows([
        ("metric", args.metric),
        ("score A", f"{score_a:.4f}"),
        ("score B", f"{score_b:.4f}"),
        ("observed delta", f"{result.observed_delta:.6f}"),
        ("p-value", f"{result.p_value:.6g}"),
        ("iterations", result.iterations),
        ("seed", result.seed),
    ])
    payload = {
        "metric": args.metric,
        "score_a": score_a,
        "score_b": score_b,
        "observed_delta": result.observed_delta,
        "p_value": result.p_value,
        "iterations": result.iterations,
        "seed": result.seed,
        "algorithm": result.algorithm,
    }
    _emit(args.out, _json_report(payload), _manifest(args, inputs))
    return 0


# --- judge --------------------------------------------------------------------

def _mock_judges(path: str):
    """Scripted judges from a JSON file: {"judge_a": ..., "judge_b": ...}.

    A string value answers every prompt identically; an object maps source
    sentences to answers ("__default__" supplies the fallback answer).
    """
    spec = json.loads(Path(path).read_text(encoding="utf-8"))

    def build(entry):
        if isinstance(entry, str):
            return ConstantJudge(entry)
        table = dict(entry)
        default = table.pop("__default__", None)
        return MappingJudge(table, default=default)

    try:
        return build(spec["judge_a"]), build(spec["judge_b"])
    except KeyError as exc:
        raise ConfigurationError(f"mock script missing key: {exc}") from exc


def cmd_judge_run(args) -> int:
    sources = _read_sentences(args.src)
    golds = _read_sentences(args.gold)
    hyps = _read_sentences(args.hyp)
    if args.mock_script:
        judge_a, judge_b = _mock_judges(args.mock_script)
    elif args.judge_a and args.judge_b:
        judge_a = HttpChatJudge(args.judge_a, token_env=args.token_env)
        judge_b = HttpChatJudge(args.judge_b, token_env=args.token_env)
    else:
        raise ConfigurationError(
            "need either --mock-script or both --judge-a and --judge-b")

    cases = build_cases(sources, golds, hyps, seed=args.seed)
    staged = run_llm_stage(cases, judge_a, judge_b,
                           max_inflight=args.max_inflight)
    record_run(args.out, staged)

    by_status: dict[str, int] = {}
    for case in staged:
        by_status[case.status.value] = by_status.get(case.status.value, 0) + 1
    _print_rows([
        ("divergent cases", len(staged)),
        ("consensus", by_status.get("ConsensusFinal", 0)),
        ("escalated", by_status.get("PendingHuman", 0)),
        ("events written to", args.out),
    ])

    inputs = [args.src, args.gold, args.hyp]
    if args.mock_script:
        inputs.append(args.mock_script)
    manifest = _manifest(args, inputs)
    # the event file carries timestamps; digest the deterministic content
    stable = json.dumps(
        [[c.id, c.status.value, sorted((k, v.value) for k, v in
                                       c.llm_verdicts.items())]
         for c in staged], sort_keys=True)
    manifest["report_digest"] = _sha256_text(stable)
    Path(args.out + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def _load_annotators(path: str) -> dict[str, str]:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python 3.10
        import tomli as tomllib

    with open(path, "rb") as fh:
        config = tomllib.load(fh)
    annotators = config.get("annotators")
    if not isinstance(annotators, dict) or not annotators:
        raise ConfigurationError(
            f"{path}: expected a non-empty [annotators] table of id = \"name\"")
    return {str(k): str(v) for k, v in annotators.items()}


def cmd_judge_serve(args) -> int:
    import uvicorn

    annotators = _load_annotators(args.config)
    token = os.environ.get(SERVICE_TOKEN_ENV)
    if token is None:
        print(f"warning: {SERVICE_TOKEN_ENV} not set — "
              "serving without authentication", file=sys.stderr)
    static_dir = args.ui_dir if args.ui_dir and Path(args.ui_dir).is_dir() else None
    app = create_app(args.store, annotators, token=token, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geceval",
        description="Grammatical error correction evaluation toolkit")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, *, seed=False, jobs=False):
        p.add_argument("--out", help="write a machine-readable report here "
                                     "(plus <out>.manifest.json)")
        if seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if jobs:
            p.add_argument("--jobs", type=int, default=1,
                           help="worker threads for per-sentence work")

    p = sub.add_parser("score", help="score a hypothesis corpus")
    p.add_argument("--metric", required=True,
                   choices=["errant", "pt-errant", "gleu", "scribendi"])
    p.add_argument("--src", required=True, help="source sentences, one per line")
    p.add_argument("--hyp", required=True, help="hypothesis sentences")
    p.add_argument("--ref", help="reference corpus in M2 format")
    p.add_argument("--ref-txt", action="append", default=[],
                   help="plain-text reference set (repeatable, gleu only)")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--n-max", type=int, default=4, help="largest n-gram order")
    p.add_argument("--annotator", type=int, default=None,
                   help="score against this fixed annotator id")
    p.add_argument("--weights", help="per-tag weight file for pt-errant")
    p.add_argument("--ppl-endpoint", help="perplexity service URL (scribendi)")
    add_common(p, jobs=True)
    p.set_defaults(func=cmd_score, _parser=p)

    p = sub.add_parser("extract", help="extract and classify edits into M2")
    p.add_argument("--src", required=True)
    p.add_argument("--hyp", required=True)
    add_common(p, jobs=True)
    p.set_defaults(func=cmd_extract, _parser=p)

    p = sub.add_parser("ensemble", help="combine aligned hypothesis files")
    p.add_argument("--src", required=True)
    p.add_argument("--hyp", action="append", required=True,
                   help="hypothesis file (repeat for each system)")
    p.add_argument("--fallback", default="best",
                   choices=[f.value for f in Fallback])
    p.add_argument("--priority", help="comma-separated system indices, best first")
    p.add_argument("--ngram-n", type=int, default=3)
    p.add_argument("--vote-threshold", type=int, default=None)
    p.add_argument("--ppl-endpoint")
    p.add_argument("--judge-endpoint")
    add_common(p)
    p.set_defaults(func=cmd_ensemble, _parser=p)

    p = sub.add_parser("analyze", help="per-error-type correction profile")
    p.add_argument("--src", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True, help="reference corpus in M2 format")
    p.add_argument("--annotator", type=int, default=None)
    add_common(p)
    p.set_defaults(func=cmd_analyze, _parser=p)

    p = sub.add_parser("correlate", help="rank-correlate two profile tables")
    p.add_argument("table_a")
    p.add_argument("table_b")
    p.add_argument("--field", default="correction",
                   choices=["correction", "false_insertion"])
    add_common(p)
    p.set_defaults(func=cmd_correlate, _parser=p)

    p = sub.add_parser("sigtest", help="paired permutation significance test")
    p.add_argument("--metric", required=True, choices=["errant", "gleu"])
    p.add_argument("--src", required=True)
    p.add_argument("--hyp-a", required=True)
    p.add_argument("--hyp-b", required=True)
    p.add_argument("--ref")
    p.add_argument("--ref-txt", action="append", default=[])
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--iterations", type=int, default=10000)
    add_common(p, seed=True, jobs=True)
    p.set_defaults(func=cmd_sigtest, _parser=p)

    judge = sub.add_parser("judge", help="LLM-judge pipeline")
    judge_sub = judge.add_subparsers(dest="judge_command", required=True)

    p = judge_sub.add_parser("run", help="build cases and collect LLM verdicts")
    p.add_argument("--src", required=True)
    p.add_argument("--gold", required=True, help="gold corrections, one per line")
    p.add_argument("--hyp", required=True, help="model corrections")
    p.add_argument("--out", required=True, help="event log to write")
    p.add_argument("--judge-a", help="first judge chat-completion URL")
    p.add_argument("--judge-b", help="second judge chat-completion URL")
    p.add_argument("--mock-script",
                   help="JSON file with scripted judge answers (testing)")
    p.add_argument("--token-env", default="GECEVAL_JUDGE_TOKEN",
                   help="environment variable holding the judge API token")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-inflight", type=int, default=8,
                   help="concurrent in-flight judge requests")
    p.set_defaults(func=cmd_judge_run, _parser=p)

    p = judge_sub.add_parser("serve", help="serve the human adjudication API/UI")
    p.add_argument("--store", required=True, help="event log path")
    p.add_argument("--config", required=True,
                   help="TOML file with an [annotators] table")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui-dir", help="directory of static UI assets to mount at /")
    p.set_defaults(func=cmd_judge_serve, _parser=p)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GecEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
