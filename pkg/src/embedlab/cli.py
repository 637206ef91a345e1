"""Command line front end.

Subcommands cover the full workflow: corpus preprocessing, training (both
neural presets and the count-based model), dataset generation from term
definitions, evaluation, grid sweeps, and nearest-neighbour queries.

Exit codes: 0 success, 1 internal error, 2 usage or configuration error
(including missing files), 3 malformed data or unknown terms.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

from .corpus import (PhraseConfig, PreprocessOptions, build_vocab, detect_phrases,
                     load_corpus, read_corpus_file, write_corpus_file)
from .datasets import (TaskDefinitions, generate_analogy_questions,
                       generate_intrusion_questions, parse_analogy_file,
                       parse_definitions, parse_intrusion_file,
                       write_analogy_file, write_intrusion_file)
from .embeddings import (PRESETS, TrainingConfig, load_binary, load_text,
                         save_binary, save_text, train, update_model)
from .errors import ConfigError, EmbedlabError, FormatError, OovError
from .evaluation import (AnalogyMethod, emit_report, eval_analogies,
                         eval_intrusion, frequency_analysis, summarize_report)
from .gridsearch import GridSpec, run_grid, summarize_grid
from .ppmi import (DEFAULT_PPMI_WINDOW, count_cooccurrences, load_ppmi,
                   save_ppmi, to_ppmi)

_BINARY_MAGIC = b"EMBL\x01"


def _default_workers() -> int:
    raw = os.environ.get("EMBEDLAB_WORKERS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"EMBEDLAB_WORKERS must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"EMBEDLAB_WORKERS must be positive, got {value}")
    return value


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = int.from_bytes(os.urandom(4), "big")
    print(f"seed: {seed}")
    return seed


def _load_any_model(path: str):
    """Sniff the on-disk format: binary, count-based text, or vector text."""
    with open(path, "rb") as fh:
        head = fh.read(len(_BINARY_MAGIC))
    if head == _BINARY_MAGIC:
        return load_binary(path)
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("ppmi "):
        return load_ppmi(path)
    return load_text(path)


def _add_preprocess(sub) -> None:
    p = sub.add_parser("preprocess", help="normalize raw text into a corpus file")
    p.add_argument("input", help="raw text file")
    p.add_argument("-o", "--output", required=True, help="corpus file to write")
    p.add_argument("--lowercase", action="store_true", help="lowercase all tokens")
    p.add_argument("--phrases", action="store_true",
                   help="also write a corpus with detected multiword phrases")
    p.add_argument("--ngram-out", default=None,
                   help="path for the phrase corpus (default: OUTPUT.ngrams)")
    p.add_argument("--phrase-passes", type=int, default=2)
    p.add_argument("--phrase-delta", type=float, default=5.0)
    p.add_argument("--phrase-threshold", type=float, nargs="+", default=[10.0, 5.0])


def _add_train(sub) -> None:
    p = sub.add_parser("train", help="train a model on a corpus file")
    p.add_argument("corpus", help="corpus file (one sentence per line)")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--preset", choices=list(PRESETS) + ["ppmi"], default=None,
                   help="named configuration to start from")
    p.add_argument("--algorithm", choices=("skipgram", "cbow"), default=None)
    p.add_argument("--loss", choices=("ns", "hs"), default=None)
    p.add_argument("--dims", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--negative", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None, help="initial learning rate")
    p.add_argument("--min-count", type=int, default=None)
    p.add_argument("--subsample", type=float, default=None,
                   help="frequent-word threshold, 0 disables")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None,
                   help="training threads (default $EMBEDLAB_WORKERS or 1)")
    p.add_argument("--update", metavar="FROM_MODEL", default=None,
                   help="continue training an existing binary model")
    p.add_argument("--save-format", choices=("binary", "text"), default="binary")
    p.add_argument("--ppmi-window", type=int, default=DEFAULT_PPMI_WINDOW,
                   help="context window for the ppmi preset")


def _add_generate(sub) -> None:
    p = sub.add_parser("generate", help="build evaluation datasets from definitions")
    p.add_argument("definitions", help="definitions file with task sections")
    p.add_argument("--analogies-out", default=None)
    p.add_argument("--intrusion-out", default=None)


def _add_eval(sub) -> None:
    p = sub.add_parser("eval", help="evaluate models on a dataset")
    p.add_argument("models", nargs="*", help="model files")
    p.add_argument("--models-config", default=None,
                   help="file of NAME = PATH lines naming models")
    p.add_argument("--task", choices=("analogies", "intrusion"), required=True)
    p.add_argument("--questions", required=True, help="dataset file")
    p.add_argument("--method", choices=[m.value for m in AnalogyMethod],
                   default=AnalogyMethod.OFFSET.value)
    p.add_argument("--format", choices=("human", "csv", "jsonl"), default="human")
    p.add_argument("--case-insensitive", action="store_true")
    p.add_argument("--frequency-analysis", action="store_true",
                   help="report accuracy by corpus frequency bin (intrusion only)")
    p.add_argument("--summary", default=None, help="also write a JSON summary here")


def _add_grid(sub) -> None:
    p = sub.add_parser("grid", help="sweep hyperparameter combinations")
    p.add_argument("corpus", help="corpus file")
    p.add_argument("--spec", default=None, help="JSON file of grid axes")
    p.add_argument("--analogies", default=None, help="analogy dataset file")
    p.add_argument("--intrusion", default=None, help="intrusion dataset file")
    p.add_argument("-o", "--output", required=True, help="results CSV (appended, resumable)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--summary", default=None, help="write a JSON summary here")


def _add_neighbors(sub) -> None:
    p = sub.add_parser("neighbors", help="print nearest neighbours of a term")
    p.add_argument("model", help="model file")
    p.add_argument("term")
    p.add_argument("-n", "--topn", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embedlab",
                                     description="train and evaluate word vector models")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_preprocess(sub)
    _add_train(sub)
    _add_generate(sub)
    _add_eval(sub)
    _add_grid(sub)
    _add_neighbors(sub)
    return parser


def _cmd_preprocess(args) -> int:
    options = PreprocessOptions(lowercase=args.lowercase)
    corpus = load_corpus(args.input, options)
    write_corpus_file(corpus, args.output)
    print(f"wrote {args.output}: {len(corpus.sentences)} sentences, {corpus.token_count} tokens")
    if args.phrases:
        config = PhraseConfig(delta=args.phrase_delta,
                              threshold=tuple(args.phrase_threshold),
                              passes=args.phrase_passes)
        phrased = detect_phrases(corpus, config)
        out = args.ngram_out or args.output + ".ngrams"
        write_corpus_file(phrased, out)
        merged = sum(1 for s in phrased.sentences for t in s if "_" in t)
        print(f"wrote {out}: {merged} phrase tokens")
    return 0


def _train_ppmi(args, corpus) -> int:
    vocab = build_vocab(corpus, min_count=args.min_count if args.min_count is not None else 5)
    counts = count_cooccurrences(corpus, vocab, window=args.ppmi_window)
    model = to_ppmi(counts)
    save_ppmi(model, args.output)
    print(f"trained ppmi: {len(vocab.entries)} terms, window {args.ppmi_window}, "
          f"{counts.counts.nnz} cooccurrence cells -> {args.output}")
    return 0


def _cmd_train(args) -> int:
    corpus = read_corpus_file(args.corpus)
    if args.preset == "ppmi":
        return _train_ppmi(args, corpus)

    config = PRESETS[args.preset] if args.preset else TrainingConfig()
    overrides = {"algorithm": args.algorithm, "loss": args.loss, "dims": args.dims,
                 "window": args.window, "negative": args.negative, "epochs": args.epochs,
                 "alpha0": args.alpha, "min_count": args.min_count,
                 "subsample_t": args.subsample}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    overrides["seed"] = _resolve_seed(args)
    overrides["workers"] = args.workers if args.workers is not None else _default_workers()

    start = time.perf_counter()
    if args.update:
        base = _load_any_model(args.update)
        if not hasattr(base, "input_vectors"):
            raise FormatError(f"{args.update}: not an updatable vector model")
        for frozen in ("algorithm", "loss", "dims"):
            overrides.pop(frozen, None)
        model = update_model(base, corpus, **overrides)
    else:
        model = train(corpus, dataclasses.replace(config, **overrides))
    elapsed = time.perf_counter() - start

    if args.save_format == "text":
        save_text(model, args.output)
    else:
        save_binary(model, args.output)
    cfg = model.config
    print(f"trained {cfg.algorithm}/{cfg.loss}: {len(model.vocab.entries)} terms, "
          f"{cfg.dims} dims, {cfg.epochs} epochs, seed {cfg.seed}, "
          f"workers {cfg.workers}, {elapsed:.1f}s -> {args.output}")
    return 0


def _cmd_generate(args) -> int:
    if not args.analogies_out and not args.intrusion_out:
        raise ConfigError("generate requires --analogies-out and/or --intrusion-out")
    defs = parse_definitions(args.definitions)
    if args.analogies_out:
        questions = generate_analogy_questions(defs)
        write_analogy_file(questions, args.analogies_out)
        print(f"wrote {args.analogies_out}: {len(questions)} analogy questions")
    if args.intrusion_out:
        questions = generate_intrusion_questions(defs)
        write_intrusion_file(questions, args.intrusion_out)
        print(f"wrote {args.intrusion_out}: {len(questions)} intrusion questions")
    return 0


def _named_models(args) -> list[tuple[str, str]]:
    named = [(os.path.basename(path), path) for path in args.models]
    if args.models_config:
        with open(args.models_config, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                name, sep, path = line.partition("=")
                if not sep or not name.strip() or not path.strip():
                    raise FormatError(
                        f"{args.models_config}:{lineno}: expected NAME = PATH, got {raw.rstrip()!r}")
                named.append((name.strip(), path.strip()))
    if not named:
        raise ConfigError("eval requires at least one model")
    return named


def _human_comparison(named_reports) -> None:
    width = max(len(name) for name, _ in named_reports)
    print(f"{'model':<{width}}  {'accuracy':>9}  {'correct':>8}  {'skipped':>8}")
    for name, report in named_reports:
        acc = f"{100 * report.accuracy:.2f}%" if report.accuracy is not None else "n/a"
        print(f"{name:<{width}}  {acc:>9}  {report.correct:>8}  {report.skipped:>8}")
    sections = list(named_reports[0][1].by_section())
    if len(sections) > 1:
        print()
        swidth = max(len(s) for s in sections + ["section"])
        print(f"{'section':<{swidth}}  " + "  ".join(f"{name:>{max(9, len(name))}}"
                                                     for name, _ in named_reports))
        for section in sections:
            cells = []
            for name, report in named_reports:
                stats = report.by_section().get(section)
                acc = stats.accuracy if stats else None
                cells.append(f"{100 * acc:.2f}%" if acc is not None else "n/a")
            print(f"{section:<{swidth}}  " + "  ".join(
                f"{c:>{max(9, len(name))}}" for c, (name, _) in zip(cells, named_reports)))
    if named_reports[0][1].task == "intrusion":
        levels = sorted({q.difficulty for _, r in named_reports for q in r.records
                         if q.difficulty})
        if levels:
            print()
            print(f"{'difficulty':<10}  " + "  ".join(f"{name:>{max(9, len(name))}}"
                                                      for name, _ in named_reports))
            for level in levels:
                cells = []
                for name, report in named_reports:
                    stats = report.by_difficulty().get(level)
                    acc = stats.accuracy if stats else None
                    cells.append(f"{100 * acc:.2f}%" if acc is not None else "n/a")
                print(f"{level:<10}  " + "  ".join(
                    f"{c:>{max(9, len(name))}}" for c, (name, _) in zip(cells, named_reports)))


def _cmd_eval(args) -> int:
    named = _named_models(args)
    if args.task == "analogies":
        questions = parse_analogy_file(args.questions)
    else:
        questions = parse_intrusion_file(args.questions)

    named_reports = []
    for name, path in named:
        model = _load_any_model(path)
        if args.task == "analogies":
            report = eval_analogies(model, questions, AnalogyMethod(args.method),
                                    case_insensitive=args.case_insensitive, model_id=name)
        else:
            report = eval_intrusion(model, questions,
                                    case_insensitive=args.case_insensitive, model_id=name)
        named_reports.append((name, model, report))

    summaries = {}
    for name, model, report in named_reports:
        freq = None
        if args.frequency_analysis:
            if args.task != "intrusion":
                raise ConfigError("--frequency-analysis requires --task intrusion")
            if not hasattr(model, "vocab"):
                raise ConfigError(f"{name}: model has no term counts for frequency analysis")
            freq = frequency_analysis(report, model.vocab)
        summaries[name] = summarize_report(report, freq)

    if args.format == "human" and len(named_reports) > 1:
        _human_comparison([(name, report) for name, _, report in named_reports])
    else:
        for i, (name, _, report) in enumerate(named_reports):
            if i:
                print()
            print(emit_report(report, args.format), end="")

    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            json.dump(summaries if len(summaries) > 1 else next(iter(summaries.values())),
                      fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_grid(args) -> int:
    corpus = read_corpus_file(args.corpus)
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{args.spec}: invalid JSON: {exc}")
        spec = GridSpec.from_dict(data)
    else:
        spec = GridSpec()
    analogies = parse_analogy_file(args.analogies) if args.analogies else None
    intrusion = parse_intrusion_file(args.intrusion) if args.intrusion else None
    workers = args.workers if args.workers is not None else _default_workers()
    results = run_grid(corpus, spec, args.output, analogies, intrusion, workers=workers)
    ok = sum(1 for r in results if r.status == "ok")
    print(f"grid: {ok}/{len(results)} configurations completed -> {args.output}")
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            json.dump(summarize_grid(results), fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_neighbors(args) -> int:
    model = _load_any_model(args.model)
    neighbors = model.most_similar(args.term, topn=args.topn, exclude={args.term})
    for term, sim in neighbors:
        print(f"{sim:.6f}  {term}")
    return 0


_COMMANDS = {"preprocess": _cmd_preprocess, "train": _cmd_train, "generate": _cmd_generate,
             "eval": _cmd_eval, "grid": _cmd_grid, "neighbors": _cmd_neighbors}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"embedlab: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"embedlab: {exc}", file=sys.stderr)
        return 2
    except (FormatError, OovError) as exc:
        print(f"embedlab: {exc}", file=sys.stderr)
        return 3
    except EmbedlabError as exc:
        print(f"embedlab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
