"""Full benchmark over a book corpus with curated datasets.

Preprocesses raw text, trains the named presets plus the PPMI baseline, and
evaluates every model on the analogy and intrusion datasets, with analogy
baselines (only-b, ignore-a), per-difficulty accuracy, and frequency-bin
tables.  Models and reports land in the output directory; an existing model
file is reused, so an interrupted run resumes where it stopped.
"""

import argparse
import dataclasses
import json
import os
import time

from embedlab import (PRESETS, AnalogyMethod, build_vocab, count_cooccurrences,
                      emit_report, eval_analogies, eval_intrusion,
                      frequency_analysis, load_binary, load_corpus, load_ppmi,
                      parse_analogy_file, parse_intrusion_file, read_corpus_file,
                      save_binary, save_ppmi, summarize_report, to_ppmi, train,
                      write_corpus_file)
from embedlab.corpus import PreprocessOptions

PPMI_NAME = "ppmi"


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("corpus", help="raw plain-text file")
    parser.add_argument("-o", "--out", required=True, help="output directory")
    parser.add_argument("--analogies", default=None, help="analogy dataset file")
    parser.add_argument("--intrusion", default=None, help="intrusion dataset file")
    parser.add_argument("--presets", nargs="+",
                        default=list(PRESETS) + [PPMI_NAME],
                        choices=list(PRESETS) + [PPMI_NAME])
    parser.add_argument("--lowercase", action="store_true")
    parser.add_argument("--min-count", type=int, default=5)
    parser.add_argument("--ppmi-window", type=int, default=5)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=1)
    return parser


def prepared_corpus(args):
    cached = os.path.join(args.out, "corpus.txt")
    if os.path.exists(cached):
        print(f"corpus: reusing {cached}")
        return read_corpus_file(cached)
    corpus = load_corpus(args.corpus, PreprocessOptions(lowercase=args.lowercase))
    write_corpus_file(corpus, cached)
    print(f"corpus: {len(corpus.sentences)} sentences, {corpus.token_count} tokens "
          f"-> {cached}")
    return corpus


def trained_model(name, corpus, args):
    if name == PPMI_NAME:
        path = os.path.join(args.out, "ppmi.txt")
        if os.path.exists(path):
            print(f"{name}: reusing {path}")
            return load_ppmi(path)
        start = time.perf_counter()
        vocab = build_vocab(corpus, min_count=args.min_count)
        model = to_ppmi(count_cooccurrences(corpus, vocab, window=args.ppmi_window))
        save_ppmi(model, path)
        print(f"{name}: {len(vocab)} terms in {time.perf_counter() - start:.0f}s -> {path}")
        return model
    path = os.path.join(args.out, f"{name}.bin")
    if os.path.exists(path):
        print(f"{name}: reusing {path}")
        return load_binary(path)
    config = dataclasses.replace(PRESETS[name], min_count=args.min_count,
                                 seed=args.seed, workers=args.workers)
    start = time.perf_counter()
    model = train(corpus, config)
    save_binary(model, path)
    print(f"{name}: trained in {time.perf_counter() - start:.0f}s -> {path}")
    return model


def pct(value) -> str:
    return "n/a" if value is None else f"{100 * value:.2f}%"


def evaluate(name, model, analogies, intrusion, args):
    summaries = {}
    if analogies:
        for method in AnalogyMethod:
            report = eval_analogies(model, analogies, method, model_id=name)
            summaries[f"analogies/{method.value}"] = summarize_report(report)
            out = os.path.join(args.out, f"{name}.analogies.{method.value}.jsonl")
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(emit_report(report, "jsonl"))
    if intrusion:
        report = eval_intrusion(model, intrusion, model_id=name)
        freq = frequency_analysis(report, model.vocab)
        summaries["intrusion"] = summarize_report(report, freq)
        out = os.path.join(args.out, f"{name}.intrusion.jsonl")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(emit_report(report, "jsonl"))
    return summaries


def print_tables(all_summaries, analogies, intrusion):
    names = list(all_summaries)
    width = max(len(n) for n in names)
    if analogies:
        print("\nanalogy accuracy (offset / only-b / ignore-a):")
        for name in names:
            cells = [pct(all_summaries[name][f"analogies/{m.value}"]["accuracy"])
                     for m in AnalogyMethod]
            print(f"  {name:<{width}}  " + "  ".join(f"{c:>8}" for c in cells))
    if intrusion:
        print("\nintrusion accuracy (total, then difficulty 1-4):")
        for name in names:
            summary = all_summaries[name]["intrusion"]
            levels = summary["difficulties"]
            cells = [pct(summary["accuracy"])] + [
                pct(levels[str(d)]["accuracy"]) if str(d) in levels else "n/a"
                for d in (1, 2, 3, 4)]
            print(f"  {name:<{width}}  " + "  ".join(f"{c:>8}" for c in cells))
        print("\nintrusion accuracy by predicted-outlier frequency bin (1=rare):")
        for name in names:
            table = all_summaries[name]["intrusion"]["frequency"]["predicted"]
            cells = [pct(table[str(b)]["accuracy"]) for b in range(1, 7)]
            print(f"  {name:<{width}}  " + "  ".join(f"{c:>8}" for c in cells))


def main() -> int:
    args = build_arg_parser().parse_args()
    if not args.analogies and not args.intrusion:
        print("nothing to evaluate: pass --analogies and/or --intrusion")
        return 2
    os.makedirs(args.out, exist_ok=True)

    corpus = prepared_corpus(args)
    analogies = parse_analogy_file(args.analogies) if args.analogies else None
    intrusion = parse_intrusion_file(args.intrusion) if args.intrusion else None

    all_summaries = {}
    for name in args.presets:
        model = trained_model(name, corpus, args)
        all_summaries[name] = evaluate(name, model, analogies, intrusion, args)

    summary_path = os.path.join(args.out, "summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(all_summaries, fh, indent=2)
        fh.write("\n")
    print_tables(all_summaries, analogies, intrusion)
    print(f"\nwrote {summary_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
