"""End-to-end demo on a synthetic two-topic corpus.

Draws random sentences from two disjoint topic vocabularies, trains a small
skip-gram model and a PPMI baseline, then prints nearest neighbours and
odd-one-out results for both.  Needs no input files; runs in seconds.
"""

import argparse

import numpy as np

from embedlab import (Corpus, IntrusionQuestion, TrainingConfig, build_vocab,
                      count_cooccurrences, emit_report, eval_intrusion, to_ppmi,
                      train)

ICE = tuple(f"ice{i}" for i in range(25))
FIRE = tuple(f"fire{i}" for i in range(25))


def synthetic_corpus(rng, tokens=60_000):
    sents = []
    total = 0
    while total < tokens:
        topic = ICE if rng.integers(2) == 0 else FIRE
        n = int(rng.integers(6, 14))
        sents.append(tuple(rng.choice(topic, size=n).tolist()))
        total += n
    return Corpus.from_sentences(tuple(sents))


def cross_topic_questions(rng, n=200):
    questions = []
    for i in range(n):
        home, away = (ICE, FIRE) if i % 2 == 0 else (FIRE, ICE)
        triple = [home[j] for j in rng.choice(len(home), size=3, replace=False)]
        outlier = away[int(rng.integers(len(away)))]
        triple.insert(int(rng.integers(4)), outlier)
        questions.append(IntrusionQuestion(tuple(triple), outlier,
                                           section="cross-topic", difficulty=0))
    return questions


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, default=50)
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    corpus = synthetic_corpus(rng)
    print(f"corpus: {len(corpus.sentences)} sentences, {corpus.token_count} tokens, "
          f"{len(ICE) + len(FIRE)} terms")

    config = TrainingConfig(dims=args.dims, algorithm="skipgram", loss="ns",
                            window=5, epochs=args.epochs, min_count=5,
                            seed=args.seed)
    model = train(corpus, config)
    vocab = build_vocab(corpus, min_count=5)
    ppmi = to_ppmi(count_cooccurrences(corpus, vocab, window=5))

    print(f"\nnearest neighbours of {ICE[0]}:")
    for name, m in (("skip-gram", model), ("ppmi", ppmi)):
        hits = m.most_similar(ICE[0], topn=4, exclude={ICE[0]})
        print(f"  {name:9s}  " + "  ".join(f"{t} ({s:.3f})" for t, s in hits))

    questions = cross_topic_questions(rng)
    for name, m in (("skip-gram", model), ("ppmi", ppmi)):
        print(f"\nodd-one-out, {name}:")
        print(emit_report(eval_intrusion(m, questions, model_id=name)), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
