import numpy as np
import pytest

from embedlab.corpus import Corpus, build_vocab
from embedlab.datasets import IntrusionQuestion
from embedlab.embeddings import TrainingConfig, train
from embedlab.ppmi import count_cooccurrences, to_ppmi

CLUSTER_A = tuple(f"alpha{i}" for i in range(30))
CLUSTER_B = tuple(f"beta{i}" for i in range(30))


def make_corpus(words, n_sentences, seed, lo=5, hi=12):
    """Random sentences over a closed vocabulary, for quick training runs."""
    rng = np.random.default_rng(seed)
    sents = tuple(tuple(rng.choice(words, size=int(rng.integers(lo, hi + 1))).tolist())
                  for _ in range(n_sentences))
    return Corpus.from_sentences(sents)


@pytest.fixture(scope="session")
def planted_corpus():
    """Two topic clusters with disjoint co-occurrence, ~100K tokens."""
    rng = np.random.default_rng(42)
    sents = []
    total = 0
    while total < 100_000:
        cluster = CLUSTER_A if rng.integers(2) == 0 else CLUSTER_B
        n = int(rng.integers(8, 17))
        sents.append(tuple(rng.choice(cluster, size=n).tolist()))
        total += n
    return Corpus.from_sentences(tuple(sents))


@pytest.fixture(scope="session")
def planted_sgns(planted_corpus):
    cfg = TrainingConfig(dims=50, algorithm="skipgram", loss="ns", negative=5,
                         window=5, epochs=5, min_count=5, seed=13)
    return train(planted_corpus, cfg)


@pytest.fixture(scope="session")
def planted_ppmi(planted_corpus):
    vocab = build_vocab(planted_corpus, min_count=5)
    return to_ppmi(count_cooccurrences(planted_corpus, vocab, window=5))


@pytest.fixture(scope="session")
def planted_questions():
    """Cross-cluster intrusion questions: 3 from one cluster, 1 from the other."""
    rng = np.random.default_rng(7)
    questions = []
    for i in range(400):
        home, away = (CLUSTER_A, CLUSTER_B) if i % 2 == 0 else (CLUSTER_B, CLUSTER_A)
        triple = tuple(np.array(home)[rng.choice(len(home), size=3, replace=False)])
        outlier = away[int(rng.integers(len(away)))]
        terms = list(triple)
        terms.insert(int(rng.integers(4)), outlier)
        questions.append(IntrusionQuestion(tuple(terms), outlier, section="planted",
                                           difficulty=(i % 4) + 1))
    return questions
