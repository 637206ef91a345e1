"""Corpus loading, tokenization, phrase merging, and vocabulary construction.

Preprocessing is deliberately minimal and matches what small-corpus
embedding work usually does: sentences end at ``.``, ``?`` or ``!``,
punctuation acts as a token separator, and case is preserved unless the
caller asks for folding.  Underscores are never separators, so multiword
tokens built by :func:`detect_phrases` (``night_king``) survive a round
trip through a corpus file.
"""

from __future__ import annotations

import collections
import math
import re
import string
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, FormatError

# ASCII punctuation (underscore exempt) plus typographic quotes and dashes.
_ASCII_PUNCT = string.punctuation.replace("_", "")
DEFAULT_STRIP_CHARS = _ASCII_PUNCT + "“”‘’—–"

SENTENCE_TERMINATORS = ".?!"

_SENTENCE_SPLIT = re.compile(r"[.?!]")
_DEFAULT_TABLE = str.maketrans({c: " " for c in DEFAULT_STRIP_CHARS})


@dataclass
class PreprocessOptions:
    """Options for turning raw text into a token corpus."""

    lowercase: bool = False
    strip_chars: str = DEFAULT_STRIP_CHARS


@dataclass
class Corpus:
    """An ordered collection of tokenized sentences."""

    sentences: tuple[tuple[str, ...], ...]
    source_path: str = ""
    token_count: int = 0

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sequence[str]], source_path: str = "") -> "Corpus":
        """Build a corpus, dropping empty sentences and counting tokens."""
        sents = tuple(tuple(s) for s in sentences if len(s) > 0)
        return cls(sents, source_path, sum(len(s) for s in sents))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


@dataclass
class Vocabulary:
    """Term counts with a stable term <-> index bijection.

    Corpus-built vocabularies are ordered by descending count with ties
    broken lexicographically, so index 0 is always the most frequent term.
    Vocabularies read back from vector files keep file order instead (their
    counts are unknown and stored as zero).
    """

    entries: tuple[tuple[str, int], ...]
    index: dict[str, int]
    total_tokens: int
    min_count: int
    _counts: "object" = field(default=None, repr=False, compare=False)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], min_count: int = 1) -> "Vocabulary":
        """Canonical construction: filter by min_count, sort, index."""
        if min_count < 1:
            raise ConfigError(f"min_count must be >= 1, got {min_count}")
        items = [(t, c) for t, c in counts.items() if c >= min_count]
        items.sort(key=lambda tc: (-tc[1], tc[0]))
        index = {t: i for i, (t, _) in enumerate(items)}
        total = sum(c for _, c in items)
        return cls(tuple(items), index, total, min_count)

    @classmethod
    def from_ordered_entries(cls, entries: Sequence[tuple[str, int]], min_count: int = 0) -> "Vocabulary":
        """Construction that preserves the given order (vector-file imports)."""
        ents = tuple((t, int(c)) for t, c in entries)
        index = {t: i for i, (t, _) in enumerate(ents)}
        if len(index) != len(ents):
            raise FormatError("duplicate term in vocabulary entries")
        return cls(ents, index, sum(c for _, c in ents), min_count)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, term: str) -> bool:
        return term in self.index

    def term(self, i: int) -> str:
        return self.entries[i][0]

    def get_count(self, term: str, default: int = 0) -> int:
        i = self.index.get(term)
        return self.entries[i][1] if i is not None else default

    def counts_array(self):
        """Counts in index order as an int64 array (cached)."""
        import numpy as np

        if self._counts is None:
            object.__setattr__(self, "_counts", np.array([c for _, c in self.entries], dtype=np.int64))
        return self._counts


def split_sentences(text: str) -> list[str]:
    """Naively split text into sentences at ``.``, ``?`` and ``!``.

    Every non-terminator character ends up in exactly one sentence; empty
    fragments (consecutive terminators, trailing punctuation) are dropped.
    """
    return [part for part in (p.strip() for p in _SENTENCE_SPLIT.split(text)) if part]


def tokenize(sentence: str, strip_chars: str = DEFAULT_STRIP_CHARS, lowercase: bool = False) -> list[str]:
    """Split a sentence into tokens, treating strip characters as separators."""
    if strip_chars == DEFAULT_STRIP_CHARS:
        table = _DEFAULT_TABLE
    else:
        table = str.maketrans({c: " " for c in strip_chars})
    if lowercase:
        sentence = sentence.lower()
    return sentence.translate(table).split()


def load_corpus(path: str, options: PreprocessOptions | None = None) -> Corpus:
    """Read a raw UTF-8 text file and preprocess it into a corpus."""
    opts = options or PreprocessOptions()
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: undecodable UTF-8 at byte offset {exc.start}") from exc
    table = str.maketrans({c: " " for c in opts.strip_chars})
    sentences = []
    for sent in split_sentences(text):
        if opts.lowercase:
            sent = sent.lower()
        tokens = sent.translate(table).split()
        if tokens:
            sentences.append(tokens)
    return Corpus.from_sentences(sentences, source_path=path)


def write_corpus_file(corpus: Corpus, path: str) -> None:
    """Write one sentence per line, tokens separated by single spaces."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sent in corpus.sentences:
            fh.write(" ".join(sent))
            fh.write("\n")


def read_corpus_file(path: str) -> Corpus:
    """Read a corpus file produced by :func:`write_corpus_file`."""
    sentences = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            tokens = line.split()
            if tokens:
                sentences.append(tokens)
    return Corpus.from_sentences(sentences, source_path=path)


def build_vocab(corpus: Corpus, min_count: int = 1) -> Vocabulary:
    """Count corpus terms and keep those occurring at least min_count times."""
    counts = collections.Counter()
    for sent in corpus.sentences:
        counts.update(sent)
    return Vocabulary.from_counts(counts, min_count)


def subsample_keep_prob(term_count: int, total_tokens: int, t: float = 1e-3) -> float:
    """Keep probability for frequent-word subsampling.

    With relative frequency ``f = term_count / total_tokens`` the keep
    probability is ``min(1, (sqrt(f/t) + 1) * (t/f))``; rare words are
    always kept, very frequent ones are aggressively dropped.
    """
    if term_count <= 0 or total_tokens <= 0:
        raise ValueError("term_count and total_tokens must be positive")
    if not 0.0 < t <= 1.0:
        raise ValueError(f"subsampling threshold must be in (0, 1], got {t}")
    f = term_count / total_tokens
    return min(1.0, (math.sqrt(f / t) + 1.0) * (t / f))


@dataclass
class PhraseConfig:
    """Settings for corpus-level phrase merging.

    ``threshold`` may be a single cutoff or one per pass; the last value
    repeats if there are more passes than thresholds.  The defaults run two
    passes (so up to 3-gram tokens) with a stricter first pass.
    """

    delta: float = 5.0
    threshold: float | tuple[float, ...] = (10.0, 5.0)
    passes: int = 2

    def __post_init__(self):
        if self.passes < 1:
            raise ConfigError(f"passes must be >= 1, got {self.passes}")
        if self.delta < 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        for th in self.thresholds():
            if th <= 0:
                raise ConfigError(f"threshold must be > 0, got {th}")

    def thresholds(self) -> tuple[float, ...]:
        if isinstance(self.threshold, (int, float)):
            return (float(self.threshold),)
        return tuple(float(t) for t in self.threshold)

    def threshold_for(self, pass_index: int) -> float:
        ths = self.thresholds()
        return ths[min(pass_index, len(ths) - 1)]


def phrase_score(pair_count: int, count_a: int, count_b: int, total_tokens: int, delta: float) -> float:
    """Collocation score: ``(count(ab) - delta) * N / (count(a) * count(b))``."""
    return (pair_count - delta) * total_tokens / (count_a * count_b)


def detect_phrases(corpus: Corpus, config: PhraseConfig | None = None) -> Corpus:
    """Merge high-scoring adjacent token pairs into underscore-joined tokens.

    Each pass recounts the current corpus, scores every adjacent pair, and
    greedily merges left to right whenever the score exceeds the pass
    threshold.  Pass k can therefore build (k+1)-gram tokens.
    """
    cfg = config or PhraseConfig()
    if corpus.token_count == 0:
        raise ConfigError("cannot detect phrases in an empty corpus")
    sentences = corpus.sentences
    for p in range(cfg.passes):
        unigrams = collections.Counter()
        bigrams = collections.Counter()
        for sent in sentences:
            unigrams.update(sent)
            bigrams.update(zip(sent, sent[1:]))
        total = sum(unigrams.values())
        threshold = cfg.threshold_for(p)
        merged_sentences = []
        for sent in sentences:
            out = []
            i = 0
            n = len(sent)
            while i < n:
                if i + 1 < n:
                    a, b = sent[i], sent[i + 1]
                    score = phrase_score(bigrams[(a, b)], unigrams[a], unigrams[b], total, cfg.delta)
                    if score > threshold:
                        out.append(a + "_" + b)
                        i += 2
                        continue
                out.append(sent[i])
                i += 1
            merged_sentences.append(tuple(out))
        sentences = tuple(merged_sentences)
    return Corpus.from_sentences(sentences, source_path=corpus.source_path)
