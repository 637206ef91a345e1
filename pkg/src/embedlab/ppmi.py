"""Count-based sparse baseline: co-occurrence counting and PPMI weighting.

Co-occurrence is symmetric within a sentence window; tokens outside the
vocabulary are never counted but still occupy positions, so they widen the
gap between their neighbors.  The PPMI transform keeps only cells with
positive pointwise mutual information, which keeps the matrix sparse and
the model queryable with the same cosine contract as the dense models.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .corpus import Corpus, Vocabulary
from .errors import ConfigError, FormatError, OovError

DEFAULT_PPMI_WINDOW = 5


@dataclass
class CooccurrenceMatrix:
    """Symmetric within-sentence co-occurrence counts."""

    counts: sparse.csr_matrix
    vocab: Vocabulary
    window: int

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.counts.sum(axis=1)).ravel()

    def col_sums(self) -> np.ndarray:
        return np.asarray(self.counts.sum(axis=0)).ravel()

    def total(self) -> float:
        return float(self.counts.sum())


def count_cooccurrences(corpus: Corpus, vocab: Vocabulary, window: int = DEFAULT_PPMI_WINDOW) -> CooccurrenceMatrix:
    """Count symmetric co-occurrences up to ``window`` positions apart."""
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    size = len(vocab)
    index = vocab.index
    # Sentences are joined by `window` sentinel positions so no counted
    # pair can span a sentence boundary.
    sep = np.full(window, -1, dtype=np.int64)
    parts = []
    for sent in corpus.sentences:
        parts.append(np.array([index.get(t, -1) for t in sent], dtype=np.int64))
        parts.append(sep)
    stream = np.concatenate(parts[:-1]) if parts else np.empty(0, dtype=np.int64)

    rows, cols = [], []
    for dist in range(1, window + 1):
        if stream.size <= dist:
            break
        left = stream[:-dist]
        right = stream[dist:]
        mask = (left >= 0) & (right >= 0)
        if mask.any():
            a = left[mask]
            b = right[mask]
            rows.append(a)
            cols.append(b)
            rows.append(b)
            cols.append(a)
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        counts = sparse.coo_matrix((np.ones(r.size, dtype=np.float64), (r, c)), shape=(size, size)).tocsr()
    else:
        counts = sparse.csr_matrix((size, size), dtype=np.float64)
    return CooccurrenceMatrix(counts, vocab, window)


@dataclass
class SparsePpmiModel:
    """PPMI-weighted term rows supporting the shared similarity contract.

    Rows with no positive-PMI cell are zero; their cosine against anything
    is treated as 0 by :meth:`unit_vector` consumers.
    """

    matrix: sparse.csr_matrix
    vocab: Vocabulary
    window: int
    _unit: sparse.csr_matrix | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, term: str) -> bool:
        return term in self.vocab.index

    def _unit_matrix(self) -> sparse.csr_matrix:
        if self._unit is None:
            sq = self.matrix.multiply(self.matrix).sum(axis=1)
            norms = np.sqrt(np.asarray(sq).ravel())
            scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
            self._unit = sparse.diags(scale).dot(self.matrix).tocsr()
        return self._unit

    def unit_vector(self, term: str) -> np.ndarray:
        """Unit-normalized row as a dense float64 vector; zero rows stay zero."""
        i = self.vocab.index.get(term)
        if i is None:
            raise OovError(term)
        return np.asarray(self._unit_matrix().getrow(i).todense(), dtype=np.float64).ravel()

    def most_similar(self, positives, negatives=(), topn: int = 10, exclude=()) -> list[tuple[str, float]]:
        """Rank terms by cosine against a composed query, as dense models do."""
        if isinstance(positives, str):
            positives = [positives]
        if isinstance(negatives, str):
            negatives = [negatives]
        if topn < 0:
            raise ConfigError(f"topn must be >= 0, got {topn}")
        if topn == 0:
            return []
        unit = self._unit_matrix()
        query = sparse.csr_matrix((1, len(self.vocab)), dtype=np.float64)
        for t in positives:
            i = self.vocab.index.get(t)
            if i is None:
                raise OovError(t)
            query = query + unit.getrow(i)
        for t in negatives:
            i = self.vocab.index.get(t)
            if i is None:
                raise OovError(t)
            query = query - unit.getrow(i)
        qn = float(np.sqrt(query.multiply(query).sum()))
        if qn == 0.0:
            raise ValueError("query vector is zero; cosine ranking is undefined")
        sims = np.asarray((unit @ (query.T / qn)).todense()).ravel()
        order = np.argsort(-sims, kind="stable")
        skip = {i for i in (self.vocab.index.get(t) for t in exclude) if i is not None}
        out = []
        for i in order:
            if int(i) in skip:
                continue
            out.append((self.vocab.term(int(i)), float(sims[i])))
            if len(out) == topn:
                break
        return out


def to_ppmi(cooc: CooccurrenceMatrix) -> SparsePpmiModel:
    """Weight co-occurrence counts by positive pointwise mutual information.

    ``PPMI(w, c) = max(0, log(count(w, c) * total / (count(w) * count(c))))``
    with zero cells (and cells at or below independence) left out entirely.
    """
    total = cooc.total()
    if total <= 0:
        raise ConfigError("co-occurrence matrix is empty; nothing to weight")
    coo = cooc.counts.tocoo()
    row_sums = cooc.row_sums()
    col_sums = cooc.col_sums()
    pmi = np.log(coo.data * total / (row_sums[coo.row] * col_sums[coo.col]))
    keep = pmi > 0
    matrix = sparse.csr_matrix((pmi[keep], (coo.row[keep], coo.col[keep])), shape=coo.shape)
    return SparsePpmiModel(matrix, cooc.vocab, cooc.window)


def ppmi_most_similar(model: SparsePpmiModel, positives, negatives=(), topn: int = 10, exclude=()) -> list[tuple[str, float]]:
    """Module-level alias for :meth:`SparsePpmiModel.most_similar`."""
    return model.most_similar(positives, negatives, topn=topn, exclude=exclude)


def save_ppmi(model: SparsePpmiModel, path: str) -> None:
    """Write a PPMI model as text: header, vocabulary block, weight triplets.

    Line 1 is ``ppmi <vocab-size> <window>``, followed by one ``term count``
    line per vocabulary entry, then one ``word context weight`` line per
    stored cell in row-major order.
    """
    mat = model.matrix.tocoo()
    order = np.lexsort((mat.col, mat.row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"ppmi {len(model.vocab)} {model.window}\n")
        for term, count in model.vocab.entries:
            fh.write(f"{term} {count}\n")
        for i in order:
            w = model.vocab.term(int(mat.row[i]))
            c = model.vocab.term(int(mat.col[i]))
            fh.write(f"{w} {c} {format(float(mat.data[i]), '.17g')}\n")


def load_ppmi(path: str) -> SparsePpmiModel:
    """Read a PPMI model written by :func:`save_ppmi`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "ppmi":
            raise FormatError(f"{path}: line 1: expected 'ppmi <vocab-size> <window>' header")
        try:
            size, window = int(header[1]), int(header[2])
        except ValueError as exc:
            raise FormatError(f"{path}: line 1: non-numeric header field") from exc
        entries = []
        for lineno in range(2, size + 2):
            fields = fh.readline().split()
            if len(fields) != 2:
                raise FormatError(f"{path}: line {lineno}: expected 'term count'")
            try:
                entries.append((fields[0], int(fields[1])))
            except ValueError as exc:
                raise FormatError(f"{path}: line {lineno}: non-numeric count") from exc
        try:
            vocab = Vocabulary.from_ordered_entries(entries, min_count=0)
        except FormatError as exc:
            raise FormatError(f"{path}: {exc}") from exc
        rows, cols, data = [], [], []
        for lineno, line in enumerate(fh, start=size + 2):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 3:
                raise FormatError(f"{path}: line {lineno}: expected 'word context weight'")
            iw = vocab.index.get(fields[0])
            ic = vocab.index.get(fields[1])
            if iw is None or ic is None:
                unknown = fields[0] if iw is None else fields[1]
                raise FormatError(
                    f"{path}: line {lineno}: triplet term {unknown!r} not in the vocabulary block")
            try:
                value = float(fields[2])
            except ValueError as exc:
                raise FormatError(f"{path}: line {lineno}: non-numeric weight") from exc
            rows.append(iw)
            cols.append(ic)
            data.append(value)
    matrix = sparse.csr_matrix((data, (rows, cols)), shape=(size, size), dtype=np.float64)
    return SparsePpmiModel(matrix, vocab, window)
