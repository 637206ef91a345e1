"""Dense word embeddings trained with stochastic gradient descent.

Two architectures (skip-gram and CBOW) crossed with two objectives
(negative sampling and hierarchical softmax over a Huffman tree).  The
exposed unit of work is :func:`train_step`: one center word plus its
context words, updated with the exact analytic gradient of the step loss,
which makes the whole trainer checkable against finite differences.

Training with one worker and a fixed seed is bit-reproducible.  With
several workers the updates are asynchronous and unsynchronized (threads
race on the shared matrices), so results vary run to run.
"""

from __future__ import annotations

import heapq
import json
import struct
import threading
from collections import Counter
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.special import expit

from .corpus import Corpus, Vocabulary, build_vocab, subsample_keep_prob
from .errors import ConfigError, FormatError, OovError

ALGORITHMS = ("skipgram", "cbow")
LOSSES = ("ns", "hs")

_BINARY_MAGIC = b"EMBL\x01"

# Alpha is refreshed every this many centers inside one training unit.
_ALPHA_REFRESH = 1024


@dataclass
class TrainingConfig:
    """Hyperparameters for embedding training."""

    dims: int = 100
    algorithm: str = "cbow"
    loss: str = "ns"
    negative: int = 5
    window: int = 5
    epochs: int = 5
    alpha0: float = 0.025
    alpha_min: float = 0.0001
    subsample_t: float = 1e-3
    min_count: int = 5
    seed: int = 1
    workers: int = 1
    cross_sentence_window: bool = False
    fixed_window: bool = False
    dtype: str = "float32"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}, expected one of {ALGORITHMS}")
        if self.loss not in LOSSES:
            raise ConfigError(f"unknown loss {self.loss!r}, expected one of {LOSSES}")
        if self.dims < 1:
            raise ConfigError(f"dims must be >= 1, got {self.dims}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not (self.alpha0 > self.alpha_min > 0):
            raise ConfigError(f"need alpha0 > alpha_min > 0, got {self.alpha0} and {self.alpha_min}")
        if self.loss == "ns" and self.negative < 1:
            raise ConfigError(f"negative sampling needs negative >= 1, got {self.negative}")
        if self.min_count < 1:
            raise ConfigError(f"min_count must be >= 1, got {self.min_count}")
        if not 0.0 <= self.subsample_t <= 1.0:
            raise ConfigError(f"subsample_t must be in [0, 1] (0 disables), got {self.subsample_t}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        try:
            ok = np.issubdtype(np.dtype(self.dtype), np.floating)
        except TypeError:
            ok = False
        if not ok:
            raise ConfigError(f"dtype must name a float type, got {self.dtype!r}")


PRESETS: dict[str, TrainingConfig] = {
    "w2v-default": TrainingConfig(dims=300, algorithm="cbow", loss="ns", negative=5, window=5, epochs=5),
    "w2v-ww12-i15-ns": TrainingConfig(dims=300, algorithm="skipgram", loss="ns", negative=15, window=12, epochs=15),
    "w2v-ww12-i15-hs": TrainingConfig(dims=300, algorithm="skipgram", loss="hs", window=12, epochs=15),
    "w2v-CBOW": TrainingConfig(dims=300, algorithm="cbow", loss="ns", negative=15, window=12, epochs=15),
}


@dataclass
class UnigramTable:
    """Noise distribution proportional to count**power, sampled by inverse CDF."""

    cumulative: np.ndarray
    power: float

    def probabilities(self) -> np.ndarray:
        return np.diff(self.cumulative, prepend=0.0)

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        return np.searchsorted(self.cumulative, rng.random(shape), side="right")


def build_unigram_table(vocab: Vocabulary, power: float = 0.75) -> UnigramTable:
    """Build the smoothed unigram noise distribution over the vocabulary."""
    if len(vocab) == 0:
        raise ConfigError("cannot build a noise table for an empty vocabulary")
    weights = vocab.counts_array().astype(np.float64) ** power
    total = weights.sum()
    if total <= 0:
        # Counts unknown (imported vectors): fall back to uniform noise.
        weights[:] = 1.0
        total = float(len(weights))
    cumulative = np.cumsum(weights / total)
    cumulative[-1] = 1.0
    return UnigramTable(cumulative, power)


@dataclass
class HuffmanTree:
    """Per-term binary codes and the internal-node path that spells them."""

    codes: list[np.ndarray]
    points: list[np.ndarray]
    node_count: int


def build_huffman(vocab: Vocabulary) -> HuffmanTree:
    """Huffman-code the vocabulary by count; ties resolved by term index."""
    size = len(vocab)
    if size < 2:
        raise ConfigError("huffman coding needs a vocabulary of at least 2 terms")
    counts = vocab.counts_array()
    total_nodes = 2 * size - 1
    parent = np.zeros(total_nodes, dtype=np.int64)
    branch = np.zeros(total_nodes, dtype=np.uint8)
    heap = [(int(counts[i]), i) for i in range(size)]
    heapq.heapify(heap)
    nxt = size
    while len(heap) > 1:
        c1, n1 = heapq.heappop(heap)
        c2, n2 = heapq.heappop(heap)
        parent[n1] = nxt
        parent[n2] = nxt
        branch[n2] = 1
        heapq.heappush(heap, (c1 + c2, nxt))
        nxt += 1
    root = total_nodes - 1
    codes: list[np.ndarray] = []
    points: list[np.ndarray] = []
    for leaf in range(size):
        bits = []
        path = []
        node = leaf
        while node != root:
            bits.append(branch[node])
            node = int(parent[node])
            path.append(node - size)
        codes.append(np.array(bits[::-1], dtype=np.uint8))
        points.append(np.array(path[::-1], dtype=np.int64))
    return HuffmanTree(codes, points, size - 1)


@dataclass
class EmbeddingModel:
    """A trained (or loadable) embedding table plus its training state.

    ``input_vectors`` holds the word vectors that queries use;
    ``output_vectors`` holds context weights (negative sampling) or
    internal-node weights (hierarchical softmax, rows 0..|V|-2).
    """

    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    config: TrainingConfig
    trained_tokens: int = 0
    epoch_losses: list[float] = field(default_factory=list)
    huffman: HuffmanTree | None = None
    noise_table: UnigramTable | None = None
    _unit_cache: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def dims(self) -> int:
        return self.input_vectors.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, term: str) -> bool:
        return term in self.vocab.index

    def vector(self, term: str) -> np.ndarray:
        i = self.vocab.index.get(term)
        if i is None:
            raise OovError(term)
        return self.input_vectors[i]

    def unit_vector(self, term: str) -> np.ndarray:
        """Unit-normalized word vector as float64; zero rows stay zero."""
        v = np.asarray(self.vector(term), dtype=np.float64)
        n = float(np.linalg.norm(v))
        return v / n if n > 0 else v.copy()

    def unit_rows(self) -> np.ndarray:
        """All rows unit-normalized (cached until the model trains again)."""
        if self._unit_cache is None:
            norms = np.linalg.norm(self.input_vectors, axis=1)
            safe = np.where(norms > 0, norms, 1.0)
            self._unit_cache = self.input_vectors / safe[:, None]
        return self._unit_cache

    def invalidate_caches(self) -> None:
        self._unit_cache = None

    def most_similar(self, positives, negatives=(), topn: int = 10, exclude=()) -> list[tuple[str, float]]:
        """Rank vocabulary terms by cosine against a composed query vector.

        The query is the sum of unit vectors of ``positives`` minus unit
        vectors of ``negatives``.  Ties are broken by vocabulary order and
        excluded terms are never returned.
        """
        if isinstance(positives, str):
            positives = [positives]
        if isinstance(negatives, str):
            negatives = [negatives]
        if topn < 0:
            raise ConfigError(f"topn must be >= 0, got {topn}")
        if topn == 0:
            return []
        query = np.zeros(self.dims, dtype=np.float64)
        for t in positives:
            query += self.unit_vector(t)
        for t in negatives:
            query -= self.unit_vector(t)
        qn = float(np.linalg.norm(query))
        if qn == 0.0:
            raise ValueError("query vector is zero; cosine ranking is undefined")
        q = (query / qn).astype(self.input_vectors.dtype)
        sims = self.unit_rows() @ q
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


def cosine(v1, v2) -> float:
    """Cosine similarity of two vectors; zero vectors are a domain error."""
    a = np.asarray(v1, dtype=np.float64)
    b = np.asarray(v2, dtype=np.float64)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine is undefined for a zero vector")
    return float(np.dot(a, b) / (na * nb))


def _logsig(x):
    # log sigma(x), stable for large |x|
    return -np.logaddexp(0.0, -x)


def _draw_noise(table: UnigramTable, rng: np.random.Generator, shape, targets):
    """Draw noise word indices, redrawing draws that hit their target.

    After 8 redraw rounds any draw still equal to its target is marked
    invalid and skipped by the caller.
    """
    noise = table.draw(rng, shape)
    bad = noise == targets
    for _ in range(8):
        nbad = int(bad.sum())
        if nbad == 0:
            break
        noise[bad] = table.draw(rng, nbad)
        bad = noise == targets
    return noise, ~bad


def _step_sg_ns(inp, out, table, k, center, ctx, lr, rng):
    m = ctx.size
    targets = ctx.reshape(m, 1)
    noise, valid = _draw_noise(table, rng, (m, k), targets)
    idx = np.concatenate([targets, noise], axis=1).ravel()
    v = inp[center]
    u = out[idx]
    x = u @ v
    labels = np.zeros((m, k + 1), dtype=x.dtype)
    labels[:, 0] = 1.0
    labels = labels.ravel()
    validf = np.empty((m, k + 1), dtype=x.dtype)
    validf[:, 0] = 1.0
    validf[:, 1:] = valid
    validf = validf.ravel()
    sign = 2.0 * labels - 1.0
    loss = -float(np.sum(validf * _logsig(sign * x)))
    g = (labels - expit(x)) * validf * lr
    delta_out = g[:, None] * v[None, :]
    grad_v = g @ u
    np.add.at(out, idx, delta_out)
    inp[center] += grad_v
    return loss


def _step_cbow_ns(inp, out, table, k, center, ctx, lr, rng):
    m = ctx.size
    h = inp[ctx].mean(axis=0)
    noise, valid = _draw_noise(table, rng, k, center)
    idx = np.empty(k + 1, dtype=np.int64)
    idx[0] = center
    idx[1:] = noise
    u = out[idx]
    x = u @ h
    labels = np.zeros(k + 1, dtype=x.dtype)
    labels[0] = 1.0
    validf = np.empty(k + 1, dtype=x.dtype)
    validf[0] = 1.0
    validf[1:] = valid
    sign = 2.0 * labels - 1.0
    loss = -float(np.sum(validf * _logsig(sign * x)))
    g = (labels - expit(x)) * validf * lr
    np.add.at(out, idx, g[:, None] * h[None, :])
    grad_h = (g @ u) / m
    np.add.at(inp, ctx, grad_h)
    return loss


def _step_sg_hs(inp, out, codes, points, center, ctx, lr):
    pts = np.concatenate([points[int(t)] for t in ctx])
    bits = np.concatenate([codes[int(t)] for t in ctx])
    v = inp[center]
    u = out[pts]
    x = u @ v
    labels = (1 - bits).astype(x.dtype)
    sign = 2.0 * labels - 1.0
    loss = -float(np.sum(_logsig(sign * x)))
    g = (labels - expit(x)) * lr
    delta_out = g[:, None] * v[None, :]
    grad_v = g @ u
    np.add.at(out, pts, delta_out)
    inp[center] += grad_v
    return loss


def _step_cbow_hs(inp, out, codes, points, center, ctx, lr):
    m = ctx.size
    h = inp[ctx].mean(axis=0)
    pts = points[int(center)]
    bits = codes[int(center)]
    u = out[pts]
    x = u @ h
    labels = (1 - bits).astype(x.dtype)
    sign = 2.0 * labels - 1.0
    loss = -float(np.sum(_logsig(sign * x)))
    g = (labels - expit(x)) * lr
    np.add.at(out, pts, g[:, None] * h[None, :])
    grad_h = (g @ u) / m
    np.add.at(inp, ctx, grad_h)
    return loss


def _ensure_tables(model: EmbeddingModel, loss: str) -> None:
    if loss == "ns" and model.noise_table is None:
        model.noise_table = build_unigram_table(model.vocab)
    if loss == "hs" and model.huffman is None:
        model.huffman = build_huffman(model.vocab)


def _make_stepper(model: EmbeddingModel, algorithm: str | None = None, loss: str | None = None):
    """Bind one (algorithm, loss) step function over the model's arrays."""
    cfg = model.config
    algorithm = algorithm or cfg.algorithm
    loss = loss or cfg.loss
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    if loss not in LOSSES:
        raise ConfigError(f"unknown loss {loss!r}")
    _ensure_tables(model, loss)
    inp = model.input_vectors
    out = model.output_vectors
    if loss == "ns":
        table = model.noise_table
        k = cfg.negative
        if algorithm == "skipgram":
            return lambda center, ctx, lr, rng: _step_sg_ns(inp, out, table, k, center, ctx, lr, rng)
        return lambda center, ctx, lr, rng: _step_cbow_ns(inp, out, table, k, center, ctx, lr, rng)
    codes = model.huffman.codes
    points = model.huffman.points
    if algorithm == "skipgram":
        return lambda center, ctx, lr, rng: _step_sg_hs(inp, out, codes, points, center, ctx, lr)
    return lambda center, ctx, lr, rng: _step_cbow_hs(inp, out, codes, points, center, ctx, lr)


def train_step(model: EmbeddingModel, center: int, context, lr: float,
               rng: np.random.Generator | None = None, *,
               algorithm: str | None = None, loss: str | None = None) -> float:
    """Run one SGD step and return the step loss at the pre-update weights.

    The update applied is exactly ``-lr`` times the analytic gradient of
    the returned loss, so ``lr=0`` evaluates the loss without changing the
    model.  ``rng`` drives the noise draws only.
    """
    size = len(model.vocab)
    center = int(center)
    ctx = np.asarray(list(context), dtype=np.int64)
    if not 0 <= center < size:
        raise ValueError(f"center index {center} out of range for vocabulary of {size}")
    if ctx.size and (ctx.min() < 0 or ctx.max() >= size):
        raise ValueError("context index out of range")
    if lr < 0:
        raise ValueError(f"learning rate must be >= 0, got {lr}")
    if rng is None:
        rng = np.random.default_rng(model.config.seed)
    step = _make_stepper(model, algorithm, loss)
    if ctx.size == 0:
        return 0.0
    model.invalidate_caches()
    return float(step(center, ctx, lr, rng))


def _init_model(vocab: Vocabulary, config: TrainingConfig, rng: np.random.Generator) -> EmbeddingModel:
    dtype = np.dtype(config.dtype)
    size, dims = len(vocab), config.dims
    inp = ((rng.random((size, dims)) - 0.5) / dims).astype(dtype)
    out = np.zeros((size, dims), dtype=dtype)
    return EmbeddingModel(vocab, inp, out, config)


def _train_unit(step, ids, window, fixed_window, keep, alpha_of, base, raw_len, rng):
    """Train every center position of one token-id sequence."""
    if keep is not None and ids.size:
        ids = ids[rng.random(ids.size) < keep[ids]]
    n = ids.size
    if n == 0:
        return 0.0, 0
    widths = None if fixed_window else rng.integers(1, window + 1, size=n)
    per_token = raw_len / n
    loss = 0.0
    centers = 0
    alpha = alpha_of(base)
    for pos in range(n):
        if pos % _ALPHA_REFRESH == 0:
            alpha = alpha_of(base + pos * per_token)
        b = window if widths is None else int(widths[pos])
        lo = pos - b
        if lo < 0:
            lo = 0
        ctx = np.concatenate((ids[lo:pos], ids[pos + 1:pos + b + 1]))
        if ctx.size == 0:
            continue
        loss += step(ids[pos], ctx, alpha, rng)
        centers += 1
    return loss, centers


def _train_corpus(model: EmbeddingModel, corpus: Corpus, *, epochs: int, alpha0: float,
                  alpha_min: float, workers: int, rng: np.random.Generator) -> None:
    cfg = model.config
    _ensure_tables(model, cfg.loss)
    index = model.vocab.index
    units = []
    raw_lens = []
    for sent in corpus.sentences:
        units.append(np.array([index[t] for t in sent if t in index], dtype=np.int64))
        raw_lens.append(len(sent))
    if cfg.cross_sentence_window:
        stream = np.concatenate(units) if units else np.empty(0, dtype=np.int64)
        units, raw_lens = [stream], [corpus.token_count]

    keep = None
    if cfg.subsample_t > 0:
        counts = model.vocab.counts_array()
        if model.vocab.total_tokens > 0 and counts.min() > 0:
            keep = np.array([subsample_keep_prob(int(c), model.vocab.total_tokens, cfg.subsample_t)
                             for c in counts])

    total_planned = max(1, epochs * corpus.token_count)
    span = alpha0 - alpha_min

    progress = {"tokens": 0}

    def alpha_of(tokens_done):
        frac = tokens_done / total_planned
        if frac > 1.0:
            frac = 1.0
        a = alpha0 - span * frac
        return a if a > alpha_min else alpha_min

    step = _make_stepper(model)

    if workers <= 1:
        for _ in range(epochs):
            ep_loss = 0.0
            ep_centers = 0
            for ids, raw in zip(units, raw_lens):
                base = progress["tokens"]
                loss, centers = _train_unit(step, ids, cfg.window, cfg.fixed_window,
                                            keep, alpha_of, base, raw, rng)
                ep_loss += loss
                ep_centers += centers
                progress["tokens"] = base + raw
            model.epoch_losses.append(ep_loss / ep_centers if ep_centers else 0.0)
    else:
        if cfg.cross_sentence_window and len(units) == 1:
            units = [u for u in np.array_split(units[0], workers) if u.size]
            share = corpus.token_count / max(1, len(units))
            raw_lens = [share] * len(units)
        worker_rngs = rng.spawn(workers)
        lock = threading.Lock()
        work = list(zip(units, raw_lens))
        for _ in range(epochs):
            partials = []

            def run_shard(shard, wrng, acc=partials):
                loss = 0.0
                centers = 0
                for ids, raw in shard:
                    with lock:
                        base = progress["tokens"]
                        progress["tokens"] = base + raw
                    l, c = _train_unit(step, ids, cfg.window, cfg.fixed_window,
                                       keep, alpha_of, base, raw, wrng)
                    loss += l
                    centers += c
                acc.append((loss, centers))

            threads = [threading.Thread(target=run_shard, args=(work[w::workers], worker_rngs[w]))
                       for w in range(workers)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            ep_loss = sum(l for l, _ in partials)
            ep_centers = sum(c for _, c in partials)
            model.epoch_losses.append(ep_loss / ep_centers if ep_centers else 0.0)

    model.trained_tokens += epochs * corpus.token_count
    model.invalidate_caches()


def train(corpus: Corpus, config: TrainingConfig) -> EmbeddingModel:
    """Train a fresh embedding model on a corpus.

    Input vectors start uniform in ``[-0.5/dims, +0.5/dims]``, output
    vectors start at zero, and the learning rate decays linearly from
    ``alpha0`` to ``alpha_min`` over ``epochs * token_count`` tokens.
    """
    if corpus.token_count == 0:
        raise ConfigError("cannot train on an empty corpus")
    vocab = build_vocab(corpus, config.min_count)
    if len(vocab) == 0:
        raise ConfigError(f"no corpus term occurs at least {config.min_count} times")
    rng = np.random.default_rng(config.seed)
    model = _init_model(vocab, config, rng)
    _train_corpus(model, corpus, epochs=config.epochs, alpha0=config.alpha0,
                  alpha_min=config.alpha_min, workers=config.workers, rng=rng)
    return model


# Architecture is fixed once a model exists; everything else may be overridden.
_FROZEN_ON_UPDATE = {"algorithm", "loss", "dtype"}


def update_model(model: EmbeddingModel, corpus: Corpus, **overrides) -> EmbeddingModel:
    """Continue training an existing model on additional text.

    New corpus terms that reach ``min_count`` join the vocabulary with
    randomly initialized input rows; existing rows carry over and keep
    training at the (possibly overridden) ``alpha0``.  Returns a new model;
    the input model is left untouched.
    """
    if "dims" in overrides:
        if overrides["dims"] != model.config.dims:
            raise FormatError(f"dims mismatch: model has {model.config.dims}, override asks {overrides['dims']}")
        overrides = {k: v for k, v in overrides.items() if k != "dims"}
    frozen = _FROZEN_ON_UPDATE & set(overrides)
    if frozen:
        raise ConfigError(f"cannot change {sorted(frozen)} when updating an existing model")
    unknown = set(overrides) - set(TrainingConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config overrides: {sorted(unknown)}")
    cfg = replace(model.config, **overrides)

    new_counts = Counter()
    for sent in corpus.sentences:
        new_counts.update(sent)
    merged = {t: c for t, c in model.vocab.entries}
    for t, c in new_counts.items():
        if t in merged:
            merged[t] += c
        elif c >= cfg.min_count:
            merged[t] = c
    entries = sorted(merged.items(), key=lambda tc: (-tc[1], tc[0]))
    vocab = Vocabulary(tuple(entries), {t: i for i, (t, _) in enumerate(entries)},
                       sum(c for _, c in entries), cfg.min_count)

    rng = np.random.default_rng([cfg.seed, model.trained_tokens, len(vocab)])
    dtype = model.input_vectors.dtype
    size, dims = len(vocab), model.config.dims
    inp = ((rng.random((size, dims)) - 0.5) / dims).astype(dtype)
    out = np.zeros((size, dims), dtype=dtype)
    old_index = model.vocab.index
    for t, i_new in vocab.index.items():
        i_old = old_index.get(t)
        if i_old is not None:
            inp[i_new] = model.input_vectors[i_old]
            out[i_new] = model.output_vectors[i_old]

    updated = EmbeddingModel(vocab, inp, out, cfg, trained_tokens=model.trained_tokens,
                             epoch_losses=list(model.epoch_losses))
    if corpus.token_count > 0:
        _train_corpus(updated, corpus, epochs=cfg.epochs, alpha0=cfg.alpha0,
                      alpha_min=cfg.alpha_min, workers=cfg.workers, rng=rng)
    return updated


def save_text(model: EmbeddingModel, path: str) -> None:
    """Write input vectors in the interchange text format.

    First line is ``<vocab-size> <dims>``; each following line is the term
    and its vector with 6 significant digits.  UTF-8, LF line endings.
    """
    size, dims = model.input_vectors.shape
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{size} {dims}\n")
        for i, (term, _) in enumerate(model.vocab.entries):
            row = model.input_vectors[i].tolist()
            fh.write(term)
            for x in row:
                fh.write(" ")
                fh.write(format(x, ".6g"))
            fh.write("\n")


def load_text(path: str) -> EmbeddingModel:
    """Read a text vector file into a query-ready model view.

    The view keeps file order, has zero counts (the file carries none) and
    zero output vectors; it supports similarity queries and can serve as
    the base of :func:`update_model`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise FormatError(f"{path}: line 1: expected '<vocab-size> <dims>' header")
        try:
            size, dims = int(header[0]), int(header[1])
        except ValueError as exc:
            raise FormatError(f"{path}: line 1: non-numeric header field") from exc
        if size < 1 or dims < 1:
            raise FormatError(f"{path}: line 1: header values must be positive")
        rows = np.empty((size, dims), dtype=np.float32)
        entries = []
        filled = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.split()
            if filled >= size:
                raise FormatError(f"{path}: line {lineno}: more rows than the header declares ({size})")
            if len(fields) != dims + 1:
                raise FormatError(f"{path}: line {lineno}: expected a term plus {dims} values, got {len(fields) - 1}")
            try:
                rows[filled] = [float(x) for x in fields[1:]]
            except ValueError as exc:
                raise FormatError(f"{path}: line {lineno}: non-numeric vector component") from exc
            entries.append((fields[0], 0))
            filled += 1
    if filled != size:
        raise FormatError(f"{path}: header declares {size} rows, file has {filled}")
    vocab = Vocabulary.from_ordered_entries(entries, min_count=0)
    config = TrainingConfig(dims=dims)
    return EmbeddingModel(vocab, rows, np.zeros_like(rows), config)


def save_binary(model: EmbeddingModel, path: str) -> None:
    """Write the full model (both matrices, counts, config) compactly.

    Layout: magic, little-endian uint32 header length, UTF-8 JSON header,
    then the input and output matrices as little-endian float32, row-major.
    """
    header = {
        "dims": int(model.input_vectors.shape[1]),
        "vocab": [[t, int(c)] for t, c in model.vocab.entries],
        "vocab_min_count": model.vocab.min_count,
        "config": asdict(model.config),
        "trained_tokens": int(model.trained_tokens),
        "epoch_losses": [float(x) for x in model.epoch_losses],
    }
    payload = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_BINARY_MAGIC)
        fh.write(struct.pack("<I", len(payload)))
        fh.write(payload)
        fh.write(np.ascontiguousarray(model.input_vectors, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(model.output_vectors, dtype="<f4").tobytes())


def load_binary(path: str) -> EmbeddingModel:
    """Read a model written by :func:`save_binary`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_BINARY_MAGIC))
        if magic != _BINARY_MAGIC:
            raise FormatError(f"{path}: not a binary embedding model (bad magic)")
        (hlen,) = struct.unpack("<I", fh.read(4))
        try:
            header = json.loads(fh.read(hlen).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"{path}: corrupt model header") from exc
        dims = header["dims"]
        entries = [(t, int(c)) for t, c in header["vocab"]]
        size = len(entries)
        want = size * dims * 4
        raw_in = fh.read(want)
        raw_out = fh.read(want)
        if len(raw_in) != want or len(raw_out) != want:
            raise FormatError(f"{path}: truncated matrix data")
    vocab = Vocabulary.from_ordered_entries(entries, min_count=header.get("vocab_min_count", 0))
    config = TrainingConfig(**header["config"])
    inp = np.frombuffer(raw_in, dtype="<f4").reshape(size, dims).astype(np.dtype(config.dtype))
    out = np.frombuffer(raw_out, dtype="<f4").reshape(size, dims).astype(np.dtype(config.dtype))
    return EmbeddingModel(vocab, inp, out, config,
                          trained_tokens=header.get("trained_tokens", 0),
                          epoch_losses=list(header.get("epoch_losses", [])))
