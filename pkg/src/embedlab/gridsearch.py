"""Hyperparameter sweeps over training configurations.

Results stream to a CSV file one row per finished configuration, keyed by
a canonical config identifier, so an interrupted sweep resumes by skipping
identifiers already on disk.  A failed configuration is recorded with its
error and does not stop the sweep.
"""

from __future__ import annotations

import concurrent.futures
import csv
import os
import time
from dataclasses import dataclass, field

from .corpus import Corpus
from .datasets import AnalogyQuestion, IntrusionQuestion
from .embeddings import TrainingConfig, train
from .errors import ConfigError, FormatError
from .evaluation import AnalogyMethod, eval_analogies, eval_intrusion

CSV_COLUMNS = ("config", "algorithm", "dims", "window", "negative", "epochs", "seed",
               "status", "train_seconds", "analogy_accuracy", "intrusion_accuracy",
               "intrusion_d1", "intrusion_d2", "intrusion_d3", "intrusion_d4", "error")


@dataclass
class GridSpec:
    """Axes of a sweep; every combination is one negative-sampling config."""

    algorithms: tuple[str, ...] = ("skipgram", "cbow")
    dims: tuple[int, ...] = (100, 200, 300)
    windows: tuple[int, ...] = (1, 2, 3, 5, 7, 9, 11, 13, 15)
    negatives: tuple[int, ...] = (5, 10, 15)
    epochs: int = 5
    seed: int = 1
    min_count: int = 5
    subsample_t: float = 1e-3

    def __post_init__(self):
        for name in ("algorithms", "dims", "windows", "negatives"):
            values = getattr(self, name)
            if not values:
                raise ConfigError(f"grid axis {name!r} must not be empty")
            setattr(self, name, tuple(values))

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown grid spec keys: {sorted(unknown)}")
        return cls(**data)


def config_id(config: TrainingConfig) -> str:
    """Canonical identifier: the swept parameters sorted by name."""
    parts = (("algorithm", config.algorithm), ("dims", config.dims),
             ("negative", config.negative), ("window", config.window))
    return ",".join(f"{k}={v}" for k, v in parts)


def expand_grid(spec: GridSpec) -> list[TrainingConfig]:
    """All axis combinations in deterministic lexicographic order."""
    configs = []
    for algorithm in spec.algorithms:
        for dims in spec.dims:
            for window in spec.windows:
                for negative in spec.negatives:
                    configs.append(TrainingConfig(
                        dims=dims, algorithm=algorithm, loss="ns", negative=negative,
                        window=window, epochs=spec.epochs, seed=spec.seed,
                        min_count=spec.min_count, subsample_t=spec.subsample_t))
    ids = [config_id(c) for c in configs]
    if len(set(ids)) != len(ids):
        raise ConfigError("grid axes contain duplicate values")
    return configs


@dataclass
class GridResult:
    """One row of the sweep results table."""

    config_id: str
    algorithm: str
    dims: int
    window: int
    negative: int
    epochs: int
    seed: int
    status: str = "ok"
    train_seconds: float = 0.0
    analogy_accuracy: float | None = None
    intrusion_accuracy: float | None = None
    intrusion_by_difficulty: dict[int, float | None] = field(default_factory=dict)
    error: str = ""


def _result_row(r: GridResult) -> list:
    def cell(value):
        return "" if value is None else repr(value) if isinstance(value, float) else str(value)
    diffs = [r.intrusion_by_difficulty.get(level) for level in (1, 2, 3, 4)]
    return [r.config_id, r.algorithm, r.dims, r.window, r.negative, r.epochs, r.seed,
            r.status, repr(r.train_seconds), cell(r.analogy_accuracy), cell(r.intrusion_accuracy),
            *[cell(d) for d in diffs], r.error]


def read_results(path: str) -> list[GridResult]:
    """Read a results CSV back into :class:`GridResult` rows."""
    results = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        if tuple(header) != CSV_COLUMNS:
            raise FormatError(f"{path}: unexpected results header {header}")
        for row in reader:
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise FormatError(f"{path}: ragged results row: {row!r}")
            diffs = {level: (float(row[10 + level]) if row[10 + level] else None) for level in (1, 2, 3, 4)}
            results.append(GridResult(
                config_id=row[0], algorithm=row[1], dims=int(row[2]), window=int(row[3]),
                negative=int(row[4]), epochs=int(row[5]), seed=int(row[6]), status=row[7],
                train_seconds=float(row[8]) if row[8] else 0.0,
                analogy_accuracy=float(row[9]) if row[9] else None,
                intrusion_accuracy=float(row[10]) if row[10] else None,
                intrusion_by_difficulty=diffs, error=row[15]))
    return results


def evaluate_config(corpus: Corpus, config: TrainingConfig,
                    analogy_questions: list[AnalogyQuestion] | None,
                    intrusion_questions: list[IntrusionQuestion] | None,
                    analogy_method: AnalogyMethod = AnalogyMethod.OFFSET) -> GridResult:
    """Train one configuration and evaluate it on the given datasets."""
    result = GridResult(config_id(config), config.algorithm, config.dims,
                        config.window, config.negative, config.epochs, config.seed)
    start = time.perf_counter()
    try:
        model = train(corpus, config)
        if analogy_questions:
            report = eval_analogies(model, analogy_questions, analogy_method)
            result.analogy_accuracy = report.accuracy
        if intrusion_questions:
            report = eval_intrusion(model, intrusion_questions)
            result.intrusion_accuracy = report.accuracy
            result.intrusion_by_difficulty = {
                level: stats.accuracy for level, stats in report.by_difficulty().items()
                if level in (1, 2, 3, 4)}
    except Exception as exc:
        result.status = "error"
        result.error = f"{type(exc).__name__}: {exc}"
    result.train_seconds = time.perf_counter() - start
    return result


_POOL: dict = {}


def _pool_init(corpus, analogies, intrusion, method):
    _POOL["args"] = (corpus, analogies, intrusion, method)


def _pool_run(config):
    corpus, analogies, intrusion, method = _POOL["args"]
    return evaluate_config(corpus, config, analogies, intrusion, method)


def run_grid(corpus: Corpus, spec: GridSpec, output_path: str,
             analogy_questions: list[AnalogyQuestion] | None = None,
             intrusion_questions: list[IntrusionQuestion] | None = None, *,
             workers: int = 1, analogy_method: AnalogyMethod = AnalogyMethod.OFFSET) -> list[GridResult]:
    """Run (or resume) a sweep, appending one CSV row per configuration.

    Rows already in ``output_path`` are skipped by config identifier.  With
    ``workers > 1`` configurations run in separate processes, each training
    single-worker; rows are then appended in completion order.
    """
    configs = expand_grid(spec)
    done: set[str] = set()
    if os.path.exists(output_path):
        done = {r.config_id for r in read_results(output_path)}
    pending = [c for c in configs if config_id(c) not in done]

    new_file = not os.path.exists(output_path) or os.path.getsize(output_path) == 0
    with open(output_path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if new_file:
            writer.writerow(CSV_COLUMNS)
            fh.flush()

        def record(result: GridResult):
            writer.writerow(_result_row(result))
            fh.flush()
            os.fsync(fh.fileno())

        if workers <= 1 or len(pending) <= 1:
            for config in pending:
                record(evaluate_config(corpus, config, analogy_questions,
                                       intrusion_questions, analogy_method))
        else:
            with concurrent.futures.ProcessPoolExecutor(
                    max_workers=workers, initializer=_pool_init,
                    initargs=(corpus, analogy_questions, intrusion_questions, analogy_method)) as pool:
                futures = [pool.submit(_pool_run, config) for config in pending]
                for fut in concurrent.futures.as_completed(futures):
                    record(fut.result())
    return read_results(output_path)


def _metric_summary(values: list[float]) -> dict:
    return {"count": len(values), "mean": sum(values) / len(values),
            "min": min(values), "max": max(values)}


def summarize_grid(results: list[GridResult]) -> dict:
    """Per-parameter-value summary statistics over completed rows."""
    axes = {"algorithm": lambda r: r.algorithm, "dims": lambda r: r.dims,
            "window": lambda r: r.window, "negative": lambda r: r.negative}
    by_parameter: dict = {}
    ok = [r for r in results if r.status == "ok"]
    for axis, key in axes.items():
        groups: dict = {}
        for r in ok:
            groups.setdefault(str(key(r)), []).append(r)
        axis_summary = {}
        for value, rows in sorted(groups.items()):
            entry = {}
            analogy = [r.analogy_accuracy for r in rows if r.analogy_accuracy is not None]
            intrusion = [r.intrusion_accuracy for r in rows if r.intrusion_accuracy is not None]
            if analogy:
                entry["analogy_accuracy"] = _metric_summary(analogy)
            if intrusion:
                entry["intrusion_accuracy"] = _metric_summary(intrusion)
            axis_summary[value] = entry
        by_parameter[axis] = axis_summary
    return {"configs": len(results), "completed": len(ok),
            "failed": len(results) - len(ok), "by_parameter": by_parameter}
