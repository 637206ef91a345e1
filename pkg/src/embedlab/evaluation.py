"""Evaluators for analogy and word-intrusion tasks.

Both evaluators speak to models through a minimal similarity contract
(``in``, ``unit_vector``, ``most_similar``), so dense embedding models and
sparse PPMI models run through the identical code path.  Questions with
out-of-vocabulary terms are skipped and reported, never counted as wrong.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .corpus import Vocabulary
from .datasets import AnalogyQuestion, IntrusionQuestion
from .errors import ConfigError

log = logging.getLogger(__name__)

RANDOM_INTRUSION_BASELINE = 0.25

# Inclusive upper edges of frequency bins 1..5; bin 6 is open-ended.
FREQUENCY_BIN_UPPER = (20, 50, 100, 500, 1000)
FREQUENCY_BIN_COUNT = 6


class AnalogyMethod(enum.Enum):
    """Query composition strategies for solving a:a* :: b:?."""

    OFFSET = "offset"
    ONLY_B = "only-b"
    IGNORE_A = "ignore-a"


@dataclass
class QuestionRecord:
    """Outcome of one evaluated question."""

    section: str
    difficulty: int
    terms: tuple[str, ...]
    gold: str
    predicted: str | None
    correct: bool
    skipped: bool
    tied: bool = False


@dataclass
class GroupStats:
    attempted: int = 0
    correct: int = 0
    skipped: int = 0

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.attempted if self.attempted else None


@dataclass
class EvalReport:
    """Per-question outcomes plus aggregate views."""

    model_id: str
    task: str
    records: list[QuestionRecord]
    metadata: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.records)

    @property
    def skipped(self) -> int:
        return sum(r.skipped for r in self.records)

    @property
    def attempted(self) -> int:
        return self.size - self.skipped

    @property
    def correct(self) -> int:
        return sum(r.correct for r in self.records)

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.attempted if self.attempted else None

    def _group(self, key) -> dict:
        groups: dict = {}
        for r in self.records:
            stats = groups.setdefault(key(r), GroupStats())
            if r.skipped:
                stats.skipped += 1
            else:
                stats.attempted += 1
                stats.correct += r.correct
        return groups

    def by_section(self) -> dict[str, GroupStats]:
        return self._group(lambda r: r.section)

    def by_difficulty(self) -> dict[int, GroupStats]:
        return dict(sorted(self._group(lambda r: r.difficulty).items()))


def _resolve(model, term: str, case_insensitive: bool) -> str | None:
    if term in model:
        return term
    if case_insensitive:
        low = term.lower()
        if low in model:
            return low
    return None


def _matches(predicted: str, gold: str, case_insensitive: bool) -> bool:
    if case_insensitive:
        return predicted.lower() == gold.lower()
    return predicted == gold


def _solve_resolved(model, a: str, a_star: str, b: str, method: AnalogyMethod) -> str | None:
    exclude = {a, a_star, b}
    if method == AnalogyMethod.OFFSET:
        positives, negatives = [a_star, b], [a]
    elif method == AnalogyMethod.ONLY_B:
        positives, negatives = [b], []
    elif method == AnalogyMethod.IGNORE_A:
        positives, negatives = [a_star, b], []
    else:
        raise ConfigError(f"unknown analogy method: {method!r}")
    hits = model.most_similar(positives, negatives, topn=1, exclude=exclude)
    return hits[0][0] if hits else None


def solve_analogy(model, question: AnalogyQuestion, method: AnalogyMethod = AnalogyMethod.OFFSET,
                  case_insensitive: bool = False) -> str | None:
    """Predict b_star for one question; None when an input term is missing."""
    a = _resolve(model, question.a, case_insensitive)
    a_star = _resolve(model, question.a_star, case_insensitive)
    b = _resolve(model, question.b, case_insensitive)
    if a is None or a_star is None or b is None:
        return None
    return _solve_resolved(model, a, a_star, b, method)


def eval_analogies(model, questions, method: AnalogyMethod = AnalogyMethod.OFFSET, *,
                   case_insensitive: bool = False, model_id: str = "") -> EvalReport:
    """Evaluate analogy questions; a question with any unknown term is skipped."""
    records = []
    for q in questions:
        resolved = [_resolve(model, t, case_insensitive) for t in (q.a, q.a_star, q.b, q.b_star)]
        shown = (q.a, q.a_star, q.b)
        if any(r is None for r in resolved):
            records.append(QuestionRecord(q.section, 0, shown, q.b_star, None, False, True))
            continue
        predicted = _solve_resolved(model, resolved[0], resolved[1], resolved[2], method)
        correct = predicted is not None and _matches(predicted, q.b_star, case_insensitive)
        records.append(QuestionRecord(q.section, 0, shown, q.b_star, predicted, correct, False))
    metadata = {"method": method.value, "case_insensitive": case_insensitive}
    return EvalReport(model_id, "analogies", records, metadata)


def _intruder_index(vectors: list[np.ndarray]) -> tuple[int, bool]:
    # The outlier is the term least similar to the mean of the unit vectors.
    m = np.stack(vectors)
    mean = m.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        sims = np.zeros(len(vectors))
    else:
        sims = m @ (mean / norm)
    pick = int(np.argmin(sims))
    tied = int(np.sum(sims == sims[pick])) > 1
    return pick, tied


def find_intruder(model, terms, case_insensitive: bool = False) -> str | None:
    """Pick the term least similar to the mean of the terms' unit vectors.

    Returns None when any term is out of vocabulary.  Exact similarity ties
    go to the earliest position.
    """
    terms = tuple(terms)
    if len(terms) < 2:
        raise ConfigError(f"need at least 2 terms, got {len(terms)}")
    resolved = [_resolve(model, t, case_insensitive) for t in terms]
    if any(r is None for r in resolved):
        return None
    pick, _ = _intruder_index([model.unit_vector(t) for t in resolved])
    return terms[pick]


def eval_intrusion(model, questions, *, case_insensitive: bool = False, model_id: str = "") -> EvalReport:
    """Evaluate intrusion questions and flag degenerate (all-ties) models."""
    records = []
    ties = 0
    for q in questions:
        resolved = [_resolve(model, t, case_insensitive) for t in q.terms]
        if any(r is None for r in resolved):
            records.append(QuestionRecord(q.section, q.difficulty, q.terms, q.outlier, None, False, True))
            continue
        pick, tied = _intruder_index([model.unit_vector(t) for t in resolved])
        predicted = q.terms[pick]
        ties += tied
        correct = _matches(predicted, q.outlier, case_insensitive)
        records.append(QuestionRecord(q.section, q.difficulty, q.terms, q.outlier, predicted, correct, False, tied))
    attempted = sum(not r.skipped for r in records)
    metadata = {
        "random_baseline": RANDOM_INTRUSION_BASELINE,
        "ties": ties,
        "degenerate_model": attempted > 0 and ties * 2 >= attempted,
        "case_insensitive": case_insensitive,
    }
    return EvalReport(model_id, "intrusion", records, metadata)


def frequency_bin(count) -> int:
    """Map a term frequency to bins 1..6 with edges 20/50/100/500/1000."""
    if count < 0:
        raise ValueError(f"frequency must be >= 0, got {count}")
    for i, upper in enumerate(FREQUENCY_BIN_UPPER, start=1):
        if count <= upper:
            return i
    return FREQUENCY_BIN_COUNT


@dataclass
class BinStats:
    questions: int = 0
    correct: int = 0

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.questions if self.questions else None


@dataclass
class FrequencyAnalysis:
    """Accuracy by frequency bin, three ways of assigning a question a bin."""

    tables: dict[str, dict[int, BinStats]]
    missing_terms: int = 0


def frequency_analysis(report: EvalReport, vocab: Vocabulary) -> FrequencyAnalysis:
    """Split intrusion accuracy by term frequency.

    Three tables: by the average frequency of the four shown terms, by the
    gold outlier's frequency, and by the predicted outlier's frequency.
    Terms missing from the vocabulary count as frequency 0 (bin 1) and are
    reported via ``missing_terms``.
    """
    if report.task != "intrusion":
        raise ConfigError(f"frequency analysis needs an intrusion report, got task {report.task!r}")
    tables = {name: {b: BinStats() for b in range(1, FREQUENCY_BIN_COUNT + 1)}
              for name in ("average", "gold", "predicted")}
    missing = 0
    for r in report.records:
        if r.skipped or r.predicted is None:
            continue
        freqs = []
        for t in r.terms:
            if t not in vocab:
                missing += 1
            freqs.append(vocab.get_count(t))
        assignments = (
            ("average", sum(freqs) / len(freqs)),
            ("gold", vocab.get_count(r.gold)),
            ("predicted", vocab.get_count(r.predicted)),
        )
        for name, value in assignments:
            stats = tables[name][frequency_bin(value)]
            stats.questions += 1
            stats.correct += r.correct
    if missing:
        log.warning("%d intrusion terms missing from the vocabulary were binned as frequency 0", missing)
    return FrequencyAnalysis(tables, missing)


def _fmt_accuracy(value: float | None) -> str:
    return "n/a" if value is None else f"{100.0 * value:.2f}%"


def _emit_human(report: EvalReport) -> str:
    out = io.StringIO()
    out.write(f"model: {report.model_id or '(unnamed)'}  task: {report.task}\n")
    out.write(f"questions: {report.size}  attempted: {report.attempted}  "
              f"skipped: {report.skipped}  accuracy: {_fmt_accuracy(report.accuracy)}\n")
    if report.metadata.get("method"):
        out.write(f"method: {report.metadata['method']}\n")
    if report.metadata.get("degenerate_model"):
        out.write(f"warning: model looks degenerate ({report.metadata.get('ties', 0)} tied questions)\n")
    sections = report.by_section()
    if sections and any(name for name in sections):
        width = max(len(name) for name in sections)
        out.write(f"{'section'.ljust(width)}  attempted  correct  accuracy\n")
        for name, stats in sections.items():
            out.write(f"{name.ljust(width)}  {stats.attempted:9d}  {stats.correct:7d}  {_fmt_accuracy(stats.accuracy)}\n")
    difficulties = report.by_difficulty()
    if report.task == "intrusion" and any(level for level in difficulties):
        out.write("difficulty  attempted  correct  accuracy\n")
        for level, stats in difficulties.items():
            out.write(f"{level:10d}  {stats.attempted:9d}  {stats.correct:7d}  {_fmt_accuracy(stats.accuracy)}\n")
    return out.getvalue()


CSV_COLUMNS = ("section", "difficulty", "terms", "gold", "predicted", "correct", "skipped")


def _emit_csv(report: EvalReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.records:
        writer.writerow([r.section, r.difficulty, " ".join(r.terms), r.gold,
                         r.predicted or "", str(r.correct).lower(), str(r.skipped).lower()])
    return out.getvalue()


def _emit_jsonl(report: EvalReport) -> str:
    lines = [json.dumps({"kind": "meta", "model": report.model_id, "task": report.task,
                         "metadata": report.metadata}, ensure_ascii=False)]
    for r in report.records:
        lines.append(json.dumps({
            "kind": "question", "section": r.section, "difficulty": r.difficulty,
            "terms": list(r.terms), "gold": r.gold, "predicted": r.predicted,
            "correct": r.correct, "skipped": r.skipped, "tied": r.tied,
        }, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def emit_report(report: EvalReport, format: str = "human") -> str:
    """Render a report as a human table, per-question CSV, or JSON lines."""
    if format == "human":
        return _emit_human(report)
    if format == "csv":
        return _emit_csv(report)
    if format == "jsonl":
        return _emit_jsonl(report)
    raise ConfigError(f"unknown report format {format!r}, expected human, csv, or jsonl")


def parse_report_jsonl(text: str) -> EvalReport:
    """Rebuild an :class:`EvalReport` from its JSON-lines rendering."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ConfigError("empty report text")
    meta = json.loads(lines[0])
    if meta.get("kind") != "meta":
        raise ConfigError("report text must start with a meta line")
    records = []
    for line in lines[1:]:
        row = json.loads(line)
        records.append(QuestionRecord(row["section"], row["difficulty"], tuple(row["terms"]),
                                      row["gold"], row["predicted"], row["correct"],
                                      row["skipped"], row.get("tied", False)))
    return EvalReport(meta["model"], meta["task"], records, meta.get("metadata", {}))


def _stats_dict(stats) -> dict:
    return {"attempted": stats.attempted, "correct": stats.correct,
            "skipped": stats.skipped, "accuracy": stats.accuracy}


def summarize_report(report: EvalReport, frequency: FrequencyAnalysis | None = None) -> dict:
    """JSON-ready summary: totals, per-section, per-difficulty, per-bin."""
    summary = {
        "model": report.model_id,
        "task": report.task,
        "questions": report.size,
        "attempted": report.attempted,
        "skipped": report.skipped,
        "correct": report.correct,
        "accuracy": report.accuracy,
        "metadata": report.metadata,
        "sections": {name: _stats_dict(stats) for name, stats in report.by_section().items()},
        "difficulties": {str(level): _stats_dict(stats) for level, stats in report.by_difficulty().items()},
    }
    if frequency is not None:
        summary["frequency"] = {
            name: {str(b): {"questions": s.questions, "correct": s.correct, "accuracy": s.accuracy}
                   for b, s in table.items()}
            for name, table in frequency.tables.items()
        }
        summary["frequency"]["missing_terms"] = frequency.missing_terms
    return summary
