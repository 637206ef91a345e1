"""Evaluation dataset types, generators, and file formats.

Analogy questions are built as all ordered pairs of distinct term pairs
inside a section, so a section with n pairs yields n*(n-1) questions.
Intrusion questions come from curated triples: four difficulty groups of
five outliers each give 20 questions per triple, with difficulty 1 the
hardest (outlier closely related to the triple) and 4 the easiest.  The
position of the outlier among the four shown terms is decided by a
content-derived seed, so regenerating a dataset is reproducible without
any global random state.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError, FormatError

DIFFICULTY_LEVELS = (1, 2, 3, 4)
OUTLIERS_PER_LEVEL = 5


@dataclass(frozen=True)
class AnalogyQuestion:
    """One proportional analogy: a is to a_star as b is to b_star."""

    a: str
    a_star: str
    b: str
    b_star: str
    section: str = ""

    def __post_init__(self):
        for t in (self.a, self.a_star, self.b, self.b_star):
            if not t or any(ch.isspace() for ch in t):
                raise ConfigError(f"bad analogy term: {t!r}")
        if self.a == self.a_star or self.b == self.b_star:
            raise ConfigError(f"analogy pair terms must differ: {self.a}/{self.a_star}, {self.b}/{self.b_star}")


@dataclass(frozen=True)
class IntrusionQuestion:
    """Four terms, one of which does not belong; difficulty 0 = unlabeled."""

    terms: tuple[str, str, str, str]
    outlier: str
    section: str = ""
    difficulty: int = 0

    def __post_init__(self):
        if len(self.terms) != 4:
            raise ConfigError(f"an intrusion question shows exactly 4 terms, got {len(self.terms)}")
        for t in self.terms:
            if not t or any(ch.isspace() for ch in t):
                raise ConfigError(f"bad intrusion term: {t!r}")
        if sum(t == self.outlier for t in self.terms) != 1:
            raise ConfigError(f"outlier {self.outlier!r} must appear exactly once among {self.terms}")
        rest = [t for t in self.terms if t != self.outlier]
        if len(set(rest)) != 3:
            raise ConfigError(f"non-outlier terms must be distinct, got {rest}")
        if self.difficulty not in (0, *DIFFICULTY_LEVELS):
            raise ConfigError(f"difficulty must be 0..4, got {self.difficulty}")


@dataclass(frozen=True)
class IntrusionTriple:
    """A curated in-group triple plus five candidate outliers per difficulty."""

    terms: tuple[str, str, str]
    outliers: dict[int, tuple[str, ...]]

    def __post_init__(self):
        if len(self.terms) != 3 or len(set(self.terms)) != 3:
            raise ConfigError(f"a triple needs 3 distinct terms, got {self.terms}")
        if set(self.outliers) != set(DIFFICULTY_LEVELS):
            raise ConfigError(f"outlier groups must cover difficulties {DIFFICULTY_LEVELS}")
        for level, group in self.outliers.items():
            if len(group) != OUTLIERS_PER_LEVEL:
                raise ConfigError(f"difficulty {level} needs {OUTLIERS_PER_LEVEL} outliers, got {len(group)}")
            for o in group:
                if o in self.terms:
                    raise ConfigError(f"outlier {o!r} also appears in the triple {self.terms}")


@dataclass
class TaskDefinitions:
    """Parsed dataset definitions keyed by section name."""

    analogy_sections: dict[str, list[tuple[str, str]]]
    intrusion_sections: dict[str, list[IntrusionTriple]]


def generate_analogy_questions(defs: TaskDefinitions) -> list[AnalogyQuestion]:
    """All ordered combinations of distinct pairs within each section."""
    questions = []
    for section, pairs in defs.analogy_sections.items():
        if len(pairs) < 2:
            raise ConfigError(f"analogy section {section!r} needs at least 2 pairs")
        for i, (a, a_star) in enumerate(pairs):
            for j, (b, b_star) in enumerate(pairs):
                if i == j:
                    continue
                questions.append(AnalogyQuestion(a, a_star, b, b_star, section))
    return questions


def _shuffled_terms(section: str, triple: Sequence[str], outlier: str) -> tuple[str, ...]:
    # The shown order must be stable across runs and processes, so the
    # shuffle is seeded from the question content, not global state.
    key = "\x00".join((section, *triple, outlier)).encode("utf-8")
    seed = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")
    terms = [*triple, outlier]
    random.Random(seed).shuffle(terms)
    return tuple(terms)


def generate_intrusion_questions(defs: TaskDefinitions) -> list[IntrusionQuestion]:
    """20 questions per triple: 4 difficulty groups of 5 outliers each."""
    questions = []
    for section, triples in defs.intrusion_sections.items():
        for triple in triples:
            for level in DIFFICULTY_LEVELS:
                for outlier in triple.outliers[level]:
                    terms = _shuffled_terms(section, triple.terms, outlier)
                    questions.append(IntrusionQuestion(terms, outlier, section, level))
    return questions


def write_analogy_file(questions: Iterable[AnalogyQuestion], path: str) -> None:
    """Write the analogy format: ``: section`` headers, 4 terms per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        current = None
        for q in questions:
            if q.section != current:
                fh.write(f": {q.section}\n")
                current = q.section
            fh.write(f"{q.a} {q.a_star} {q.b} {q.b_star}\n")


def parse_analogy_file(path: str) -> list[AnalogyQuestion]:
    """Read an analogy dataset file written by :func:`write_analogy_file`."""
    questions = []
    section = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith(":"):
                section = stripped[1:].strip()
                continue
            fields = stripped.split()
            if len(fields) != 4:
                raise FormatError(f"{path}: line {lineno}: expected 4 terms, got {len(fields)}")
            if section is None:
                raise FormatError(f"{path}: line {lineno}: question appears before any ': section' header")
            try:
                questions.append(AnalogyQuestion(*fields, section=section))
            except ConfigError as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from exc
    return questions


def write_intrusion_file(questions: Iterable[IntrusionQuestion], path: str) -> None:
    """Write the intrusion format: ``t1 t2 t3 t4 | outlier | difficulty``.

    The difficulty field is omitted for unlabeled (difficulty 0) questions
    and the leading section header is omitted for unlabeled sections, which
    keeps write/parse round trips byte-identical in both modes.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        current = None
        for q in questions:
            if q.section != current:
                if not (current is None and q.section == ""):
                    fh.write(f": {q.section}\n")
                current = q.section
            line = f"{' '.join(q.terms)} | {q.outlier}"
            if q.difficulty:
                line += f" | {q.difficulty}"
            fh.write(line + "\n")


def parse_intrusion_file(path: str) -> list[IntrusionQuestion]:
    """Read an intrusion dataset file.

    The difficulty field is optional (0 when absent), as are section
    headers: questions before any ``: section`` line get an empty section.
    """
    questions = []
    section = ""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith(":"):
                section = stripped[1:].strip()
                continue
            parts = [p.strip() for p in stripped.split("|")]
            if len(parts) not in (2, 3):
                raise FormatError(f"{path}: line {lineno}: expected 'terms | outlier' or 'terms | outlier | difficulty'")
            terms = tuple(parts[0].split())
            if len(terms) != 4:
                raise FormatError(f"{path}: line {lineno}: expected 4 terms before '|', got {len(terms)}")
            outlier_field = parts[1].split()
            if len(outlier_field) != 1:
                raise FormatError(f"{path}: line {lineno}: expected a single outlier term")
            difficulty = 0
            if len(parts) == 3:
                try:
                    difficulty = int(parts[2])
                except ValueError as exc:
                    raise FormatError(f"{path}: line {lineno}: non-numeric difficulty {parts[2]!r}") from exc
            try:
                questions.append(IntrusionQuestion(terms, outlier_field[0], section=section, difficulty=difficulty))
            except ConfigError as exc:
                raise FormatError(f"{path}: line {lineno}: {exc}") from exc
    return questions


def _split_csv_terms(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_definitions(path: str) -> TaskDefinitions:
    """Parse a dataset definition file.

    ``[analogy <section>]`` blocks hold one ``term1,term2`` pair per line.
    ``[intrusion <section>]`` blocks hold ``triple: t1,t2,t3`` lines, each
    followed by ``d1:`` through ``d4:`` outlier lists of five terms.
    Blank lines and ``#`` comments are ignored.
    """
    analogy: dict[str, list[tuple[str, str]]] = {}
    intrusion: dict[str, list[IntrusionTriple]] = {}
    mode = None
    section = None
    pending_terms: tuple[str, str, str] | None = None
    pending_outliers: dict[int, tuple[str, ...]] = {}
    pending_line = 0

    def flush_triple(lineno):
        nonlocal pending_terms, pending_outliers
        if pending_terms is None:
            return
        missing = [l for l in DIFFICULTY_LEVELS if l not in pending_outliers]
        if missing:
            raise FormatError(f"{path}: line {lineno}: triple started at line {pending_line} "
                              f"is missing difficulty groups {missing}")
        try:
            intrusion[section].append(IntrusionTriple(pending_terms, dict(pending_outliers)))
        except ConfigError as exc:
            raise FormatError(f"{path}: line {pending_line}: {exc}") from exc
        pending_terms = None
        pending_outliers = {}

    with open(path, "r", encoding="utf-8") as fh:
        lineno = 0
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if stripped.startswith("["):
                if not stripped.endswith("]"):
                    raise FormatError(f"{path}: line {lineno}: unterminated section header")
                header = stripped[1:-1].split(None, 1)
                if len(header) != 2 or header[0] not in ("analogy", "intrusion"):
                    raise FormatError(f"{path}: line {lineno}: expected '[analogy <section>]' or '[intrusion <section>]'")
                flush_triple(lineno)
                mode, section = header[0], header[1]
                target = analogy if mode == "analogy" else intrusion
                if section in target:
                    raise FormatError(f"{path}: line {lineno}: duplicate {mode} section {section!r}")
                target[section] = []
                continue
            if mode is None:
                raise FormatError(f"{path}: line {lineno}: content before any section header")
            if mode == "analogy":
                terms = _split_csv_terms(stripped)
                if len(terms) != 2:
                    raise FormatError(f"{path}: line {lineno}: expected 'term1,term2', got {len(terms)} terms")
                analogy[section].append((terms[0], terms[1]))
                continue
            # intrusion block
            if ":" not in stripped:
                raise FormatError(f"{path}: line {lineno}: expected 'triple:' or 'd1:'..'d4:' line")
            tag, _, rest = stripped.partition(":")
            tag = tag.strip()
            if tag == "triple":
                flush_triple(lineno)
                terms = _split_csv_terms(rest)
                if len(terms) != 3:
                    raise FormatError(f"{path}: line {lineno}: a triple needs 3 terms, got {len(terms)}")
                pending_terms = (terms[0], terms[1], terms[2])
                pending_line = lineno
            elif len(tag) == 2 and tag[0] == "d" and tag[1].isdigit():
                level = int(tag[1])
                if level not in DIFFICULTY_LEVELS:
                    raise FormatError(f"{path}: line {lineno}: difficulty must be d1..d4, got {tag!r}")
                if pending_terms is None:
                    raise FormatError(f"{path}: line {lineno}: outlier list before any 'triple:' line")
                if level in pending_outliers:
                    raise FormatError(f"{path}: line {lineno}: duplicate difficulty group d{level}")
                outliers = _split_csv_terms(rest)
                if len(outliers) != OUTLIERS_PER_LEVEL:
                    raise FormatError(f"{path}: line {lineno}: d{level} needs {OUTLIERS_PER_LEVEL} outliers, got {len(outliers)}")
                pending_outliers[level] = tuple(outliers)
            else:
                raise FormatError(f"{path}: line {lineno}: expected 'triple:' or 'd1:'..'d4:' line")
        flush_triple(lineno + 1)
    return TaskDefinitions(analogy, intrusion)
