import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embedlab.datasets import (AnalogyQuestion, IntrusionQuestion,
                               IntrusionTriple, TaskDefinitions,
                               generate_analogy_questions,
                               generate_intrusion_questions,
                               parse_analogy_file, parse_definitions,
                               parse_intrusion_file, write_analogy_file,
                               write_intrusion_file)
from embedlab.errors import ConfigError, FormatError


def triple_with_outliers(name="t", terms=("x1", "x2", "x3")):
    outliers = {level: tuple(f"{name}_d{level}_{k}" for k in range(5))
                for level in (1, 2, 3, 4)}
    return IntrusionTriple(terms, outliers)


class TestQuestionTypes:
    def test_analogy_valid(self):
        q = AnalogyQuestion("Ned", "Catelyn", "Robert", "Cersei", section="husband-wife")
        assert q.b_star == "Cersei"

    def test_analogy_rejects_equal_pair(self):
        with pytest.raises(ConfigError):
            AnalogyQuestion("a", "a", "b", "c", section="s")
        with pytest.raises(ConfigError):
            AnalogyQuestion("a", "b", "c", "c", section="s")

    def test_analogy_rejects_empty_or_spaced_terms(self):
        with pytest.raises(ConfigError):
            AnalogyQuestion("", "b", "c", "d", section="s")
        with pytest.raises(ConfigError):
            AnalogyQuestion("a b", "b", "c", "d", section="s")

    def test_intrusion_valid(self):
        q = IntrusionQuestion(("Lannister", "Stark", "Theon", "Martell"), "Theon",
                              section="houses", difficulty=1)
        assert q.outlier == "Theon"

    def test_intrusion_outlier_must_be_among_terms(self):
        with pytest.raises(ConfigError):
            IntrusionQuestion(("a", "b", "c", "d"), "Jon", section="s", difficulty=1)

    def test_intrusion_outlier_exactly_once(self):
        with pytest.raises(ConfigError):
            IntrusionQuestion(("a", "a", "b", "c"), "a", section="s", difficulty=1)

    def test_intrusion_non_outlier_terms_distinct(self):
        with pytest.raises(ConfigError):
            IntrusionQuestion(("b", "b", "c", "a"), "a", section="s", difficulty=1)

    def test_intrusion_difficulty_range(self):
        with pytest.raises(ConfigError):
            IntrusionQuestion(("a", "b", "c", "d"), "a", section="s", difficulty=5)
        IntrusionQuestion(("a", "b", "c", "d"), "a", section="s", difficulty=0)

    def test_triple_needs_exact_outlier_groups(self):
        with pytest.raises(ConfigError):
            IntrusionTriple(("a", "b", "c"), {1: ("o1", "o2", "o3", "o4", "o5")})

    def test_triple_outlier_not_in_triple(self):
        outliers = {level: (f"d{level}_{k}" for k in range(5)) for level in (1, 2, 3, 4)}
        outliers = {k: tuple(v) for k, v in outliers.items()}
        bad = dict(outliers)
        bad[2] = ("a", "d2_1", "d2_2", "d2_3", "d2_4")
        with pytest.raises(ConfigError):
            IntrusionTriple(("a", "b", "c"), bad)


class TestAnalogyGeneration:
    def defs(self, pairs):
        return TaskDefinitions({"sec": pairs}, {})

    def test_three_pairs_give_six(self):
        qs = generate_analogy_questions(
            self.defs([("man", "woman"), ("king", "queen"), ("boy", "girl")]))
        assert len(qs) == 6
        combos = {(q.a, q.a_star, q.b, q.b_star) for q in qs}
        assert ("man", "woman", "king", "queen") in combos
        assert ("king", "queen", "man", "woman") in combos

    def test_two_pairs_give_both_orders(self):
        qs = generate_analogy_questions(self.defs([("up", "down"), ("in", "out")]))
        assert [(q.a, q.b) for q in qs] == [("up", "in"), ("in", "up")]

    def test_single_pair_section_rejected(self):
        with pytest.raises(ConfigError, match="sec"):
            generate_analogy_questions(self.defs([("a", "b")]))

    def test_sections_kept_separate(self):
        defs = TaskDefinitions(
            {"s1": [("a", "b"), ("c", "d")], "s2": [("e", "f"), ("g", "h"), ("i", "j")]}, {})
        qs = generate_analogy_questions(defs)
        by_section = {}
        for q in qs:
            by_section.setdefault(q.section, []).append(q)
        assert len(by_section["s1"]) == 2
        assert len(by_section["s2"]) == 6

    @given(st.integers(2, 12))
    def test_count_is_n_times_n_minus_one(self, n):
        pairs = [(f"a{i}", f"b{i}") for i in range(n)]
        qs = generate_analogy_questions(self.defs(pairs))
        assert len(qs) == n * (n - 1)
        assert len(set(qs)) == len(qs)


class TestIntrusionGeneration:
    def test_twenty_per_triple(self):
        defs = TaskDefinitions({}, {"sec": [triple_with_outliers()]})
        qs = generate_intrusion_questions(defs)
        assert len(qs) == 20

    def test_uniform_difficulty_histogram(self):
        defs = TaskDefinitions({}, {"sec": [triple_with_outliers()]})
        qs = generate_intrusion_questions(defs)
        per_level = {level: sum(1 for q in qs if q.difficulty == level)
                     for level in (1, 2, 3, 4)}
        assert per_level == {1: 5, 2: 5, 3: 5, 4: 5}

    def test_terms_are_triple_plus_outlier(self):
        defs = TaskDefinitions({}, {"sec": [triple_with_outliers(terms=("p", "q", "r"))]})
        for q in generate_intrusion_questions(defs):
            assert sorted(q.terms) == sorted(["p", "q", "r", q.outlier])

    def test_many_triples_scale(self):
        triples = [triple_with_outliers(name=f"t{i}", terms=(f"x{i}", f"y{i}", f"z{i}"))
                   for i in range(30)]
        defs = TaskDefinitions({}, {"sec": triples})
        assert len(generate_intrusion_questions(defs)) == 30 * 20

    def test_deterministic_across_calls(self):
        defs = TaskDefinitions({}, {"sec": [triple_with_outliers()]})
        assert generate_intrusion_questions(defs) == generate_intrusion_questions(defs)

    def test_outlier_position_varies(self):
        triples = [triple_with_outliers(name=f"t{i}", terms=(f"x{i}", f"y{i}", f"z{i}"))
                   for i in range(10)]
        defs = TaskDefinitions({}, {"sec": triples})
        qs = generate_intrusion_questions(defs)
        positions = {q.terms.index(q.outlier) for q in qs}
        assert len(positions) == 4

    def test_shuffle_depends_on_content(self):
        d1 = TaskDefinitions({}, {"sec": [triple_with_outliers(terms=("a", "b", "c"))]})
        d2 = TaskDefinitions({}, {"sec": [triple_with_outliers(terms=("a", "b", "d"))]})
        q1 = generate_intrusion_questions(d1)
        q2 = generate_intrusion_questions(d2)
        assert [q.terms for q in q1] != [q.terms for q in q2]


class TestAnalogyFiles:
    def test_write_format(self, tmp_path):
        qs = [AnalogyQuestion("Ned", "Catelyn", "Robert", "Cersei", section="husband-wife")]
        p = tmp_path / "a.txt"
        write_analogy_file(qs, str(p))
        assert p.read_text(encoding="utf-8") == \
            ": husband-wife\nNed Catelyn Robert Cersei\n"

    def test_parse_single(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text(": husband-wife\nNed Catelyn Robert Cersei\n", encoding="utf-8")
        qs = parse_analogy_file(str(p))
        assert len(qs) == 1
        assert qs[0].section == "husband-wife"
        assert qs[0].b_star == "Cersei"

    def test_empty_file(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text("", encoding="utf-8")
        assert parse_analogy_file(str(p)) == []

    def test_round_trip_byte_identical(self, tmp_path):
        defs = TaskDefinitions(
            {"s1": [(f"a{i}", f"b{i}") for i in range(5)],
             "s2": [(f"c{i}", f"d{i}") for i in range(4)]}, {})
        qs = generate_analogy_questions(defs)
        p1 = tmp_path / "a.txt"
        p2 = tmp_path / "a2.txt"
        write_analogy_file(qs, str(p1))
        back = parse_analogy_file(str(p1))
        assert back == qs
        write_analogy_file(back, str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_wrong_field_count(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text(": s\na b c\n", encoding="utf-8")
        with pytest.raises(FormatError, match="line 2"):
            parse_analogy_file(str(p))

    def test_question_before_header(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text("a b c d\n", encoding="utf-8")
        with pytest.raises(FormatError, match="line 1"):
            parse_analogy_file(str(p))

    def test_blank_lines_skipped(self, tmp_path):
        p = tmp_path / "a.txt"
        p.write_text(": s\n\na b c d\n\n", encoding="utf-8")
        assert len(parse_analogy_file(str(p))) == 1


class TestIntrusionFiles:
    def test_write_format(self, tmp_path):
        qs = [IntrusionQuestion(("Lannister", "Stark", "Theon", "Martell"), "Theon",
                                section="houses", difficulty=1)]
        p = tmp_path / "i.txt"
        write_intrusion_file(qs, str(p))
        assert p.read_text(encoding="utf-8") == \
            ": houses\nLannister Stark Theon Martell | Theon | 1\n"

    def test_difficulty_omitted_when_unlabeled(self, tmp_path):
        qs = [IntrusionQuestion(("a", "b", "c", "d"), "d", section="", difficulty=0)]
        p = tmp_path / "i.txt"
        write_intrusion_file(qs, str(p))
        assert p.read_text(encoding="utf-8") == "a b c d | d\n"

    def test_parse_with_and_without_difficulty(self, tmp_path):
        p = tmp_path / "i.txt"
        p.write_text("a b c d | d | 3\ne f g h | e\n", encoding="utf-8")
        qs = parse_intrusion_file(str(p))
        assert qs[0].difficulty == 3
        assert qs[1].difficulty == 0

    def test_round_trip_byte_identical(self, tmp_path):
        triples = [triple_with_outliers(name=f"t{i}", terms=(f"x{i}", f"y{i}", f"z{i}"))
                   for i in range(6)]
        defs = TaskDefinitions({}, {"s1": triples[:3], "s2": triples[3:]})
        qs = generate_intrusion_questions(defs)
        p1 = tmp_path / "i.txt"
        p2 = tmp_path / "i2.txt"
        write_intrusion_file(qs, str(p1))
        back = parse_intrusion_file(str(p1))
        assert back == qs
        write_intrusion_file(back, str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_outlier_not_among_terms_rejected(self, tmp_path):
        p = tmp_path / "i.txt"
        p.write_text("a b c d | Jon | 1\n", encoding="utf-8")
        with pytest.raises(FormatError, match="line 1"):
            parse_intrusion_file(str(p))

    def test_malformed_line(self, tmp_path):
        p = tmp_path / "i.txt"
        p.write_text("a b c | d | 1 | extra\n", encoding="utf-8")
        with pytest.raises(FormatError, match="line 1"):
            parse_intrusion_file(str(p))

    def test_three_terms_rejected(self, tmp_path):
        p = tmp_path / "i.txt"
        p.write_text("a b c | a\n", encoding="utf-8")
        with pytest.raises(FormatError, match="4 terms"):
            parse_intrusion_file(str(p))

    def test_non_numeric_difficulty(self, tmp_path):
        p = tmp_path / "i.txt"
        p.write_text("a b c d | a | hard\n", encoding="utf-8")
        with pytest.raises(FormatError, match="difficulty"):
            parse_intrusion_file(str(p))


GOOD_DEFINITIONS = """\
# analogy sections
[analogy gender]
man,woman
king,queen
boy,girl

[analogy capital]
paris,france
rome,italy

# intrusion sections
[intrusion animals]
triple: wolf, dog, cat
d1: table, chair, rock, car, book
d2: bird, fish, snake, horse, cow
d3: fox, bear, lion, tiger, deer
d4: puppy, kitten, hound, stray, pup
"""


class TestDefinitions:
    def test_parse_good_file(self, tmp_path):
        p = tmp_path / "defs.txt"
        p.write_text(GOOD_DEFINITIONS, encoding="utf-8")
        defs = parse_definitions(str(p))
        assert set(defs.analogy_sections) == {"gender", "capital"}
        assert len(defs.analogy_sections["gender"]) == 3
        assert set(defs.intrusion_sections) == {"animals"}
        triple = defs.intrusion_sections["animals"][0]
        assert triple.terms == ("wolf", "dog", "cat")
        assert triple.outliers[4] == ("puppy", "kitten", "hound", "stray", "pup")

    def test_end_to_end_generation(self, tmp_path):
        p = tmp_path / "defs.txt"
        p.write_text(GOOD_DEFINITIONS, encoding="utf-8")
        defs = parse_definitions(str(p))
        analogies = generate_analogy_questions(defs)
        intrusion = generate_intrusion_questions(defs)
        assert len(analogies) == 3 * 2 + 2 * 1
        assert len(intrusion) == 20

    def test_duplicate_section_rejected(self, tmp_path):
        p = tmp_path / "defs.txt"
        p.write_text("[analogy s]\na,b\n[analogy s]\nc,d\n", encoding="utf-8")
        with pytest.raises(FormatError, match="duplicate"):
            parse_definitions(str(p))

    def test_missing_difficulty_group(self, tmp_path):
        p = tmp_path / "defs.txt"
        p.write_text("[intrusion s]\ntriple: a, b, c\nd1: o1, o2, o3, o4, o5\n",
                     encoding="utf-8")
        with pytest.raises(FormatError, match="line 2"):
            parse_definitions(str(p))

    def test_wrong_outlier_count(self, tmp_path):
        p = tmp_path / "defs.txt"
        text = "[intrusion s]\ntriple: a, b, c\n" + \
            "".join(f"d{k}: o{k}1, o{k}2, o{k}3, o{k}4\n" for k in (1, 2, 3, 4))
        p.write_text(text, encoding="utf-8")
        with pytest.raises(FormatError):
            parse_definitions(str(p))

    def test_pair_line_outside_section(self, tmp_path):
        p = tmp_path / "defs.txt"
        p.write_text("a,b\n", encoding="utf-8")
        with pytest.raises(FormatError, match="line 1"):
            parse_definitions(str(p))

    def test_comments_and_blanks_ignored(self, tmp_path):
        p = tmp_path / "defs.txt"
        p.write_text("# comment\n\n[analogy s]\n# another\na,b\nc,d\n", encoding="utf-8")
        defs = parse_definitions(str(p))
        assert defs.analogy_sections["s"] == [("a", "b"), ("c", "d")]

    def test_empty_file(self, tmp_path):
        p = tmp_path / "defs.txt"
        p.write_text("", encoding="utf-8")
        defs = parse_definitions(str(p))
        assert defs.analogy_sections == {} and defs.intrusion_sections == {}
