from __future__ import annotations

import pathlib
import random
import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from afloop.deps import DepGraph, DepRecord, build_graph, compute_recadmit
from afloop.ledger import BackupEntry
from afloop.parser import parse_items, resolve_boundary
from afloop.reports import (
    SectionLevel,
    format_deps_line,
    format_progress_line,
    growth_csv,
    growth_table,
    major_theorems,
    parse_deps_line,
    section_progress,
    write_deps_file,
    write_progress_file,
)

DATA = pathlib.Path(__file__).parent / "data"


def record(name, kind="T", lines=1, admit=False, recadmit=False, deps=()):
    return DepRecord(
        name=name,
        kind_letter=kind,
        lines=lines,
        direct_admit=admit,
        deps=list(deps),
        recadmit=recadmit,
    )


def graph_from_records(records):
    return DepGraph(records={r.name: r for r in records}, region_names={r.name for r in records})


def entry(number, lines):
    return BackupEntry(
        number=number,
        file_name=f"bck{number}",
        line_count=lines,
        created_at=time.time(),
        changes_note="",
        justified_shrink=False,
    )


class TestDepsLineFormat:
    def test_reference_line_byte_for_byte(self):
        rec = record(
            "topology_elem_subset",
            lines=12,
            deps=[("topology_on", "D"), ("topology_sub_Power", "T")],
        )
        assert (
            format_deps_line(rec)
            == "topology_elem_subset: lines:12, admit:NO, recadmit:NO, "
            "deps(2):[topology_on:D,topology_sub_Power:T]."
        )

    def test_empty_deps(self):
        rec = record("x", lines=3, admit=True, recadmit=True)
        assert format_deps_line(rec) == "x: lines:3, admit:YES, recadmit:YES, deps(0):[]."

    def test_round_trip_1000_random_records(self):
        rng = random.Random(42)
        for _ in range(1000):
            deps = [
                (f"dep_{rng.randint(0, 50)}_{i}", rng.choice("DT"))
                for i in range(rng.randint(0, 6))
            ]
            admit = rng.random() < 0.3
            rec = record(
                f"name_{rng.randint(0, 10**6)}",
                lines=rng.randint(0, 20000),
                admit=admit,
                recadmit=admit or rng.random() < 0.3,
                deps=deps,
            )
            assert parse_deps_line(format_deps_line(rec)) == rec

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_deps_line("not a deps line")

    def test_arity_always_matches_list_length(self):
        for k in range(5):
            rec = record("n", deps=[(f"d{i}", "T") for i in range(k)])
            line = format_deps_line(rec)
            assert f"deps({k}):" in line
            assert parse_deps_line(line).deps == rec.deps


class TestDepsFile:
    def test_three_record_file(self, tmp_path):
        graph = graph_from_records([record("a"), record("b"), record("c")])
        path = write_deps_file(graph, 1107, tmp_path)
        assert path.name == "DEPS1107"
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        assert path.read_text().endswith("\n")

    def test_empty_region_still_creates_file(self, tmp_path):
        path = write_deps_file(DepGraph(), 3, tmp_path)
        assert path.read_text() == ""

    def test_refuses_overwrite(self, tmp_path):
        write_deps_file(DepGraph(), 5, tmp_path)
        with pytest.raises(FileExistsError):
            write_deps_file(DepGraph(), 5, tmp_path)

    def test_twelve_item_corpus_matches_golden(self, tmp_path):
        text = (DATA / "corpus12.mg").read_text()
        items = parse_items(text)
        graph = build_graph(items, resolve_boundary(text, "Section Topology."))
        compute_recadmit(graph)
        path = write_deps_file(graph, 1, tmp_path)
        assert path.read_bytes() == (DATA / "corpus12.deps.golden").read_bytes()


class TestSectionProgress:
    def build(self, text):
        items = parse_items(text)
        graph = build_graph(items, resolve_boundary(text, "Section Topology."))
        compute_recadmit(graph)
        return section_progress(graph, items), items

    def test_always_39_sections(self):
        statuses, _ = self.build("Section Topology.\n")
        assert len(statuses) == 39
        assert [s.section for s in statuses] == list(range(12, 51))

    def test_empty_section_is_stubs_only_with_zero_counts(self):
        statuses, _ = self.build("Section Topology.\n")
        assert statuses[0].level is SectionLevel.STUBS_ONLY
        assert (statuses[0].stated_count, statuses[0].proved_count, statuses[0].total_count) == (0, 0, 0)

    def test_all_proved_no_exercises_is_complete(self):
        text = "Section Topology.\n(** §20 **)\n" + "".join(
            f"Theorem t{i} : forall X Y Z:set, wide_rel X Y -> wide_rel Y Z -> wide_rel X Z.\nQed.\n"
            for i in range(4)
        )
        statuses, _ = self.build(text)
        by_section = {s.section: s for s in statuses}
        assert by_section[20].level is SectionLevel.COMPLETE
        assert by_section[20].proved_count == 4

    def test_corpus12_levels_match_hand_classification(self):
        statuses, _ = self.build((DATA / "corpus12.mg").read_text())
        by_section = {s.section: s for s in statuses}
        assert by_section[12].level is SectionLevel.PARTIALLY_PROVED  # axiom statement is a stub
        assert (by_section[12].stated_count, by_section[12].proved_count, by_section[12].total_count) == (3, 3, 4)
        assert by_section[13].level is SectionLevel.STATED
        assert (by_section[13].stated_count, by_section[13].proved_count, by_section[13].total_count) == (2, 1, 3)
        assert by_section[14].level is SectionLevel.MOSTLY_COMPLETE
        assert (by_section[14].stated_count, by_section[14].proved_count, by_section[14].total_count) == (5, 4, 5)
        for section in range(15, 51):
            assert by_section[section].level is SectionLevel.STUBS_ONLY

    def test_ten_section_fixture_hand_classified(self):
        # one block per level transition, sections 20..27
        long_tail = "forall A B C:set, rel_one A B -> rel_two B C -> rel_three A C."
        parts = ["Section Topology.\n"]
        # §20: all stubs
        parts.append("(** §20 **)\nTheorem short_a : tiny.\nadmit.\nTheorem short_b : tiny.\nadmit.\n")
        # §21: stated, nothing proved
        parts.append(f"(** §21 **)\nTheorem s21a : {long_tail}\nadmit.\nTheorem s21b : {long_tail}\nadmit.\n")
        # §22: half proved
        parts.append(f"(** §22 **)\nTheorem s22a : {long_tail}\nQed.\nTheorem s22b : {long_tail}\nadmit.\n")
        # §23: 4 of 5 proved
        parts.append("(** §23 **)\n")
        for i in range(4):
            parts.append(f"Theorem s23_{i} : {long_tail}\nQed.\n")
        parts.append(f"Theorem s23_bad : {long_tail}\nadmit.\n")
        # §24: complete, no exercises
        parts.append(f"(** §24 **)\nTheorem s24a : {long_tail}\nQed.\n")
        # §25: core complete, one admitted exercise left
        parts.append(f"(** §25 **)\nTheorem s25a : {long_tail}\nQed.\nTheorem ex25_1_later : {long_tail}\nadmit.\n")
        # §26: everything incl. exercise proved
        parts.append(f"(** §26 **)\nTheorem s26a : {long_tail}\nQed.\nTheorem ex26_1_done : {long_tail}\nQed.\n")
        # §27: mixed stubs and one proved of four
        parts.append(
            f"(** §27 **)\nTheorem stub27_x : {long_tail}\nadmit.\n"
            f"Theorem s27a : {long_tail}\nQed.\nTheorem s27b : {long_tail}\nadmit.\n"
            "Theorem s27c : tiny.\nadmit.\n"
        )
        statuses, _ = self.build("".join(parts))
        by_section = {s.section: s for s in statuses}
        assert by_section[20].level is SectionLevel.STUBS_ONLY
        assert by_section[21].level is SectionLevel.STATED
        assert by_section[22].level is SectionLevel.PARTIALLY_PROVED
        assert by_section[23].level is SectionLevel.MOSTLY_COMPLETE
        assert by_section[24].level is SectionLevel.COMPLETE
        assert by_section[25].level is SectionLevel.COMPLETE
        assert by_section[26].level is SectionLevel.EXERCISES_COMPLETE
        assert by_section[27].level is SectionLevel.STATED

    def test_progress_file_has_exactly_39_lines(self, tmp_path):
        statuses, _ = self.build((DATA / "corpus12.mg").read_text())
        path = write_progress_file(statuses, 9, tmp_path)
        assert path.name == "PROGRESS9"
        lines = path.read_text().splitlines()
        assert len(lines) == 39
        assert lines[0] == "§12: PartiallyProved (stated 3/4, proved 3/4)"
        assert lines[-1] == "§50: StubsOnly (stated 0/0, proved 0/0)"

    def test_progress_line_format(self):
        statuses, _ = self.build("Section Topology.\n")
        assert format_progress_line(statuses[0]) == "§12: StubsOnly (stated 0/0, proved 0/0)"


class TestGrowthTable:
    def test_reference_row(self):
        rows = growth_table([entry(100, 1364)], stride=100)
        assert rows == [(100, 1364)]

    def test_stride_one_keeps_everything(self):
        entries = [entry(n, n * 10) for n in (1, 2, 3)]
        assert growth_table(entries, stride=1) == [(1, 10), (2, 20), (3, 30)]

    def test_divisibility_not_nearest(self):
        entries = [entry(50, 500), entry(150, 1500)]
        assert growth_table(entries, stride=100) == []

    def test_csv_rendering(self):
        assert growth_csv([(100, 1364)]) == "commit,lines\n100,1364\n"

    @given(
        st.lists(
            st.tuples(st.integers(1, 500), st.integers(0, 10**6)),
            min_size=1,
            max_size=40,
            unique_by=lambda t: t[0],
        )
    )
    def test_strictly_ascending_for_growing_ledgers(self, pairs):
        pairs.sort()
        # enforce a never-shrinking ledger
        grown = []
        floor = 0
        for number, lines in pairs:
            floor = max(floor, lines)
            grown.append(entry(number, floor))
            floor += 1
        rows = growth_table(grown, stride=2)
        assert all(a[0] < b[0] and a[1] < b[1] for a, b in zip(rows, rows[1:]))


class TestMajorTheorems:
    def test_filters_match_reference_fixture(self):
        graph = graph_from_records(
            [
                record("giant_extension_step", lines=10369, deps=[(f"d{i}", "T") for i in range(142)]),
                record("medium_result", lines=299),
                record("huge_but_admitted", lines=5000, admit=True, recadmit=True),
            ]
        )
        rows = major_theorems(graph, min_lines=300)
        assert rows == [("giant_extension_step", 10369, 142)]

    def test_threshold_is_strict(self):
        graph = graph_from_records([record("at_threshold", lines=300)])
        assert major_theorems(graph, min_lines=300) == []

    def test_recadmitted_excluded(self):
        graph = graph_from_records([record("tainted", lines=900, recadmit=True)])
        assert major_theorems(graph, min_lines=300) == []

    def test_definitions_excluded(self):
        graph = graph_from_records([record("big_def", kind="D", lines=900)])
        assert major_theorems(graph) == []

    def test_sorted_by_lines_then_declaration(self):
        graph = graph_from_records(
            [record("first", lines=500), record("second", lines=900), record("third", lines=500)]
        )
        assert [name for name, _, _ in major_theorems(graph, 300)] == ["second", "first", "third"]

    def test_corpus12_small_threshold(self):
        text = (DATA / "corpus12.mg").read_text()
        items = parse_items(text)
        graph = build_graph(items, resolve_boundary(text, "Section Topology."))
        compute_recadmit(graph)
        assert major_theorems(graph, min_lines=2) == [
            ("topology_elem_subset", 5, 2),
            ("ex14_1_order_demo", 4, 2),
        ]
