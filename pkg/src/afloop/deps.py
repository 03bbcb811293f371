"""Dependency graph over the monitored region of a proof script.

Dependency detection is lexical: any identifier token in an item's statement
or proof (comments removed) that names an earlier item inside the edit region
counts as a dependency. Names declared before the region boundary are ignored
entirely. Declare-before-use makes the graph acyclic by construction; tokens
matching a *later* region name are collected as forward references and
surfaced to the caller rather than silently dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .parser import ItemKind, ProofItem, mask_comments

_TOKEN_RUN = re.compile(r"[A-Za-z0-9_]+")


class CycleDetected(Exception):
    """Defensive: should be unreachable for declare-before-use graphs."""


@dataclass
class DepRecord:
    """One region item: D for definitions, T for theorems and axioms."""

    name: str
    kind_letter: str
    lines: int
    direct_admit: bool
    deps: list[tuple[str, str]]
    recadmit: bool | None = None


@dataclass
class DepGraph:
    records: dict[str, DepRecord] = field(default_factory=dict)
    region_names: set[str] = field(default_factory=set)
    forward_refs: list[tuple[str, str]] = field(default_factory=list)

    def in_order(self) -> list[DepRecord]:
        return list(self.records.values())


def identifier_tokens(text: str) -> list[str]:
    """Identifier tokens in order: maximal [A-Za-z0-9_] runs not starting
    with a digit."""
    return [t for t in _TOKEN_RUN.findall(text) if not t[0].isdigit()]


def _item_lines(item: ProofItem) -> int:
    from .parser import count_content_lines

    span = item.statement_text
    if item.proof_text:
        span += "\n" + item.proof_text
    return count_content_lines(span)


def build_graph(items: list[ProofItem], boundary_line: int) -> DepGraph:
    """One record per Definition/Theorem/Axiom starting at or after the
    boundary line, with lexical deps against earlier region names."""
    region = [
        it
        for it in items
        if it.line_start >= boundary_line
        and it.kind in (ItemKind.DEFINITION, ItemKind.THEOREM, ItemKind.AXIOM)
    ]
    graph = DepGraph(region_names={it.name for it in region})
    order = {it.name: idx for idx, it in enumerate(region)}

    for idx, item in enumerate(region):
        scan_text = mask_comments(item.statement_text)
        if item.proof_text:
            scan_text += "\n" + mask_comments(item.proof_text)
        deps: list[tuple[str, str]] = []
        seen: set[str] = set()
        for tok in identifier_tokens(scan_text):
            if tok == item.name or tok in seen or tok not in graph.region_names:
                continue
            seen.add(tok)
            if order[tok] < idx:
                dep_kind = "D" if region[order[tok]].kind is ItemKind.DEFINITION else "T"
                deps.append((tok, dep_kind))
            else:
                graph.forward_refs.append((item.name, tok))
        graph.records[item.name] = DepRecord(
            name=item.name,
            kind_letter="D" if item.kind is ItemKind.DEFINITION else "T",
            lines=_item_lines(item),
            direct_admit=item.direct_admit,
            deps=deps,
        )
    return graph


def compute_recadmit(graph: DepGraph) -> dict[str, bool]:
    """Least fixpoint: an item is recursively admitted when it or anything in
    its dependency closure is directly admitted. Records are updated in place."""
    result: dict[str, bool] = {}
    for record in graph.records.values():
        flag = record.direct_admit
        for dep_name, _ in record.deps:
            if dep_name not in result:
                raise CycleDetected(f"{record.name} depends on unresolved {dep_name}")
            flag = flag or result[dep_name]
        result[record.name] = flag
        record.recadmit = flag
    return result


def bottleneck_ranking(graph: DepGraph) -> list[tuple[str, int]]:
    """Directly admitted items ranked by how many other items transitively
    depend on them; ties keep declaration order."""
    names = list(graph.records)
    index = {name: i for i, name in enumerate(names)}
    closure = [0] * len(names)  # bitmask of reachable-through-deps indices
    for i, name in enumerate(names):
        bits = 0
        for dep_name, _ in graph.records[name].deps:
            j = index[dep_name]
            bits |= closure[j] | (1 << j)
        closure[i] = bits

    ranking = []
    for i, name in enumerate(names):
        if not graph.records[name].direct_admit:
            continue
        mask = 1 << i
        blocked = sum(1 for j in range(len(names)) if j != i and closure[j] & mask)
        ranking.append((name, blocked, i))
    ranking.sort(key=lambda row: (-row[1], row[2]))
    return [(name, blocked) for name, blocked, _ in ranking]
