"""Flat partitions of a set of element ids."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence


class Partition:
    """Mapping element id -> dense cluster id (0..k-1, numbered by first appearance)."""

    def __init__(self, assignments: Mapping[Hashable, Hashable]):
        dense: dict = {}
        self.assignments = {}
        for el, c in assignments.items():
            self.assignments[el] = dense.setdefault(c, len(dense))

    @classmethod
    def from_labels(cls, labels: Sequence, ids: Sequence | None = None) -> "Partition":
        ids = range(len(labels)) if ids is None else ids
        if len(ids) != len(labels):
            raise ValueError("ids and labels differ in length")
        return cls(dict(zip(ids, labels)))

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable]) -> "Partition":
        assignments = {}
        for g, members in enumerate(groups):
            for el in members:
                if el in assignments:
                    raise ValueError(f"element {el!r} appears in two groups")
                assignments[el] = g
        return cls(assignments)

    @property
    def elements(self) -> set:
        return set(self.assignments)

    def groups(self) -> list[list]:
        out: dict[int, list] = {}
        for el, c in self.assignments.items():
            out.setdefault(c, []).append(el)
        return [out[c] for c in sorted(out)]

    def canonical(self) -> frozenset:
        """Label-free form: the set of groups."""
        return frozenset(frozenset(g) for g in self.groups())

    @property
    def n_clusters(self) -> int:
        return len(set(self.assignments.values()))

    def __len__(self):
        return len(self.assignments)

    def __getitem__(self, el):
        return self.assignments[el]

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        return f"Partition({self.groups()!r})"

    def labels(self, ids: Sequence | None = None) -> list[int]:
        ids = list(self.assignments) if ids is None else ids
        return [self.assignments[i] for i in ids]

    def to_json(self) -> str:
        return json.dumps({str(k): v for k, v in self.assignments.items()}, sort_keys=True)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Partition":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: expected a JSON object {{element_id: cluster_id}}")
        return cls({str(k): v for k, v in raw.items()})
