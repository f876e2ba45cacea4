from __future__ import annotations

from typing import Generic, Hashable, Iterable, Sequence, TypeVar

L = TypeVar("L", bound=Hashable)


class ScenarioMapping(Generic[L]):
    """Bijection between graph vertex ids and application entities.

    ``labels[v]`` is the entity behind vertex ``v``; reducers build the graph
    in the same order they append labels.
    """

    def __init__(self, labels: Sequence[L]):
        self.labels: tuple[L, ...] = tuple(labels)
        self._index = {label: v for v, label in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise ValueError("duplicate labels in scenario mapping")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def label(self, v: int) -> L:
        return self.labels[v]

    def vertex(self, label: L) -> int:
        return self._index[label]

    def decode(self, vertices: Iterable[int]) -> list[L]:
        return [self.labels[v] for v in sorted(vertices)]

    def encode(self, labels: Iterable[L]) -> list[int]:
        return sorted(self._index[x] for x in labels)
