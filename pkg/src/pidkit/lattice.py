"""Redundancy lattice of antichains and Moebius inversion to partial information."""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Optional

from .dist import make_source, source_label


class LatticeError(ValueError):
    pass


def _source_key(src: frozenset) -> tuple:
    return (len(src), tuple(sorted(src)))


@dataclass(frozen=True)
class Antichain:
    """A set of sources, none containing another. One node of the lattice."""

    sources: tuple[frozenset, ...]

    def __init__(self, sources: Iterable[Iterable[int]]):
        srcs = {make_source(s) for s in sources}
        if not srcs:
            raise LatticeError("an antichain needs at least one source")
        for a, b in combinations(srcs, 2):
            if a <= b or b <= a:
                raise LatticeError(f"{source_label(a)} and {source_label(b)} are nested")
        object.__setattr__(self, "sources", tuple(sorted(srcs, key=_source_key)))

    @classmethod
    def parse(cls, text: str) -> "Antichain":
        """Parse the ``{1}{23}`` notation (single-digit predictor indices)."""
        groups = re.findall(r"\{([0-9]+)\}", text.replace(" ", ""))
        if not groups or "".join("{%s}" % g for g in groups) != text.replace(" ", ""):
            raise LatticeError(f"cannot parse antichain {text!r}")
        return cls([int(ch) for ch in g] for g in groups)

    @property
    def label(self) -> str:
        return "".join(source_label(s) for s in self.sources)

    @property
    def order_structure(self) -> tuple[int, ...]:
        """Multiset of source sizes, e.g. ``(1, 2)`` for ``{1}{23}``."""
        return tuple(sorted(len(s) for s in self.sources))

    def members(self) -> frozenset:
        return frozenset().union(*self.sources)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"Antichain({self.label})"


def precedes_or_equal(alpha: Antichain, beta: Antichain) -> bool:
    """Redundancy-lattice order: every source of beta contains some source of alpha."""
    return all(any(a <= b for a in alpha.sources) for b in beta.sources)


def _antichains(n: int) -> list[Antichain]:
    # grow antichains by adding subsets in a fixed order; only incomparable ones join
    subsets = [frozenset(c) for k in range(1, n + 1) for c in combinations(range(1, n + 1), k)]
    found: list[Antichain] = []

    def grow(start: int, current: list[frozenset]) -> None:
        if current:
            found.append(Antichain(current))
        for i in range(start, len(subsets)):
            cand = subsets[i]
            if all(not (cand <= s or s <= cand) for s in current):
                current.append(cand)
                grow(i + 1, current)
                current.pop()

    grow(0, [])
    return found


@dataclass(frozen=True)
class RedundancyLattice:
    """All antichains over ``n`` predictors with the redundancy ordering.

    Node order is by level (longest chain from the bottom) and then by label,
    so for two predictors it is ``{1}{2}, {1}, {2}, {12}``.
    """

    n_predictors: int
    nodes: tuple[Antichain, ...] = field(repr=False)

    @cached_property
    def index(self) -> dict[Antichain, int]:
        return {a: i for i, a in enumerate(self.nodes)}

    def leq(self, alpha: Antichain, beta: Antichain) -> bool:
        return precedes_or_equal(alpha, beta)

    @cached_property
    def strictly_below(self) -> dict[Antichain, tuple[Antichain, ...]]:
        return {a: tuple(b for b in self.nodes if b != a and precedes_or_equal(b, a)) for a in self.nodes}

    @cached_property
    def covers(self) -> list[tuple[Antichain, Antichain]]:
        """Hasse diagram edges ``(lower, upper)``."""
        below = self.strictly_below
        edges = []
        for upper in self.nodes:
            for lower in below[upper]:
                if not any(lower in below[mid] for mid in below[upper]):
                    edges.append((lower, upper))
        return edges

    @cached_property
    def level(self) -> dict[Antichain, int]:
        lev: dict[Antichain, int] = {}
        for a in self.topological_order:
            lev[a] = 1 + max((lev[b] for b in self.strictly_below[a]), default=0)
        return lev

    @cached_property
    def topological_order(self) -> tuple[Antichain, ...]:
        # fewer strict predecessors always means not above
        return tuple(sorted(self.nodes, key=lambda a: (len(self.strictly_below[a]), a.label)))

    @property
    def bottom(self) -> Antichain:
        return self.topological_order[0]

    @property
    def top(self) -> Antichain:
        return self.topological_order[-1]

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def node(self, label: str) -> Antichain:
        a = Antichain.parse(label)
        if a not in self.index:
            raise LatticeError(f"{label} is not a node of the {self.n_predictors}-predictor lattice")
        return a


@lru_cache(maxsize=None)
def build_lattice(n: int) -> RedundancyLattice:
    """Redundancy lattice for ``1 <= n <= 4`` predictors (1, 4, 18, 166 nodes)."""
    if not 1 <= n <= 4:
        raise LatticeError(f"lattices are supported for 1..4 predictors, got {n}")
    raw = RedundancyLattice(n, tuple(_antichains(n)))
    lev = raw.level
    ordered = tuple(sorted(raw.nodes, key=lambda a: (lev[a], a.order_structure, a.label)))
    return RedundancyLattice(n, ordered)


def moebius_inversion(lattice: RedundancyLattice, icap: Mapping[Antichain, float]) -> dict[Antichain, float]:
    """Partial information atoms from redundancy values.

    ``I_partial(a) = I_cap(a) - sum_{b < a} I_partial(b)``, bottom-up. Atoms may
    be negative.
    """
    missing = [a.label for a in lattice.nodes if a not in icap]
    if missing:
        raise LatticeError(f"missing redundancy values for {', '.join(missing)}")
    atoms: dict[Antichain, float] = {}
    for a in lattice.topological_order:
        atoms[a] = float(icap[a]) - sum(atoms[b] for b in lattice.strictly_below[a])
    return {a: atoms[a] for a in lattice.nodes}


def cumulative_redundancy(lattice: RedundancyLattice, atoms: Mapping[Antichain, float]) -> dict[Antichain, float]:
    """Inverse of :func:`moebius_inversion`: sum atoms over each down-set."""
    return {a: atoms[a] + sum(atoms[b] for b in lattice.strictly_below[a]) for a in lattice.nodes}


@dataclass
class PIDResult:
    """Redundancy and partial information values on every lattice node."""

    lattice: RedundancyLattice
    measure: str
    redundancy: dict[Antichain, float]
    atoms: dict[Antichain, float]
    reports: dict[Antichain, object] = field(default_factory=dict)
    tables: dict[Antichain, object] = field(default_factory=dict)
    stderr: Optional[dict[Antichain, float]] = None

    def __getitem__(self, label: str) -> float:
        return self.atoms[self.lattice.node(label) if isinstance(label, str) else label]

    def icap(self, label: str) -> float:
        return self.redundancy[self.lattice.node(label)]

    @property
    def total(self) -> float:
        return sum(self.atoms.values())

    def atom_vector(self) -> list[float]:
        return [self.atoms[a] for a in self.lattice.nodes]

    def as_rows(self) -> list[dict]:
        rows = []
        for a in self.lattice.nodes:
            row = {"node": a.label, "I_cap": self.redundancy[a], "I_partial": self.atoms[a]}
            if self.stderr is not None:
                row["I_partial_se"] = self.stderr.get(a)
            rows.append(row)
        return rows


def order_structure_collapse(result: PIDResult) -> dict[int, dict[tuple[int, ...], float]]:
    """Sum atoms of the three-predictor lattice by level and source-size structure."""
    lat = result.lattice
    if lat.n_predictors != 3 or len(lat) != 18:
        raise LatticeError("order-structure collapse is defined for the 18-node three-predictor lattice")
    out: dict[int, dict[tuple[int, ...], float]] = defaultdict(dict)
    for a in lat.nodes:
        tags = out[lat.level[a]]
        tags[a.order_structure] = tags.get(a.order_structure, 0.0) + result.atoms[a]
    return dict(sorted(out.items()))
