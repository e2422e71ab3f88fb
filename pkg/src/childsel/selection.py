"""Child Selections: injective maps sending every metabolite to a reaction it feeds.

Enumeration walks metabolites in index order and tries children in ascending
reaction order, so selections come out lexicographically sorted by their
assignment tuple. A perfect matching of the still-unassigned metabolites is
maintained alongside the search; a branch is entered only if that matching
can be repaired, so the search never hits a dead end.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TypeVar

from .network import ReactionNetwork, StoichiometricMatrix, input_bipartite_graph

log = logging.getLogger(__name__)

T = TypeVar("T")

# Memo states allowed in the counting DP before it gives up and streams.
DP_STATE_LIMIT = 2_000_000


class ConstraintInfeasible(ValueError):
    """Forced pairs are not input pairs, collide, or are also forbidden."""


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ChildSelection:
    """``assignment[m]`` is the index of the child reaction of metabolite ``m``."""

    assignment: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.assignment)

    def __getitem__(self, m: int) -> int:
        return self.assignment[m]

    def replace(self, m: int, reaction: int) -> ChildSelection:
        a = list(self.assignment)
        a[m] = reaction
        return ChildSelection(tuple(a))

    def to_json(self, net: ReactionNetwork) -> dict:
        return {
            "assignment": {
                net.metabolites[m].label: net.reactions[j].label for m, j in enumerate(self.assignment)
            }
        }

    @classmethod
    def from_json(cls, net: ReactionNetwork, data: Mapping) -> ChildSelection:
        mapping = data["assignment"]
        if set(mapping) != set(net.metabolite_labels):
            raise DimensionMismatch("selection does not cover exactly the network's metabolites")
        sel = cls(tuple(net.reaction_index(mapping[label]) for label in net.metabolite_labels))
        check_selection(net.matrix, sel)
        return sel


def check_selection(S: StoichiometricMatrix, sel: ChildSelection) -> None:
    """Raise ValueError unless ``sel`` is a Child Selection of ``S``."""
    if len(sel) != S.rows:
        raise DimensionMismatch(f"selection has {len(sel)} entries, network has {S.rows} metabolites")
    for m, j in enumerate(sel.assignment):
        if not 0 <= j < S.cols or S.entries[m][j] >= 0:
            raise ValueError(f"metabolite {m} is not an input of reaction {j}")
    if len(set(sel.assignment)) != len(sel):
        raise ValueError("selection is not injective")


@dataclass(frozen=True)
class SelectionConstraint:
    forced: Mapping[int, int] = field(default_factory=dict)
    forbidden: frozenset[tuple[int, int]] = frozenset()

    @classmethod
    def from_labels(
        cls,
        net: ReactionNetwork,
        forced: Mapping[str, str] | Iterable[tuple[str, str]] = (),
        forbidden: Iterable[tuple[str, str]] = (),
    ) -> SelectionConstraint:
        items = forced.items() if isinstance(forced, Mapping) else forced
        fmap: dict[int, int] = {}
        for met, rxn in items:
            m = net.metabolite_index(met)
            if m in fmap:
                raise ConstraintInfeasible(f"metabolite {met!r} forced twice")
            fmap[m] = net.reaction_index(rxn)
        fb = frozenset((net.metabolite_index(m), net.reaction_index(j)) for m, j in forbidden)
        return cls(fmap, fb)

    def allowed_children(self, S: StoichiometricMatrix) -> list[list[int]]:
        """Sorted candidate children per metabolite; raises ConstraintInfeasible."""
        graph = input_bipartite_graph(S)
        seen: dict[int, int] = {}
        for m, j in self.forced.items():
            if not 0 <= m < S.rows:
                raise ConstraintInfeasible(f"forced metabolite index {m} out of range")
            if j not in graph[m]:
                raise ConstraintInfeasible(f"metabolite {m} is not an input of forced reaction {j}")
            if (m, j) in self.forbidden:
                raise ConstraintInfeasible(f"pair ({m}, {j}) is both forced and forbidden")
            if j in seen:
                raise ConstraintInfeasible(f"metabolites {seen[j]} and {m} are both forced to reaction {j}")
            seen[j] = m
        allowed = []
        for m, children in enumerate(graph):
            if m in self.forced:
                allowed.append([self.forced[m]])
            else:
                allowed.append(sorted(j for j in children if (m, j) not in self.forbidden))
        return allowed


NO_CONSTRAINT = SelectionConstraint()


def _as_matrix(net: ReactionNetwork | StoichiometricMatrix) -> StoichiometricMatrix:
    return net.matrix if isinstance(net, ReactionNetwork) else net


def _initial_matching(allowed: Sequence[Sequence[int]], n_cols: int) -> list[int] | None:
    M = len(allowed)
    match = [-1] * M
    owner = [-1] * n_cols
    for m in range(M):
        if not _augment(m, allowed, match, owner, 0, set()):
            return None
    return match


def _augment(m, allowed, match, owner, lo, visited) -> bool:
    """Kuhn augmenting path from metabolite ``m`` over metabolites >= ``lo``."""
    for r in allowed[m]:
        if r in visited:
            continue
        visited.add(r)
        o = owner[r]
        if o == -1 or (o >= lo and _augment(o, allowed, match, owner, lo, visited)):
            match[m] = r
            owner[r] = m
            return True
    return False


def enumerate_child_selections(
    net: ReactionNetwork | StoichiometricMatrix,
    constraint: SelectionConstraint = NO_CONSTRAINT,
    limit: int | None = None,
) -> Iterator[ChildSelection]:
    """Yield every Child Selection satisfying ``constraint`` once, in lexicographic order."""
    S = _as_matrix(net)
    allowed = constraint.allowed_children(S)
    M = S.rows
    if limit is not None and limit <= 0:
        return
    if M == 0:
        yield ChildSelection(())
        return
    match = _initial_matching(allowed, S.cols)
    if match is None:
        return
    owner = [-1] * S.cols
    for m, r in enumerate(match):
        owner[r] = m

    emitted = 0
    # Explicit stack of (depth, candidate position, saved match, saved owner).
    prefix = [0] * M
    stack = [(0, 0, match, owner)]
    while stack:
        k, pos, match, owner = stack.pop()
        choices = allowed[k]
        while pos < len(choices):
            r = choices[pos]
            pos += 1
            o = owner[r]
            if o != -1 and o < k:
                continue
            if o == k:
                new_match, new_owner = match, owner
            else:
                new_match, new_owner = match[:], owner[:]
                new_owner[new_match[k]] = -1
                new_match[k] = r
                new_owner[r] = k
                if o != -1:
                    new_match[o] = -1
                    if not _augment(o, allowed, new_match, new_owner, k + 1, {r}):
                        continue
            prefix[k] = r
            if k == M - 1:
                yield ChildSelection(tuple(prefix))
                emitted += 1
                if limit is not None and emitted >= limit:
                    return
                continue
            stack.append((k, pos, match, owner))
            stack.append((k + 1, 0, new_match, new_owner))
            break


def count_child_selections(
    net: ReactionNetwork | StoichiometricMatrix,
    constraint: SelectionConstraint = NO_CONSTRAINT,
    state_limit: int = DP_STATE_LIMIT,
) -> int:
    """Exact number of Child Selections without materializing them.

    Forward DP over metabolites keyed on the set of used reactions, with
    reactions that no later metabolite can use dropped from the key. Falls
    back to streaming the enumeration if the state table outgrows
    ``state_limit``.
    """
    S = _as_matrix(net)
    allowed = constraint.allowed_children(S)
    M = len(allowed)
    order = _frontier_order(allowed)
    relevant = [0] * (M + 1)
    for pos in range(M - 1, -1, -1):
        mask = 0
        for r in allowed[order[pos]]:
            mask |= 1 << r
        relevant[pos] = relevant[pos + 1] | mask

    layer: dict[int, int] = {0: 1}
    for pos, m in enumerate(order):
        keep = relevant[pos + 1]
        nxt: dict[int, int] = defaultdict(int)
        for used, ways in layer.items():
            for r in allowed[m]:
                bit = 1 << r
                if not used & bit:
                    nxt[(used | bit) & keep] += ways
        if len(nxt) > state_limit:
            log.info("counting DP exceeded %d states; streaming instead", state_limit)
            return sum(1 for _ in enumerate_child_selections(S, constraint))
        layer = nxt
        if not layer:
            return 0
    return sum(layer.values())


def _frontier_order(allowed: Sequence[Sequence[int]]) -> list[int]:
    """Greedy metabolite order that keeps the set of shared, still-open reactions small."""
    M = len(allowed)
    users: dict[int, set[int]] = defaultdict(set)
    for m, rs in enumerate(allowed):
        for r in rs:
            users[r].add(m)
    remaining = set(range(M))
    open_rxns: set[int] = set()
    order = []
    while remaining:

        def cost(m):
            new_open = open_rxns | set(allowed[m])
            closed = {r for r in new_open if users[r] <= set(order) | {m}}
            return (len(new_open - closed), len(allowed[m]), m)

        m = min(remaining, key=cost)
        order.append(m)
        remaining.discard(m)
        open_rxns |= set(allowed[m])
        open_rxns = {r for r in open_rxns if not users[r] <= set(order)}
    return order


def selection_distance(j1: ChildSelection, j2: ChildSelection) -> int:
    if len(j1) != len(j2):
        raise DimensionMismatch(f"selections of different length ({len(j1)} vs {len(j2)})")
    return sum(a != b for a, b in zip(j1.assignment, j2.assignment))


def partition_constraints(
    net: ReactionNetwork | StoichiometricMatrix, constraint: SelectionConstraint = NO_CONSTRAINT
) -> list[SelectionConstraint]:
    """Split the selection space by the child of the first metabolite with several options.

    Partitions are disjoint, cover everything, and are listed in lexicographic
    order, so concatenating their streams reproduces the sequential order.
    """
    S = _as_matrix(net)
    allowed = constraint.allowed_children(S)
    for m, rs in enumerate(allowed):
        if len(rs) > 1:
            return [
                SelectionConstraint({**constraint.forced, m: r}, constraint.forbidden) for r in rs
            ]
    return [constraint]


def _run_partition(args):
    S, constraint, limit, fn = args
    return [fn(S, sel) for sel in enumerate_child_selections(S, constraint, limit)]


def partition_budgets(
    S: StoichiometricMatrix, parts: Sequence[SelectionConstraint], limit: int | None
) -> list[int | None]:
    """Per-partition limits that together select the first ``limit`` selections overall."""
    if limit is None:
        return [None] * len(parts)
    out: list[int | None] = []
    left = limit
    for c in parts:
        take = min(left, count_child_selections(S, c))
        out.append(take)
        left -= take
    return out


def map_selections(
    net: ReactionNetwork | StoichiometricMatrix,
    fn: Callable[[StoichiometricMatrix, ChildSelection], T],
    constraint: SelectionConstraint = NO_CONSTRAINT,
    limit: int | None = None,
    threads: int = 1,
) -> list[T]:
    """Apply ``fn(S, selection)`` to each selection, optionally across worker processes.

    Results come back in lexicographic selection order whatever ``threads``
    is; with a ``limit`` the same first selections are processed either way.
    ``fn`` must be picklable when ``threads > 1``.
    """
    S = _as_matrix(net)
    if threads <= 1:
        return [fn(S, sel) for sel in enumerate_child_selections(S, constraint, limit)]
    parts = partition_constraints(S, constraint)
    budgets = partition_budgets(S, parts, limit)
    jobs = [(S, c, b, fn) for c, b in zip(parts, budgets) if b != 0]
    out: list[T] = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for chunk in pool.map(_run_partition, jobs):
            out.extend(chunk)
    return out
