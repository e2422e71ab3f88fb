"""MR-graph, completion cycles, completion counts and Child Selection classification.

A completion cycle for a selection J alternates J-selected edges (m, J(m))
with other edges of the metabolite-reaction graph. It is reported starting
at its smallest metabolite and leaving that metabolite along its selected
edge, so the metabolite sequence (m0, m1, ...) satisfies: m_{i+1} takes
part in reaction J(m_i).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

from .algebra import det_exact, reshuffled_minor
from .network import ReactionNetwork, StoichiometricMatrix
from .selection import ChildSelection

Behavior = Literal["good", "bad", "zero"]

DEFAULT_BLOWUP_BOUND = 10**7


class CombinatorialBlowup(RuntimeError):
    pass


class IdentityViolation(AssertionError):
    """det * (-1)^M != 1 + G - B; indicates a bug, never expected."""


@dataclass(frozen=True)
class MRGraph:
    n_metabolites: int
    n_reactions: int
    # (metabolite, reaction, sign) with sign -1 for inputs, +1 for outputs
    edges: tuple[tuple[int, int, int], ...]
    # participants[j] = ((m, sign), ...) for reaction vertex j
    participants: tuple[tuple[tuple[int, int], ...], ...]

    def negative_edges(self) -> list[tuple[int, int]]:
        return [(m, j) for m, j, s in self.edges if s < 0]

    def positive_edges(self) -> list[tuple[int, int]]:
        return [(m, j) for m, j, s in self.edges if s > 0]

    def selected_edges(self, sel: ChildSelection) -> set[tuple[int, int]]:
        return {(m, j) for m, j in enumerate(sel.assignment)}


def build_mr_graph(net: ReactionNetwork | StoichiometricMatrix) -> MRGraph:
    S = net.matrix if isinstance(net, ReactionNetwork) else net
    edges = []
    parts: list[list[tuple[int, int]]] = [[] for _ in range(S.cols)]
    for m, row in enumerate(S.entries):
        for j, v in enumerate(row):
            if v:
                sign = -1 if v < 0 else 1
                edges.append((m, j, sign))
                parts[j].append((m, sign))
    return MRGraph(S.rows, S.cols, tuple(edges), tuple(tuple(p) for p in parts))


@dataclass(frozen=True)
class CompletionCycle:
    metabolites: tuple[int, ...]
    reactions: tuple[int, ...]  # reactions[i] is the child of metabolites[i]
    negative_unselected: int

    @property
    def half_length(self) -> int:
        return len(self.metabolites)

    @property
    def badness(self) -> Literal["good", "bad"]:
        return "good" if self.negative_unselected % 2 else "bad"

    @property
    def is_bad(self) -> bool:
        return self.negative_unselected % 2 == 0

    def edges(self) -> list[tuple[int, int]]:
        """Cyclic (metabolite, reaction) edge list, selected edges at even positions."""
        out = []
        ms = self.metabolites
        for i, m in enumerate(ms):
            out.append((m, self.reactions[i]))
            out.append((ms[(i + 1) % len(ms)], self.reactions[i]))
        return out

    def vertex_labels(self, net: ReactionNetwork) -> list[str]:
        out = []
        for m, j in zip(self.metabolites, self.reactions):
            out.append(net.metabolites[m].label)
            out.append(net.reactions[j].label)
        return out

    def to_json(self, net: ReactionNetwork) -> dict:
        return {"vertices": self.vertex_labels(net), "badness": self.badness}


def completion_cycles(
    g: MRGraph, sel: ChildSelection, bound: int = DEFAULT_BLOWUP_BOUND
) -> list[CompletionCycle]:
    """All completion cycles of ``sel``, each once, in canonical orientation."""
    J = sel.assignment
    M = g.n_metabolites
    if len(J) != M:
        raise ValueError("selection does not match the graph")
    found: list[CompletionCycle] = []
    seen: set[tuple[int, ...]] = set()
    on_path = [False] * M
    path: list[int] = []
    steps = 0

    def walk(m: int, start: int, negatives: int) -> None:
        nonlocal steps
        steps += 1
        if steps > bound:
            raise CombinatorialBlowup(f"completion-cycle search exceeded {bound} steps")
        for nxt, sign in g.participants[J[m]]:
            if nxt == m:
                continue
            neg = negatives + (sign < 0)
            if nxt == start:
                key = tuple(path)
                if key not in seen:
                    seen.add(key)
                    found.append(CompletionCycle(key, tuple(J[x] for x in key), neg))
                    if len(found) > bound:
                        raise CombinatorialBlowup(f"more than {bound} completion cycles")
            elif nxt > start and not on_path[nxt]:
                on_path[nxt] = True
                path.append(nxt)
                walk(nxt, start, neg)
                path.pop()
                on_path[nxt] = False

    for start in range(M):
        on_path[start] = True
        path.append(start)
        walk(start, start, 0)
        path.pop()
        on_path[start] = False
    return found


def count_completions(
    cycles: Sequence[CompletionCycle], bound: int = DEFAULT_BLOWUP_BOUND
) -> tuple[int, int]:
    """(G, B): nonempty sets of vertex-disjoint cycles with an even / odd number of bad cycles.

    Counts independent sets of the cycle conflict graph by include/exclude
    branching on the lowest remaining cycle, memoized on the remaining set.
    """
    n = len(cycles)
    if n == 0:
        return 0, 0
    vsets = [frozenset(c.metabolites) for c in cycles]
    conflict = [0] * n
    for a in range(n):
        for b in range(a + 1, n):
            if vsets[a] & vsets[b]:
                conflict[a] |= 1 << b
                conflict[b] |= 1 << a
    bad = [c.is_bad for c in cycles]
    memo: dict[int, tuple[int, int]] = {0: (1, 0)}
    work = 0

    # explicit stack: depth can reach the number of cycles
    stack = [(1 << n) - 1]
    while stack:
        mask = stack[-1]
        if mask in memo:
            stack.pop()
            continue
        low = mask & -mask
        i = low.bit_length() - 1
        ex_mask, in_mask = mask ^ low, mask & ~low & ~conflict[i]
        ex, inc = memo.get(ex_mask), memo.get(in_mask)
        if ex is None or inc is None:
            if ex is None:
                stack.append(ex_mask)
            if inc is None:
                stack.append(in_mask)
            continue
        work += 1
        if work > bound:
            raise CombinatorialBlowup(f"completion counting exceeded {bound} states")
        in_even, in_odd = (inc[1], inc[0]) if bad[i] else inc
        memo[mask] = (ex[0] + in_even, ex[1] + in_odd)
        stack.pop()

    even, odd = memo[(1 << n) - 1]
    return even - 1, odd


def behavior_from_det(det: int, M: int) -> Behavior:
    if det == 0:
        return "zero"
    return "good" if (det > 0) == (M % 2 == 0) else "bad"


@dataclass(frozen=True)
class Classification:
    selection: ChildSelection
    det: int
    behavior: Behavior
    G: int | None = None
    B: int | None = None
    cycles: tuple[CompletionCycle, ...] | None = None

    def to_json(self, net: ReactionNetwork) -> dict:
        return {
            "selection": self.selection.to_json(net),
            "det": self.det,
            "behavior": self.behavior,
            "G": self.G,
            "B": self.B,
            "cycles": [c.to_json(net) for c in self.cycles] if self.cycles is not None else [],
        }


def classify(
    S: StoichiometricMatrix | ReactionNetwork,
    sel: ChildSelection,
    *,
    counts: bool = True,
    bound: int = DEFAULT_BLOWUP_BOUND,
    graph: MRGraph | None = None,
) -> Classification:
    """Exact determinant, behavior and (for unit-coefficient networks) cycle counts.

    With ``counts`` the identity det * (-1)^M == 1 + G - B is checked and a
    violation raises :class:`IdentityViolation`. A :class:`CombinatorialBlowup`
    during counting leaves G, B and cycles as None.
    """
    if isinstance(S, ReactionNetwork):
        S = S.matrix
    det = det_exact(reshuffled_minor(S, sel))
    behavior = behavior_from_det(det, S.rows)
    if not counts or not S.all_unit:
        return Classification(sel, det, behavior)
    g = graph if graph is not None else S.mr_graph
    try:
        cyc = completion_cycles(g, sel, bound)
        G, B = count_completions(cyc, bound)
    except CombinatorialBlowup:
        return Classification(sel, det, behavior)
    sign = -1 if S.rows % 2 else 1
    if det * sign != 1 + G - B:
        raise IdentityViolation(f"det={det}, M={S.rows}, G={G}, B={B} for {sel.assignment}")
    return Classification(sel, det, behavior, G, B, tuple(cyc))


def theorem_behavior(G: int, B: int) -> Behavior:
    """Behavior read off the G versus B - 1 comparison."""
    if G > B - 1:
        return "good"
    if G < B - 1:
        return "bad"
    return "zero"


def check_corollary_cases(
    S: StoichiometricMatrix | ReactionNetwork,
    sel: ChildSelection,
    cycles: Sequence[CompletionCycle] | None = None,
) -> Behavior | None:
    """Shortcut verdict from the cycle pattern alone, or None if no rule applies.

    Rules: no cycles -> good; a single good cycle -> good; a single bad
    cycle -> zero; exactly two intersecting bad cycles -> bad.
    """
    if isinstance(S, ReactionNetwork):
        S = S.matrix
    if not S.all_unit:
        return None
    if cycles is None:
        cycles = completion_cycles(S.mr_graph, sel)
    if not cycles:
        return "good"
    if len(cycles) == 1:
        return "zero" if cycles[0].is_bad else "good"
    if len(cycles) == 2:
        a, b = cycles
        if a.is_bad and b.is_bad and set(a.metabolites) & set(b.metabolites):
            return "bad"
    return None
