"""Reaction networks, the line-oriented network DSL, and stoichiometric matrices.

A network file looks like::

    # Example 1
    1: A -> B + C
    2: B -> C
    3: C -> A
    f1: -> A
    r: A + 2 B <-> C

Reversible arrows become two irreversible reactions ``<label>_f`` and
``<label>_b``. Metabolites are indexed by order of first appearance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

_NAME = r"[A-Za-z0-9_][A-Za-z0-9_-]*"
_NAME_RE = re.compile(rf"^{_NAME}$")
_TERM_RE = re.compile(rf"^(?:(\d+)\s+)?({_NAME})$")
_LINE_RE = re.compile(rf"^({_NAME})\s*:\s*(.*?)\s*(<->|->)\s*(.*?)\s*$")


class NetworkError(ValueError):
    """Base class for invalid network input."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        self.message = message
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


class NetworkSyntaxError(NetworkError):
    pass


class AutocatalysisError(NetworkError):
    pass


class DuplicateLabelError(NetworkError):
    pass


class EmptyReactionError(NetworkError):
    pass


@dataclass(frozen=True)
class Metabolite:
    label: str
    index: int


@dataclass(frozen=True)
class Reaction:
    """An irreversible reaction; ``inputs``/``outputs`` hold (metabolite index, coefficient)."""

    label: str
    index: int
    inputs: tuple[tuple[int, int], ...]
    outputs: tuple[tuple[int, int], ...]

    @property
    def is_feed(self) -> bool:
        return not self.inputs

    @property
    def is_exit(self) -> bool:
        return not self.outputs


@dataclass(frozen=True)
class StoichiometricMatrix:
    """Integer M x N matrix; ``entries[m][j]`` is negative for inputs, positive for outputs."""

    entries: tuple[tuple[int, ...], ...]
    n_cols: int

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return self.n_cols

    def __getitem__(self, mj: tuple[int, int]) -> int:
        m, j = mj
        return self.entries[m][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    @cached_property
    def all_unit(self) -> bool:
        return all(abs(v) == 1 for row in self.entries for v in row if v)

    @cached_property
    def input_support(self) -> tuple[tuple[int, int], ...]:
        """All (reaction, metabolite) pairs with the metabolite an input of the reaction."""
        return tuple(
            (j, m) for m, row in enumerate(self.entries) for j, v in enumerate(row) if v < 0
        )

    @cached_property
    def mr_graph(self):
        from .cycles import build_mr_graph

        return build_mr_graph(self)

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class ReactionNetwork:
    metabolites: tuple[Metabolite, ...]
    reactions: tuple[Reaction, ...]
    _met_index: dict[str, int] = field(init=False, repr=False, compare=False)
    _rxn_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        met_index: dict[str, int] = {}
        for i, met in enumerate(self.metabolites):
            if met.index != i:
                raise NetworkError(f"metabolite {met.label!r} has index {met.index}, expected {i}")
            if met.label in met_index:
                raise DuplicateLabelError(f"duplicate metabolite {met.label!r}")
            met_index[met.label] = i
        rxn_index: dict[str, int] = {}
        M = len(self.metabolites)
        for i, rxn in enumerate(self.reactions):
            if rxn.index != i:
                raise NetworkError(f"reaction {rxn.label!r} has index {rxn.index}, expected {i}")
            if rxn.label in rxn_index:
                raise DuplicateLabelError(f"duplicate reaction label {rxn.label!r}")
            rxn_index[rxn.label] = i
            _check_sides(rxn.label, rxn.inputs, rxn.outputs, M, None)
        object.__setattr__(self, "_met_index", met_index)
        object.__setattr__(self, "_rxn_index", rxn_index)

    @classmethod
    def from_reactions(
        cls,
        reactions: Iterable[tuple[str, dict[str, int], dict[str, int]]],
        metabolites: Iterable[str] = (),
    ) -> ReactionNetwork:
        """Build a network from ``(label, {met: coeff}, {met: coeff})`` triples.

        Metabolites listed in ``metabolites`` come first; the rest follow in
        first-appearance order.
        """
        order: dict[str, int] = {}
        for name in metabolites:
            order.setdefault(name, len(order))
        built = []
        for k, (label, ins, outs) in enumerate(reactions):
            for name in list(ins) + list(outs):
                order.setdefault(name, len(order))
            built.append(
                Reaction(
                    label,
                    k,
                    tuple((order[n], c) for n, c in ins.items()),
                    tuple((order[n], c) for n, c in outs.items()),
                )
            )
        mets = tuple(Metabolite(name, i) for name, i in order.items())
        return cls(mets, tuple(built))

    @property
    def M(self) -> int:
        return len(self.metabolites)

    @property
    def N(self) -> int:
        return len(self.reactions)

    def metabolite_index(self, label: str) -> int:
        try:
            return self._met_index[label]
        except KeyError:
            raise KeyError(f"unknown metabolite {label!r}") from None

    def reaction_index(self, label: str) -> int:
        try:
            return self._rxn_index[label]
        except KeyError:
            raise KeyError(f"unknown reaction {label!r}") from None

    @property
    def metabolite_labels(self) -> list[str]:
        return [m.label for m in self.metabolites]

    @property
    def reaction_labels(self) -> list[str]:
        return [r.label for r in self.reactions]

    @cached_property
    def matrix(self) -> StoichiometricMatrix:
        return stoichiometric_matrix(self)

    def structure(self) -> tuple:
        """Label-level structure, used for round-trip equality."""
        names = self.metabolite_labels
        return (
            tuple(names),
            tuple(
                (
                    r.label,
                    tuple((names[m], c) for m, c in r.inputs),
                    tuple((names[m], c) for m, c in r.outputs),
                )
                for r in self.reactions
            ),
        )


def _check_sides(label, inputs, outputs, M, lineno):
    if not inputs and not outputs:
        raise EmptyReactionError(f"reaction {label!r} has neither inputs nor outputs", lineno)
    for side, name in ((inputs, "inputs"), (outputs, "outputs")):
        seen = set()
        for m, c in side:
            if not 0 <= m < M:
                raise NetworkError(f"reaction {label!r} refers to metabolite index {m}", lineno)
            if not isinstance(c, int) or c <= 0:
                raise NetworkError(f"reaction {label!r}: coefficient {c!r} is not a positive integer", lineno)
            if m in seen:
                raise NetworkError(f"reaction {label!r}: metabolite listed twice in {name}", lineno)
            seen.add(m)
    both = {m for m, _ in inputs} & {m for m, _ in outputs}
    if both:
        raise AutocatalysisError(
            f"reaction {label!r} is explicitly autocatalytic (metabolite index {min(both)} on both sides)",
            lineno,
        )


def _parse_side(text: str, lineno: int) -> list[tuple[str, int]]:
    text = text.strip()
    if not text:
        return []
    terms = []
    for raw in text.split("+"):
        raw = raw.strip()
        match = _TERM_RE.match(raw)
        if match is None:
            raise NetworkSyntaxError(f"malformed term {raw!r}", lineno)
        coeff = int(match.group(1)) if match.group(1) else 1
        if coeff <= 0:
            raise NetworkSyntaxError(f"coefficient must be positive in {raw!r}", lineno)
        terms.append((match.group(2), coeff))
    return terms


def parse_network(text: str) -> ReactionNetwork:
    """Parse the network DSL into a validated :class:`ReactionNetwork`."""
    order: dict[str, int] = {}
    reactions: list[Reaction] = []
    labels: dict[str, int] = {}

    def add(label, ins, outs, lineno):
        if label in labels:
            raise DuplicateLabelError(
                f"duplicate reaction label {label!r} (first defined on line {labels[label]})", lineno
            )
        labels[label] = lineno
        in_idx, out_idx = [], []
        for terms, dest in ((ins, in_idx), (outs, out_idx)):
            seen: set[str] = set()
            for name, coeff in terms:
                if name in seen:
                    raise NetworkSyntaxError(f"metabolite {name!r} listed twice on one side", lineno)
                seen.add(name)
                dest.append((order.setdefault(name, len(order)), coeff))
        both = sorted({n for n, _ in ins} & {n for n, _ in outs})
        if both:
            raise AutocatalysisError(
                f"reaction {label!r} is explicitly autocatalytic: {both[0]!r} on both sides", lineno
            )
        if not in_idx and not out_idx:
            raise EmptyReactionError(f"reaction {label!r} has neither inputs nor outputs", lineno)
        reactions.append(Reaction(label, len(reactions), tuple(in_idx), tuple(out_idx)))

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        match = _LINE_RE.match(line)
        if match is None:
            raise NetworkSyntaxError(f"cannot parse reaction line {line!r}", lineno)
        label, lhs, arrow, rhs = match.groups()
        if "->" in lhs or "->" in rhs or "<-" in lhs or "<-" in rhs:
            raise NetworkSyntaxError(f"more than one arrow in {line!r}", lineno)
        ins = _parse_side(lhs, lineno)
        outs = _parse_side(rhs, lineno)
        if arrow == "->":
            add(label, ins, outs, lineno)
        else:
            # both directions are checked before either is added
            if not ins and not outs:
                raise EmptyReactionError(f"reaction {label!r} has neither inputs nor outputs", lineno)
            add(f"{label}_f", ins, outs, lineno)
            add(f"{label}_b", outs, ins, lineno)

    mets = tuple(Metabolite(name, i) for name, i in order.items())
    return ReactionNetwork(mets, tuple(reactions))


def _format_side(net: ReactionNetwork, side) -> str:
    return " + ".join(
        net.metabolites[m].label if c == 1 else f"{c} {net.metabolites[m].label}" for m, c in side
    )


def serialize_network(net: ReactionNetwork) -> str:
    """Render a network back into the DSL (irreversible reactions only)."""
    lines = []
    for r in net.reactions:
        lhs, rhs = _format_side(net, r.inputs), _format_side(net, r.outputs)
        lines.append(f"{r.label}: {lhs} -> {rhs}".replace(":  ->", ": ->").rstrip())
    return "\n".join(lines) + "\n"


def stoichiometric_matrix(net: ReactionNetwork) -> StoichiometricMatrix:
    rows = [[0] * net.N for _ in range(net.M)]
    for r in net.reactions:
        for m, c in r.inputs:
            rows[m][r.index] = -c
        for m, c in r.outputs:
            rows[m][r.index] = c
    return StoichiometricMatrix(tuple(tuple(row) for row in rows), net.N)


def input_bipartite_graph(net: ReactionNetwork | StoichiometricMatrix) -> list[frozenset[int]]:
    """For each metabolite, the set of reactions it is an input of."""
    S = net.matrix if isinstance(net, ReactionNetwork) else net
    return [frozenset(j for j, v in enumerate(row) if v < 0) for row in S.entries]


def network_to_json(net: ReactionNetwork) -> dict:
    names = net.metabolite_labels
    return {
        "metabolites": names,
        "reactions": [
            {
                "label": r.label,
                "inputs": {names[m]: c for m, c in r.inputs},
                "outputs": {names[m]: c for m, c in r.outputs},
            }
            for r in net.reactions
        ],
        "S": net.matrix.tolist(),
    }


def network_summary(net: ReactionNetwork) -> dict:
    return {
        "metabolites": net.M,
        "reactions": net.N,
        "feeds": sum(r.is_feed for r in net.reactions),
        "exits": sum(r.is_exit for r in net.reactions),
        "unit_coefficients": net.matrix.all_unit,
    }
