"""Jacobian determinants from rate derivatives, distance-1 good/bad pairs, and sign-change witnesses.

Floating point lives only here. Everything that decides a behavior upstream
is exact; the numbers in this module are demonstrations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .algebra import det_exact, reshuffled_minor
from .cycles import behavior_from_det
from .network import ReactionNetwork, StoichiometricMatrix
from .selection import (
    NO_CONSTRAINT,
    ChildSelection,
    SelectionConstraint,
    enumerate_child_selections,
    selection_distance,
)

log = logging.getLogger(__name__)

RTOL = 1e-9
ATOL = 1e-12


class DomainMismatch(ValueError):
    """Rate derivatives do not cover exactly the input pairs of S."""


class WitnessNotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class RateDerivatives:
    """Positive values r[j, m] for every reaction j with input metabolite m."""

    values: Mapping[tuple[int, int], float]

    def __post_init__(self):
        for key, v in self.values.items():
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"rate derivative {key} must be positive and finite, got {v!r}")

    def __getitem__(self, jm: tuple[int, int]) -> float:
        return self.values[jm]

    @classmethod
    def constant(cls, S: StoichiometricMatrix, value: float = 1.0) -> RateDerivatives:
        return cls({jm: value for jm in S.input_support})

    @classmethod
    def random(cls, S: StoichiometricMatrix, rng: np.random.Generator, low=0.1, high=10.0):
        return cls({jm: float(rng.uniform(low, high)) for jm in S.input_support})

    def to_json(self, net: ReactionNetwork) -> list[dict]:
        return [
            {
                "reaction": net.reactions[j].label,
                "metabolite": net.metabolites[m].label,
                "value": v,
            }
            for (j, m), v in sorted(self.values.items())
        ]


def _check_domain(S: StoichiometricMatrix, rates: RateDerivatives) -> None:
    support = set(S.input_support)
    keys = set(rates.values)
    if keys != support:
        missing, extra = support - keys, keys - support
        raise DomainMismatch(f"missing rates {sorted(missing)[:5]}, extraneous rates {sorted(extra)[:5]}")


def lu_det(A: np.ndarray) -> float:
    """Determinant by LU with partial pivoting, carried out in ``A``'s dtype."""
    a = np.array(A, copy=True)
    n = a.shape[0]
    det = a.dtype.type(1)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0:
            return 0.0
        if p != k:
            a[[k, p]] = a[[p, k]]
            det = -det
        det *= a[k, k]
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return float(det)


def jacobian_det_numeric(S: StoichiometricMatrix, rates: RateDerivatives) -> float:
    """det(S R) by LU with partial pivoting.

    G = S R and its factorization are computed in extended precision
    (``np.longdouble``): in double precision, structurally singular G
    routinely leaves residues of 1e-11 where the exact value is 0.
    """
    _check_domain(S, rates)
    M, N = S.rows, S.cols
    if M == 0:
        return 1.0
    R = np.zeros((N, M), dtype=np.longdouble)
    for (j, m), v in rates.values.items():
        R[j, m] = v
    G = np.array(S.entries, dtype=np.longdouble).reshape(M, N) @ R
    return lu_det(G)


def jacobian_det_cauchy_binet(
    S: StoichiometricMatrix,
    rates: RateDerivatives,
    selections: Iterable[ChildSelection] | None = None,
) -> float:
    """Sum over Child Selections J of det(S^J) * prod_m r[J(m), m]."""
    _check_domain(S, rates)
    if selections is None:
        selections = enumerate_child_selections(S)
    terms = []
    for sel in selections:
        d = det_exact(reshuffled_minor(S, sel))
        if d:
            terms.append(d * math.prod(rates[j, m] for m, j in enumerate(sel.assignment)))
    return math.fsum(terms)


def dets_agree(x: float, y: float, rtol: float = RTOL, atol: float = ATOL) -> bool:
    diff = abs(x - y)
    return diff <= atol or diff <= rtol * max(abs(x), abs(y))


@dataclass(frozen=True)
class BifurcationPair:
    j1: ChildSelection  # good
    j2: ChildSelection  # bad
    m_b: int
    det1: int
    det2: int

    @property
    def a(self) -> int:
        return abs(self.det1)

    @property
    def b(self) -> int:
        return abs(self.det2)

    def xi(self, rates: RateDerivatives) -> float:
        m = self.m_b
        return self.a * rates[self.j1[m], m] - self.b * rates[self.j2[m], m]

    def formula(self, net: ReactionNetwork, unicode: bool = True) -> str:
        mb = net.metabolites[self.m_b].label
        c1 = net.reactions[self.j1[self.m_b]].label
        c2 = net.reactions[self.j2[self.m_b]].label
        if unicode:
            return f"ξ = {self.a}·r[{c1},{mb}] − {self.b}·r[{c2},{mb}]"
        return f"{self.a}*r[{c1},{mb}] - {self.b}*r[{c2},{mb}]"

    def to_json(self, net: ReactionNetwork) -> dict:
        return {
            "m_b": net.metabolites[self.m_b].label,
            "j1_child": net.reactions[self.j1[self.m_b]].label,
            "j2_child": net.reactions[self.j2[self.m_b]].label,
            "a": self.a,
            "b": self.b,
            "xi": self.formula(net, unicode=False),
            "det_j1": self.det1,
            "det_j2": self.det2,
            "j1": self.j1.to_json(net),
            "j2": self.j2.to_json(net),
        }


def validate_pair(S: StoichiometricMatrix, pair: BifurcationPair) -> None:
    """Re-derive every invariant of ``pair`` from scratch; raises ValueError on failure."""
    if selection_distance(pair.j1, pair.j2) != 1 or pair.j1[pair.m_b] == pair.j2[pair.m_b]:
        raise ValueError("selections are not at distance 1 with the difference at m_b")
    d1 = det_exact(reshuffled_minor(S, pair.j1))
    d2 = det_exact(reshuffled_minor(S, pair.j2))
    if (d1, d2) != (pair.det1, pair.det2):
        raise ValueError("stored determinants are wrong")
    if behavior_from_det(d1, S.rows) != "good" or behavior_from_det(d2, S.rows) != "bad":
        raise ValueError("j1 must be good and j2 bad")


def find_bifurcation_pairs(
    net: ReactionNetwork | StoichiometricMatrix,
    constraint: SelectionConstraint = NO_CONSTRAINT,
    budget: int | None = None,
    anchors: SelectionConstraint | None = None,
) -> Iterator[BifurcationPair]:
    """Distance-1 (good, bad) pairs found by probing single reassignments of enumerated selections.

    ``budget`` caps the number of enumerated anchor selections. Bad anchors
    are probed for good neighbours and good anchors for bad ones; each
    unordered pair is reported once. ``anchors`` narrows which selections
    are enumerated as anchors (used to split the search across workers)
    while probes still range over everything ``constraint`` allows.
    """
    S = net.matrix if isinstance(net, ReactionNetwork) else net
    allowed = constraint.allowed_children(S)
    M = S.rows
    dets: dict[tuple[int, ...], int] = {}

    def det_of(assignment):
        d = dets.get(assignment)
        if d is None:
            d = det_exact(reshuffled_minor(S, ChildSelection(assignment)))
            dets[assignment] = d
        return d

    reported: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    for anchor in enumerate_child_selections(S, anchors or constraint, budget):
        a = anchor.assignment
        beh = behavior_from_det(det_of(a), M)
        if beh == "zero":
            continue
        want = "good" if beh == "bad" else "bad"
        used = set(a)
        for m in range(M):
            for r in allowed[m]:
                if r == a[m] or r in used:
                    continue
                nb = a[:m] + (r,) + a[m + 1 :]
                if behavior_from_det(det_of(nb), M) != want:
                    continue
                good, bad = (nb, a) if want == "good" else (a, nb)
                if (good, bad) in reported:
                    continue
                reported.add((good, bad))
                yield BifurcationPair(ChildSelection(good), ChildSelection(bad), m, dets[good], dets[bad])


@dataclass(frozen=True)
class SignChangeWitness:
    rates_plus: RateDerivatives
    rates_minus: RateDerivatives
    det_plus: float
    det_minus: float
    epsilon: float

    def to_json(self, net: ReactionNetwork) -> dict:
        return {
            "epsilon": self.epsilon,
            "det_plus": self.det_plus,
            "det_minus": self.det_minus,
            "rates_plus": self.rates_plus.to_json(net),
            "rates_minus": self.rates_minus.to_json(net),
        }


def witness_rates(
    S: StoichiometricMatrix, pair: BifurcationPair, epsilon: float, xi_sign: int
) -> RateDerivatives:
    """Shared children of j1 at 1, the two m_b rates set so xi = +-1, everything else epsilon."""
    mb = pair.m_b
    c1, c2 = pair.j1[mb], pair.j2[mb]
    if xi_sign > 0:
        r1, r2 = (1 + pair.b) / pair.a, 1.0
    else:
        r1, r2 = 1.0, (pair.a + 1) / pair.b
    values = {}
    for j, m in S.input_support:
        if m == mb and j == c1:
            values[j, m] = r1
        elif m == mb and j == c2:
            values[j, m] = r2
        elif m != mb and j == pair.j1[m]:
            values[j, m] = 1.0
        else:
            values[j, m] = epsilon
    return RateDerivatives(values)


def construct_sign_witness(
    net: ReactionNetwork | StoichiometricMatrix,
    pair: BifurcationPair,
    epsilon: float = 1e-3,
    retries: int = 6,
) -> SignChangeWitness:
    """Two rate settings, differing only at m_b's two children, with opposite det(G) signs.

    Tries ``epsilon``, then divides it by 10 up to ``retries`` times while the
    small terms still swamp the leading one.
    """
    S = net.matrix if isinstance(net, ReactionNetwork) else net
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    lead = 1 if pair.det1 > 0 else -1  # sign of det G when xi > 0
    eps = epsilon
    for attempt in range(retries + 1):
        plus = witness_rates(S, pair, eps, +1)
        minus = witness_rates(S, pair, eps, -1)
        dp = jacobian_det_numeric(S, plus)
        dm = jacobian_det_numeric(S, minus)
        log.debug("witness attempt %d: eps=%g det+=%g det-=%g", attempt, eps, dp, dm)
        if dp * lead > 0 and dm * lead < 0:
            return SignChangeWitness(plus, minus, dp, dm, eps)
        eps /= 10
    raise WitnessNotFound(
        f"no sign change down to epsilon={eps * 10:g} (last det+={dp:g}, det-={dm:g})"
    )
