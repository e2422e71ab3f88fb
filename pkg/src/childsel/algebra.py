"""Exact integer determinants of reshuffled minors, plus a Leibniz-expansion reference."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .network import StoichiometricMatrix
from .selection import ChildSelection

Matrix = tuple[tuple[int, ...], ...]

LEIBNIZ_MAX = 9


class TooLarge(ValueError):
    pass


def reshuffled_minor(S: StoichiometricMatrix, sel: ChildSelection) -> Matrix:
    """The M x M matrix whose column for metabolite m is column ``sel[m]`` of S."""
    if len(sel) != S.rows:
        raise ValueError(f"selection has {len(sel)} entries, matrix has {S.rows} rows")
    cols = sel.assignment
    minor = tuple(tuple(row[j] for j in cols) for row in S.entries)
    for m in range(len(cols)):
        if minor[m][m] >= 0:
            raise ValueError(f"diagonal entry {m} of the reshuffled minor is not negative")
    return minor


def det_exact(A: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free Bareiss elimination; exact for Python ints."""
    n = len(A)
    if n == 0:
        return 1
    if any(len(row) != n for row in A):
        raise ValueError("matrix is not square")
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    a = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class LeibnizTerm:
    permutation: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...]
    value: int


def permutation_cycles(perm: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Cycles of length > 1, each starting at its smallest element, following ``m -> perm[m]``."""
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = []
        m = start
        while not seen[m]:
            seen[m] = True
            cyc.append(m)
            m = perm[m]
        out.append(tuple(cyc))
    return tuple(out)


def leibniz_oracle(A: Sequence[Sequence[int]]) -> tuple[int, list[LeibnizTerm]]:
    """Sum over all permutations of sgn(pi) * prod_m A[pi(m)][m].

    Returns the determinant and every term with a nonzero value.
    """
    n = len(A)
    if n > LEIBNIZ_MAX:
        raise TooLarge(f"Leibniz expansion refused for n={n} > {LEIBNIZ_MAX}")
    total = 0
    terms = []
    for perm in itertools.permutations(range(n)):
        value = 1
        for m in range(n):
            value *= A[perm[m]][m]
            if value == 0:
                break
        if value == 0:
            continue
        cycles = permutation_cycles(perm)
        # sgn = (-1)^(n - number of cycles incl. fixed points) = prod (-1)^(len-1)
        if sum(len(c) - 1 for c in cycles) % 2:
            value = -value
        total += value
        terms.append(LeibnizTerm(perm, cycles, value))
    return total, terms
