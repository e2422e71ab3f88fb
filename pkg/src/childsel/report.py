"""Analysis reports assembled from the library calls, plus their text and JSON renderings."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from .bifurcation import (
    BifurcationPair,
    SignChangeWitness,
    WitnessNotFound,
    construct_sign_witness,
    find_bifurcation_pairs,
)
from .cycles import Classification, classify
from .network import ReactionNetwork, StoichiometricMatrix, network_summary
from .selection import (
    NO_CONSTRAINT,
    ChildSelection,
    SelectionConstraint,
    count_child_selections,
    map_selections,
    partition_budgets,
    partition_constraints,
)


@dataclass
class AnalysisReport:
    summary: dict
    selection_count: int
    enumerated: int = 0
    tallies: dict[str, int] = field(default_factory=lambda: {"good": 0, "bad": 0, "zero": 0})
    classifications: list[Classification] = field(default_factory=list)
    pairs: list[BifurcationPair] = field(default_factory=list)
    witnesses: list[SignChangeWitness | str | None] = field(default_factory=list)
    identity_checked: int = 0
    identity_unverified: int = 0
    timing: float = 0.0

    @property
    def truncated(self) -> bool:
        return self.enumerated < self.selection_count


def _classify_worker(S: StoichiometricMatrix, sel: ChildSelection) -> Classification:
    return classify(S, sel)


def classify_report(
    net: ReactionNetwork,
    constraint: SelectionConstraint = NO_CONSTRAINT,
    limit: int | None = None,
    threads: int = 1,
) -> AnalysisReport:
    t0 = time.perf_counter()
    S = net.matrix
    total = count_child_selections(S, constraint)
    results = map_selections(S, _classify_worker, constraint, limit, threads)
    report = AnalysisReport(network_summary(net), total, enumerated=len(results))
    tally = Counter(c.behavior for c in results)
    report.tallies = {k: tally.get(k, 0) for k in ("good", "bad", "zero")}
    report.classifications = results
    report.identity_checked = sum(c.G is not None for c in results)
    if S.all_unit:
        report.identity_unverified = len(results) - report.identity_checked
    report.timing = time.perf_counter() - t0
    return report


def _pairs_worker(args):
    S, constraint, anchors, budget = args
    return list(find_bifurcation_pairs(S, constraint, budget, anchors))


def _pair_key(p: BifurcationPair):
    return (p.m_b, p.j1.assignment, p.j2.assignment)


def bifurcation_report(
    net: ReactionNetwork,
    constraint: SelectionConstraint = NO_CONSTRAINT,
    limit: int | None = None,
    threads: int = 1,
    witness_eps: float | None = None,
) -> AnalysisReport:
    t0 = time.perf_counter()
    S = net.matrix
    total = count_child_selections(S, constraint)
    if threads <= 1:
        pairs = list(find_bifurcation_pairs(S, constraint, limit))
    else:
        from concurrent.futures import ProcessPoolExecutor

        parts = partition_constraints(S, constraint)
        budgets = partition_budgets(S, parts, limit)
        jobs = [(S, constraint, c, b) for c, b in zip(parts, budgets) if b != 0]
        seen = set()
        pairs = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for chunk in pool.map(_pairs_worker, jobs):
                for p in chunk:
                    if _pair_key(p) not in seen:
                        seen.add(_pair_key(p))
                        pairs.append(p)
    pairs.sort(key=_pair_key)
    enumerated = total if limit is None else min(limit, total)
    report = AnalysisReport(network_summary(net), total, enumerated=enumerated, pairs=pairs)
    if witness_eps is not None:
        for p in pairs:
            try:
                report.witnesses.append(construct_sign_witness(S, p, witness_eps))
            except WitnessNotFound as exc:
                report.witnesses.append(f"witness not found: {exc}")
    report.timing = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------- rendering


def _sel_text(net: ReactionNetwork, sel: ChildSelection) -> str:
    return ", ".join(
        f"{net.metabolites[m].label}->{net.reactions[j].label}" for m, j in enumerate(sel.assignment)
    )


def summary_line(net: ReactionNetwork) -> str:
    s = network_summary(net)
    unit = "unit coefficients" if s["unit_coefficients"] else "non-unit coefficients"
    return (
        f"{s['metabolites']} metabolites, {s['reactions']} reactions "
        f"({s['feeds']} feeds, {s['exits']} exits; {unit})"
    )


def classify_text(net: ReactionNetwork, rep: AnalysisReport, verbose=False, check_identity=False) -> str:
    lines = [f"network: {summary_line(net)}", f"child selections: {rep.selection_count}"]
    if rep.truncated:
        lines.append(f"classified: {rep.enumerated} (truncated by --limit)")
    else:
        lines.append(f"classified: {rep.enumerated}")
    t = rep.tallies
    lines.append(f"tally: good {t['good']}, bad {t['bad']}, zero {t['zero']}")
    if check_identity:
        if not net.matrix.all_unit:
            lines.append("identity det*(-1)^M = 1+G-B: not applicable (non-unit coefficients)")
        else:
            msg = f"identity det*(-1)^M = 1+G-B: verified for {rep.identity_checked} selections"
            if rep.identity_unverified:
                msg += f", {rep.identity_unverified} skipped (cycle budget exceeded)"
            lines.append(msg)
    if verbose:
        for c in rep.classifications:
            counts = f"  G={c.G} B={c.B}" if c.G is not None else ""
            lines.append(f"J = {{{_sel_text(net, c.selection)}}}  det={c.det:+d}  {c.behavior}{counts}")
            for cyc in c.cycles or ():
                lines.append(f"    cycle {'-'.join(cyc.vertex_labels(net))} ({cyc.badness})")
    return "\n".join(lines) + "\n"


def classify_json(net: ReactionNetwork, rep: AnalysisReport, verbose=False) -> dict:
    out = {
        "network": rep.summary,
        "selection_count": rep.selection_count,
        "enumerated": rep.enumerated,
        "truncated": rep.truncated,
        "tallies": rep.tallies,
        "identity_checked": rep.identity_checked,
        "identity_unverified": rep.identity_unverified,
    }
    if verbose:
        out["classifications"] = [c.to_json(net) for c in rep.classifications]
    return out


def bifurcation_text(net: ReactionNetwork, rep: AnalysisReport) -> str:
    lines = [f"network: {summary_line(net)}", f"child selections: {rep.selection_count}"]
    if rep.truncated:
        lines.append(f"anchors searched: {rep.enumerated} (truncated by --limit)")
    if not rep.pairs:
        lines.append("no pairs found")
    for i, p in enumerate(rep.pairs):
        mb = net.metabolites[p.m_b].label
        lines.append(
            f"pair {i + 1}: m_b = {mb}, det S^J1 = {p.det1:+d} (good), det S^J2 = {p.det2:+d} (bad)"
        )
        lines.append(f"  {p.formula(net)}")
        if rep.witnesses:
            w = rep.witnesses[i]
            if isinstance(w, str):
                lines.append(f"  {w}")
            else:
                lines.append(
                    f"  witness (eps={w.epsilon:g}): det G = {w.det_plus:.6g} at xi = +1, "
                    f"{w.det_minus:.6g} at xi = -1"
                )
    return "\n".join(lines) + "\n"


def bifurcation_json(net: ReactionNetwork, rep: AnalysisReport) -> dict:
    pairs = []
    for i, p in enumerate(rep.pairs):
        d = p.to_json(net)
        if rep.witnesses:
            w = rep.witnesses[i]
            d["witness"] = {"error": w} if isinstance(w, str) else w.to_json(net)
        pairs.append(d)
    return {
        "network": rep.summary,
        "selection_count": rep.selection_count,
        "enumerated": rep.enumerated,
        "truncated": rep.truncated,
        "pairs": pairs,
    }
