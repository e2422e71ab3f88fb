"""Random reaction networks for property and acceptance tests."""

from __future__ import annotations

import random

from childsel.network import ReactionNetwork


def random_network(
    rng: random.Random,
    max_m: int = 6,
    max_n: int = 10,
    max_coeff: int = 1,
    p_exit: float = 0.5,
    min_m: int = 1,
) -> ReactionNetwork:
    """Unit-coefficient by default; every metabolite is drawn from ``m0..m{M-1}``."""
    M = rng.randint(min_m, max_m)
    names = [f"m{i}" for i in range(M)]
    reactions = []
    n_target = rng.randint(M, max(M, max_n))
    # exits first so most networks have Child Selections at all
    for name in names:
        if rng.random() < p_exit and len(reactions) < n_target:
            reactions.append((f"x{name}", {name: _c(rng, max_coeff)}, {}))
    while len(reactions) < n_target:
        n_in = rng.choices([0, 1, 2, 3], weights=[1, 6, 3, 1])[0]
        n_out = rng.choices([0, 1, 2], weights=[2, 5, 2])[0]
        n_in, n_out = min(n_in, M), min(n_out, M)
        ins = rng.sample(names, n_in)
        rest = [n for n in names if n not in ins]
        outs = rng.sample(rest, min(n_out, len(rest)))
        if not ins and not outs:
            continue
        reactions.append(
            (f"r{len(reactions)}", {n: _c(rng, max_coeff) for n in ins}, {n: _c(rng, max_coeff) for n in outs})
        )
    rng.shuffle(reactions)
    return ReactionNetwork.from_reactions(reactions, metabolites=names)


def _c(rng, max_coeff):
    return 1 if max_coeff == 1 else rng.randint(1, max_coeff)


def mono_plus_bimolecular(rng: random.Random, max_m: int = 7) -> ReactionNetwork:
    """Monomolecular reactions, exits and feeds, plus exactly one A + B -> C."""
    M = rng.randint(3, max_m)
    names = [f"m{i}" for i in range(M)]
    a, b, c = rng.sample(names, 3)
    reactions = [("bi", {a: 1, b: 1}, {c: 1})]
    for name in names:
        if rng.random() < 0.7:
            reactions.append((f"x{name}", {name: 1}, {}))
    for k in range(rng.randint(M, 2 * M + 2)):
        kind = rng.random()
        if kind < 0.8:
            u, v = rng.sample(names, 2)
            reactions.append((f"r{k}", {u: 1}, {v: 1}))
        else:
            reactions.append((f"f{k}", {}, {rng.choice(names): 1}))
    rng.shuffle(reactions)
    return ReactionNetwork.from_reactions(reactions, metabolites=names)


def brute_force_selections(net: ReactionNetwork) -> set[tuple[int, ...]]:
    """Every map sending each metabolite to a reaction it feeds, filtered for injectivity."""
    import itertools

    inputs = [set() for _ in range(net.M)]
    for r in net.reactions:
        for m, _ in r.inputs:
            inputs[m].add(r.index)
    return {combo for combo in itertools.product(*inputs) if len(set(combo)) == net.M}
