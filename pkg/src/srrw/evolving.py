"""Evolving sets for the time-inhomogeneous kernels of a forest realization.

Conditionally on a forest, the per-step transition kernels of the walk are
either the one-step kernel of the step distribution (at vertices that end up
as singleton clusters, where the root draw stays unrevealed) or deterministic
right translations by the already-determined step value.  The evolving-set
process thresholds the incoming-mass profile of the current set against a
uniform variable; its set sizes form a martingale, and the size-biased Doob
transform of the process never dies out.

All threshold decompositions here are exact: step weights are floats, floats
are rationals, and the pieces are computed in Fraction arithmetic, so the
martingale identity sum_i len_i |A_i| = |W| holds to machine equality rather
than within a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import rng as rngmod
from .forest import PercolatedForest, clusters
from .groups import Group, StepDistribution, bfs_ball
from .sampler import SrrwConfig, WalkTrace
from .stats import Estimate, binomial_estimate


@dataclass
class MuStep:
    """One step by the step distribution: kernel (x, y) -> mu(x^-1 y)."""

    def __repr__(self):
        return "MuStep"


@dataclass
class DeterministicStep:
    """Right translation by a fixed, already-revealed step value."""

    g: object

    def __repr__(self):
        return f"DeterministicStep({self.g!r})"


@dataclass
class KernelSeq:
    """Per-step kernel tags for steps 1..n, with their group and step law."""

    group: Group
    mu: StepDistribution
    tags: list

    @property
    def n(self) -> int:
        return len(self.tags)

    def kernel(self, j: int):
        if not 1 <= j <= self.n:
            raise IndexError(f"step {j} outside 1..{self.n}")
        return self.tags[j - 1]


def kernel_seq_from_forest(forest: PercolatedForest, config: SrrwConfig,
                           trace: WalkTrace) -> KernelSeq:
    """Tag each step of an assembled walk.

    A vertex that is a singleton cluster keeps its fresh-draw randomness, so
    its step kernel is the step distribution; every other vertex's value is
    pinned by the revealed root draws and transformations, leaving a
    deterministic translation.
    """
    if config.mu.is_continuous:
        raise ValueError("kernel sequences need a finite-support mu")
    stats = clusters(forest)
    isolated = {j for j, s in stats.sizes.items() if s == 1}
    tags = []
    for j in range(1, forest.n + 1):
        if j in isolated:
            tags.append(MuStep())
        else:
            tags.append(DeterministicStep(trace.steps[j - 1]))
    return KernelSeq(group=config.group, mu=config.mu, tags=tags)


def _exact_weights(mu: StepDistribution) -> list:
    # Float weights are rationals; lifting them to Fractions makes every
    # threshold sum exact.
    return [(e, Fraction(w)) for e, w in mu.support]


def mass_profile(group: Group, mu: StepDistribution, W) -> dict:
    """Q(y) = sum over x in W of mu(x^-1 y), exact, as element -> Fraction."""
    q: dict = {}
    for x in W:
        for s, w in _exact_weights(mu):
            y = group.multiply(x, s)
            q[y] = q.get(y, Fraction(0)) + w
    return q


def threshold_pieces(group: Group, mu: StepDistribution, W) -> list:
    """The exact threshold decomposition of one evolving-set step.

    Returns ``[(length, set)]`` where the uniform variable falling in the
    i-th length produces the i-th set; lengths are Fractions summing to the
    top profile value.  The sets are nested decreasing in the listed order
    of strictly decreasing threshold.
    """
    if not W:
        raise ValueError("empty current set")
    q = mass_profile(group, mu, W)
    levels = sorted(set(q.values()), reverse=True)
    pieces = []
    for i, lvl in enumerate(levels):
        nxt = levels[i + 1] if i + 1 < len(levels) else Fraction(0)
        a = {y for y, v in q.items() if v >= lvl}
        pieces.append((lvl - nxt, a))
    return pieces


def martingale_defect(group: Group, mu: StepDistribution, W) -> Fraction:
    """sum_i len_i |A_i| - |W|; exactly zero for every valid decomposition."""
    pieces = threshold_pieces(group, mu, W)
    return sum((l * len(a) for l, a in pieces), Fraction(0)) - len(W)


def evolve_step(group: Group, mu: StepDistribution, W, kernel, U: float):
    """One evolving-set update: keep the points whose incoming mass reaches U.

    A deterministic kernel translates the whole set for every U; the
    distribution kernel thresholds the exact mass profile.
    """
    if isinstance(kernel, DeterministicStep):
        return {group.multiply(x, kernel.g) for x in W}
    u = Fraction(U) if not isinstance(U, Fraction) else U
    q = mass_profile(group, mu, W)
    return {y for y, v in q.items() if v >= u}


def psi(group: Group, mu: StepDistribution, W) -> float:
    """One minus the expected root of the relative size after one mu-step.

    Exact integration over the threshold pieces: the uniform variable lands
    in piece i with probability equal to its length, producing the piece's
    set; above the top level the set is empty and contributes zero.
    """
    if not W:
        raise ValueError("empty current set")
    pieces = threshold_pieces(group, mu, W)
    total = sum(float(l) * math.sqrt(len(a)) for l, a in pieces)
    return 1.0 - total / math.sqrt(len(W))


def bottleneck(group: Group, mu: StepDistribution, A) -> float:
    """Mass flowing out of A per element of A under one mu-step."""
    if not A:
        raise ValueError("empty set")
    inside = set(A)
    out = 0.0
    for x in inside:
        for s, w in mu.support:
            if group.multiply(x, s) not in inside:
                out += w
    return out / len(A)


def edge_boundary_count(group: Group, moves, A) -> int:
    """Directed Cayley-graph edges from A to its complement."""
    inside = set(A)
    return sum(1 for x in inside for s in moves
               if group.multiply(x, s) not in inside)


def enumerate_group(group: Group, cap: int = 100_000) -> list:
    """All elements of a finite group, via saturation of generator balls."""
    prev = -1
    radius = 4
    while True:
        ball = bfs_ball(group, radius)
        if len(ball) == prev:
            return [elem for elem, _ in ball.values()]
        if len(ball) > cap:
            raise ValueError(f"group enumeration exceeded cap {cap}")
        prev = len(ball)
        radius *= 2


def connected_sets(group: Group, moves, r: int, seed_elem=None,
                   max_sets: int = 2_000_000) -> list:
    """All connected subsets containing the seed element, sizes 1..r.

    Connectivity is with respect to right moves by ``moves``.  Every subset
    is produced exactly once (standard fixed-root connected-subgraph
    enumeration: each candidate is either taken or permanently excluded).
    """
    if seed_elem is None:
        seed_elem = group.identity()
    results: list = []

    def neighbors(x):
        return [group.multiply(x, s) for s in moves]

    def extend(S, frontier, excluded):
        results.append(S)
        if len(results) > max_sets:
            raise ValueError(f"enumeration exceeded cap {max_sets}")
        if len(S) == r:
            return
        cand = [v for v in frontier if v not in S and v not in excluded]
        for i, v in enumerate(cand):
            new_frontier = list(frontier) + [y for y in neighbors(v)
                                             if y not in S]
            extend(S | {v}, new_frontier, excluded | set(cand[:i]))

    extend(frozenset([seed_elem]), neighbors(seed_elem), frozenset())
    return results


@dataclass
class ProfileValue:
    """A profile point: the best ratio found at size cap r.

    ``restricted`` is set when the search ranged only over connected sets
    containing a fixed base point (an upper bound on the true infimum);
    complete enumeration over a finite group clears it.
    """

    r: int
    value: float
    best_set: frozenset
    restricted: bool


def _candidate_sets(group: Group, mu: StepDistribution, r: int,
                    search_scope: str):
    if search_scope == "connected":
        e = group.identity()
        moves = [s for s, _ in mu.support
                 if group.canonical_key(s) != group.canonical_key(e)]
        return connected_sets(group, moves, r), True
    if search_scope == "all":
        from itertools import combinations

        elems = enumerate_group(group)
        if len(elems) > 24:
            raise ValueError("complete subset enumeration needs a small group")
        sets = []
        for size in range(1, min(r, len(elems)) + 1):
            sets.extend(frozenset(c) for c in combinations(elems, size))
        return sets, False
    raise ValueError(f"unknown search scope {search_scope!r}")


def iso_profile(group: Group, mu: StepDistribution, r: int,
                search_scope: str = "connected") -> ProfileValue:
    """Smallest bottleneck ratio over candidate sets of size at most r."""
    sets, restricted = _candidate_sets(group, mu, r, search_scope)
    best, best_set = math.inf, frozenset()
    for a in sets:
        v = bottleneck(group, mu, a)
        if v < best:
            best, best_set = v, a
    return ProfileValue(r=r, value=best, best_set=best_set,
                        restricted=restricted)


def psi_profile(group: Group, mu: StepDistribution, r: int,
                search_scope: str = "connected") -> ProfileValue:
    """Smallest one-step psi over the same candidate sets as iso_profile."""
    sets, restricted = _candidate_sets(group, mu, r, search_scope)
    best, best_set = math.inf, frozenset()
    for a in sets:
        v = psi(group, mu, a)
        if v < best:
            best, best_set = v, a
    return ProfileValue(r=r, value=best, best_set=best_set,
                        restricted=restricted)


def doob_step(group: Group, mu: StepDistribution, W, kernel, rng_seed):
    """One step of the size-biased evolving-set chain.

    Piece i of the threshold decomposition is drawn with probability
    len_i |A_i| / |W|; the weights sum to one by the martingale identity, so
    the resulting set is never empty.  Deterministic kernels translate.
    """
    if not W:
        raise ValueError("empty current set")
    if isinstance(kernel, DeterministicStep):
        return {group.multiply(x, kernel.g) for x in W}
    rng = rngmod.as_generator(rng_seed)
    pieces = threshold_pieces(group, mu, W)
    weights = [float(l) * len(a) / len(W) for l, a in pieces]
    u = rng.random()
    acc = 0.0
    for (_, a), w in zip(pieces, weights):
        acc += w
        if u < acc:
            return set(a)
    return set(pieces[-1][1])


def reverse_kernels(seq: KernelSeq) -> KernelSeq:
    """Time reversal: step j of the reversal is the transpose of step
    n+1-j.  The transpose of a mu-step is the step of the reflected
    distribution (weights moved to inverse elements); the transpose of a
    translation is the inverse translation."""
    g = seq.group
    reflected = StepDistribution(
        support=[(g.inverse(e), w) for e, w in seq.mu.support])
    tags = []
    for tag in reversed(seq.tags):
        if isinstance(tag, DeterministicStep):
            tags.append(DeterministicStep(g.inverse(tag.g)))
        else:
            tags.append(MuStep())
    return KernelSeq(group=g, mu=reflected, tags=tags)


def kernel_matrix(seq: KernelSeq, j: int, elements: list) -> np.ndarray:
    """Dense matrix of step j over an enumerated state list (row: from)."""
    g = seq.group
    index = {g.canonical_key(x): i for i, x in enumerate(elements)}
    m = np.zeros((len(elements), len(elements)))
    tag = seq.kernel(j)
    for i, x in enumerate(elements):
        if isinstance(tag, DeterministicStep):
            m[i, index[g.canonical_key(g.multiply(x, tag.g))]] = 1.0
        else:
            for s, w in seq.mu.support:
                m[i, index[g.canonical_key(g.multiply(x, s))]] += w
    return m


def compose_matrices(seq: KernelSeq, elements: list, k: int,
                     l: int) -> np.ndarray:
    """Product of the dense step matrices for steps k+1..l."""
    m = np.eye(len(elements))
    for j in range(k + 1, l + 1):
        m = m @ kernel_matrix(seq, j, elements)
    return m


def transition_via_evolving_sets(seq: KernelSeq, x, y, l: int, trials: int,
                                 rng_seed, k: int = 0) -> Estimate:
    """Estimate the k-to-l transition probability from x to y as the chance
    that y belongs to the evolving set started at {x}.

    Fresh uniform thresholds drive each step; trials use derived streams in
    fixed-size chunks so the estimate is reproducible under any scheduling.
    """
    g, mu = seq.group, seq.mu
    ky = g.canonical_key(y)
    hits = 0
    chunk = 1 << 12
    done = 0
    ci = 0
    while done < trials:
        m = min(chunk, trials - done)
        rng = rngmod.as_generator(rng_seed, 71, ci)
        for _ in range(m):
            w = {x}
            for j in range(k + 1, l + 1):
                w = evolve_step(g, mu, w, seq.kernel(j), rng.random())
                if not w:
                    break
            if any(g.canonical_key(z) == ky for z in w):
                hits += 1
        done += m
        ci += 1
    return binomial_estimate(hits, trials)


def set_tree(seq: KernelSeq, start, k: int, l: int) -> list:
    """Exact law of the evolving set after steps k+1..l from a start set.

    Full enumeration over the per-step threshold pieces (the empty set
    branch included), probabilities exact.  Exponential in l - k; meant for
    the small horizons where closed identities are certified.
    """
    g, mu = seq.group, seq.mu
    states = [(frozenset(start), Fraction(1))]
    for j in range(k + 1, l + 1):
        tag = seq.kernel(j)
        nxt: dict = {}

        def add(s, p):
            nxt[s] = nxt.get(s, Fraction(0)) + p

        for w, p in states:
            if not w:
                add(w, p)
                continue
            if isinstance(tag, DeterministicStep):
                add(frozenset(g.multiply(z, tag.g) for z in w), p)
                continue
            pieces = threshold_pieces(g, mu, w)
            used = Fraction(0)
            for length, a in pieces:
                add(frozenset(a), p * length)
                used += length
            if used < 1:
                add(frozenset(), p * (1 - used))
        states = list(nxt.items())
    return states
