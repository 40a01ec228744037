"""Percolated random recursive forests and the walks assembled from them.

Vertices arrive one at a time; vertex j attaches to a uniform earlier vertex
and the new edge is kept with probability ``alpha``, independently.  Deleting
the dropped edges splits the recursive tree into clusters, each rooted at its
smallest label; the roots are exactly the vertices whose own edge was dropped
(vertex 1 has no edge and is always a root).

Assigning every root a fresh step draw and pushing values down the kept edges
through the per-vertex transformations reproduces, jointly in law, the steps
of the reinforced walk; ordered multiplication of the values assembles the
walk itself.  This is the package's second, structurally different sampler
for the same process and the basis of several exact identities (with identity
transforms on an abelian group the position is the cluster-size-weighted sum
of the root draws).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .sampler import SrrwConfig, WalkTrace, draw_step
from .stats import Estimate, binomial_estimate


@dataclass
class PercolatedForest:
    """Attachment targets and edge-retention flags, 1-based.

    ``parent[j]`` is the attachment target of vertex j (0 for vertex 1, which
    has none) and ``retained[j]`` is 1 iff the edge was kept; index 0 of both
    arrays is padding.
    """

    n: int
    parent: list
    retained: list

    def check(self) -> "PercolatedForest":
        assert len(self.parent) == self.n + 1
        assert len(self.retained) == self.n + 1
        assert self.retained[1] == 0
        for j in range(2, self.n + 1):
            assert 1 <= self.parent[j] <= j - 1
            assert self.retained[j] in (0, 1)
        return self

    def dump_csv(self, fileobj) -> None:
        """Rows (vertex, parent, retained); parent is 0 for vertex 1."""
        w = csv.writer(fileobj)
        w.writerow(["vertex", "parent", "retained"])
        for j in range(1, self.n + 1):
            w.writerow([j, self.parent[j], self.retained[j]])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.dump_csv(buf)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, fileobj) -> "PercolatedForest":
        rows = list(csv.reader(fileobj))
        if rows and rows[0] and not rows[0][0].isdigit():
            rows = rows[1:]
        rows = [r for r in rows if r]
        n = len(rows)
        parent = [0] * (n + 1)
        retained = [0] * (n + 1)
        for r in rows:
            j, u, keep = int(r[0]), int(r[1]), int(r[2])
            parent[j] = u
            retained[j] = keep
        return cls(n=n, parent=parent, retained=retained).check()


@dataclass
class ClusterStats:
    """Cluster labeling of a forest: per-vertex root, root -> size, and the
    number of singleton clusters."""

    root_of: list
    sizes: dict
    isolated_count: int

    def isolated_vertices(self) -> list:
        return sorted(j for j, s in self.sizes.items() if s == 1)


def grow(n: int, alpha: float, rng_seed) -> PercolatedForest:
    """Grow an n-vertex forest: uniform attachment, Bernoulli(alpha) retention."""
    if n < 1:
        raise ValueError("need at least one vertex")
    rng = rngmod.as_generator(rng_seed)
    parent = [0] * (n + 1)
    retained = [0] * (n + 1)
    for j in range(2, n + 1):
        parent[j] = int(rng.integers(1, j))
        retained[j] = 1 if rng.random() < alpha else 0
    return PercolatedForest(n=n, parent=parent, retained=retained)


def clusters(forest: PercolatedForest) -> ClusterStats:
    """Label clusters in one forward pass.

    A vertex whose edge was dropped roots a new cluster; otherwise it joins
    its parent's cluster.  Parents always have smaller labels, so the root
    found this way is automatically the smallest label in its cluster.
    """
    n = forest.n
    root_of = [0] * (n + 1)
    sizes: dict = {}
    for j in range(1, n + 1):
        if forest.retained[j]:
            r = root_of[forest.parent[j]]
        else:
            r = j
        root_of[j] = r
        sizes[r] = sizes.get(r, 0) + 1
    isolated = sum(1 for s in sizes.values() if s == 1)
    return ClusterStats(root_of=root_of, sizes=sizes, isolated_count=isolated)


def assign_and_assemble(forest: PercolatedForest, config: SrrwConfig,
                        rng_seed) -> WalkTrace:
    """Assign root values and push them down kept edges, then multiply up.

    Root j draws a fresh step; a non-root's value is its parent's value put
    through the vertex's own transformation.  A single forward pass suffices
    because a vertex's value depends only on its parent's.
    """
    rng = rngmod.as_generator(rng_seed)
    g, mu, tf = config.group, config.mu, config.transform
    n = forest.n
    value = [None] * (n + 1)
    trace = WalkTrace(group=g, steps=[], positions=[g.identity()],
                      reinforcement_flags=[], picks=[])
    for j in range(1, n + 1):
        if forest.retained[j]:
            value[j] = tf.apply(g, mu, j, value[forest.parent[j]], rng,
                                history=trace)
        else:
            value[j] = draw_step(g, mu, rng)
        trace.steps.append(value[j])
        trace.positions.append(g.multiply(trace.positions[-1], value[j]))
        if j >= 2:
            trace.reinforcement_flags.append(forest.retained[j])
            trace.picks.append(forest.parent[j])
    return trace


def cluster_size_walk(alpha: float, n: int, rng_seed,
                      sign_law: str = "pm1") -> int:
    """Integer-valued fast path: sum of cluster sizes times i.i.d. root draws.

    ``sign_law`` is "pm1" (uniform on -1/+1) or "bit" (uniform on 0/1).  No
    group machinery: this is the closed form of the walk position for identity
    transformations on an abelian group, used for integer and cyclic reductions.
    """
    if sign_law not in ("pm1", "bit"):
        raise ValueError(f"unknown sign law {sign_law!r}")
    rng = rngmod.as_generator(rng_seed)
    stats = clusters(grow(n, alpha, rng))
    total = 0
    for size in stats.sizes.values():
        bit = int(rng.integers(0, 2))
        g = (2 * bit - 1) if sign_law == "pm1" else bit
        total += size * g
    return total


def _root_matrix(n: int, alpha: float, trials: int, rng) -> np.ndarray:
    """(trials, n+1) matrix of cluster roots; column 0 is padding.

    Roots are decided at attachment time and never change, so one pass over
    vertex columns vectorizes across trials.
    """
    root_of = np.zeros((trials, n + 1), dtype=np.int32)
    root_of[:, 1] = 1
    rows = np.arange(trials)
    for j in range(2, n + 1):
        u = rng.integers(1, j, size=trials)
        keep = rng.random(trials) < alpha
        parent_root = root_of[rows, u]
        root_of[:, j] = np.where(keep, parent_root, j)
    return root_of


def all_even_indicator(n: int, alpha: float, trials: int, rng) -> np.ndarray:
    """Boolean vector: per trial, are all cluster sizes even?"""
    root_of = _root_matrix(n, alpha, trials, rng)
    rows = np.arange(trials)[:, None]
    counts = np.zeros((trials, n + 1), dtype=np.int32)
    np.add.at(counts, (np.broadcast_to(rows, root_of[:, 1:].shape),
                       root_of[:, 1:]), 1)
    return (counts % 2 == 0).all(axis=1)


def all_clusters_even_probability(alpha: float, n: int, trials: int,
                                  rng_seed) -> Estimate:
    """Monte Carlo probability that every cluster has even size.

    Zero whenever n is odd (sizes sum to n); the even-n values match the
    central coefficients of the elephant polynomials.
    """
    rng = rngmod.as_generator(rng_seed)
    hits = 0
    chunk = 1 << 14
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        hits += int(all_even_indicator(n, alpha, m, rng).sum())
        done += m
    return binomial_estimate(hits, trials)


def isolated_count(forest: PercolatedForest) -> int:
    return clusters(forest).isolated_count


def isolated_counts_batch(n: int, alpha: float, trials: int, rng) -> np.ndarray:
    """Vectorized isolated-cluster counts over many grown forests.

    A vertex is isolated iff its own edge was dropped and no later vertex
    kept an edge to it.
    """
    own_dropped = np.ones((trials, n + 1), dtype=bool)
    has_kept_child = np.zeros((trials, n + 1), dtype=bool)
    rows = np.arange(trials)
    for j in range(2, n + 1):
        u = rng.integers(1, j, size=trials)
        keep = rng.random(trials) < alpha
        own_dropped[:, j] = ~keep
        has_kept_child[rows[keep], u[keep]] = True
    return (own_dropped[:, 1:] & ~has_kept_child[:, 1:]).sum(axis=1)


def suffix_isolated_count(m: int, n: int, alpha: float, rng_seed) -> int:
    """Isolated count among the last n vertices of one grown (m+n)-vertex forest."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    stats = clusters(grow(m + n, alpha, rngmod.as_generator(rng_seed)))
    return sum(1 for j, s in stats.sizes.items() if s == 1 and j > m)
