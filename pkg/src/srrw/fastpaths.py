"""Vectorized Monte Carlo engines for the walk families the decay criteria
run at scale.

Each driver simulates a specific (group, transform, step-law) family with
numpy column operations: one column per step, one row per trial, identity (or
rotation) replay realized as a gather on the past-step matrix.  Work is cut
into fixed-size chunks; chunk c of a run draws every number from the stream
(seed, tag, c) and results are merged in chunk order, so counts are identical
for any thread count and any scheduling.

Everything here returns integer counts (or integer sums); turning counts into
estimates with intervals happens one level up.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import rng as rngmod


def _chunks(trials: int, chunk: int):
    out = []
    done = 0
    while done < trials:
        out.append(min(chunk, trials - done))
        done += chunk
    return out


def _chunk_map(worker, trials: int, chunk: int, threads: int):
    """Run worker(chunk_index, chunk_trials) for every chunk, in order."""
    sizes = _chunks(trials, chunk)
    if threads <= 1:
        return [worker(i, m) for i, m in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(worker, range(len(sizes)), sizes))


def _sample_atoms(rng, cum_weights: np.ndarray, m: int) -> np.ndarray:
    return np.searchsorted(cum_weights, rng.random(m), side="right")


def cyclic_histogram(L: int, alpha: float, atoms, weights, n: int,
                     trials: int, seed: int, threads: int = 1,
                     via_forest: bool = False) -> np.ndarray:
    """Endpoint histogram of the identity-replay walk on the L-cycle.

    ``via_forest=True`` draws the percolated forest and sums cluster-size
    blocks of root draws instead of replaying steps; the two routes have the
    same law and give the distributional triangle its second corner.
    """
    atoms = np.asarray(atoms, dtype=np.int64)
    cum = np.cumsum(np.asarray(weights, dtype=float))
    tag = 11 if via_forest else 10

    def worker(ci: int, m: int) -> np.ndarray:
        rng = rngmod.stream(seed, tag, ci)
        rows = np.arange(m)
        if via_forest:
            fresh = atoms[_sample_atoms(rng, cum, m * n).reshape(m, n)]
            root = np.zeros((m, n + 1), dtype=np.int32)
            root[:, 1] = 1
            for j in range(2, n + 1):
                u = rng.integers(1, j, size=m)
                keep = rng.random(m) < alpha
                root[:, j] = np.where(keep, root[rows, u], j)
            vals = np.take_along_axis(fresh, root[:, 1:] - 1, axis=1)
            pos = vals.sum(axis=1) % L
        else:
            steps = np.empty((m, n), dtype=np.int64)
            steps[:, 0] = atoms[_sample_atoms(rng, cum, m)]
            for j in range(2, n + 1):
                u = rng.integers(0, j - 1, size=m)
                replay = steps[rows, u]
                fresh = atoms[_sample_atoms(rng, cum, m)]
                keep = rng.random(m) < alpha
                steps[:, j - 1] = np.where(keep, replay, fresh)
            pos = steps.sum(axis=1) % L
        return np.bincount(pos, minlength=L)

    parts = _chunk_map(worker, trials, 1 << 16, threads)
    return np.sum(parts, axis=0)


def lattice_target_hits(disps: np.ndarray, weights, alpha: float,
                        checkpoints, target, trials: int, seed: int,
                        threads: int = 1) -> dict:
    """Hit counts of a fixed lattice target at several horizons, one pass.

    ``disps`` is the (atoms, d) displacement table of the finite step law.
    The pass runs to max(checkpoints) and tests the position at each listed
    horizon, so the per-horizon counts share trials (fine for point
    estimates, deliberate for the runtime budget).
    """
    disps = np.asarray(disps, dtype=np.int64)
    cum = np.cumsum(np.asarray(weights, dtype=float))
    cps = sorted(set(int(c) for c in checkpoints))
    n_max = cps[-1]
    tgt = np.asarray(target, dtype=np.int64)

    def worker(ci: int, m: int) -> np.ndarray:
        rng = rngmod.stream(seed, 20, ci)
        rows = np.arange(m)
        codes = np.empty((m, n_max), dtype=np.int16)
        pos = np.zeros((m, disps.shape[1]), dtype=np.int64)
        hits = np.zeros(len(cps), dtype=np.int64)
        cp_idx = {c: i for i, c in enumerate(cps)}
        codes[:, 0] = _sample_atoms(rng, cum, m)
        pos += disps[codes[:, 0]]
        if 1 in cp_idx:
            hits[cp_idx[1]] = (pos == tgt).all(axis=1).sum()
        for j in range(2, n_max + 1):
            u = rng.integers(0, j - 1, size=m)
            replay = codes[rows, u]
            fresh = _sample_atoms(rng, cum, m)
            keep = rng.random(m) < alpha
            col = np.where(keep, replay, fresh).astype(np.int16)
            codes[:, j - 1] = col
            pos += disps[col]
            if j in cp_idx:
                hits[cp_idx[j]] = (pos == tgt).all(axis=1).sum()
        return hits

    parts = _chunk_map(worker, trials, 1 << 16, threads)
    total = np.sum(parts, axis=0)
    return {c: int(total[i]) for i, c in enumerate(cps)}


def lattice_ball_hits(disps: np.ndarray, weights, alpha: float, checkpoints,
                      radius: float, trials: int, seed: int,
                      threads: int = 1) -> dict:
    """Counts of |position| < radius (Euclidean norm) at several horizons."""
    disps = np.asarray(disps, dtype=np.int64)
    cum = np.cumsum(np.asarray(weights, dtype=float))
    cps = sorted(set(int(c) for c in checkpoints))
    n_max = cps[-1]
    r2 = radius * radius

    def worker(ci: int, m: int) -> np.ndarray:
        rng = rngmod.stream(seed, 21, ci)
        rows = np.arange(m)
        codes = np.empty((m, n_max), dtype=np.int16)
        pos = np.zeros((m, disps.shape[1]), dtype=np.int64)
        hits = np.zeros(len(cps), dtype=np.int64)
        cp_idx = {c: i for i, c in enumerate(cps)}
        codes[:, 0] = _sample_atoms(rng, cum, m)
        pos += disps[codes[:, 0]]
        if 1 in cp_idx:
            hits[cp_idx[1]] = ((pos * pos).sum(axis=1) < r2).sum()
        for j in range(2, n_max + 1):
            u = rng.integers(0, j - 1, size=m)
            replay = codes[rows, u]
            fresh = _sample_atoms(rng, cum, m)
            keep = rng.random(m) < alpha
            col = np.where(keep, replay, fresh).astype(np.int16)
            codes[:, j - 1] = col
            pos += disps[col]
            if j in cp_idx:
                hits[cp_idx[j]] = ((pos * pos).sum(axis=1) < r2).sum()
        return hits

    parts = _chunk_map(worker, trials, 1 << 16, threads)
    total = np.sum(parts, axis=0)
    return {c: int(total[i]) for i, c in enumerate(cps)}


def gaussian_ball_hits(d: int, alpha: float, checkpoints, radius: float,
                       trials: int, seed: int, threads: int = 1) -> dict:
    """Counts of |position| < radius for standard-normal steps with identity
    replay in d continuous coordinates."""
    cps = sorted(set(int(c) for c in checkpoints))
    n_max = cps[-1]
    r2 = radius * radius

    def worker(ci: int, m: int) -> np.ndarray:
        rng = rngmod.stream(seed, 22, ci)
        rows = np.arange(m)
        steps = np.empty((m, n_max, d), dtype=np.float64)
        pos = np.zeros((m, d), dtype=np.float64)
        hits = np.zeros(len(cps), dtype=np.int64)
        cp_idx = {c: i for i, c in enumerate(cps)}
        steps[:, 0, :] = rng.standard_normal((m, d))
        pos += steps[:, 0, :]
        if 1 in cp_idx:
            hits[cp_idx[1]] = ((pos * pos).sum(axis=1) < r2).sum()
        for j in range(2, n_max + 1):
            u = rng.integers(0, j - 1, size=m)
            replay = steps[rows, u, :]
            fresh = rng.standard_normal((m, d))
            keep = rng.random(m) < alpha
            col = np.where(keep[:, None], replay, fresh)
            steps[:, j - 1, :] = col
            pos += col
            if j in cp_idx:
                hits[cp_idx[j]] = ((pos * pos).sum(axis=1) < r2).sum()
        return hits

    parts = _chunk_map(worker, trials, 1 << 12, threads)
    total = np.sum(parts, axis=0)
    return {c: int(total[i]) for i, c in enumerate(cps)}


def _erw_params(d: int, p: float):
    if p * d >= 1:
        return (d * p - 1) / (d - 1), False
    return 1 - d * p, True


def tree_erw_origin_hits(d: int, p: float, checkpoints, trials: int,
                         seed: int, threads: int = 1) -> dict:
    """Counts of returns to the empty word for the elephant walk on the
    d-regular tree, at several horizons in one pass.

    Words live on a per-trial stack of letters; a step either cancels the
    top letter or pushes, so the empty-word test is depth == 0.
    """
    alpha, rotate = _erw_params(d, p)
    cps = sorted(set(int(c) for c in checkpoints))
    n_max = cps[-1]

    def worker(ci: int, m: int) -> np.ndarray:
        rng = rngmod.stream(seed, 30, ci)
        rows = np.arange(m)
        steps = np.empty((m, n_max), dtype=np.int8)
        stack = np.zeros((m, n_max + 1), dtype=np.int8)
        depth = np.ones(m, dtype=np.int32)
        hits = np.zeros(len(cps), dtype=np.int64)
        cp_idx = {c: i for i, c in enumerate(cps)}
        first = rng.integers(0, d, size=m).astype(np.int8)
        steps[:, 0] = first
        stack[:, 0] = first
        if 1 in cp_idx:
            hits[cp_idx[1]] = 0
        for j in range(2, n_max + 1):
            u = rng.integers(0, j - 1, size=m)
            past = steps[rows, u]
            shift = rng.integers(1, d, size=m) if d > 1 else 0
            replay = ((past + shift) % d).astype(np.int8) if rotate else past
            fresh = rng.integers(0, d, size=m).astype(np.int8)
            keep = rng.random(m) < alpha
            letter = np.where(keep, replay, fresh).astype(np.int8)
            steps[:, j - 1] = letter
            top = stack[rows, np.maximum(depth - 1, 0)]
            cancel = (depth > 0) & (top == letter)
            depth = depth + np.where(cancel, -1, 1)
            push = ~cancel
            stack[rows[push], depth[push] - 1] = letter[push]
            if j in cp_idx:
                hits[cp_idx[j]] = (depth == 0).sum()
        return hits

    parts = _chunk_map(worker, trials, 1 << 17, threads)
    total = np.sum(parts, axis=0)
    return {c: int(total[i]) for i, c in enumerate(cps)}


def tree_erw_distance_sums(d: int, p: float, n: int, trials: int, seed: int,
                           threads: int = 1) -> tuple:
    """(sum, sum of squares) of the word distance after n steps."""
    alpha, rotate = _erw_params(d, p)

    def worker(ci: int, m: int):
        rng = rngmod.stream(seed, 31, ci)
        rows = np.arange(m)
        steps = np.empty((m, n), dtype=np.int8)
        stack = np.zeros((m, n + 1), dtype=np.int8)
        depth = np.ones(m, dtype=np.int32)
        first = rng.integers(0, d, size=m).astype(np.int8)
        steps[:, 0] = first
        stack[:, 0] = first
        for j in range(2, n + 1):
            u = rng.integers(0, j - 1, size=m)
            past = steps[rows, u]
            shift = rng.integers(1, d, size=m) if d > 1 else 0
            replay = ((past + shift) % d).astype(np.int8) if rotate else past
            fresh = rng.integers(0, d, size=m).astype(np.int8)
            keep = rng.random(m) < alpha
            letter = np.where(keep, replay, fresh).astype(np.int8)
            steps[:, j - 1] = letter
            top = stack[rows, np.maximum(depth - 1, 0)]
            cancel = (depth > 0) & (top == letter)
            depth = depth + np.where(cancel, -1, 1)
            push = ~cancel
            stack[rows[push], depth[push] - 1] = letter[push]
        dd = depth.astype(np.int64)
        return np.array([dd.sum(), (dd * dd).sum()], dtype=np.int64)

    parts = _chunk_map(worker, trials, 1 << 15, threads)
    total = np.sum(parts, axis=0)
    return int(total[0]), int(total[1])


# S3 permutations as image tuples, indexed; composition is left to right.
_S3_ORDER = [(0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1), (1, 2, 0), (2, 0, 1)]
_S3_INDEX = {p: i for i, p in enumerate(_S3_ORDER)}


def _s3_mult_table() -> np.ndarray:
    t = np.zeros((6, 6), dtype=np.int8)
    for i, p in enumerate(_S3_ORDER):
        for j, q in enumerate(_S3_ORDER):
            t[i, j] = _S3_INDEX[(q[p[0]], q[p[1]], q[p[2]])]
    return t


_S3_MULT = _s3_mult_table()


def s3z_target_hits(alpha: float, atom_perms, atom_zs, weights, checkpoints,
                    target_perm: int, target_z: int, trials: int, seed: int,
                    threads: int = 1) -> dict:
    """Hit counts of a fixed element of the permutation-times-integers group
    under identity replay, several horizons per pass.

    Atoms are given as (permutation index, integer shift) pairs; the walk
    state is one permutation index and one integer per trial.
    """
    ap = np.asarray(atom_perms, dtype=np.int8)
    az = np.asarray(atom_zs, dtype=np.int64)
    cum = np.cumsum(np.asarray(weights, dtype=float))
    cps = sorted(set(int(c) for c in checkpoints))
    n_max = cps[-1]

    def worker(ci: int, m: int) -> np.ndarray:
        rng = rngmod.stream(seed, 40, ci)
        rows = np.arange(m)
        codes = np.empty((m, n_max), dtype=np.int8)
        perm = np.zeros(m, dtype=np.int8)
        z = np.zeros(m, dtype=np.int64)
        hits = np.zeros(len(cps), dtype=np.int64)
        cp_idx = {c: i for i, c in enumerate(cps)}

        def apply(col):
            nonlocal perm, z
            perm = _S3_MULT[perm, ap[col]]
            z = z + az[col]

        col = _sample_atoms(rng, cum, m).astype(np.int8)
        codes[:, 0] = col
        apply(col)
        if 1 in cp_idx:
            hits[cp_idx[1]] = ((perm == target_perm) & (z == target_z)).sum()
        for j in range(2, n_max + 1):
            u = rng.integers(0, j - 1, size=m)
            replay = codes[rows, u]
            fresh = _sample_atoms(rng, cum, m).astype(np.int8)
            keep = rng.random(m) < alpha
            col = np.where(keep, replay, fresh).astype(np.int8)
            codes[:, j - 1] = col
            apply(col)
            if j in cp_idx:
                hits[cp_idx[j]] = ((perm == target_perm)
                                   & (z == target_z)).sum()
        return hits

    parts = _chunk_map(worker, trials, 1 << 16, threads)
    total = np.sum(parts, axis=0)
    return {c: int(total[i]) for i, c in enumerate(cps)}


def masked_set_walk(step_tables, start_mask: int, n_states: int, trials: int,
                    seed: int, threads: int = 1) -> np.ndarray:
    """Final-set counts for an evolving-set chain on a small state space.

    Sets are bitmasks over at most 16 points.  ``step_tables[j]`` maps each
    mask to (cumulative piece lengths, successor masks): one uniform draw per
    step picks the successor by cumulative threshold, which is exactly the
    level-set dynamics.  Returns counts over final masks.
    """
    n_masks = 1 << n_states

    def worker(ci: int, m: int) -> np.ndarray:
        rng = rngmod.stream(seed, 70, ci)
        state = np.full(m, start_mask, dtype=np.int32)
        for cums, succs in step_tables:
            u = rng.random(m)
            nxt = np.empty(m, dtype=np.int32)
            for mask in np.unique(state):
                rows = state == mask
                idx = np.searchsorted(cums[mask], u[rows], side="left")
                nxt[rows] = succs[mask][idx]
            state = nxt
        return np.bincount(state, minlength=n_masks)

    parts = _chunk_map(worker, trials, 1 << 16, threads)
    return np.sum(parts, axis=0)


def lamplighter_origin_hits(alpha: float, weights, checkpoints, trials: int,
                            seed: int, threads: int = 1) -> dict:
    """Identity-return counts for the lamplighter walk under identity replay.

    Atom order is fixed: stay, toggle, marker +1, marker -1 with the given
    weights.  Lamp states live in a boolean window wide enough for the
    horizon, so every configuration is tracked exactly.
    """
    cum = np.cumsum(np.asarray(weights, dtype=float))
    cps = sorted(set(int(c) for c in checkpoints))
    n_max = cps[-1]
    off = n_max  # marker stays within +-n_max

    def worker(ci: int, m: int) -> np.ndarray:
        rng = rngmod.stream(seed, 50, ci)
        rows = np.arange(m)
        codes = np.empty((m, n_max), dtype=np.int8)
        lamps = np.zeros((m, 2 * n_max + 1), dtype=bool)
        marker = np.zeros(m, dtype=np.int64)
        hits = np.zeros(len(cps), dtype=np.int64)
        cp_idx = {c: i for i, c in enumerate(cps)}

        def apply(col):
            nonlocal marker
            t = col == 1
            lamps[rows[t], marker[t] + off] ^= True
            marker = marker + (col == 2) - (col == 3)

        col = _sample_atoms(rng, cum, m).astype(np.int8)
        codes[:, 0] = col
        apply(col)
        if 1 in cp_idx:
            hits[cp_idx[1]] = ((marker == 0) & ~lamps.any(axis=1)).sum()
        for j in range(2, n_max + 1):
            u = rng.integers(0, j - 1, size=m)
            replay = codes[rows, u]
            fresh = _sample_atoms(rng, cum, m).astype(np.int8)
            keep = rng.random(m) < alpha
            col = np.where(keep, replay, fresh).astype(np.int8)
            codes[:, j - 1] = col
            apply(col)
            if j in cp_idx:
                hits[cp_idx[j]] = ((marker == 0) & ~lamps.any(axis=1)).sum()
        return hits

    parts = _chunk_map(worker, trials, 1 << 14, threads)
    total = np.sum(parts, axis=0)
    return {c: int(total[i]) for i, c in enumerate(cps)}
