"""Vectorized profile tables used by the axiom checkers.

A mechanism over an enumerable class with C members and n agents is fully
described by its allocation table: an array of shape (C^n, n) whose row at a
profile index holds each agent's bundle bitmask.  The checkers in
`properties` scan these tables with numpy; witnesses they find are re-derived
and re-played through the pure-Python apply path.

Profile indexing is mixed-radix with agent 0 as the most significant digit,
matching `mechanisms.profile_index`.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

import numpy as np

from . import mechanisms as mech_mod
from .mechanisms import Mechanism, SerialQuota, TableMechanism
from .prefs import (
    Permutation,
    PreferenceClass,
    demand,
    full_mask,
    rank_table,
    strongly_desires,
)


@lru_cache(maxsize=None)
def digit_array(c: int, n: int) -> np.ndarray:
    """digits[idx, j] = agent j's member index in profile idx; shape (c^n, n)."""
    idx = np.arange(c**n, dtype=np.int64)
    cols = [(idx // c ** (n - 1 - j)) % c for j in range(n)]
    out = np.stack(cols, axis=1)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def radix_powers(c: int, n: int) -> np.ndarray:
    out = np.array([c ** (n - 1 - j) for j in range(n)], dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def rank_matrix(cls: PreferenceClass) -> np.ndarray:
    """ranks[i, s] = rank of subset s under member i; shape (C, 2^m)."""
    out = np.array([rank_table(p) for p in cls.members], dtype=np.int32)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def demand_tables(cls: PreferenceClass) -> np.ndarray:
    """dt[k, i, pool] = k-demand of member i from pool (k clamped to |pool|)."""
    m = cls.m
    size = 1 << m
    out = np.zeros((m + 1, len(cls.members), size), dtype=np.int32)
    for i, p in enumerate(cls.members):
        for pool in range(size):
            avail = pool.bit_count()
            for k in range(m + 1):
                out[k, i, pool] = demand(p, pool, min(k, avail))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def strong_desire_matrix(cls: PreferenceClass) -> np.ndarray:
    """sd[i, s] = member i strongly desires subset s; shape (C, 2^m)."""
    out = np.array(
        [[strongly_desires(p, s) for s in range(1 << cls.m)] for p in cls.members],
        dtype=bool,
    )
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def mask_perm_table(pi: Permutation) -> np.ndarray:
    """image[s] = pi(s) for every bitmask s."""
    out = np.array([pi.apply_mask(s) for s in range(1 << pi.m)], dtype=np.int32)
    out.setflags(write=False)
    return out


def neutrality_perms(m: int, samples: int = 100, seed: int = 0) -> list[Permutation]:
    """All m! permutations for m <= 4; transpositions plus seeded samples above."""
    if m <= 4:
        return [Permutation(p) for p in permutations(range(m))]
    out = [Permutation.swap(m, a, b) for a in range(m) for b in range(a + 1, m)]
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        out.append(Permutation(tuple(int(x) for x in rng.permutation(m))))
    return out


def allocation_table(mech: Mechanism) -> np.ndarray:
    """Bundle bitmask per (profile index, agent); shape (C^n, n)."""
    cls = mech.domain
    c = len(cls)
    n = mech.n
    if isinstance(mech, TableMechanism):
        return np.array(mech.table, dtype=np.int32)
    if isinstance(mech, SerialQuota):
        digits = digit_array(c, n)
        dt = demand_tables(cls)
        out = np.zeros((c**n, n), dtype=np.int32)
        remaining = np.full(c**n, full_mask(mech.m), dtype=np.int32)
        for k, agent in zip(mech.quota.q, mech.quota.p):
            got = dt[k][digits[:, agent], remaining]
            out[:, agent] = got
            remaining &= ~got
        return out
    out = np.zeros((c**n, n), dtype=np.int32)
    for idx in range(c**n):
        profile = mech_mod.index_to_profile(idx, cls, n)
        out[idx] = mech_mod.apply(mech, profile).bundles
    return out


def _agent_views(table: np.ndarray, c: int, n: int, agent: int):
    """Per-column tables reshaped to (rest, c) with the agent's digit last.

    Returns (views, idx_view) where views[j][r, d] is agent j's bundle in the
    profile whose agent digit is d and whose other digits encode r, and
    idx_view[r, d] is that profile's index.
    """
    grid_shape = (c,) * n
    views = []
    for j in range(n):
        g = table[:, j].reshape(grid_shape)
        views.append(np.moveaxis(g, agent, -1).reshape(-1, c))
    idx = np.moveaxis(np.arange(table.shape[0]).reshape(grid_shape), agent, -1).reshape(-1, c)
    return views, idx


def _lowest(candidates):
    """Deterministic pick: smallest witness tuple or None."""
    return min(candidates) if candidates else None


def truthful_violation(table: np.ndarray, cls: PreferenceClass, n: int):
    """Lowest (profile_idx, agent, alt_member) where the deviation strictly gains."""
    c = len(cls)
    ranks = rank_matrix(cls)
    found = []
    for i in range(n):
        views, idx = _agent_views(table, c, n, i)
        bi = views[i]  # (R, c)
        rt = ranks[:, bi]  # (c_true, R, c_dev)
        own = rt[np.arange(c), :, np.arange(c)]  # (c_true, R)
        viol = rt > own[:, :, None]
        if viol.any():
            t, r, d = np.nonzero(viol)
            prof = idx[r, t]
            found.append(_lowest(zip(prof.tolist(), [i] * len(d), d.tolist())))
    return _lowest(found)


def nonbossy_violation(table: np.ndarray, cls: PreferenceClass, n: int):
    """Lowest (profile_idx, agent, alt_member) where own bundle holds but others move."""
    c = len(cls)
    found = []
    for i in range(n):
        views, idx = _agent_views(table, c, n, i)
        bi = views[i]
        same = bi[:, :, None] == bi[:, None, :]  # [r, t, d]
        differ = np.zeros_like(same)
        for j in range(n):
            if j != i:
                bj = views[j]
                differ |= bj[:, :, None] != bj[:, None, :]
        viol = same & differ
        if viol.any():
            r, t, d = np.nonzero(viol)
            prof = idx[r, t]
            found.append(_lowest(zip(prof.tolist(), [i] * len(d), d.tolist())))
    return _lowest(found)


def neutrality_violation(table: np.ndarray, cls: PreferenceClass, n: int, perms=None):
    """Lowest (profile_idx, perm_position) where renaming goods breaks covariance."""
    c = len(cls)
    digits = digit_array(c, n)
    powers = radix_powers(c, n)
    if perms is None:
        perms = neutrality_perms(cls.m)
    best = None
    for pos, pi in enumerate(perms):
        action = np.asarray(cls.perm_action(pi), dtype=np.int64)
        new_idx = action[digits] @ powers
        expect = mask_perm_table(pi)[table]
        bad = np.nonzero((table[new_idx] != expect).any(axis=1))[0]
        if bad.size:
            cand = (int(bad[0]), pos)
            if best is None or cand < best:
                best = cand
    return best


def partition_violation(table: np.ndarray, m: int):
    union = np.bitwise_or.reduce(table, axis=1)
    bad = np.nonzero(union != full_mask(m))[0]
    return int(bad[0]) if bad.size else None


@lru_cache(maxsize=None)
def assignment_masks(n: int, m: int) -> np.ndarray:
    """All (n+1)^m ways to give each good to an agent or to nobody.

    Row a, column j: bundle bitmask of agent j under assignment a; owner n
    means unallocated.  Assignments are ordered with good 0 most significant.
    """
    count = (n + 1) ** m
    out = np.zeros((count, n), dtype=np.int32)
    owners = digit_array(n + 1, m)  # (count, m): owner of good g
    for g in range(m):
        for j in range(n):
            out[:, j] |= (owners[:, g] == j) << g
    out.setflags(write=False)
    return out


def pareto_violation(table: np.ndarray, cls: PreferenceClass, n: int):
    """Lowest (profile_idx, blocking bundle tuple); blocker has lowest assignment index."""
    c = len(cls)
    m = cls.m
    digits = digit_array(c, n)
    ranks = rank_matrix(cls)
    am = assignment_masks(n, m)
    p_count = table.shape[0]
    cur = np.stack([ranks[digits[:, j], table[:, j]] for j in range(n)], axis=1)
    first = np.full(p_count, -1, dtype=np.int64)
    for a in range(am.shape[0]):
        weak = np.ones(p_count, dtype=bool)
        strict = np.zeros(p_count, dtype=bool)
        for j in range(n):
            alt = ranks[digits[:, j], am[a, j]]
            weak &= alt >= cur[:, j]
            strict |= alt > cur[:, j]
        blk = weak & strict & (first == -1)
        first[blk] = a
    bad = np.nonzero(first != -1)[0]
    if not bad.size:
        return None
    prof = int(bad[0])
    return prof, tuple(int(x) for x in am[first[prof]])


def control_violation(table: np.ndarray, cls: PreferenceClass, n: int):
    """Lowest (S, agent, trigger_idx, violating_idx) breaking the control claim."""
    c = len(cls)
    digits = digit_array(c, n)
    sd = strong_desire_matrix(cls)
    for s in range(1, 1 << cls.m):
        desire = sd[:, s]
        all_desire = np.ones(table.shape[0], dtype=bool)
        for j in range(n):
            all_desire &= desire[digits[:, j]]
        if not all_desire.any():
            continue
        contains = (table & s) == s
        for i in range(n):
            trig = all_desire & contains[:, i]
            if not trig.any():
                continue
            viol = desire[digits[:, i]] & ~contains[:, i]
            if viol.any():
                return (
                    s,
                    i,
                    int(np.nonzero(trig)[0][0]),
                    int(np.nonzero(viol)[0][0]),
                )
    return None
