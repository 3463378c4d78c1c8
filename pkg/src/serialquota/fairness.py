"""Fairness audits: exact maximin shares, EF1 checks, and quota feasibility.

MMS is brute-forced over labeled n-part partitions in exact rational
arithmetic; ties in the value vector are fine here, strictness only matters
once a mechanism consumes the instance.  Audits draw instances from named
deterministic families ("identical", "targeted") plus a seeded random family,
so every reported number is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .errors import TieDetected, TooLarge
from .mechanisms import (
    Allocation,
    CardinalInstance,
    Mechanism,
    RoundRobin,
    SerialQuota,
    apply_serial_quota,
    cardinal_apply,
)
from .prefs import AdditiveStrict, Ordering, compare, goods_of
from .properties import PropertyReport

EF1 = "ef1"
MMS_ASSIGNMENT_CAP = 10**7

# Perturbation used by the deterministic families: good g gets an extra
# eps * 2^g, which keeps all subset sums distinct (the integer part and the
# eps part decompose uniquely).
EPS = Fraction(1, 10**6)


@dataclass(frozen=True)
class FairnessAudit:
    """Result of sweeping a mechanism over a family of cardinal instances."""

    mechanism: str
    instances_tested: int
    worst_ratio: Fraction | None
    ef1_violations: tuple[tuple[CardinalInstance, int, int], ...]


@dataclass(frozen=True)
class GeneratorSpec:
    """Instance families to sweep: deterministic ones first, then seeded random."""

    n: int
    m: int
    families: tuple[str, ...] = ("identical", "targeted", "random")
    count: int = 100
    seed: int = 0

    def __post_init__(self):
        known = {"identical", "targeted", "random"}
        bad = set(self.families) - known
        if bad:
            raise ValueError(f"unknown instance families: {sorted(bad)}")


def _values_of(valuation) -> tuple[Fraction, ...]:
    if isinstance(valuation, AdditiveStrict):
        return valuation.values
    return tuple(Fraction(v) for v in valuation)


def mms(valuation: AdditiveStrict | Sequence, n: int) -> Fraction:
    """Maximin share over labeled partitions of all goods into n parts."""
    if n < 1:
        raise ValueError("need at least one part")
    values = _values_of(valuation)
    m = len(values)
    if n**m > MMS_ASSIGNMENT_CAP:
        raise TooLarge(f"{n}^{m} partitions exceed the brute-force cap")
    best = None
    for owners in product(range(n), repeat=m):
        parts = [Fraction(0)] * n
        for g, owner in enumerate(owners):
            parts[owner] += values[g]
        low = min(parts)
        if best is None or low > best:
            best = low
    return best


def bundle_value(valuation, bundle: int) -> Fraction:
    values = _values_of(valuation)
    return sum((values[g] for g in goods_of(bundle)), Fraction(0))


def check_ef1(alloc: Allocation, profile) -> PropertyReport:
    """Envy-freeness up to one good over all ordered agent pairs.

    Accepts either an ordinal profile (checked via compare) or a
    CardinalInstance (checked via exact additive arithmetic); equal bundles
    count as weak preference.
    """
    prefs = profile.valuations if isinstance(profile, CardinalInstance) else profile
    n = alloc.n
    if len(prefs) != n:
        raise ValueError("profile/allocation size mismatch")
    witness = None
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            envied = alloc.bundles[j]
            if envied == 0:
                continue
            mine = alloc.bundles[i]
            ok = False
            for g in goods_of(envied):
                rest = envied & ~(1 << g)
                if rest == mine or compare(prefs[i], rest, mine) is Ordering.LESS:
                    ok = True
                    break
            if not ok:
                witness = {"envious": i, "envied": j}
                break
        if witness:
            break
    return PropertyReport(EF1, witness is None, witness, 1)


def ef1_quota_feasibility(q: Sequence[int]) -> bool:
    """Whether a serial-quota vector can be EF1 on every strict additive
    instance: no quota before the last may exceed 1, and the last may reach 2
    only when every earlier quota is exactly 1."""
    q = tuple(int(x) for x in q)
    if any(x < 0 for x in q):
        raise ValueError("quotas must be non-negative")
    if len(q) <= 1:
        return True
    head, last = q[:-1], q[-1]
    if any(x > 1 for x in head):
        return False
    if last <= 1:
        return True
    return last == 2 and all(x == 1 for x in head)


def identical_instance(n: int, m: int) -> CardinalInstance:
    """Near-identical goods: value 1 + eps*2^g, shared by every agent."""
    row = tuple(1 + EPS * 2**g for g in range(m))
    return CardinalInstance.from_values([row] * n)


def _descending_row(m: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(2 ** (m - g)) for g in range(m))


def targeted_instances(mech: Mechanism) -> list[CardinalInstance]:
    """Worst-case witnesses for quotas >= 2 before the last position.

    For each such position, every agent shares a descending valuation except
    the last picker, who values (almost) only the goods that position's agent
    receives; her leftover bundle is then worth essentially nothing next to
    the envied one even after removing a good.
    """
    if not isinstance(mech, SerialQuota):
        return []
    q, p = mech.quota.q, mech.quota.p
    n, m = mech.n, mech.m
    base = _descending_row(m)
    out = []
    for pos in range(n - 1):
        if q[pos] < 2:
            continue
        profile = tuple(AdditiveStrict(base) for _ in range(n))
        target = apply_serial_quota(mech.quota, profile, m).bundles[p[pos]]
        special = tuple(
            base[g] if target >> g & 1 else EPS * 2**g for g in range(m)
        )
        rows = [base] * n
        rows[p[-1]] = special
        out.append(CardinalInstance.from_values(rows))
    return out


@lru_cache(maxsize=32)
def random_instances(
    n: int, m: int, count: int, seed: int
) -> tuple[CardinalInstance, ...]:
    """Uniform integer values in [1, 1000], rows resampled on subset-sum ties."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        rows = []
        while len(rows) < n:
            vals = tuple(int(v) for v in rng.integers(1, 1001, size=m))
            try:
                rows.append(AdditiveStrict(vals))
            except TieDetected:
                continue
        out.append(CardinalInstance(tuple(rows)))
    return tuple(out)


def generate_instances(mech: Mechanism, spec: GeneratorSpec) -> list[CardinalInstance]:
    out: list[CardinalInstance] = []
    for family in spec.families:
        if family == "identical":
            out.append(identical_instance(spec.n, spec.m))
        elif family == "targeted":
            out.extend(targeted_instances(mech))
        elif family == "random":
            out.extend(random_instances(spec.n, spec.m, spec.count, spec.seed))
    return out


def _descriptor(mech: Mechanism) -> str:
    if isinstance(mech, SerialQuota):
        return f"serial_quota q={mech.quota.q} p={mech.quota.p}"
    if isinstance(mech, RoundRobin):
        return f"round_robin n={mech.n} m={mech.m}"
    return f"{type(mech).__name__} n={mech.n} m={mech.m}"


def _map_instances(fn, instances, jobs: int):
    """Order-preserving map, threaded when jobs > 1; results merge in
    generation order either way."""
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, instances))
    return [fn(inst) for inst in instances]


def rho_mms_audit(mech: Mechanism, spec: GeneratorSpec, jobs: int = 1) -> FairnessAudit:
    """Worst ratio of received value to maximin share across the instance sweep.

    Each agent's ratio is capped at 1 (the guarantee is fully met); MMS = 0
    makes the bound vacuous, also scored 1.
    """
    instances = generate_instances(mech, spec)

    def ratios(inst: CardinalInstance) -> list[Fraction]:
        alloc = cardinal_apply(mech, inst)
        out = []
        for i in range(inst.n):
            share = mms(inst.valuations[i], inst.n)
            if share == 0:
                out.append(Fraction(1))
            else:
                got = bundle_value(inst.valuations[i], alloc.bundles[i])
                out.append(min(Fraction(1), got / share))
        return out

    worst = None
    for rs in _map_instances(ratios, instances, jobs):
        for ratio in rs:
            if worst is None or ratio < worst:
                worst = ratio
    return FairnessAudit(_descriptor(mech), len(instances), worst, ())


def ef1_audit(mech: Mechanism, spec: GeneratorSpec, jobs: int = 1) -> FairnessAudit:
    """Run check_ef1 on every generated instance; collect the first envy pair
    per failing instance, in generation order."""
    instances = generate_instances(mech, spec)

    def envy_pair(inst: CardinalInstance):
        report = check_ef1(cardinal_apply(mech, inst), inst)
        return None if report.holds else report.witness

    violations = []
    for inst, w in zip(instances, _map_instances(envy_pair, instances, jobs)):
        if w is not None:
            violations.append((inst, w["envious"], w["envied"]))
    return FairnessAudit(_descriptor(mech), len(instances), None, tuple(violations))


def _subset_bit_matrix(m: int) -> np.ndarray:
    return ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1).astype(np.int64)


def strict_integer_rows(rng: np.random.Generator, rows: int, m: int) -> np.ndarray:
    """Value rows drawn uniformly from [1, 1000], redrawn until every row has
    all-distinct subset sums."""
    bits = _subset_bit_matrix(m)
    out = rng.integers(1, 1001, size=(rows, m)).astype(np.int64)
    while True:
        sums = out @ bits.T
        sums.sort(axis=1)
        bad = (np.diff(sums, axis=1) == 0).any(axis=1)
        count = int(bad.sum())
        if not count:
            return out
        out[bad] = rng.integers(1, 1001, size=(count, m))


def _apply_quota_int(q, p, vals: np.ndarray) -> np.ndarray:
    """Serial-quota bundles over a batch of integer instances.

    vals has shape (count, n, m) with positive, within-row-distinct values, so
    each pick is the plain top-k of the remaining goods.
    """
    count, n, m = vals.shape
    bits = 1 << np.arange(m, dtype=np.int64)
    remaining = np.full(count, (1 << m) - 1, dtype=np.int64)
    bundles = np.zeros((count, n), dtype=np.int64)
    for k, agent in zip(q, p):
        if k == 0:
            continue
        v = vals[:, agent, :].copy()
        v[(remaining[:, None] & bits) == 0] = 0
        take = np.argsort(-v, axis=1)[:, :k]
        mask = (1 << take.astype(np.int64)).sum(axis=1)
        bundles[:, agent] = mask
        remaining &= ~mask
    return bundles


def _mms_int_batch(rows: np.ndarray, n: int, chunk: int = 2048) -> np.ndarray:
    """MMS per integer value row, vectorized over labeled partitions."""
    m = rows.shape[1]
    if n**m > MMS_ASSIGNMENT_CAP:
        raise TooLarge(f"{n}^{m} partitions exceed the brute-force cap")
    owners = np.zeros((n**m, m), dtype=np.int64)
    idx = np.arange(n**m)
    for g in range(m):
        owners[:, g] = (idx // n ** (m - 1 - g)) % n
    parts = [(owners == j).astype(np.int64) for j in range(n)]
    out = np.empty(rows.shape[0], dtype=np.int64)
    for lo in range(0, rows.shape[0], chunk):
        block = rows[lo : lo + chunk]
        low = None
        for part in parts:
            s = block @ part.T
            low = s if low is None else np.minimum(low, s)
        out[lo : lo + chunk] = low.max(axis=1)
    return out


def rho_floor_sweep(
    n: int, m: int, count: int, seed: int
) -> tuple[bool, Fraction, CardinalInstance | None]:
    """Exact floor check of the (1, ..., 1, m-n+1) quota over seeded random
    integer instances.

    Returns (every ratio >= 1/floor((m-n+2)/2), exact worst capped ratio, and
    the first violating instance if any).  The comparison is integer
    cross-multiplication, no floats involved.
    """
    bound = rho_bound(n, m)
    rng = np.random.default_rng(seed)
    vals = strict_integer_rows(rng, count * n, m).reshape(count, n, m)
    q = (1,) * (n - 1) + (m - n + 1,)
    bundles = _apply_quota_int(q, tuple(range(n)), vals)
    bits = 1 << np.arange(m, dtype=np.int64)
    present = (bundles[:, :, None] & bits) != 0
    got = (vals * present).sum(axis=2)
    shares = _mms_int_batch(vals.reshape(count * n, m), n).reshape(count, n)
    viol = bound.denominator * got < shares
    holds = not viol.any()
    g_flat, s_flat = got.ravel(), shares.ravel()
    k = 0
    for t in range(1, g_flat.shape[0]):
        if int(g_flat[t]) * int(s_flat[k]) < int(g_flat[k]) * int(s_flat[t]):
            k = t
    worst = min(Fraction(1), Fraction(int(g_flat[k]), int(s_flat[k])))
    first = None
    if not holds:
        i = int(np.nonzero(viol.any(axis=1))[0][0])
        first = CardinalInstance.from_values([tuple(int(v) for v in row) for row in vals[i]])
    return holds, worst, first


def ef1_random_sweep(
    quota, m: int, count: int, seed: int
) -> tuple[int, tuple[CardinalInstance, int, int] | None]:
    """EF1 over seeded random integer instances via exact integer arithmetic.

    Returns the number of violating instances and the first violation as
    (instance, envious, envied), replayable through check_ef1.
    """
    n = quota.n
    rng = np.random.default_rng(seed)
    vals = strict_integer_rows(rng, count * n, m).reshape(count, n, m)
    bundles = _apply_quota_int(quota.q, quota.p, vals)
    bits = 1 << np.arange(m, dtype=np.int64)
    present = ((bundles[:, :, None] & bits) != 0).astype(np.int64)
    bad = np.zeros(count, dtype=bool)
    first_pair = np.full((count, 2), -1, dtype=np.int64)
    for i in range(n):
        vi = vals[:, i, :]
        own = (vi * present[:, i]).sum(axis=1)
        for j in range(n):
            if j == i:
                continue
            masked = vi * present[:, j]
            envy = masked.sum(axis=1) - masked.max(axis=1) > own
            new = envy & (first_pair[:, 0] == -1)
            first_pair[new] = (i, j)
            bad |= envy
    if not bad.any():
        return 0, None
    k = int(np.nonzero(bad)[0][0])
    inst = CardinalInstance.from_values([tuple(int(v) for v in row) for row in vals[k]])
    i, j = int(first_pair[k, 0]), int(first_pair[k, 1])
    return int(bad.sum()), (inst, i, j)


def rho_bound(n: int, m: int) -> Fraction:
    """Guarantee achieved by the quota vector (1, ..., 1, m - n + 1)."""
    if not 1 <= n <= m:
        raise ValueError("need 1 <= n <= m")
    return Fraction(1, (m - n + 2) // 2)
