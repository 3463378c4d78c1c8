"""Preference layer: comparison semantics, demand, permutations, classes.

The brute-force oracles here are deliberately independent of the library:
rank tables are rebuilt from scratch by enumerating orderings of the subset
lattice, and demand is checked against an exhaustive argmax.
"""

from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from serialquota import (
    AdditiveStrict,
    EnumerationTooLarge,
    IdenticalSets,
    InvalidDomain,
    InvalidPartition,
    Lexicographic,
    NotEnumerable,
    NotInClass,
    Ordering,
    Permutation,
    QuotaExceedsPool,
    RankTable,
    TieDetected,
    additive_class,
    all_permutations,
    class_from_tag,
    compare,
    demand,
    enumerate_class,
    explicit_class,
    full_mask,
    goods_of,
    induce,
    is_push_up,
    lex_class,
    lexicographic_consistent_with,
    mask_of,
    permute_preference,
    rank_table,
    strict_monotone_class,
    strongly_desires,
    submasks,
)

LEX012 = Lexicographic((0, 1, 2))
INTRO_VALS = (Fraction(11), Fraction(1001, 100), Fraction(10))


def brute_monotone_rank_tables(m):
    """All strict weakly-monotone orders over 2^m subsets, as rank tuples.

    Independent oracle: try every permutation of the subsets and keep the
    ones where T < S (strict subset) implies rank[T] < rank[S].
    """
    subsets = list(range(1 << m))
    tables = []
    for perm in permutations(subsets):
        rank = [0] * len(subsets)
        for pos, s in enumerate(perm):
            rank[s] = pos
        ok = all(
            rank[t] < rank[s]
            for s in subsets
            for t in submasks(s)
            if t != s
        )
        if ok:
            tables.append(tuple(rank))
    return tables


def test_linear_extension_counts_against_brute_force():
    for m in (1, 2):
        brute = set(brute_monotone_rank_tables(m))
        enumerated = {rank_table(p) for p in strict_monotone_class(m).members}
        assert enumerated == brute
    # m=3: 40320 permutations of the 8 subsets, 48 survive
    assert len(brute_monotone_rank_tables(3)) == 48
    assert len(strict_monotone_class(3)) == 48


def test_class_sizes():
    assert len(lex_class(3)) == 6
    assert len(strict_monotone_class(2)) == 2
    assert len(strict_monotone_class(3)) == 48
    assert len(lex_class(1)) == 1
    assert len(strict_monotone_class(1)) == 1


def test_enumeration_caps():
    with pytest.raises(EnumerationTooLarge):
        enumerate_class("strict_monotone_all", 4)
    with pytest.raises(EnumerationTooLarge):
        enumerate_class("lex", 9)
    with pytest.raises(NotEnumerable):
        len(additive_class(3))


def test_compare_lexicographic_first_good_wins():
    assert compare(LEX012, mask_of([0]), mask_of([1, 2])) is Ordering.GREATER
    assert compare(LEX012, mask_of([1, 2]), mask_of([0])) is Ordering.LESS


def test_compare_empty_below_everything():
    for pref in enumerate_class("strict_monotone_all", 3):
        assert compare(pref, 0, mask_of([0])) is Ordering.LESS


def test_compare_identical_sets_rejected():
    with pytest.raises(IdenticalSets):
        compare(LEX012, 0b101, 0b101)


def test_compare_additive_by_subset_sums():
    pref = AdditiveStrict(INTRO_VALS)
    assert compare(pref, mask_of([0]), mask_of([1, 2])) is Ordering.LESS


def test_additive_rejects_subset_sum_collision():
    with pytest.raises(TieDetected):
        AdditiveStrict((Fraction(1), Fraction(2), Fraction(3)))


def test_strictness_totality_m3():
    """Exactly one direction is Greater, for every enumerated pref and pair."""
    pairs = list(combinations(range(8), 2))
    for pref in strict_monotone_class(3).members:
        for s, t in pairs:
            a = compare(pref, s, t)
            b = compare(pref, t, s)
            assert {a, b} == {Ordering.LESS, Ordering.GREATER}


def test_monotone_consistency_m3():
    for pref in strict_monotone_class(3).members:
        for s in range(8):
            for t in submasks(s):
                if t != s:
                    assert compare(pref, t, s) is Ordering.LESS


def test_rank_table_is_monotone_bijection():
    for pref in lex_class(3).members:
        rt = rank_table(pref)
        assert sorted(rt) == list(range(8))
        assert rt[0] == 0
        assert rt[7] == 7


def test_demand_examples():
    assert demand(LEX012, full_mask(3), 0) == 0
    assert demand(LEX012, mask_of([1, 2]), 1) == mask_of([1])
    assert demand(AdditiveStrict(INTRO_VALS), full_mask(3), 1) == mask_of([0])


def test_demand_exceeding_pool_rejected():
    with pytest.raises(QuotaExceedsPool):
        demand(LEX012, mask_of([1]), 2)


def test_demand_has_exact_cardinality_and_beats_alternatives():
    """Exhaustive argmax oracle over all pools and sizes at m=3."""
    for pref in lex_class(3).members:
        for pool in range(8):
            for k in range(pool.bit_count() + 1):
                d = demand(pref, pool, k)
                assert d.bit_count() == k
                assert d & ~pool == 0
                for t in submasks(pool):
                    if t.bit_count() <= k and t != d:
                        assert compare(pref, t, d) is Ordering.LESS


def test_permute_identity_is_noop():
    pi = Permutation.identity(3)
    assert permute_preference(LEX012, pi) == LEX012


def test_permute_lexicographic_swap():
    pi = Permutation.swap(2, 0, 1)
    assert permute_preference(Lexicographic((0, 1)), pi) == Lexicographic((1, 0))


def test_permute_rank_table_subset_by_subset():
    # ranks over (empty, {0}, {1}, {0,1}) = (0,2,1,3); swapping goods gives 0,1,2,3
    base = RankTable((0, 2, 1, 3))
    pi = Permutation.swap(2, 0, 1)
    assert rank_table(permute_preference(base, pi)) == (0, 1, 2, 3)


@given(st.sampled_from(list(lex_class(3).members)), st.permutations(list(range(3))))
def test_permutation_round_trip(pref, pi_map):
    pi = Permutation(tuple(pi_map))
    back = permute_preference(permute_preference(pref, pi), pi.inverse())
    assert rank_table(back) == rank_table(pref)


def test_permute_definition_pointwise():
    """compare(p^pi, pi(S), pi(T)) == compare(p, S, T), exhaustive at m=3."""
    for pref in lex_class(3).members:
        for pi in all_permutations(3):
            moved = permute_preference(pref, pi)
            for s in range(8):
                for t in range(s):
                    assert compare(moved, pi.apply_mask(s), pi.apply_mask(t)) is compare(
                        pref, s, t
                    )


def test_induce_full_universe_is_order_isomorphic():
    out = induce(LEX012, full_mask(3))
    assert rank_table(out) == rank_table(LEX012)


def test_induce_lexicographic_keeps_relative_order():
    out = induce(LEX012, mask_of([1, 2]))
    assert rank_table(out) == rank_table(Lexicographic((0, 1)))


def test_induce_additive_restricts_values():
    # (4,2,1) restricted to goods {0,2} orders subsets like additive (4,1)
    out = induce(AdditiveStrict((Fraction(4), Fraction(2), Fraction(1))), mask_of([0, 2]))
    assert rank_table(out) == rank_table(AdditiveStrict((Fraction(4), Fraction(1))))


def test_induce_agreement_exhaustive_m3():
    for pref in lex_class(3).members:
        for w in range(1, 8):
            goods = goods_of(w)
            pos = {g: i for i, g in enumerate(goods)}
            reduced = induce(pref, w)
            for s in submasks(w):
                for t in submasks(w):
                    if s == t:
                        continue
                    rs = sum(1 << pos[g] for g in goods_of(s))
                    rt = sum(1 << pos[g] for g in goods_of(t))
                    assert compare(reduced, rs, rt) is compare(pref, s, t)


def test_strongly_desires_prefixes_only():
    assert strongly_desires(LEX012, mask_of([0]))
    assert strongly_desires(LEX012, mask_of([0, 1]))
    assert not strongly_desires(LEX012, mask_of([1]))


def test_strongly_desired_sets_of_lex_are_exactly_prefixes():
    for m in (2, 3, 4):
        for pref in lex_class(m).members:
            prefixes = {0}
            acc = 0
            for g in pref.order:
                acc |= 1 << g
                prefixes.add(acc)
            desired = {s for s in range(1 << m) if strongly_desires(pref, s)}
            assert desired == prefixes


def test_is_push_up_examples():
    base = Lexicographic((0, 1))
    assert is_push_up(base, base, mask_of([0]))
    for cand in lex_class(2).members:
        assert is_push_up(cand, base, full_mask(2))
    assert not is_push_up(Lexicographic((1, 0)), base, mask_of([0]))


def test_lexicographic_consistent_with():
    assert lexicographic_consistent_with([0b011, 0b100]) == Lexicographic((0, 1, 2))
    assert lexicographic_consistent_with([0b100, 0b011]) == Lexicographic((2, 0, 1))
    assert lexicographic_consistent_with([0b111]) == Lexicographic((0, 1, 2))
    with pytest.raises(InvalidPartition):
        lexicographic_consistent_with([0b011, 0b110])
    with pytest.raises(InvalidPartition):
        lexicographic_consistent_with([0b001], 2)


def test_class_membership_and_index():
    cls = lex_class(3)
    for i, pref in enumerate(cls.members):
        assert cls.index_of(pref) == i
        assert pref in cls
    with pytest.raises(NotInClass):
        cls.index_of(RankTable(tuple(rank_table(AdditiveStrict(INTRO_VALS)))))


def test_explicit_class_requires_permutation_closure():
    with pytest.raises(InvalidDomain):
        explicit_class(2, (Lexicographic((0, 1)),))  # missing the other lex order
    lex_keys = {rank_table(p) for p in lex_class(3).members}
    stray = next(
        p for p in strict_monotone_class(3).members if rank_table(p) not in lex_keys
    )
    with pytest.raises(InvalidDomain):
        # all lex orders present, but the extra member's orbit is not
        explicit_class(3, (*lex_class(3).members, stray))
    full = explicit_class(3, tuple(strict_monotone_class(3).members))
    assert len(full) == 48


def test_class_from_tag_round_trip():
    assert class_from_tag("lex", 3).tag == "lex"
    assert class_from_tag("strict_monotone_all", 2).tag == "strict_monotone_all"
    assert class_from_tag("strict_additive", 3).tag == "strict_additive"
    with pytest.raises(ValueError):
        class_from_tag("responsive", 3)


def test_mask_helpers():
    assert full_mask(3) == 0b111
    assert mask_of([0, 2]) == 0b101
    assert goods_of(0b101) == [0, 2]
    assert list(submasks(0b101)) == [0b000, 0b001, 0b100, 0b101]
