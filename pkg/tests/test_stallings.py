import random

import pytest

from fgorbits.errors import InvalidInputError, UnsupportedRankError
from fgorbits.stallings import (
    basis_completion,
    bridge_decomposition,
    conjugate_equal,
    contains,
    contains_conjugate,
    cyclically_reduced_conjugate,
    equal_subgroups,
    fold_generators,
    geodesic_label,
    metrics,
    parse_subgroup,
    singularity_profile,
    subgroup_generators,
    to_dot,
)
from fgorbits.words import Word, identity, invert, multiply, word

from helpers import naive_members, random_reduced_word, random_subgroup_gens


def test_fold_single_letter():
    aut = fold_generators([word("a")])
    assert aut.n == 1
    assert aut.step(0, 1) == 0 and aut.step(0, 2) is None


def test_fold_a2_b():
    aut = fold_generators([word("aa"), word("b")])
    assert aut.n == 2
    assert contains(aut, word("b")) and contains(aut, word("aa"))
    assert not contains(aut, word("a"))
    # oracle: every product of up to 4 generators is accepted
    for letters in naive_members([word("aa"), word("b")], depth=4):
        assert contains(aut, Word(letters, 2))


def test_fold_duplicate_generator():
    assert fold_generators([word("ab"), word("ab")]) == fold_generators([word("ab")])


def test_fold_empty_is_trivial():
    aut = fold_generators([])
    assert aut.n == 1 and aut.degree(0) == 0
    assert contains(aut, identity(2)) and not contains(aut, word("a"))


def test_membership_examples():
    aut = fold_generators([word("aa"), word("b")])
    assert contains(aut, identity(2))
    assert not contains(aut, word("a"))
    assert contains(aut, word("baaB"))


def test_membership_oracle_random():
    rng = random.Random(11)
    for _ in range(200):
        gens = random_subgroup_gens(rng)
        aut = fold_generators(gens)
        for letters in naive_members(gens, depth=3):
            assert contains(aut, Word(letters, 2))


def test_fold_confluence_random_orders():
    rng = random.Random(12)
    for _ in range(500):
        gens = random_subgroup_gens(rng)
        reference = fold_generators(gens)
        shuffled = gens[:]
        rng.shuffle(shuffled)
        other = fold_generators(shuffled, fold_order=random.Random(rng.random()))
        assert equal_subgroups(reference, other)


def test_contains_conjugate():
    assert not contains_conjugate(fold_generators([word("a")]), word("bab" "B"))
    # the cyclic core of b a^2 b^-1 is a^2, which loops at the origin
    assert contains_conjugate(fold_generators([word("a")]), word("baaB"))
    assert contains_conjugate(fold_generators([word("ab")]), word("ba"))


def test_singularity_profiles():
    prof = singularity_profile(fold_generators([word("a")]))
    assert (prof.sources, prof.sinks, prof.sigma) == (frozenset(), frozenset(), 1)
    prof = singularity_profile(fold_generators([word("aa"), word("b")]))
    assert prof.sources == {0} and prof.sinks == {0} and prof.sigma == 2
    prof = singularity_profile(fold_generators([word("aaaaaaaaaab")]))
    assert prof.sigma == 1 and not prof.sources and not prof.sinks


def test_rank2_queries_reject_other_ranks():
    aut = fold_generators([word("abc", rank=3)])
    with pytest.raises(UnsupportedRankError):
        singularity_profile(aut)
    with pytest.raises(UnsupportedRankError):
        metrics(aut)
    with pytest.raises(UnsupportedRankError):
        bridge_decomposition(aut)


def test_bridges():
    bridges = bridge_decomposition(fold_generators([word("aaaaaaaaaab")]))
    assert len(bridges) == 1
    assert str(bridges[0].label) == "aaaaaaaaaab"
    assert bridges[0].start == bridges[0].end == 0

    labels = sorted(str(b.label) for b in bridge_decomposition(fold_generators([word("aa"), word("b")])))
    assert labels == ["aa", "b"]

    bridges = bridge_decomposition(fold_generators([word("a")]))
    assert len(bridges) == 1 and str(bridges[0].label) == "a"


def test_bridge_interiors_have_degree_two():
    rng = random.Random(13)
    for _ in range(100):
        aut = fold_generators(random_subgroup_gens(rng))
        seen = 0
        for bridge in bridge_decomposition(aut):
            seen += len(bridge.label)
            state = bridge.start
            for x in bridge.label.letters[:-1]:
                state = aut.step(state, x)
                assert aut.degree(state) == 2
        assert seen == sum(1 for _ in aut.positive_edges())


def test_metrics_examples():
    m = metrics(fold_generators([word("a")]))
    assert (m.hc, m.hcfp, m.shcfp, m.delta0, m.delta, m.zeta) == (1, 0, 0, 1, 1, 1)
    m = metrics(fold_generators([word("aa"), word("b")]))
    assert (m.hc, m.hcfp, m.shcfp, m.delta0, m.delta, m.zeta) == (2, 1, 0, 2, 2, 2)


def test_delta_not_monotone_under_b_to_ba():
    # the one-generator subgroups of ba and ba^2 witness a delta increase
    assert metrics(fold_generators([word("ba")])).delta == 1
    assert metrics(fold_generators([word("baa")])).delta == 2


def test_equal_subgroups():
    assert equal_subgroups(fold_generators([word("ab")]), fold_generators([word("BA")]))
    assert not equal_subgroups(fold_generators([word("a")]), fold_generators([word("b")]))
    assert equal_subgroups(
        fold_generators([word("aa"), word("b")]),
        fold_generators([word("b"), word("aa"), word("baaB")]),
    )


def test_subgroup_generators_regenerate():
    rng = random.Random(14)
    for _ in range(100):
        aut = fold_generators(random_subgroup_gens(rng))
        regen = fold_generators(list(subgroup_generators(aut)) or [], rank=2)
        assert equal_subgroups(aut, regen)


def test_geodesic_labels():
    aut = fold_generators([word("aa"), word("b")])
    assert geodesic_label(aut, 0) == identity(2)
    lab = geodesic_label(aut, 1)
    assert len(lab) == 1 and aut.walk(0, lab) == 1


def test_basis_completion_single_letter():
    result = basis_completion([word("a")], 2)
    assert result is not None
    assert fold_generators([word("a"), result.z]).is_bouquet()
    assert result.completes(word("b"))


def test_basis_completion_proper_power_fails():
    assert basis_completion([word("aa")], 2) is None
    # exhaustive cross-check: no word of length <= 4 completes a^2
    rng = random.Random(15)
    for _ in range(200):
        z = random_reduced_word(rng, 4)
        assert not fold_generators([word("aa"), z]).is_bouquet()


def test_basis_completion_ab():
    result = basis_completion([word("ab")], 2)
    assert result is not None
    assert fold_generators([word("ab"), result.z]).is_bouquet()


def test_basis_completion_rank3():
    result = basis_completion([word("a", rank=3), word("b", rank=3)], 3)
    assert result is not None and result.z == word("c", rank=3)


def test_basis_completion_wrong_count():
    with pytest.raises(InvalidInputError):
        basis_completion([word("a"), word("b")], 2)


def test_basis_membership_shape_random():
    # v in <a> a^{eps} <a>-free part: any word v = x b^eps y with x, y powers
    # of a completes {a} to a basis
    rng = random.Random(16)
    for _ in range(200):
        m = rng.randint(0, 3)
        n = rng.randint(0, 3)
        eps = rng.choice([1, -1])
        letters = [rng.choice([1, -1])] * 0
        v = multiply(
            Word(tuple([rng.choice([1, -1])] * m or []), 2),
            multiply(Word((2 * eps,), 2), Word(tuple([rng.choice([1, -1])] * n or []), 2)),
        )
        assert fold_generators([word("a"), v]).is_bouquet()


def test_cyclically_reduced_conjugate():
    aut = fold_generators([word("abaB" "A")])  # a b a b^-1 a^-1, origin stem a
    reduced = cyclically_reduced_conjugate(aut)
    assert reduced.degree(reduced.origin) >= 2
    assert conjugate_equal(aut, reduced)


def test_conjugate_equal():
    assert conjugate_equal(fold_generators([word("ab")]), fold_generators([word("ba")]))
    assert conjugate_equal(fold_generators([word("Abaa")]), fold_generators([word("ab")]))
    assert conjugate_equal(
        fold_generators([multiply(invert(word("ba")), multiply(word("aa"), word("ba")))]),
        fold_generators([word("aa")]),
    )
    assert not conjugate_equal(fold_generators([word("aa")]), fold_generators([word("a")]))


def test_parse_subgroup_and_dot():
    gens = parse_subgroup("# comment\naa\nb # trailing\n\n")
    assert gens == [word("aa"), word("b")]
    dot = to_dot(fold_generators(gens))
    assert "doublecircle" in dot and '[label="a"]' in dot
