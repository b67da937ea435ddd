import math
import random

import pytest

from fgorbits.errors import InvalidInputError
from fgorbits.endo2 import (
    PHI,
    PHI_A_AB,
    PHI_A_BA,
    PHI_A_BINV,
    PHI_AB_B,
    PHI_AINV_B,
    PHI_B_A,
    PHI_BA_B,
    PHI_BINV_AINV,
    PSI,
    SIGMA,
    Endo2,
    apply_endo,
    bounded_language,
    compose,
    compose_all,
    delta_endo,
    emit_closure_grammar,
    endo,
    endo_power,
    factorize_automorphism,
    identity_endo,
    inner,
    invert_automorphism,
    is_automorphism,
    is_positive_primitive,
    is_primitive,
    GRAMMAR_MARK,
)
from fgorbits.words import Word, conjugate, exponent_sums, invert, multiply, word

from helpers import (
    all_positive_words,
    positive_primitive_closure,
    random_automorphism,
    random_reduced_word,
)


def test_apply_examples():
    assert apply_endo(PHI_A_BA, word("b")) == word("ba")
    assert apply_endo(PHI_A_BA, word("abA")) == word("ab")
    assert apply_endo(PHI_BINV_AINV, word("ab")) == word("BA")


def test_apply_is_homomorphism():
    rng = random.Random(21)
    for _ in range(200):
        e = random_automorphism(rng, 4)
        u = random_reduced_word(rng, 12)
        v = random_reduced_word(rng, 12)
        assert apply_endo(e, multiply(u, v)) == multiply(apply_endo(e, u), apply_endo(e, v))


def test_composition_identities():
    # the swap conjugates one elementary automorphism into another
    assert compose(PHI_B_A, compose(PHI_A_BA, PHI_B_A)) == PHI_AB_B
    assert compose(identity_endo(), PHI_A_BA) == PHI_A_BA
    # five-factor identity for a -> a, b -> ab over the three-letter family
    assert compose_all(
        [PHI_B_A, PHI_BINV_AINV, PHI_A_BA, PHI_BINV_AINV, PHI_B_A]
    ) == PHI_A_AB


def test_elementary_family_decompositions():
    assert PHI_A_AB == compose(inner(word("A")), PHI_A_BA)
    assert PHI_BA_B == compose(inner(word("B")), PHI_AB_B)
    assert PHI_A_BA == compose_all([PHI_AINV_B, invert_automorphism(PHI_A_BA), PHI_AINV_B])
    assert PHI_B_A == compose_all([PHI_AINV_B, PHI_BINV_AINV, PHI_AINV_B])
    assert compose(PHI_AINV_B, PHI_AINV_B) == identity_endo()


def test_inner_commutation():
    rng = random.Random(22)
    for _ in range(100):
        theta = random_automorphism(rng, 5)
        w = random_reduced_word(rng, 8)
        left = compose(theta, inner(w))
        right = compose(inner(apply_endo(theta, w)), theta)
        assert left == right


def test_delta_family_products():
    for m in range(-3, 4):
        for n in range(-3, 4):
            expected = delta_endo(m, n, 1)
            got = compose(inner(Word(tuple([-1] * m if m >= 0 else [1] * (-m)), 2)),
                          endo_power(PHI_A_BA, m + n))
            assert got == expected, (m, n)
            expected = delta_endo(m, n, -1)
            got = compose_all([
                inner(Word(tuple([1] * n if n >= 0 else [-1] * (-n)), 2)),
                endo_power(PHI_A_BA, -(m + n)),
                PHI_A_BINV,
            ])
            assert got == expected, (m, n, -1)


def test_is_automorphism():
    assert is_automorphism(PHI_A_BA)
    assert not is_automorphism(Endo2(word("a"), word("a")))
    assert is_automorphism(PHI_AB_B)
    assert all(is_automorphism(p) for p in PSI)
    assert all(is_automorphism(p) for p in PHI)
    assert all(is_automorphism(p) for p in SIGMA.values())


def test_invert_automorphism():
    assert invert_automorphism(PHI_A_BA) == Endo2(word("a"), word("bA"))
    assert invert_automorphism(PHI_B_A) == PHI_B_A
    assert invert_automorphism(identity_endo()) == identity_endo()
    with pytest.raises(InvalidInputError):
        invert_automorphism(Endo2(word("a"), word("a")))
    rng = random.Random(23)
    for _ in range(100):
        e = random_automorphism(rng, 6)
        inv = invert_automorphism(e)
        assert compose(e, inv) == identity_endo()
        assert compose(inv, e) == identity_endo()


def test_positive_primitive_examples():
    res = is_positive_primitive(word("aab"))
    assert res is not None and res.automorphism()(word("a")) == word("aab")
    assert is_positive_primitive(word("abab")) is None
    assert is_positive_primitive(word("b")).is_b
    assert is_positive_primitive(word("a")).factors == ()
    with pytest.raises(InvalidInputError):
        is_positive_primitive(word("aB"))
    with pytest.raises(InvalidInputError):
        is_positive_primitive(word("1"))


def test_positive_primitive_matches_closure_oracle():
    oracle = positive_primitive_closure(12)
    for u in all_positive_words(12):
        res = is_positive_primitive(u)
        assert (res is not None) == (u.letters in oracle), str(u)
        if res is not None and not res.is_b:
            assert res.automorphism()(word("a")) == u


def test_primitive_examples():
    assert is_primitive(word("abA")) is not None
    assert is_primitive(word("aabb")) is None
    assert is_primitive(word("1")) is None
    for m in range(9):
        for n in range(9):
            for k in range(9):
                u = word("a" + "b" * m + "a" + "b" * n + "a" + "b" * k)
                expected = max(m, n, k) == min(m, n, k) + 1
                assert (is_primitive(u) is not None) == expected, (m, n, k)


def test_primitive_witness_recomposes():
    rng = random.Random(24)
    count = 0
    for _ in range(400):
        e = random_automorphism(rng, 5)
        w = random_reduced_word(rng, 6)
        u = apply_endo(e, word("a"))
        witness = is_primitive(u)
        assert witness is not None
        assert witness.automorphism()(word("a")) == u
        count += 1
    assert count == 400


def test_primitive_invariances():
    rng = random.Random(25)
    for _ in range(1000):
        u = random_reduced_word(rng, 10)
        w = random_reduced_word(rng, 6)
        ans = is_primitive(u) is not None
        assert (is_primitive(conjugate(u, w)) is not None) == ans
        assert (is_primitive(invert(u)) is not None) == ans


def test_primitive_abelianization_necessary():
    rng = random.Random(26)
    for _ in range(300):
        u = random_reduced_word(rng, 12)
        if is_primitive(u) is not None:
            p, q = exponent_sums(u)
            assert math.gcd(abs(p), abs(q)) == 1


def test_factorization_recomposes():
    rng = random.Random(27)
    for _ in range(200):
        e = random_automorphism(rng, 10)
        f = factorize_automorphism(e)
        assert f.recompose() == e


def test_factorization_identity():
    f = factorize_automorphism(identity_endo())
    assert f.w == word("1") and f.phi_word == () and f.delta_params == (0, 0, 1)
    assert f.recompose() == identity_endo()


def test_endo_text_format():
    e = endo("a ; ba")
    assert e == PHI_A_BA and str(e) == "a ; ba"
    with pytest.raises(InvalidInputError):
        endo("ab")


# -- closure grammar -------------------------------------------------------


def _closure_words(endos, u, max_len):
    out = {u.letters}
    frontier = [u]
    while frontier:
        x = frontier.pop()
        for e in endos:
            v = apply_endo(e, x)
            if len(v) <= max_len and v.letters not in out:
                out.add(v.letters)
                frontier.append(v)
    return {str(Word(t, 2)) for t in out}


def _expected_language(endos, u, max_len):
    inner_max = max_len - 3
    return {
        GRAMMAR_MARK + w + GRAMMAR_MARK * 2
        for w in _closure_words(endos, u, inner_max)
    }


def test_grammar_single_endo():
    g = emit_closure_grammar([endo("a ; ab")], word("b"))
    assert bounded_language(g, 8) == _expected_language([endo("a ; ab")], word("b"), 8)


def test_grammar_empty_family():
    g = emit_closure_grammar([], word("ab"))
    assert bounded_language(g, 8) == {GRAMMAR_MARK + "ab" + GRAMMAR_MARK * 2}


def test_grammar_two_endos():
    endos = [endo("b ; a"), endo("a ; ab")]
    g = emit_closure_grammar(endos, word("ab"))
    assert bounded_language(g, 9) == _expected_language(endos, word("ab"), 9)


def test_grammar_rejects_bad_endos():
    with pytest.raises(InvalidInputError):
        emit_closure_grammar([Endo2(word("A"), word("b"))], word("a"))
    with pytest.raises(InvalidInputError):
        emit_closure_grammar([], word("aB"))


def test_bounded_language_trivial_cases():
    from fgorbits.endo2 import Grammar, Rule

    g = Grammar(frozenset({"S"}), frozenset({"a", "b"}), "S",
                (Rule(("S",), ("a", "b")),))
    assert bounded_language(g, 2) == {"ab"}
    assert bounded_language(g, 0) == set()


def test_grammar_rules_are_noncontracting():
    g = emit_closure_grammar([endo("a ; ab"), endo("ba ; b")], word("aab"))
    for rule in g.rules:
        assert len(rule.lhs) <= len(rule.rhs)
        assert any(s in g.nonterminals for s in rule.lhs)
