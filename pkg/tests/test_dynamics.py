import random

import pytest

from fgorbits.errors import InvalidInputError, ResourceLimitError
from fgorbits.dynamics import (
    SIGMA0_LETTERS,
    SIGMA_LETTERS,
    choose_t,
    closure_system,
    dump_system,
    sigma_apply_direct,
    sigma_apply_with_map,
    sigma_apply_word,
    system_to_dot,
    truncate,
    truncated_step,
)
from fgorbits.stallings import (
    bridge_decomposition,
    equal_subgroups,
    fold_generators,
    metrics,
    singularity_profile,
)
from fgorbits.words import Word, word

from helpers import random_subgroup_gens, refold_image, subgroup_orbit_automata


def test_direct_step_examples():
    assert sigma_apply_direct(fold_generators([word("b")]), "S") == fold_generators([word("ba")])
    assert sigma_apply_direct(fold_generators([word("a")]), "X") == fold_generators([word("b")])
    assert sigma_apply_direct(fold_generators([word("ab")]), "I") == fold_generators([word("ab")])


def test_direct_step_matches_refold_oracle():
    rng = random.Random(31)
    for _ in range(300):
        aut = fold_generators(random_subgroup_gens(rng))
        for g in SIGMA_LETTERS:
            assert equal_subgroups(sigma_apply_direct(aut, g), refold_image(aut, g))


def test_metric_monotonicity_along_words():
    rng = random.Random(32)
    for _ in range(300):
        aut = fold_generators(random_subgroup_gens(rng, max_len=6))
        prof = singularity_profile(aut)
        m = metrics(aut)
        for _ in range(rng.randint(1, 6)):
            g = rng.choice(SIGMA_LETTERS)
            aut = sigma_apply_direct(aut, g)
            prof2 = singularity_profile(aut)
            m2 = metrics(aut)
            assert prof2.sigma <= prof.sigma
            assert m2.delta0 <= m.delta0
            assert m2.zeta <= m.zeta
            prof, m = prof2, m2


def _max_b_run(aut):
    """Longest simple cycle or vertex-distinct path labeled by b powers."""
    from fgorbits.stallings import _chain_cycle_decomposition

    best = 0
    for kind, size in _chain_cycle_decomposition(aut.positive_map(2)):
        best = max(best, size if kind == "cycle" else size - 1)
    return best


def test_b_runs_bounded_by_singularities():
    rng = random.Random(33)
    for _ in range(300):
        aut = fold_generators(random_subgroup_gens(rng, max_len=6))
        sigma = singularity_profile(aut).sigma
        image = sigma_apply_direct(aut, "S")
        assert _max_b_run(image) <= sigma


def test_long_bridges_never_shrink():
    rng = random.Random(34)
    for _ in range(200):
        aut = fold_generators(random_subgroup_gens(rng, max_len=6))
        zeta = metrics(aut).zeta
        current = aut
        for _ in range(4):
            g = rng.choice(SIGMA_LETTERS)
            image, vmap = sigma_apply_with_map(current, g)
            for bridge in bridge_decomposition(current):
                if len(bridge.label) <= zeta:
                    continue
                length = _image_bridge_length(current, image, vmap, bridge, g)
                assert length >= len(bridge.label), (g, bridge)
            current = image


def _apply_letter_to_word(g, u):
    from fgorbits.endo2 import SIGMA, apply_endo

    return apply_endo(SIGMA[g], u)


def _image_bridge_length(aut, image, vmap, bridge, g):
    """Length of the unique bridge of the image automaton extending the
    rewritten bridge path (extended to markers in both directions)."""
    prof = singularity_profile(image)
    markers = prof.sources | prof.sinks | {image.origin}
    if g in ("I", "X"):
        return len(bridge.label)
    head = Word(bridge.label.letters[:-1], 2) if len(bridge.label) >= 2 else Word((), 2)
    start = vmap[bridge.start]
    assert start is not None
    path_label = _apply_letter_to_word("S", head)
    state = image.walk(start, path_label)
    assert state is not None
    length = len(path_label)
    guard = image.n * 2 + 2
    while not (length > 0 and state in markers) and guard > 0:
        guard -= 1
        for l in (1, 2):
            nxt = image.step(state, l)
            if nxt is not None:
                state = nxt
                length += 1
                break
        else:
            break
    guard = image.n * 2 + 2
    while start not in markers and guard > 0:
        guard -= 1
        for l in (1, 2):
            prev = image.step(start, -l)
            if prev is not None:
                start = prev
                length += 1
                break
        else:
            break
    return length


def test_shrinking_bridge_characterization():
    # a bridge shortens under the b -> ba step exactly when it is a positive
    # a-power from a source-or-origin into a sink
    rng = random.Random(35)
    checked = 0
    for _ in range(300):
        aut = fold_generators(random_subgroup_gens(rng, max_len=6))
        prof = singularity_profile(aut)
        image, vmap = sigma_apply_with_map(aut, "S")
        for bridge in bridge_decomposition(aut):
            if len(bridge.label) < 2:
                continue
            length = _image_bridge_length(aut, image, vmap, bridge, "S")
            shrank = length == len(bridge.label) - 1
            expected = (
                all(x == 1 for x in bridge.label.letters)
                and (bridge.start in prof.sources or bridge.start == aut.origin)
                and bridge.end in prof.sinks
            )
            assert shrank == expected, (bridge, length)
            checked += 1
    assert checked > 100


def test_truncate_examples():
    assert truncate(fold_generators([word("a")]), 1).n == 1
    trunc = truncate(fold_generators([word("aaaaaaaaaab")]), 2)
    assert trunc.n == 5
    degrees = sorted(trunc.degree(v) for v in range(trunc.n))
    assert degrees == [1, 1, 2, 2, 2]
    assert truncate(fold_generators([word("aa"), word("b")]), 1).n == 2


def test_truncate_rejects_bad_radius():
    with pytest.raises(InvalidInputError):
        truncate(fold_generators([word("a")]), 0)


def test_truncated_step_examples():
    base = fold_generators([word("aaaaaaaaaab")])
    stepped = truncated_step(truncate(base, 2), "S")
    assert stepped.key == truncate(sigma_apply_direct(base, "S"), 2).key
    assert truncated_step(truncate(fold_generators([word("a")]), 1), "X").key == \
        truncate(fold_generators([word("b")]), 1).key


def test_involution_on_truncations():
    rng = random.Random(36)
    for _ in range(50):
        aut = fold_generators(random_subgroup_gens(rng, max_len=6))
        trunc = truncate(aut, choose_t(aut, []))
        assert truncated_step(truncated_step(trunc, "I"), "I").key == trunc.key


def test_truncated_step_matches_full_pipeline():
    rng = random.Random(37)
    for _ in range(100):
        aut = fold_generators(random_subgroup_gens(rng))
        t = choose_t(aut, [])
        trunc = truncate(aut, t)
        full = aut
        for _ in range(8):
            g = rng.choice(SIGMA_LETTERS)
            trunc = truncated_step(trunc, g)
            full = sigma_apply_direct(full, g)
            assert trunc.key == truncate(full, t).key


def test_choose_t_examples():
    assert choose_t(fold_generators([word("a")]), [word("a")]) == 1
    assert choose_t(fold_generators([word("aa"), word("b")]), [word("abab")]) == 3
    assert choose_t(fold_generators([word("a")]), []) == 1


def test_closure_matches_full_tracking():
    aut = fold_generators([word("a")])
    system = closure_system(aut, 1, SIGMA_LETTERS)
    tracked = {truncate(a, 1).key for a in subgroup_orbit_automata(aut, 6)}
    assert tracked == set(system.states)


def test_closure_completeness_and_alphabet_restriction():
    aut = fold_generators([word("a")])
    system = closure_system(aut, 1, SIGMA_LETTERS)
    sub = closure_system(aut, 1, SIGMA0_LETTERS)
    assert set(sub.states) <= set(system.states)
    for sys_, letters in ((system, SIGMA_LETTERS), (sub, SIGMA0_LETTERS)):
        assert sys_.state_count >= 1
        for key in sys_.states:
            for g in letters:
                assert sys_.transitions[(key, g)] in sys_.states


def test_closure_rejects_small_radius():
    aut = fold_generators([word("aa"), word("b")])  # zeta = 2
    with pytest.raises(InvalidInputError):
        closure_system(aut, 1, SIGMA_LETTERS)


def test_closure_state_cap():
    aut = fold_generators([word("aa"), word("b")])
    with pytest.raises(ResourceLimitError):
        closure_system(aut, 2, SIGMA_LETTERS, max_states=5)


def test_truncation_key_stability_and_exports():
    aut = fold_generators([word("ab"), word("ba")])
    t = choose_t(aut, [])
    system = closure_system(aut, t, SIGMA_LETTERS)
    again = closure_system(aut, t, SIGMA_LETTERS)
    assert set(system.states) == set(again.states)
    assert system.transitions == again.transitions
    dot = system_to_dot(system)
    assert dot.startswith("digraph") and '[label="S"]' in dot
    assert "state 0" in dump_system(system)


def test_sigma_word_application_order():
    # the leftmost letter acts first
    aut = fold_generators([word("a")])
    assert sigma_apply_word(aut, "XS") == fold_generators([word("ba")])
    assert sigma_apply_word(aut, "SX") == fold_generators([word("b")])
