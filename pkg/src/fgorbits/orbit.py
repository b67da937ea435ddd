"""Decision procedures for orbit problems over the letter dynamics.

A rational family of automorphisms is given by a finite automaton over the
alphabet S, I, X (see :mod:`fgorbits.dynamics` for the letter actions).  A
letter word ``c1 c2 ... cn`` denotes the automorphism ``cn . ... . c1``,
the leftmost letter acting first, matching the path semantics of the
closure transition system.

The decision kinds, for a rational family R:

* ``1`` / ``1'``: some mu in R has u in mu(H) / a conjugate of u in mu(H);
* ``2`` / ``2'``: K contained in mu(H), on the nose / up to conjugacy;
* ``3`` / ``3'``: K equal to mu(H), on the nose / up to conjugacy;
* ``4``: words u1..uk have conjugates (separate conjugators) all in mu(H).

``decide_full_aut`` decides "phi(u) in H for some automorphism phi at all",
by normal-form reduction onto the two-letter sub-dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InvalidInputError, RegexSyntaxError, ResourceLimitError
from .stallings import (
    StallingsAutomaton,
    contains,
    contains_conjugate,
    conjugate_equal,
    cyclically_reduced_conjugate,
    equal_subgroups,
    fold_generators,
    geodesic_label,
    metrics,
    _invert_maps,
    subgroup_generators,
)
from .dynamics import (
    DEFAULT_MAX_AUT_SIZE,
    DEFAULT_MAX_STATES,
    SIGMA_LETTERS,
    SIGMA0_LETTERS,
    TransitionSystem,
    TruncatedAutomaton,
    choose_t,
    closure_system,
    reachable_search,
    sigma_apply_word,
    truncate,
)
from .endo2 import (
    PHI_A_BINV,
    PHI_AINV_B,
    PHI_AINV_BINV,
    PHI_A_BA,
    PSI,
    Endo2,
    apply_endo,
    endo_power,
    image_subgroup,
)
from .words import Word, cyclic_core, cyclic_shifts, invert, multiply

__all__ = [
    "SigmaRational",
    "parse_sigma_regex",
    "Decision",
    "Witness",
    "witness_language",
    "decide_rational",
    "encode_invertible_substitutions",
    "decide_full_aut",
    "contains_primitive",
    "verify_sigma_witness",
    "LCM_CAP",
]

LCM_CAP = 10**6


# -- rational sets of letter words ----------------------------------------


class SigmaRational:
    """Finite automaton over a letter alphabet, epsilon-free, possibly
    nondeterministic, with a set of initial states."""

    def __init__(self, letters, n_states, initials, finals, transitions):
        self.letters = tuple(letters)
        self.n_states = n_states
        self.initials = frozenset(initials)
        self.finals = frozenset(finals)
        # transitions: dict (state, letter) -> frozenset of states
        self.transitions = {k: frozenset(v) for k, v in transitions.items()}

    def step(self, states: frozenset, letter: str) -> frozenset:
        out = set()
        for s in states:
            out |= self.transitions.get((s, letter), frozenset())
        return frozenset(out)

    def accepts(self, letter_word: str) -> bool:
        states = self.initials
        for c in letter_word:
            states = self.step(states, c)
            if not states:
                return False
        return bool(states & self.finals)

    def is_empty(self) -> bool:
        seen = set(self.initials)
        frontier = list(seen)
        while frontier:
            s = frontier.pop()
            if s in self.finals:
                return False
            for c in self.letters:
                for t in self.transitions.get((s, c), ()):
                    if t not in seen:
                        seen.add(t)
                        frontier.append(t)
        return True

    def enumerate_words(self, max_len: int):
        """All accepted words of length at most max_len, shortest first."""
        out = []
        frontier = [(self.initials, "")]
        while frontier:
            nxt = []
            for states, path in frontier:
                if states & self.finals:
                    out.append(path)
                if len(path) < max_len:
                    for c in self.letters:
                        t = self.step(states, c)
                        if t:
                            nxt.append((t, path + c))
            frontier = nxt
        return out

    @classmethod
    def full_language(cls, letters=SIGMA_LETTERS) -> "SigmaRational":
        trans = {(0, c): {0} for c in letters}
        return cls(letters, 1, {0}, {0}, trans)


def parse_sigma_regex(text: str, letters: Sequence[str] = SIGMA_LETTERS) -> SigmaRational:
    """Parse a rational expression over the given letters.

    Syntax: letters, juxtaposition, union '|', star '*', parentheses, and
    'e' for the empty word.  Whitespace is ignored.
    """
    letters = tuple(letters)
    src = text
    pos = 0

    def peek():
        nonlocal pos
        while pos < len(src) and src[pos].isspace():
            pos += 1
        return src[pos] if pos < len(src) else None

    # NFA fragments with a single start and single accept, epsilon edges
    eps_edges: list[tuple[int, int]] = []
    sym_edges: list[tuple[int, str, int]] = []
    counter = [0]

    def new_state():
        counter[0] += 1
        return counter[0] - 1

    def parse_union():
        nonlocal pos
        frags = [parse_concat()]
        while peek() == "|":
            pos += 1
            frags.append(parse_concat())
        if len(frags) == 1:
            return frags[0]
        s, f = new_state(), new_state()
        for fs, ff in frags:
            eps_edges.append((s, fs))
            eps_edges.append((ff, f))
        return s, f

    def parse_concat():
        nonlocal pos
        frags = []
        while True:
            c = peek()
            if c is None or c in "|)":
                break
            frags.append(parse_star())
        if not frags:
            raise RegexSyntaxError("expected a letter, 'e' or '('", pos)
        s, f = frags[0]
        for fs, ff in frags[1:]:
            eps_edges.append((f, fs))
            f = ff
        return s, f

    def parse_star():
        nonlocal pos
        frag = parse_atom()
        while peek() == "*":
            pos += 1
            s, f = new_state(), new_state()
            fs, ff = frag
            eps_edges.extend([(s, fs), (ff, f), (s, f), (ff, fs)])
            frag = (s, f)
        return frag

    def parse_atom():
        nonlocal pos
        c = peek()
        if c is None:
            raise RegexSyntaxError("unexpected end of pattern", pos)
        if c == "(":
            pos += 1
            frag = parse_union()
            if peek() != ")":
                raise RegexSyntaxError("unbalanced parenthesis", pos)
            pos += 1
            return frag
        if c == "e":
            pos += 1
            s, f = new_state(), new_state()
            eps_edges.append((s, f))
            return s, f
        if c in letters:
            pos += 1
            s, f = new_state(), new_state()
            sym_edges.append((s, c, f))
            return s, f
        raise RegexSyntaxError(f"unexpected character {c!r}", pos)

    start, accept = parse_union()
    if peek() is not None:
        raise RegexSyntaxError(f"unexpected character {peek()!r}", pos)

    # epsilon elimination
    n = counter[0]
    eps_adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in eps_edges:
        eps_adj[a].add(b)

    def closure(s: int) -> frozenset:
        seen = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for w in eps_adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)

    closures = [closure(s) for s in range(n)]
    transitions: dict[tuple[int, str], set[int]] = {}
    for a, c, b in sym_edges:
        for src_state in range(n):
            if a in closures[src_state]:
                transitions.setdefault((src_state, c), set()).update(closures[b])
    finals = {s for s in range(n) if accept in closures[s]}
    return SigmaRational(letters, n, closures[start], finals, transitions)


# -- decisions --------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    sigma_word: str
    psi: Optional[str] = None
    prefix: Optional[str] = None
    n: Optional[int] = None
    conjugator: Optional[str] = None

    def to_json_dict(self) -> dict:
        out = {"sigma_word": self.sigma_word}
        if self.psi is not None:
            out["psi"] = self.psi
        if self.prefix is not None:
            out["prefix"] = self.prefix
        if self.n is not None:
            out["n"] = self.n
        if self.conjugator is not None:
            out["conjugator"] = self.conjugator
        return out


@dataclass(frozen=True)
class Decision:
    answer: bool
    witness: Optional[Witness]
    states_explored: int
    t_used: int

    def to_json_dict(self) -> dict:
        out = {
            "answer": self.answer,
            "stats": {"states": self.states_explored, "t": self.t_used},
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json_dict()
        return out


def _witness_display(letter_word: str) -> str:
    return letter_word if letter_word else "e"


def _witness_letters(sigma_word: str) -> str:
    return "" if sigma_word == "e" else sigma_word


def _build_system(aut, ws, alphabet, extra_floor=0, **caps):
    t = max(choose_t(aut, ws), extra_floor)
    return closure_system(aut, t, alphabet, **caps), t


def witness_language(
    u: Word,
    subgroup: StallingsAutomaton,
    mode: str = "at-origin",
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_aut_size: int = DEFAULT_MAX_AUT_SIZE,
) -> SigmaRational:
    """The rational set of letter words mu with u in mu(H) (mode
    ``at-origin``) or with some conjugate of u in mu(H) (mode ``conjugate``).
    """
    if mode not in ("at-origin", "conjugate"):
        raise InvalidInputError(f"unknown mode {mode!r}")
    system, t = _build_system(
        subgroup, [u], SIGMA_LETTERS, max_states=max_states, max_aut_size=max_aut_size
    )
    core, _ = cyclic_core(u)
    keys = list(system.states)
    index = {k: i for i, k in enumerate(keys)}
    if mode == "at-origin":
        finals = {index[k] for k, tr in system.states.items() if tr.loops_at_origin(u)}
    else:
        finals = {index[k] for k, tr in system.states.items() if tr.loop_states(core)}
    transitions = {
        (index[k], g): {index[system.transitions[(k, g)]]}
        for k in keys
        for g in system.alphabet
    }
    return SigmaRational(system.alphabet, len(keys), {index[system.initial]}, finals, transitions)


def _product_witness(system: TransitionSystem, terminal_keys, rational: SigmaRational):
    """Shortest, lexicographically least word of the intersection, or None."""
    for c in rational.letters:
        if c not in system.alphabet:
            raise InvalidInputError(f"rational set uses letter {c!r} outside the system alphabet")
    start = (system.initial, rational.initials)
    seen = {start}
    queue = [(start, "")]
    qi = 0
    while qi < len(queue):
        (key, rstates), path = queue[qi]
        qi += 1
        if key in terminal_keys and (rstates & rational.finals):
            return path
        for g in system.alphabet:
            nkey = system.transitions[(key, g)]
            nr = rational.step(rstates, g)
            if not nr:
                continue
            nxt = (nkey, nr)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, path + g))
    return None


def _ecc_from_markers(aut: StallingsAutomaton) -> int:
    from .dynamics import _distances_to, _local_singularities

    pos = [aut.positive_map(1), aut.positive_map(2)]
    sources, sinks = _local_singularities(pos)
    dist = _distances_to(pos, sources | sinks | {aut.origin})
    return max(dist.values(), default=0)


def _conjugate_subgroup(aut: StallingsAutomaton, w: Word) -> StallingsAutomaton:
    gens = subgroup_generators(aut)
    return fold_generators(
        [multiply(invert(w), multiply(g, w)) for g in gens] or [],
        rank=2,
    )


def _component_split(trunc: TruncatedAutomaton):
    pos = [dict(trunc._pos[0]), dict(trunc._pos[1])]
    inv = _invert_maps(pos, 2)
    unassigned = set(range(trunc.n))
    comps = []
    while unassigned:
        start = next(iter(unassigned))
        comp = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for l in range(2):
                for m in (pos[l], inv[l]):
                    w = m.get(v)
                    if w is not None and w not in comp:
                        comp.add(w)
                        frontier.append(w)
        unassigned -= comp
        comps.append(comp)
    return pos, comps


def _walk_from_end(trunc: TruncatedAutomaton, start: int):
    """Walk from a degree-1 state through degree-2 interior states.

    Stops at the first state that is not a plain interior point (degree
    other than 2, or the origin).  Returns (states, letters) with letters[i]
    read along states[i] -> states[i+1], or None when the walk is not a
    simple path.
    """

    def incident(v):
        out = []
        for l in (1, 2):
            q = trunc.step(v, l)
            if q is not None:
                out.append((l, q, (v, l, q)))
            p = trunc.step(v, -l)
            if p is not None:
                out.append((-l, p, (p, l, v)))
        return out

    states = [start]
    letters: list[int] = []
    prev_edge = None
    cur = start
    while True:
        options = [e for e in incident(cur) if e[2] != prev_edge]
        if prev_edge is None:
            options = incident(cur)
        if len(options) != 1:
            return None
        letter, nxt, edge = options[0]
        letters.append(letter)
        states.append(nxt)
        prev_edge = edge
        cur = nxt
        if trunc.degree(cur) != 2 or cur == trunc.origin or cur in states[:-1]:
            return states, letters


def _conjugate_terminal_keys(system: TransitionSystem, blob: StallingsAutomaton, t: int):
    """Keys of truncations equal to the radius-t truncation of a conjugate.

    Matches the attachment shapes of conjugate automata: the blob rerooted;
    the blob with a visible stem ending at the origin; and, for stems long
    enough to be cut, the blob plus a separate origin path-fragment.  Cut
    stems are reconstructed with a uniform invisible middle and every match
    is verified by rebuilding the conjugate subgroup and truncating it.
    """
    mid_len = 2 * t + 3
    blob_vertex_words = [geodesic_label(blob, v) for v in range(blob.n)]
    reroot_keys = {
        truncate(_conjugate_subgroup(blob, w), t).key for w in blob_vertex_words
    }

    def reconstructs(key, stems) -> bool:
        for stem in stems:
            reduced_ok = all(
                stem[i + 1] != -stem[i] for i in range(len(stem) - 1)
            )
            if not reduced_ok:
                continue
            tail = Word(tuple(stem), 2)
            for p in blob_vertex_words:
                w = multiply(p, tail)
                if truncate(_conjugate_subgroup(blob, w), t).key == key:
                    return True
        return False

    def candidate_stems(trunc: TruncatedAutomaton):
        """Stem words (read attachment -> origin) whose invisible middle, if
        any, is filled uniformly; empty when the shape cannot match."""
        pos, comps = _component_split(trunc)
        if len(comps) == 1:
            if trunc.degree(trunc.origin) != 1:
                return []
            walk = _walk_from_end(trunc, trunc.origin)
            if walk is None:
                return []
            _, letters = walk
            # letters read origin -> attachment; the stem reads the other way
            return [[-x for x in reversed(letters)]]
        if len(comps) != 2:
            return []
        origin_comp = next(c for c in comps if trunc.origin in c)
        other = next(c for c in comps if trunc.origin not in c)
        if trunc.degree(trunc.origin) != 1 or len(origin_comp) < 2:
            return []
        walk = _walk_from_end(trunc, trunc.origin)
        if walk is None or len(walk[0]) != len(origin_comp):
            return []  # origin component must be one bare path
        if trunc.degree(walk[0][-1]) != 1:
            return []
        z_part = [-x for x in reversed(walk[1])]  # read far tip -> origin
        tips = [v for v in sorted(other) if trunc.degree(v) == 1]
        if len(tips) > 1:
            return []
        if tips:
            tip_walk = _walk_from_end(trunc, tips[0])
            if tip_walk is None:
                return []
            x_part = [-x for x in reversed(tip_walk[1])]  # attachment -> tip
        else:
            x_part = []
        return [x_part + [c] * mid_len + z_part for c in (1, -1, 2, -2)]

    terminal = set()
    for key, trunc in system.states.items():
        if key in reroot_keys or reconstructs(key, candidate_stems(trunc)):
            terminal.add(key)
    return terminal


def decide_rational(
    kind: str,
    rational: SigmaRational,
    subgroup: StallingsAutomaton,
    *,
    u: Optional[Word] = None,
    us: Optional[Sequence[Word]] = None,
    k_subgroup: Optional[StallingsAutomaton] = None,
    max_states: int = DEFAULT_MAX_STATES,
    max_aut_size: int = DEFAULT_MAX_AUT_SIZE,
) -> Decision:
    """Decide one of the rational orbit problems; see the module docstring.

    A yes answer carries the shortest letter word of the intersection and is
    re-verified by direct application before being returned.
    """
    caps = {"max_states": max_states, "max_aut_size": max_aut_size}
    H = subgroup
    if kind in ("1", "1'"):
        if u is None:
            raise InvalidInputError(f"kind {kind} needs a word u")
        system, t = _build_system(H, [u], SIGMA_LETTERS, **caps)
        if kind == "1":
            terminals = {k for k, tr in system.states.items() if tr.loops_at_origin(u)}
        else:
            core, _ = cyclic_core(u)
            terminals = {k for k, tr in system.states.items() if tr.loop_states(core)}
    elif kind in ("2", "2'"):
        if k_subgroup is None:
            raise InvalidInputError(f"kind {kind} needs a subgroup K")
        K = k_subgroup if kind == "2" else cyclically_reduced_conjugate(k_subgroup)
        gens = list(subgroup_generators(K))
        system, t = _build_system(H, gens, SIGMA_LETTERS, **caps)
        if kind == "2":
            terminals = {
                k for k, tr in system.states.items()
                if all(tr.loops_at_origin(g) for g in gens)
            }
        else:
            terminals = {
                k for k, tr in system.states.items()
                if tr.common_loop_state(gens) is not None
            }
    elif kind in ("3", "3'"):
        if k_subgroup is None:
            raise InvalidInputError(f"kind {kind} needs a subgroup K")
        K = k_subgroup if kind == "3" else cyclically_reduced_conjugate(k_subgroup)
        gens = list(subgroup_generators(K))
        floor = _ecc_from_markers(K)
        system, t = _build_system(H, gens, SIGMA_LETTERS, extra_floor=floor, **caps)
        if kind == "3":
            terminals = {truncate(K, t).key} & set(system.states)
        else:
            terminals = _conjugate_terminal_keys(system, K, t)
    elif kind == "4":
        if not us:
            raise InvalidInputError("kind 4 needs a nonempty word list")
        cores = [cyclic_core(x)[0] for x in us]
        system, t = _build_system(H, cores, SIGMA_LETTERS, **caps)
        terminals = {
            k for k, tr in system.states.items()
            if all(tr.loop_states(c) for c in cores)
        }
    else:
        raise InvalidInputError(f"unknown kind {kind!r}")

    path = _product_witness(system, terminals, rational)
    if path is None:
        return Decision(False, None, system.state_count, t)
    witness = Witness(sigma_word=_witness_display(path))
    conj = _verify_rational_witness(kind, path, H, u=u, us=us, k_subgroup=k_subgroup)
    if conj is not None:
        witness = Witness(sigma_word=witness.sigma_word, conjugator=str(conj))
    return Decision(True, witness, system.state_count, t)


def _verify_rational_witness(kind, path, H, *, u=None, us=None, k_subgroup=None):
    """Re-verify a yes answer on the untruncated automata.

    Returns an optional conjugator word (for the primed kinds); raises if
    verification fails, which would indicate a defect in the dynamics.
    """
    image = sigma_apply_word(H, path)
    if kind == "1":
        ok = contains(image, u)
        conj = None
    elif kind == "1'":
        core, _ = cyclic_core(u)
        states = [v for v in range(image.n) if image.loops_at(core, v)]
        ok = bool(states)
        conj = invert(geodesic_label(image, states[0])) if states else None
    elif kind == "2":
        gens = subgroup_generators(k_subgroup)
        ok = all(contains(image, g) for g in gens)
        conj = None
    elif kind == "2'":
        K = cyclically_reduced_conjugate(k_subgroup)
        gens = subgroup_generators(K)
        states = [
            v for v in range(image.n) if all(image.loops_at(g, v) for g in gens)
        ]
        ok = bool(states)
        conj = invert(geodesic_label(image, states[0])) if states else None
    elif kind == "3":
        ok = equal_subgroups(image, k_subgroup)
        conj = None
    elif kind == "3'":
        ok = conjugate_equal(image, k_subgroup)
        conj = None
    else:
        cores = [cyclic_core(x)[0] for x in us]
        ok = all(any(image.loops_at(c, v) for v in range(image.n)) for c in cores)
        conj = None
    if not ok:
        raise AssertionError(f"witness {path!r} failed re-verification for kind {kind}")
    return conj


def verify_sigma_witness(kind, sigma_word, H, *, u=None, us=None, k_subgroup=None) -> bool:
    """Public re-verification hook: apply the letters to the full automaton
    and check the kind's condition."""
    try:
        _verify_rational_witness(
            kind, _witness_letters(sigma_word), H, u=u, us=us, k_subgroup=k_subgroup
        )
        return True
    except AssertionError:
        return False


# -- invertible substitutions ----------------------------------------------

IS_LETTERS = ("P", "S", "T")
_IS_IMAGE = {"P": "X", "S": "S", "T": "XISIX"}
_IS_INV_IMAGE = {"P": "I", "S": "XISIX", "T": "S"}


def encode_invertible_substitutions(
    kind: str, rational: SigmaRational
) -> tuple[SigmaRational, Optional[Endo2]]:
    """Reencode a rational set over the positive-automorphism generators
    P (letters swapped), S (b to ba), T (b to ab) into the letter dynamics.

    For kind ``is`` the word images are substituted directly.  For kind
    ``is-inverse`` each generator's inverse is a fixed conjugate of a
    positive generator, so the reencoded set works on a transformed problem
    instance: the returned automorphism (b to b^-1) must be applied to both
    the word and the subgroup of the instance.
    """
    if kind not in ("is", "is-inverse"):
        raise InvalidInputError(f"unknown substitution kind {kind!r}")
    if set(rational.letters) - set(IS_LETTERS):
        raise InvalidInputError("substitution alphabet must be within P, S, T")
    images = _IS_IMAGE if kind == "is" else _IS_INV_IMAGE

    # homomorphic image of the automaton: replace each edge by a path
    transitions: dict[tuple[int, str], set[int]] = {}
    counter = rational.n_states

    def add_path(a, word_letters, b):
        nonlocal counter
        cur = a
        for i, c in enumerate(word_letters):
            nxt = b if i == len(word_letters) - 1 else counter
            if nxt == counter:
                counter += 1
            transitions.setdefault((cur, c), set()).add(nxt)
            cur = nxt

    for (s, c), targets in rational.transitions.items():
        for tgt in targets:
            add_path(s, images[c], tgt)
    out = SigmaRational(
        SIGMA_LETTERS, counter, rational.initials, rational.finals, transitions
    )
    transform = None if kind == "is" else PHI_A_BINV
    return out, transform


# -- the full automorphism group -------------------------------------------

_PREFIXES = (PHI_AINV_B, PHI_AINV_BINV)


def _normalize_rotation(core: Word) -> Word:
    """Least rotation that starts with b or ends with b^-1."""
    for shift in cyclic_shifts(core):
        if shift.letters and (shift.letters[0] == 2 or shift.letters[-1] == -2):
            return shift
    raise InvalidInputError("word has no b letters to normalize on")


def decide_full_aut(
    u: Word,
    subgroup: StallingsAutomaton,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_aut_size: int = DEFAULT_MAX_AUT_SIZE,
) -> Decision:
    """Does any automorphism map u into the subgroup?

    Reduction: every automorphism factors through a letter automorphism, a
    two-letter-alphabet tail, an inner part, a power of b -> ba and one of
    two order-two prefixes.  Enumeration order (prefixes, letter
    automorphisms, ascending power) fixes the reported witness.
    """
    if u.rank != 2 or subgroup.rank != 2:
        raise InvalidInputError("full orbit decision requires rank 2")
    if not u.letters:
        return Decision(True, Witness(sigma_word="e", n=0, conjugator="1"), 0, 0)

    caps = {"max_states": max_states, "max_aut_size": max_aut_size}
    explored = 0
    for prefix in _PREFIXES:
        u1 = apply_endo(prefix, u)
        for psi in PSI:
            Hpsi = image_subgroup(psi, subgroup)
            m = metrics(Hpsi)
            core, _ = cyclic_core(u1)
            if all(abs(x) == 1 for x in core.letters):
                n_range = range(1)
                base = core
            else:
                M = 1
                for i in range(2, m.delta0 + 1):
                    M = M * i // math.gcd(M, i)
                    if M > LCM_CAP:
                        raise ResourceLimitError(f"power period cap exceeded: {LCM_CAP}")
                base = _normalize_rotation(core)
                n_range = range(len(base) + max(M, m.delta))
            for n in n_range:
                v = apply_endo(endo_power(PHI_A_BA, n), base)
                vcore, _ = cyclic_core(v)
                t = choose_t(Hpsi, [vcore])
                path, hit, count = reachable_search(
                    Hpsi, t, SIGMA0_LETTERS,
                    lambda tr: bool(tr.loop_states(vcore)),
                    **caps,
                )
                explored += count
                if path is None:
                    continue
                # re-verify on the full automaton and extract a conjugator
                image = sigma_apply_word(Hpsi, path)
                states = [s for s in range(image.n) if image.loops_at(vcore, s)]
                if not states:
                    raise AssertionError("full-orbit witness failed re-verification")
                g = geodesic_label(image, states[0])
                _, rot_conj = cyclic_core(v)  # v is cyclically reduced already
                witness = Witness(
                    sigma_word=_witness_display(path),
                    psi=str(psi),
                    prefix=str(prefix),
                    n=n,
                    conjugator=str(invert(g)),
                )
                return Decision(True, witness, explored, t)
    return Decision(False, None, explored, 0)


def contains_primitive(
    subgroup: StallingsAutomaton,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_aut_size: int = DEFAULT_MAX_AUT_SIZE,
) -> Decision:
    """Does the subgroup contain any member of a basis of the free group?"""
    return decide_full_aut(
        Word((1,), 2), subgroup, max_states=max_states, max_aut_size=max_aut_size
    )
