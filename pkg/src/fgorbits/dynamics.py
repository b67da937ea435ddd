"""Action of the three-letter automorphism family on subgroup automata.

The letters act on rank-2 Stallings automata directly:

* ``X`` (a and b swapped): relabel edges.
* ``I`` (a to b^-1, b to a^-1): reverse edges and relabel.
* ``S`` (a fixed, b to ba): replace each b-edge whose target is not a sink
  by a b,a path; redirect the b-edge into each sink to the sink's
  a-predecessor; then drop sinks that are left with a single edge.

Truncation keeps only states within a radius of the singularities and the
origin.  The truncated step function applies a letter to a truncation
without knowing the full automaton; its well-definedness requires the
radius to exceed half the path metric zeta of the originating subgroup,
which the closure construction enforces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from hashlib import blake2b
from typing import Iterable, Optional, Sequence

from .errors import InvalidInputError, ResourceLimitError, UnsupportedRankError
from .stallings import StallingsAutomaton, metrics, _bfs_code, _invert_maps
from .words import Word

__all__ = [
    "SIGMA_LETTERS",
    "SIGMA0_LETTERS",
    "DEFAULT_MAX_STATES",
    "DEFAULT_MAX_AUT_SIZE",
    "TruncatedAutomaton",
    "TransitionSystem",
    "sigma_apply_direct",
    "sigma_apply_word",
    "truncate",
    "truncated_step",
    "choose_t",
    "closure_system",
    "system_to_dot",
]

SIGMA_LETTERS: tuple[str, ...] = ("S", "I", "X")
SIGMA0_LETTERS: tuple[str, ...] = ("S", "I")

DEFAULT_MAX_STATES = 10**6
DEFAULT_MAX_AUT_SIZE = 10**4


def _check_letter(g: str):
    if g not in SIGMA_LETTERS:
        raise InvalidInputError(f"unknown letter {g!r}; expected one of S, I, X")


def _bfs_code2(a_pos, b_pos, a_inv, b_inv, root):
    """Rank-2 specialization of the canonical BFS coder (hot path)."""
    order = [root]
    index = {root: 0}
    code = []
    qi = 0
    while qi < len(order):
        v = order[qi]
        qi += 1
        row = []
        for m in (a_pos, b_pos, a_inv, b_inv):
            w = m.get(v)
            if w is None:
                row.append(-1)
            else:
                i = index.get(w)
                if i is None:
                    i = len(order)
                    index[w] = i
                    order.append(w)
                row.append(i)
        code.append((row[0], row[1], row[2], row[3]))
    return order, tuple(code)


def _local_singularities(pos: Sequence[dict]) -> tuple[set, set]:
    a_out, b_out = pos
    sources = set(a_out) & set(b_out)
    sinks = set(a_out.values()) & set(b_out.values())
    return sources, sinks


# -- full-automaton action -------------------------------------------------


def _s_rewrite(pos: Sequence[dict], origin: int, next_id: int):
    """One round of the b -> ba rewrite on a (possibly partial) rank-2 graph.

    Returns (new_pos, removed_states, vertex_map) where vertex_map sends old
    states to themselves or None when trimmed.  Decisions (sink tests, the
    trim) are all read off the input structure.
    """
    a_map, b_map = pos
    a_in = {q: p for p, q in a_map.items()}
    b_in = {q: p for p, q in b_map.items()}
    sinks = set(a_in) & set(b_in)

    new_a = dict(a_map)
    new_b = {}
    for p, q in b_map.items():
        if q in sinks:
            new_b[p] = a_in[q]
        else:
            x = next_id
            next_id += 1
            new_b[p] = x
            new_a[x] = q

    removed = set()
    for q in sinks:
        if q != origin and q not in a_map and q not in b_map:
            removed.add(q)
            del new_a[a_in[q]]

    vmap = {}
    for m in pos:
        for p, q in m.items():
            vmap[p] = p
            vmap[q] = q
    vmap[origin] = origin
    for q in removed:
        vmap[q] = None
    return [new_a, new_b], removed, vmap


def sigma_apply_direct(aut: StallingsAutomaton, g: str) -> StallingsAutomaton:
    """Automaton of the image subgroup under one letter, built in place.

    Agrees with refolding the images of a generating set; the refold is kept
    independent as a test oracle.
    """
    result, _ = sigma_apply_with_map(aut, g)
    return result


def sigma_apply_with_map(aut: StallingsAutomaton, g: str):
    """Like :func:`sigma_apply_direct` but also returns the state map
    old -> new canonical id (None for trimmed states)."""
    if aut.rank != 2:
        raise UnsupportedRankError("letter action requires rank 2")
    _check_letter(g)
    a_map = aut.positive_map(1)
    b_map = aut.positive_map(2)
    if g == "X":
        raw = [b_map, a_map]
        vmap = {v: v for v in range(aut.n)}
    elif g == "I":
        raw = [{q: p for p, q in b_map.items()}, {q: p for p, q in a_map.items()}]
        vmap = {v: v for v in range(aut.n)}
    else:
        raw, _, vmap = _s_rewrite([a_map, b_map], aut.origin, aut.n)

    inv = _invert_maps(raw, 2)
    order, _ = _bfs_code(raw, inv, 2, aut.origin)
    index = {v: i for i, v in enumerate(order)}
    new_pos = [dict() for _ in range(2)]
    for l in range(2):
        for p, q in raw[l].items():
            new_pos[l][index[p]] = index[q]
    result = StallingsAutomaton(2, len(order), new_pos)
    out_map = {v: (index.get(vmap[v]) if vmap.get(v) is not None else None) for v in range(aut.n)}
    return result, out_map


def sigma_apply_word(aut: StallingsAutomaton, letters: Iterable[str]) -> StallingsAutomaton:
    """Apply a letter word with the leftmost letter acting first."""
    for g in letters:
        aut = sigma_apply_direct(aut, g)
    return aut


# -- truncations -----------------------------------------------------------


def _distances_to(pos: Sequence[dict], sources: Iterable[int]) -> dict:
    inv = _invert_maps(pos, len(pos))
    dist = {s: 0 for s in sources}
    frontier = list(dist)
    while frontier:
        nxt = []
        for v in frontier:
            for l in range(len(pos)):
                for m in (pos[l], inv[l]):
                    w = m.get(v)
                    if w is not None and w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
        frontier = nxt
    return dist


class TruncatedAutomaton:
    """Radius-t neighborhood of the singularities and origin, canonicalized.

    May be disconnected; every component contains the origin or a
    singularity.  The canonical key is invariant under state relabeling.
    """

    __slots__ = ("radius", "n", "origin", "_pos", "_inv", "key")

    def __init__(self, radius: int, pos: Sequence[dict], origin: int):
        # canonicalize: origin component first (rooted at the origin), then
        # remaining components sorted by their minimal rooted code
        a_pos, b_pos = pos[0], pos[1]
        a_inv = {q: p for p, q in a_pos.items()}
        b_inv = {q: p for p, q in b_pos.items()}

        vertices = {origin}
        vertices.update(a_pos)
        vertices.update(a_inv)
        vertices.update(b_pos)
        vertices.update(b_inv)

        origin_entry = _bfs_code2(a_pos, b_pos, a_inv, b_inv, origin)
        assigned = set(origin_entry[0])
        coded = []
        if len(assigned) < len(vertices):
            sources = a_pos.keys() & b_pos.keys()
            sinks = a_inv.keys() & b_inv.keys()
            unassigned = vertices - assigned
            while unassigned:
                start = next(iter(unassigned))
                comp_order, _ = _bfs_code2(a_pos, b_pos, a_inv, b_inv, start)
                comp = set(comp_order)
                unassigned -= comp
                roots = sorted((sources | sinks) & comp) or sorted(comp)
                best = None
                for r in roots:
                    entry = _bfs_code2(a_pos, b_pos, a_inv, b_inv, r)
                    if best is None or entry[1] < best[1]:
                        best = entry
                coded.append(best)
            coded.sort(key=lambda oc: oc[1])

        order_all = list(origin_entry[0])
        for order, _ in coded:
            order_all.extend(order)
        index = {v: i for i, v in enumerate(order_all)}
        new_pos = [dict(), dict()]
        for l in range(2):
            for p, q in pos[l].items():
                new_pos[l][index[p]] = index[q]

        self.radius = radius
        self.n = len(order_all)
        self.origin = index[origin]
        self._pos = (new_pos[0], new_pos[1])
        self._inv = tuple(_invert_maps(self._pos, 2))
        parts = [f"O{origin_entry[1]}"] + [f"C{c[1]}" for c in coded]
        self.key = f"r{radius}|" + "|".join(parts)

    # -- queries ----------------------------------------------------------

    def step(self, state: int, letter: int) -> Optional[int]:
        if letter > 0:
            return self._pos[letter - 1].get(state)
        return self._inv[-letter - 1].get(state)

    def walk(self, state: int, u: Word) -> Optional[int]:
        for x in u.letters:
            state = self.step(state, x)
            if state is None:
                return None
        return state

    def loops_at_origin(self, u: Word) -> bool:
        return self.walk(self.origin, u) == self.origin

    def loop_states(self, u: Word) -> list[int]:
        return [v for v in range(self.n) if self.walk(v, u) == v]

    def common_loop_state(self, us: Sequence[Word]) -> Optional[int]:
        for v in range(self.n):
            if all(self.walk(v, u) == v for u in us):
                return v
        return None

    def degree(self, state: int) -> int:
        return sum((state in self._pos[l]) + (state in self._inv[l]) for l in range(2))

    def positive_edges(self):
        for l in range(2):
            for p, q in sorted(self._pos[l].items()):
                yield p, l + 1, q

    def key_digest(self) -> str:
        return blake2b(self.key.encode(), digest_size=6).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, TruncatedAutomaton):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"TruncatedAutomaton(radius={self.radius}, n={self.n}, key={self.key_digest()})"


def truncate(aut: StallingsAutomaton, t: int) -> TruncatedAutomaton:
    """Drop every state farther than t from the singularities and origin."""
    if aut.rank != 2:
        raise UnsupportedRankError("truncation requires rank 2")
    if t < 1:
        raise InvalidInputError(f"truncation radius must be >= 1, got {t}")
    pos = [aut.positive_map(1), aut.positive_map(2)]
    sources, sinks = _local_singularities(pos)
    dist = _distances_to(pos, sources | sinks | {aut.origin})
    keep = {v for v, d in dist.items() if d <= t}
    cut = [
        {p: q for p, q in pos[l].items() if p in keep and q in keep} for l in range(2)
    ]
    return TruncatedAutomaton(t, cut, aut.origin)


def _retruncate(pos: Sequence[dict], origin: int, t: int) -> TruncatedAutomaton:
    sources, sinks = _local_singularities(pos)
    dist = _distances_to(pos, sources | sinks | {origin})
    keep = {v for v, d in dist.items() if d <= t}
    keep.add(origin)
    cut = [
        {p: q for p, q in pos[l].items() if p in keep and q in keep} for l in range(2)
    ]
    return TruncatedAutomaton(t, cut, origin)


def truncated_step(trunc: TruncatedAutomaton, g: str) -> TruncatedAutomaton:
    """Image truncation under one letter, computed from the truncation alone.

    Sound for truncations arising from subgroups whose path metric zeta is
    below twice the radius; malformed inputs raise invalid-input.
    """
    _check_letter(g)
    t = trunc.radius
    a_map = dict(trunc._pos[0])
    b_map = dict(trunc._pos[1])
    origin = trunc.origin

    if g == "X":
        return TruncatedAutomaton(t, [b_map, a_map], origin)
    if g == "I":
        rev_a = {q: p for p, q in b_map.items()}
        rev_b = {q: p for p, q in a_map.items()}
        return TruncatedAutomaton(t, [rev_a, rev_b], origin)

    # letter S.  Frontier analysis first, on the input structure: a cut end
    # is a non-origin state of degree 1.  A cut end that kept its outgoing
    # edge starts a retained bridge suffix of exactly t edges; when that
    # suffix is a^t and runs into a sink, the sink recedes one step and the
    # suffix must be extended backwards by one a-edge.
    pos = [a_map, b_map]
    a_in = {q: p for p, q in a_map.items()}
    b_in = {q: p for p, q in b_map.items()}
    sinks = set(a_in) & set(b_in)
    sources = set(a_map) & set(b_map)
    markers = sources | sinks | {origin}

    extend_at = []
    for v in range(trunc.n):
        if v == origin or trunc.degree(v) != 1:
            continue
        out_a = a_map.get(v)
        out_b = b_map.get(v)
        if out_a is None and out_b is None:
            continue  # kept only an incoming edge: forward cut end
        labels = []
        cur = v
        for _ in range(t):
            if cur in a_map:
                labels.append(1)
                cur = a_map[cur]
            elif cur in b_map:
                labels.append(2)
                cur = b_map[cur]
            else:
                raise InvalidInputError("truncation radius too small for stepping")
            if cur in markers:
                break
        if cur not in markers or len(labels) != t:
            raise InvalidInputError("truncation radius too small for stepping")
        if all(l == 1 for l in labels) and cur in sinks:
            extend_at.append(v)

    new_pos, _, _ = _s_rewrite(pos, origin, trunc.n)
    fresh = trunc.n + len(b_map)  # past every possible subdivision id
    for c in extend_at:
        new_pos[0][fresh] = c
        fresh += 1

    return _retruncate(new_pos, origin, t)


# -- the finite closure ----------------------------------------------------


def choose_t(aut: StallingsAutomaton, ws: Sequence[Word]) -> int:
    """Least radius strictly above half of zeta and half of every word length."""
    bound = metrics(aut).zeta
    for w in ws:
        bound = max(bound, len(w))
    return bound // 2 + 1


@dataclass
class TransitionSystem:
    """Deterministic complete transition system over the letter alphabet.

    States are canonical truncation keys; a representative truncation is
    kept for each.
    """

    alphabet: tuple[str, ...]
    initial: str
    states: dict[str, TruncatedAutomaton] = field(default_factory=dict)
    transitions: dict[tuple[str, str], str] = field(default_factory=dict)

    @property
    def state_count(self) -> int:
        return len(self.states)

    def target(self, key: str, letter: str) -> str:
        return self.transitions[(key, letter)]


def closure_system(
    aut: StallingsAutomaton,
    t: int,
    alphabet: Sequence[str] = SIGMA_LETTERS,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_aut_size: int = DEFAULT_MAX_AUT_SIZE,
) -> TransitionSystem:
    """Breadth-first closure of the truncation orbit under the alphabet.

    Requires t strictly above half the subgroup's zeta metric.  Raises
    resource-limit when a configured cap is exceeded.
    """
    alphabet = tuple(alphabet)
    for g in alphabet:
        _check_letter(g)
    if 2 * t <= metrics(aut).zeta:
        raise InvalidInputError(
            f"radius {t} does not exceed half of zeta = {metrics(aut).zeta}"
        )
    start = truncate(aut, t)
    system = TransitionSystem(alphabet, start.key, {start.key: start})
    frontier = [start]
    while frontier:
        nxt = []
        for trunc in frontier:
            for g in alphabet:
                image = truncated_step(trunc, g)
                if image.n > max_aut_size:
                    raise ResourceLimitError(
                        f"automaton size cap exceeded: {max_aut_size}"
                    )
                if image.key not in system.states:
                    if len(system.states) >= max_states:
                        raise ResourceLimitError(f"state cap exceeded: {max_states}")
                    system.states[image.key] = image
                    nxt.append(image)
                system.transitions[(trunc.key, g)] = image.key
        frontier = nxt
    return system


def reachable_search(
    aut: StallingsAutomaton,
    t: int,
    alphabet: Sequence[str],
    predicate,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_aut_size: int = DEFAULT_MAX_AUT_SIZE,
):
    """Closure breadth-first search with early exit.

    Returns (letter word reaching the first truncation satisfying the
    predicate, truncation, states explored) or (None, None, states explored).
    The search order (breadth-first, alphabet order) makes the returned word
    shortest and lexicographically least.
    """
    alphabet = tuple(alphabet)
    if 2 * t <= metrics(aut).zeta:
        raise InvalidInputError(
            f"radius {t} does not exceed half of zeta = {metrics(aut).zeta}"
        )
    start = truncate(aut, t)
    seen = {start.key}
    queue: list[tuple[TruncatedAutomaton, str]] = [(start, "")]
    qi = 0
    if predicate(start):
        return "", start, 1
    while qi < len(queue):
        trunc, path = queue[qi]
        qi += 1
        for g in alphabet:
            image = truncated_step(trunc, g)
            if image.n > max_aut_size:
                raise ResourceLimitError(f"automaton size cap exceeded: {max_aut_size}")
            if image.key in seen:
                continue
            if len(seen) >= max_states:
                raise ResourceLimitError(f"state cap exceeded: {max_states}")
            seen.add(image.key)
            if predicate(image):
                return path + g, image, len(seen)
            queue.append((image, path + g))
    return None, None, len(seen)


def system_to_dot(system: TransitionSystem, name: str = "closure") -> str:
    """DOT export; states labeled by canonical-key digests."""
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=box];"]
    ids = {key: i for i, key in enumerate(system.states)}
    for key, trunc in system.states.items():
        shape = ' peripheries=2' if key == system.initial else ""
        lines.append(f'  {ids[key]} [label="{trunc.key_digest()}"{shape}];')
    for (key, g), dst in sorted(system.transitions.items(), key=lambda kv: (ids[kv[0][0]], kv[0][1])):
        lines.append(f'  {ids[key]} -> {ids[dst]} [label="{g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dump_system(system: TransitionSystem) -> str:
    """Expanded dump: each state's truncation edges, plus the transitions."""
    ids = {key: i for i, key in enumerate(system.states)}
    lines = []
    for key, trunc in system.states.items():
        mark = " (initial)" if key == system.initial else ""
        lines.append(f"state {ids[key]} [{trunc.key_digest()}]{mark}: "
                     f"{trunc.n} states, origin {trunc.origin}")
        for p, l, q in trunc.positive_edges():
            lines.append(f"  {p} -{'ab'[l - 1]}-> {q}")
    for (key, g), dst in sorted(system.transitions.items(), key=lambda kv: (ids[kv[0][0]], kv[0][1])):
        lines.append(f"{ids[key]} --{g}--> {ids[dst]}")
    return "\n".join(lines) + "\n"
