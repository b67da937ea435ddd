"""Folded inverse automata of finitely generated free-group subgroups.

A subgroup is represented by its folded, rooted core automaton: states are
dense integers with the origin at 0, and each positive letter acts as a
partial injection on states (inverse edges are implicit).  Automata are
canonicalized at construction (BFS order from the origin, letter order
a < b < ... < a^-1 < b^-1 < ...), so structural equality decides subgroup
equality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InvalidInputError, UnsupportedRankError
from .words import Word, identity, invert, multiply, reduce, cyclic_core

__all__ = [
    "StallingsAutomaton",
    "SingularityProfile",
    "MetricBundle",
    "Bridge",
    "BasisCompletion",
    "fold_generators",
    "contains",
    "contains_conjugate",
    "singularity_profile",
    "bridge_decomposition",
    "metrics",
    "equal_subgroups",
    "conjugate_equal",
    "basis_completion",
    "subgroup_generators",
    "geodesic_label",
    "cyclically_reduced_conjugate",
    "parse_subgroup",
    "to_dot",
]


def _bfs_code(pos: Sequence[dict], inv: Sequence[dict], rank: int, root: int):
    """Canonical BFS order and structure code of the component of ``root``.

    Slot order per state: outgoing positive letters ascending, then incoming
    (inverse direction) letters ascending.  Returns (order, code).
    """
    order = [root]
    index = {root: 0}
    code = []
    qi = 0
    while qi < len(order):
        v = order[qi]
        qi += 1
        row = []
        for maps in (pos, inv):
            for l in range(rank):
                w = maps[l].get(v)
                if w is None:
                    row.append(-1)
                else:
                    if w not in index:
                        index[w] = len(order)
                        order.append(w)
                    row.append(index[w])
        code.append(tuple(row))
    return order, tuple(code)


def _invert_maps(pos: Sequence[dict], rank: int) -> list[dict]:
    return [{q: p for p, q in pos[l].items()} for l in range(rank)]


class StallingsAutomaton:
    """Rooted folded core inverse automaton; immutable after construction."""

    __slots__ = ("rank", "n", "_pos", "_inv", "_hash")

    origin = 0

    def __init__(self, rank: int, n: int, pos: Sequence[dict]):
        # internal: callers must pass a canonicalized structure
        self.rank = rank
        self.n = n
        self._pos = tuple(dict(m) for m in pos)
        self._inv = tuple(_invert_maps(self._pos, rank))
        self._hash = hash((rank, n, self._edge_key()))

    def _edge_key(self):
        return tuple(tuple(sorted(m.items())) for m in self._pos)

    @classmethod
    def _from_raw(cls, rank: int, pos: Sequence[dict], origin: int) -> "StallingsAutomaton":
        """Relabel an arbitrary connected folded structure into canonical form."""
        inv = _invert_maps(pos, rank)
        order, _ = _bfs_code(pos, inv, rank, origin)
        index = {v: i for i, v in enumerate(order)}
        new_pos = [dict() for _ in range(rank)]
        for l in range(rank):
            for p, q in pos[l].items():
                new_pos[l][index[p]] = index[q]
        return cls(rank, len(order), new_pos)

    # -- basic queries ---------------------------------------------------

    def step(self, state: int, letter: int) -> Optional[int]:
        """Follow one signed letter from a state; None if no such edge."""
        if letter > 0:
            return self._pos[letter - 1].get(state)
        return self._inv[-letter - 1].get(state)

    def walk(self, state: int, u: Word) -> Optional[int]:
        for x in u.letters:
            state = self.step(state, x)
            if state is None:
                return None
        return state

    def loops_at(self, u: Word, state: int) -> bool:
        return self.walk(state, u) == state

    def degree(self, state: int) -> int:
        d = 0
        for l in range(self.rank):
            if state in self._pos[l]:
                d += 1
            if state in self._inv[l]:
                d += 1
        return d

    def positive_edges(self):
        for l in range(self.rank):
            for p, q in sorted(self._pos[l].items()):
                yield p, l + 1, q

    def positive_map(self, letter: int) -> dict:
        """The partial injection of a positive letter (1-based), as a dict copy."""
        return dict(self._pos[letter - 1])

    def is_bouquet(self) -> bool:
        """True for the automaton of the whole free group: one state, all loops."""
        return self.n == 1 and all(self._pos[l].get(0) == 0 for l in range(self.rank))

    def __eq__(self, other) -> bool:
        if not isinstance(other, StallingsAutomaton):
            return NotImplemented
        return (
            self.rank == other.rank
            and self.n == other.n
            and self._pos == other._pos
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        edges = ", ".join(f"{p}-{l}->{q}" for p, l, q in self.positive_edges())
        return f"StallingsAutomaton(rank={self.rank}, n={self.n}, [{edges}])"


# -- folding ------------------------------------------------------------


def fold_generators(
    gens: Sequence[Word],
    rank: Optional[int] = None,
    *,
    fold_order: Optional[random.Random] = None,
) -> StallingsAutomaton:
    """Fold the bouquet of generator loops into the subgroup's core automaton.

    The result does not depend on generator order or on the folding order;
    ``fold_order`` randomizes the internal folding schedule (used to exercise
    confluence in tests).
    """
    if gens:
        r = gens[0].rank
        for g in gens:
            if g.rank != r:
                raise InvalidInputError("generators have mixed ranks")
        if rank is not None and rank != r:
            raise InvalidInputError(f"rank mismatch: {rank} vs generator rank {r}")
        rank = r
    else:
        rank = rank if rank is not None else 2

    # one subdivided loop at the origin per generator
    n = 1
    edges: list[tuple[int, int, int]] = []  # (src, positive letter, dst)
    for g in gens:
        prev = 0
        for i, x in enumerate(g.letters):
            nxt = 0 if i == len(g.letters) - 1 else n
            if nxt != 0:
                n += 1
            if x > 0:
                edges.append((prev, x, nxt))
            else:
                edges.append((nxt, -x, prev))
            prev = nxt

    pos, origin, n = _fold(n, edges, 0, rank, fold_order)
    pos, origin, n = _trim_core(pos, origin, n, rank)
    return StallingsAutomaton._from_raw(rank, pos, origin)


def _fold(num_states, edges, origin, rank, rng=None):
    """Identify equally labeled edges sharing an endpoint until folded.

    Union-find over states; each state keeps a slot table signed-letter ->
    target, and a slot conflict merges the two targets.
    """
    parent = list(range(num_states))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    trans: list[dict] = [dict() for _ in range(num_states)]
    pending: list[tuple[int, int, int]] = []
    for p, l, q in edges:
        pending.append((p, l, q))
        pending.append((q, -l, p))
    if rng is not None:
        rng.shuffle(pending)

    while pending:
        p, l, q = pending.pop()
        p, q = find(p), find(q)
        slot = trans[p]
        r = slot.get(l)
        if r is None:
            slot[l] = q
            continue
        r = find(r)
        slot[l] = r
        if r == q:
            continue
        big, small = (r, q) if len(trans[r]) >= len(trans[q]) else (q, r)
        parent[small] = big
        for l2, t2 in trans[small].items():
            pending.append((big, l2, t2))
        trans[small] = {}

    pos = [dict() for _ in range(rank)]
    reps = {}
    for v in range(num_states):
        if find(v) == v:
            reps[v] = v
    for v in reps:
        for l, t in trans[v].items():
            if l > 0:
                pos[l - 1][v] = find(t)
    return pos, find(origin), len(reps)


def _trim_core(pos, origin, n, rank):
    """Iteratively remove degree <= 1 states other than the origin."""
    inv = _invert_maps(pos, rank)
    states = set()
    for l in range(rank):
        states.update(pos[l].keys())
        states.update(pos[l].values())
    states.add(origin)

    def degree(v):
        return sum((v in pos[l]) + (v in inv[l]) for l in range(rank))

    queue = [v for v in states if v != origin and degree(v) <= 1]
    removed = set()
    while queue:
        v = queue.pop()
        if v in removed or v == origin or degree(v) > 1:
            continue
        removed.add(v)
        for l in range(rank):
            q = pos[l].pop(v, None)
            if q is not None:
                del inv[l][q]
                if q != origin and degree(q) <= 1:
                    queue.append(q)
            p = inv[l].pop(v, None)
            if p is not None:
                del pos[l][p]
                if p != origin and degree(p) <= 1:
                    queue.append(p)
    return pos, origin, len(states - removed)


# -- membership ---------------------------------------------------------


def contains(aut: StallingsAutomaton, u: Word) -> bool:
    """Membership of u in the subgroup: u labels a loop at the origin."""
    if u.rank != aut.rank:
        raise InvalidInputError(f"rank mismatch: {u.rank} vs {aut.rank}")
    return aut.loops_at(u, aut.origin)


def contains_conjugate(aut: StallingsAutomaton, u: Word) -> bool:
    """True iff some conjugate of u lies in the subgroup."""
    core, _ = cyclic_core(u)
    if not core:
        return True
    return any(aut.loops_at(core, v) for v in range(aut.n))


def equal_subgroups(a: StallingsAutomaton, b: StallingsAutomaton) -> bool:
    return a == b


# -- singularities, bridges, path metrics (rank 2) ----------------------


@dataclass(frozen=True)
class SingularityProfile:
    sources: frozenset[int]
    sinks: frozenset[int]
    sigma: int


@dataclass(frozen=True)
class MetricBundle:
    hc: int
    hcfp: int
    shcfp: int
    delta0: int
    delta: int
    zeta: int


@dataclass(frozen=True)
class Bridge:
    start: int
    end: int
    label: Word


def _require_rank2(aut: StallingsAutomaton):
    if aut.rank != 2:
        raise UnsupportedRankError(f"operation requires rank 2, got rank {aut.rank}")


def singularity_profile(aut: StallingsAutomaton) -> SingularityProfile:
    """Sources (both letters outgoing), sinks (both incoming), and their count.

    A state that is both source and sink contributes twice; the count is at
    least 1.
    """
    _require_rank2(aut)
    a_out, b_out = aut._pos
    a_in, b_in = aut._inv
    sources = frozenset(v for v in a_out if v in b_out)
    sinks = frozenset(v for v in a_in if v in b_in)
    return SingularityProfile(sources, sinks, max(1, len(sources) + len(sinks)))


def marker_states(aut: StallingsAutomaton) -> frozenset[int]:
    """Singularities plus the origin: the anchors of bridges and truncations."""
    prof = singularity_profile(aut)
    return prof.sources | prof.sinks | {aut.origin}


def bridge_decomposition(aut: StallingsAutomaton) -> list[Bridge]:
    """Maximal positive paths between marker states with marker-free interiors.

    Every positive edge lies on exactly one bridge.
    """
    _require_rank2(aut)
    markers = marker_states(aut)
    bridges = []
    seen_edges = set()
    for start in sorted(markers):
        for l in (1, 2):
            q = aut.step(start, l)
            if q is None:
                continue
            label = [l]
            prev = start
            seen_edges.add((prev, l, q))
            while q not in markers:
                # interior states have exactly one outgoing positive edge
                nxt = None
                for l2 in (1, 2):
                    t = aut.step(q, l2)
                    if t is not None:
                        nxt = (l2, t)
                        break
                if nxt is None:
                    break
                l2, t = nxt
                seen_edges.add((q, l2, t))
                label.append(l2)
                prev, q = q, t
            bridges.append(Bridge(start, q, Word(tuple(label), 2)))
    total_edges = sum(len(m) for m in aut._pos)
    if len(seen_edges) != total_edges:
        raise AssertionError("bridge decomposition did not cover all edges")
    return bridges


def _chain_cycle_decomposition(mapping: dict):
    """Split a partial injection into simple chains and simple cycles.

    Yields ('cycle', length) and ('chain', vertex_count) items.
    """
    src = set(mapping)
    dst = set(mapping.values())
    starts = [v for v in src if v not in dst]
    visited = set()
    for s in starts:
        count = 1
        v = s
        visited.add(v)
        while v in mapping:
            v = mapping[v]
            visited.add(v)
            count += 1
        yield ("chain", count)
    for s in sorted(src):
        if s in visited:
            continue
        length = 0
        v = s
        while v not in visited:
            visited.add(v)
            v = mapping[v]
            length += 1
        yield ("cycle", length)


def metrics(aut: StallingsAutomaton) -> MetricBundle:
    """Homogeneous cycle / cycle-free path lengths and the derived maxima.

    hc: longest simple cycle labeled by a power of a single letter.
    hcfp: longest vertex-distinct path labeled by a power of a single letter.
    shcfp: longest such path with positive label that starts at a source or
    the origin and ends at a sink or the origin.
    """
    _require_rank2(aut)
    prof = singularity_profile(aut)
    hc = 0
    hcfp = 0
    for l in (1, 2):
        for kind, size in _chain_cycle_decomposition(aut._pos[l - 1]):
            if kind == "cycle":
                hc = max(hc, size)
                hcfp = max(hcfp, size - 1)
            else:
                hcfp = max(hcfp, size - 1)

    start_ok = prof.sources | {aut.origin}
    end_ok = prof.sinks | {aut.origin}
    shcfp = 0
    for l in (1, 2):
        mapping = aut._pos[l - 1]
        for s in start_ok:
            v = s
            visited = {s}
            steps = 0
            while v in mapping:
                v = mapping[v]
                if v in visited:
                    break
                visited.add(v)
                steps += 1
                if v in end_ok:
                    shcfp = max(shcfp, steps)

    delta0 = max(prof.sigma, hc)
    delta = max(delta0, hcfp)
    zeta = max(delta0, shcfp)
    return MetricBundle(hc, hcfp, shcfp, delta0, delta, zeta)


# -- generators, geodesics, conjugates ----------------------------------


def geodesic_label(aut: StallingsAutomaton, state: int) -> Word:
    """Label of a shortest path from the origin to a state (BFS, canonical)."""
    if state == aut.origin:
        return identity(aut.rank)
    prev: dict[int, tuple[int, int]] = {aut.origin: (-1, 0)}
    queue = [aut.origin]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        for l in list(range(1, aut.rank + 1)) + list(range(-1, -aut.rank - 1, -1)):
            w = aut.step(v, l)
            if w is not None and w not in prev:
                prev[w] = (v, l)
                if w == state:
                    qi = len(queue)
                    break
                queue.append(w)
    if state not in prev:
        raise InvalidInputError(f"state {state} unreachable")
    letters = []
    v = state
    while v != aut.origin:
        p, l = prev[v]
        letters.append(l)
        v = p
    return Word(tuple(reversed(letters)), aut.rank)


def subgroup_generators(aut: StallingsAutomaton) -> tuple[Word, ...]:
    """A generating set read off a BFS spanning tree, in canonical order."""
    tree_parent: dict[int, tuple[int, int]] = {aut.origin: (-1, 0)}
    queue = [aut.origin]
    qi = 0
    tree_edges = set()
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        for l in list(range(1, aut.rank + 1)) + list(range(-1, -aut.rank - 1, -1)):
            w = aut.step(v, l)
            if w is not None and w not in tree_parent:
                tree_parent[w] = (v, l)
                if l > 0:
                    tree_edges.add((v, l, w))
                else:
                    tree_edges.add((w, -l, v))
                queue.append(w)

    def path_to(state):
        letters = []
        v = state
        while v != aut.origin:
            p, l = tree_parent[v]
            letters.append(l)
            v = p
        return Word(tuple(reversed(letters)), aut.rank)

    gens = []
    for p, l, q in aut.positive_edges():
        if (p, l, q) in tree_edges:
            continue
        g = multiply(path_to(p), multiply(Word((l,), aut.rank), invert(path_to(q))))
        if g:
            gens.append(g)
    return tuple(gens)


def _reroot(aut: StallingsAutomaton, new_origin: int) -> StallingsAutomaton:
    """Same graph rooted elsewhere, trimmed back to a core automaton."""
    pos = [dict(m) for m in aut._pos]
    pos, origin, _ = _trim_core(pos, new_origin, aut.n, aut.rank)
    return StallingsAutomaton._from_raw(aut.rank, pos, origin)


def _cyclic_core_states(aut: StallingsAutomaton) -> set[int]:
    """States surviving iterated removal of degree-1 states, origin included."""
    degrees = {v: aut.degree(v) for v in range(aut.n)}
    alive = set(range(aut.n))
    queue = [v for v in alive if degrees[v] <= 1]
    while queue and len(alive) > 1:
        v = queue.pop()
        if v not in alive or degrees[v] > 1 or len(alive) == 1:
            continue
        alive.discard(v)
        for l in list(range(1, aut.rank + 1)) + list(range(-1, -aut.rank - 1, -1)):
            w = aut.step(v, l)
            if w is not None and w in alive:
                degrees[w] -= 1
                if degrees[w] <= 1:
                    queue.append(w)
    return alive


def cyclically_reduced_conjugate(aut: StallingsAutomaton) -> StallingsAutomaton:
    """A conjugate whose automaton has no degree-1 origin stem.

    Re-roots at the cyclic-core state nearest the origin (the far end of the
    origin's stem) and trims.
    """
    core = _cyclic_core_states(aut)
    v = aut.origin
    seen = {v}
    while v not in core:
        for l in list(range(1, aut.rank + 1)) + list(range(-1, -aut.rank - 1, -1)):
            w = aut.step(v, l)
            if w is not None and w not in seen:
                break
        else:
            break
        v = w
        seen.add(v)
    return _reroot(aut, v)


def _min_rooted_code(pos, inv, rank, vertices):
    codes = []
    for r in sorted(vertices):
        _, code = _bfs_code(pos, inv, rank, r)
        codes.append(code)
    return min(codes)


def cyclic_core_graph_code(aut: StallingsAutomaton):
    """Canonical code of the automaton with every stem removed, unrooted."""
    pos = [dict(m) for m in aut._pos]
    inv = _invert_maps(pos, aut.rank)
    states = set(range(aut.n))

    def degree(v):
        return sum((v in pos[l]) + (v in inv[l]) for l in range(aut.rank))

    changed = True
    while changed:
        changed = False
        for v in list(states):
            if degree(v) <= 1 and len(states) > 1:
                states.discard(v)
                for l in range(aut.rank):
                    q = pos[l].pop(v, None)
                    if q is not None:
                        del inv[l][q]
                    p = inv[l].pop(v, None)
                    if p is not None:
                        del pos[l][p]
                changed = True
    return _min_rooted_code(pos, inv, aut.rank, states)


def conjugate_equal(a: StallingsAutomaton, b: StallingsAutomaton) -> bool:
    """True iff the subgroups are conjugate in the free group."""
    if a.rank != b.rank:
        return False
    return cyclic_core_graph_code(a) == cyclic_core_graph_code(b)


# -- corank-1 basis completion -------------------------------------------


@dataclass(frozen=True)
class BasisCompletion:
    """One completion z and the description of all of them.

    The full completion set is V (z | z^-1) V where V is the subgroup
    generated by the input words.
    """

    z: Word
    generators: tuple[Word, ...]

    def describe(self) -> str:
        gens = ", ".join(str(g) for g in self.generators) or "1"
        return f"V ({self.z} | {invert(self.z)}) V,  V = <{gens}>"

    def completes(self, x: Word) -> bool:
        """Membership test for the completion set: fold check of gens + x."""
        return fold_generators(list(self.generators) + [x]).is_bouquet()


def _fold_with_identification(aut: StallingsAutomaton, p: int, q: int) -> StallingsAutomaton:
    edges = [(a, l, b) for a, l, b in aut.positive_edges()]
    edges = [(p if a == q else a, l, p if b == q else b) for a, l, b in edges]
    pos, origin, n = _fold(aut.n, edges, aut.origin, aut.rank)
    pos, origin, n = _trim_core(pos, origin, n, aut.rank)
    return StallingsAutomaton._from_raw(aut.rank, pos, origin)


def basis_completion(gens: Sequence[Word], rank: int) -> Optional[BasisCompletion]:
    """Complete m-1 words to a basis of the rank-m free group, if possible.

    Searches state pairs of the folded automaton whose identification folds
    to the bouquet; returns the first completion in canonical state order,
    or None when the input is not a corank-1 free factor basis.
    """
    if len(gens) != rank - 1:
        raise InvalidInputError(f"need exactly {rank - 1} words for rank {rank}, got {len(gens)}")
    for g in gens:
        if g.rank != rank:
            raise InvalidInputError("generator rank does not match the target rank")
    aut = fold_generators(list(gens), rank=rank)

    if aut.n == 1:
        loops = [l for l in range(1, rank + 1) if aut.step(0, l) == 0]
        if len(loops) != rank - 1:
            return None
        missing = next(l for l in range(1, rank + 1) if l not in loops)
        return BasisCompletion(Word((missing,), rank), tuple(gens))

    for p in range(aut.n):
        for q in range(p + 1, aut.n):
            if _fold_with_identification(aut, p, q).is_bouquet():
                z = multiply(geodesic_label(aut, p), invert(geodesic_label(aut, q)))
                return BasisCompletion(z, tuple(gens))
    return None


# -- I/O ------------------------------------------------------------------


def parse_subgroup(text: str, rank: int = 2) -> list[Word]:
    """Subgroup file format: one generator word per line, '#' comments."""
    from .words import word as parse_word

    gens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            gens.append(parse_word(line, rank))
    return gens


def to_dot(aut: StallingsAutomaton, name: str = "subgroup") -> str:
    """DOT export: origin double-circled, edges labeled by positive letters."""
    import string as _string

    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle];",
             f"  {aut.origin} [shape=doublecircle];"]
    for p, l, q in aut.positive_edges():
        lines.append(f'  {p} -> {q} [label="{_string.ascii_lowercase[l - 1]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
