"""Vertex groups of elementary cyclic splittings and the ellipticity deciders.

A witness records an automorphism sequence ``psi`` (the transport) and a
word ``c`` (the conjugator) such that ``c^-1 psi(h) c`` lies in the named
standard vertex group for every generator ``h``.  Every positive answer
returned here has been checked that way before it is handed back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

from . import digraph as dg
from .digraph import XDigraph, canonical_form, contains_word, stallings_graph
from .errors import InvalidSpec, PreconditionViolation, SkippedCase, TrivialSubgroup, WrongRank
from .whitehead import (
    DEFAULT_MAX_CLOSURE,
    DEFAULT_MAX_RANK,
    AutSequence,
    MinSet,
    TypeI,
    TypeII,
    apply_to_graph,
    edge_delta,
    iter_min_set,
    letter_key,
    minimize,
    whitehead_hypergraph,
)
from .words import (
    Alphabet,
    Word,
    apply_aut_to_word,
    free_reduce,
    inverse,
    is_cyclically_reduced,
    is_proper_power,
    multiply,
)

@dataclass(frozen=True)
class SegmentVertexSpec:
    """The group ``<A, b>`` with ``b`` a word over ``B = X - A``."""

    alphabet: Alphabet
    A: FrozenSet[int]
    b_word: Word

    def __post_init__(self):
        object.__setattr__(self, "A", frozenset(self.A))
        object.__setattr__(self, "b_word", tuple(self.b_word))
        letters = set(self.alphabet.positive())
        if not self.A or not self.A <= letters:
            raise InvalidSpec("A must be a nonempty set of generators")
        if len(letters - self.A) < 2:
            raise InvalidSpec("B = X - A needs at least two letters")
        if any(abs(x) in self.A or abs(x) not in letters for x in self.b_word):
            raise InvalidSpec("b must be a word over B")
        _check_root_word(self.b_word)

    @property
    def B(self) -> FrozenSet[int]:
        return frozenset(self.alphabet.positive()) - self.A


@dataclass(frozen=True)
class LoopVertexSpec:
    """The group ``<U, v^-1 u v>`` with ``U + {v} = X``."""

    alphabet: Alphabet
    U: FrozenSet[int]
    u_word: Word
    v: int

    def __post_init__(self):
        object.__setattr__(self, "U", frozenset(self.U))
        object.__setattr__(self, "u_word", tuple(self.u_word))
        letters = set(self.alphabet.positive())
        if self.v not in letters or self.U | {self.v} != letters or self.v in self.U:
            raise InvalidSpec("U and {v} must partition the generators")
        if any(abs(x) not in self.U for x in self.u_word):
            raise InvalidSpec("u must be a word over U")
        _check_root_word(self.u_word)


def _check_root_word(w: Word) -> None:
    if not w or not is_cyclically_reduced(w):
        raise InvalidSpec("the edge word must be nonempty and cyclically reduced")
    if is_proper_power(w) is not None:
        raise InvalidSpec("the edge word must not be a proper power")


def segment_vertex_group(spec: SegmentVertexSpec) -> List[Word]:
    return [(a,) for a in sorted(spec.A)] + [spec.b_word]


def loop_vertex_group(spec: LoopVertexSpec) -> List[Word]:
    return [(x,) for x in sorted(spec.U)] + [multiply((-spec.v,), spec.u_word, (spec.v,))]


@dataclass(frozen=True)
class SplittingWitness:
    kind: str  # "free_factor" | "segment" | "loop"
    alphabet: Alphabet
    spec: Union[SegmentVertexSpec, LoopVertexSpec, FrozenSet[int]]
    transport: AutSequence = AutSequence()
    conjugator: Word = ()
    trivial: bool = False

    def vertex_group(self) -> List[Word]:
        if self.kind == "segment":
            return segment_vertex_group(self.spec)
        if self.kind == "loop":
            return loop_vertex_group(self.spec)
        return [(x,) for x in sorted(self.spec)]

    def transported(self, gens: Sequence[Word]) -> List[Word]:
        c = self.conjugator
        return [multiply(inverse(c), apply_aut_to_word(self.transport, g), c) for g in gens]

    def verify(self, gens: Sequence[Word]) -> bool:
        """Do all transported, conjugated generators lie in the vertex group?"""
        k = stallings_graph(self.vertex_group(), self.alphabet, based=True)
        return all(contains_word(k, w) for w in self.transported(gens))

    def to_json(self) -> dict:
        X = self.alphabet
        out = {"kind": self.kind}
        if self.kind == "segment":
            out["A"] = [X.symbol(a) for a in sorted(self.spec.A)]
            out["b"] = X.format(self.spec.b_word)
        elif self.kind == "loop":
            out["U"] = [X.symbol(a) for a in sorted(self.spec.U)]
            out["u"] = X.format(self.spec.u_word)
            out["v"] = X.symbol(self.spec.v)
        else:
            out["letters"] = [X.symbol(a) for a in sorted(self.spec)]
        out["transport"] = self.transport.to_json(X)
        out["conjugator"] = X.format(self.conjugator)
        if self.trivial:
            out["trivial"] = True
        return out


# ---------------------------------------------------------------------------
# helpers


def _clean(gens: Sequence[Word], alphabet: Alphabet) -> List[Word]:
    return [w for w in (free_reduce(g, alphabet) for g in gens) if w]


def conjugator_into(gens: Sequence[Word], target_gens: Sequence[Word],
                    alphabet: Alphabet) -> Optional[Word]:
    """A word ``c`` with ``c^-1 h c`` in ``<target_gens>`` for all ``h`` in ``gens``.

    Found by immersing the core of the based graph of ``<gens>`` into the
    target graph and reading the two connecting paths.
    """
    G = stallings_graph(gens, alphabet, based=True)
    K = stallings_graph(target_gens, alphabet, based=True)
    if G.num_edges == 0:
        return ()
    core, survivors = dg._trim(G, keep_basepoint=False)
    if G.basepoint in survivors:
        v0, stem = G.basepoint, ()
    else:
        alive = sorted(survivors)
        v0 = min(alive, key=lambda v: len(dg.path_word(G, G.basepoint, v)))
        stem = dg.path_word(G, G.basepoint, v0)
    f = dg.find_morphism(core, K.forget_basepoint(), surjective=False)
    if f is None:
        return None
    q = f.vertex_map[survivors[v0]]
    back = dg.path_word(K, K.basepoint, q)
    return multiply(stem, inverse(back))


def _finish(witness: SplittingWitness, gens: Sequence[Word]) -> SplittingWitness:
    moved = [apply_aut_to_word(witness.transport, g) for g in gens]
    c = conjugator_into(moved, witness.vertex_group(), witness.alphabet)
    if c is None:
        raise AssertionError("transport does not carry the subgroup into the vertex group")
    out = SplittingWitness(witness.kind, witness.alphabet, witness.spec, witness.transport, c)
    if not out.verify(gens):
        raise AssertionError("witness failed membership verification")
    return out


# ---------------------------------------------------------------------------
# proper free factors


def in_proper_free_factor(gens: Sequence[Word], alphabet: Alphabet,
                          max_rank: int = DEFAULT_MAX_RANK) -> Optional[SplittingWitness]:
    """Minimize once; the subgroup lies in a proper free factor iff a letter is missing."""
    gens = _clean(gens, alphabet)
    if not gens:
        return SplittingWitness("free_factor", alphabet, frozenset(alphabet.positive()[:-1]),
                                trivial=True)
    low, seq = minimize(stallings_graph(gens, alphabet, based=False), max_rank)
    missing = sorted(set(alphabet.positive()) - low.labels())
    if not missing:
        return None
    factor = frozenset(alphabet.positive()) - {missing[0]}
    return _finish(SplittingWitness("free_factor", alphabet, factor, seq), gens)


# ---------------------------------------------------------------------------
# segment splittings


def satisfies_property_S_literal(t: XDigraph) -> Optional[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """Some ``X = A + B`` with the A-edges a bouquet of loops and the B-edges spanning
    a connected rank-one subgraph, read exactly as the definition states."""
    if not t.is_folded():
        raise PreconditionViolation("property (S) is checked on folded graphs")
    t = t.forget_basepoint()
    if t.num_edges == 0 or not t.is_connected() or not t.is_cyclically_reduced():
        return None
    letters = t.alphabet.positive()
    for size in range(1, len(letters)):
        for A in itertools.combinations(letters, size):
            A = frozenset(A)
            a_edges = [e for e in t.edges if e[2] in A]
            if not a_edges or len({e[0] for e in a_edges} | {e[1] for e in a_edges}) != 1:
                continue
            if any(s != d for s, d, _ in a_edges):
                continue
            b_idx = [i for i, e in enumerate(t.edges) if e[2] not in A]
            b_verts = {t.edges[i][0] for i in b_idx} | {t.edges[i][1] for i in b_idx}
            sub = t.subgraph(b_verts, b_idx)
            if b_idx and sub.is_connected() and dg.rank(sub) == 1:
                return A, frozenset(letters) - A
    return None


def _read_cycle(t: XDigraph, p: int, first_end) -> Word:
    c, v, i = first_end
    word = [-c]
    used = {i}
    while v != p:
        (c, w, j), = [e for e in t.ends[v] if e[2] not in used]
        used.add(j)
        word.append(-c)
        v = w
    return tuple(word)


def is_standard_segment_graph(t: XDigraph) -> Optional[SegmentVertexSpec]:
    """Recognize the Stallings graph of a standard segment vertex group ``<A, b>``.

    Requires one loop per letter of A at a single vertex, ``#A >= 1``,
    ``#B >= 2``, the remaining edges forming one embedded cycle through
    that vertex, and a cycle label that is not a proper power.
    """
    if not t.is_folded():
        raise PreconditionViolation("expected a folded graph")
    t = t.forget_basepoint()
    if t.num_edges == 0 or not t.is_connected():
        return None
    X = t.alphabet
    letters = X.positive()
    for size in range(1, len(letters) - 1):
        for A in itertools.combinations(letters, size):
            A = frozenset(A)
            a_edges = [e for e in t.edges if e[2] in A]
            if sorted(e[2] for e in a_edges) != sorted(A):
                continue
            if any(s != d for s, d, _ in a_edges) or len({e[0] for e in a_edges}) != 1:
                continue
            p = a_edges[0][0]
            b_idx = [i for i, e in enumerate(t.edges) if e[2] not in A]
            if not b_idx:
                continue
            b_deg = {v: 0 for v in t.vertices}
            for i in b_idx:
                s, d, _ = t.edges[i]
                b_deg[s] += 1
                b_deg[d] += 1
            b_verts = [v for v in t.vertices if b_deg[v]]
            if p not in b_verts or len(b_verts) != t.num_vertices:
                continue
            if any(b_deg[v] != 2 for v in b_verts) or len(b_idx) != len(b_verts):
                continue
            b_sub = t.subgraph(b_verts, b_idx)
            if not b_sub.is_connected():
                continue
            candidates = [_read_cycle(b_sub, p, end) for end in b_sub.ends[p]]
            word = min(candidates, key=lambda w: [letter_key(x) for x in w])
            if is_proper_power(word) is not None:
                continue
            return SegmentVertexSpec(X, A, word)
    return None


def standard_segment_quotient(s: XDigraph) -> Optional[SegmentVertexSpec]:
    """A standard segment graph that ``s`` immerses onto, found without enumerating quotients.

    For a letter set ``A`` every such quotient identifies all endpoints of
    all A-edges, so it is a quotient of the folding closure ``Q`` of that
    merge.  Immersion caps B-degrees at two, so ``Q`` must already be the
    A-loops plus one B-cycle through their vertex, and the only candidate
    is the cycle reading the root of that cycle's label.
    """
    if not s.is_folded():
        raise PreconditionViolation("expected a folded graph")
    s = s.forget_basepoint()
    X = s.alphabet
    letters = X.positive()
    index = {v: i for i, v in enumerate(s.vertices)}
    nbrs = [[(c, index[w]) for c, w, _ in s.ends[v]] for v in s.vertices]
    for size in range(1, len(letters) - 1):
        for A in itertools.combinations(letters, size):
            A = frozenset(A)
            if not A <= s.labels():
                continue
            ends = [index[v] for e in s.edges if e[2] in A for v in e[:2]]
            part = tuple(range(s.num_vertices))
            for v in ends[1:]:
                part = dg._merge_closed(nbrs, part, part[ends[0]], part[v])
            spec = _collapsed_segment(dg.quotient(s, {v: part[index[v]] for v in s.vertices}), A)
            if spec is not None:
                return spec
    return None


def _collapsed_segment(q: XDigraph, A: FrozenSet[int]) -> Optional[SegmentVertexSpec]:
    p = next(e[0] for e in q.edges if e[2] in A)
    b_idx = [i for i, e in enumerate(q.edges) if e[2] not in A]
    b_deg = {v: 0 for v in q.vertices}
    for i in b_idx:
        b_deg[q.edges[i][0]] += 1
        b_deg[q.edges[i][1]] += 1
    if any(d != 2 for d in b_deg.values()) or len(b_idx) != q.num_vertices:
        return None
    b_sub = q.subgraph(q.vertices, b_idx)
    roots = []
    for end in b_sub.ends[p]:
        w = _read_cycle(b_sub, p, end)
        power = is_proper_power(w)
        roots.append(w if power is None else power[0])
    return SegmentVertexSpec(q.alphabet, A, min(roots, key=lambda w: [letter_key(x) for x in w]))


def _require_rank(alphabet: Alphabet, ok, what: str) -> None:
    if not ok(alphabet.rank):
        raise WrongRank(f"{what} (alphabet rank is {alphabet.rank})")


def segment_elliptic(gens: Sequence[Word], alphabet: Alphabet,
                     max_rank: int = DEFAULT_MAX_RANK,
                     max_closure: int = DEFAULT_MAX_CLOSURE) -> Optional[SplittingWitness]:
    """Is the subgroup conjugate, after an automorphism, into some ``<A, b>``?

    Returns a verified witness, or ``None``.  Needs rank at least three.
    """
    _require_rank(alphabet, lambda n: n >= 3, "segment ellipticity needs rank >= 3")
    gens = _clean(gens, alphabet)
    letters = alphabet.positive()
    if not gens:
        spec = SegmentVertexSpec(alphabet, frozenset(letters[2:]), (letters[0],))
        return SplittingWitness("segment", alphabet, spec, trivial=True)
    ff = in_proper_free_factor(gens, alphabet, max_rank)
    if ff is not None:
        y = min(ff.spec)
        spec = SegmentVertexSpec(alphabet, ff.spec - {y}, (y,))
        return _finish(SplittingWitness("segment", alphabet, spec, ff.transport), gens)
    store = MinSet(AutSequence())
    s = stallings_graph(gens, alphabet, based=False)
    for key, member in iter_min_set(s, max_rank, max_closure, into=store):
        spec = standard_segment_quotient(member)
        if spec is not None:
            return _finish(SplittingWitness("segment", alphabet, spec, store.witness(key)), gens)
    return None


# ---------------------------------------------------------------------------
# loop splittings


def satisfies_property_L(s: XDigraph) -> Optional[Tuple[int, int]]:
    """``(letter, edge index)`` of a unique non-loop edge whose removal leaves two
    components, one of rank one."""
    s = s.forget_basepoint()
    for x in s.alphabet.positive():
        idx = [i for i, e in enumerate(s.edges) if e[2] == x]
        if len(idx) != 1:
            continue
        i = idx[0]
        a, b, _ = s.edges[i]
        if a == b:
            continue
        rest = s.subgraph(s.vertices, [j for j in range(s.num_edges) if j != i])
        comps = rest.components()
        if len(comps) == 2 and any(dg.component_rank(rest, c) == 1 for c in comps):
            return x, i
    return None


def property_L_orbit(gens: Sequence[Word], alphabet: Alphabet,
                     max_rank: int = DEFAULT_MAX_RANK,
                     max_closure: int = DEFAULT_MAX_CLOSURE) -> bool:
    gens = _clean(gens, alphabet)
    if not gens:
        raise TrivialSubgroup("property (L) is undefined for the trivial subgroup")
    s = stallings_graph(gens, alphabet, based=False)
    return any(satisfies_property_L(m) is not None for _, m in iter_min_set(s, max_rank, max_closure))


def rank2_target(alphabet: Alphabet) -> XDigraph:
    """Unbased Stallings graph of ``<a, b^-1 a b>``."""
    return stallings_graph(loop_vertex_group(_rank2_spec(alphabet)), alphabet, based=False)


def _rank2_spec(alphabet: Alphabet) -> LoopVertexSpec:
    return LoopVertexSpec(alphabet, frozenset({1}), (1,), 2)


def two_vertex_quotients(s: XDigraph) -> List[XDigraph]:
    """Folded quotients of ``s`` with exactly two vertices."""
    vs = list(s.vertices)
    out = []
    if len(vs) < 2:
        return out
    for mask in range(1, 2 ** (len(vs) - 1)):
        block = {v: (mask >> i) & 1 for i, v in enumerate(vs[1:])}
        block[vs[0]] = 0
        q = dg.quotient(s.forget_basepoint(), block)
        if q.is_folded():
            out.append(q)
    return out


def admits_rank2_immersion(s: XDigraph, method: str = "morphism") -> bool:
    target = rank2_target(s.alphabet)
    if method == "morphism":
        return dg.immerses_onto(s, target) is not None
    if method == "quotients":
        key = canonical_form(target)
        return any(canonical_form(q) == key for q in two_vertex_quotients(s))
    raise ValueError(f"unknown method {method!r}")


def rank2_loop_witness(gens: Sequence[Word], alphabet: Alphabet, method: str = "morphism",
                       max_rank: int = DEFAULT_MAX_RANK,
                       max_closure: int = DEFAULT_MAX_CLOSURE) -> Optional[SplittingWitness]:
    _require_rank(alphabet, lambda n: n == 2, "the loop decider is for rank two")
    gens = _clean(gens, alphabet)
    spec = _rank2_spec(alphabet)
    if not gens:
        return SplittingWitness("loop", alphabet, spec, trivial=True)
    ff = in_proper_free_factor(gens, alphabet, max_rank)
    if ff is not None:
        transport = ff.transport
        if ff.spec != frozenset({1}):
            transport = transport.then(TypeI.swap(2, 1, 2))
        return _finish(SplittingWitness("loop", alphabet, spec, transport), gens)
    store = MinSet(AutSequence())
    s = stallings_graph(gens, alphabet, based=False)
    for key, member in iter_min_set(s, max_rank, max_closure, into=store):
        if admits_rank2_immersion(member, method):
            return _finish(SplittingWitness("loop", alphabet, spec, store.witness(key)), gens)
    return None


def rank2_loop_elliptic(gens: Sequence[Word], alphabet: Alphabet, method: str = "morphism",
                        max_rank: int = DEFAULT_MAX_RANK,
                        max_closure: int = DEFAULT_MAX_CLOSURE) -> bool:
    """Does some automorphism carry the subgroup into a conjugate of ``<a, a^b>``?"""
    return rank2_loop_witness(gens, alphabet, method, max_rank, max_closure) is not None


# ---------------------------------------------------------------------------
# test helper


def chain_reduces(s: XDigraph, delta_set, b_word: Sequence[int], target: XDigraph) -> bool:
    """Apply ``(delta + {b_i}, b_i)`` for ``i = r, ..., 1`` and check each step reduces.

    ``target`` is the standard segment graph that ``s`` immerses onto and
    ``b_word`` its cycle label read from the loop vertex.  Instances that do
    not meet these hypotheses, that lie in a proper free factor, or where
    the first step does not reduce, raise :class:`SkippedCase`.  Returns
    whether every step reduced and the final graph still immerses onto a
    graph with property (S).
    """
    b_word = tuple(b_word)
    spec = is_standard_segment_graph(target)
    if spec is None or spec.b_word not in (b_word, inverse(b_word)):
        raise SkippedCase("target is not a standard segment graph with that cycle label")
    if dg.immerses_onto(s, target) is None:
        raise SkippedCase("s does not immerse onto the target")
    if minimize(s)[0].labels() != frozenset(s.alphabet.positive()):
        raise SkippedCase("s lies in a proper free factor")
    delta_set = frozenset(delta_set)
    if not all(abs(x) in spec.A for x in delta_set):
        raise SkippedCase("delta must consist of A-letters")
    rank = s.alphabet.rank
    steps = [TypeII(delta_set | {b}, b, rank) for b in reversed(b_word)]
    if edge_delta(whitehead_hypergraph(s), steps[0]) >= 0:
        raise SkippedCase("the first automorphism does not reduce")
    current = s
    for phi in steps:
        nxt = apply_to_graph(phi, current)
        if nxt.num_edges >= current.num_edges:
            return False
        current = nxt
    if dg.immerses_onto(current, target) is not None:
        return True
    return any(satisfies_property_S_literal(q) is not None
               for q in dg.immersive_quotients(current))
