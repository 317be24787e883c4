"""Whitehead automorphisms acting on words and graphs, and Gersten's algorithm.

Type II automorphisms are stored as ``(cut, mult)``.  Before touching a
graph a negative multiplier ``m`` is swapped for the pair
``(complement of cut, m^-1)``, which differs by an inner automorphism and
therefore has the same effect on unbased graphs.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from .digraph import (
    XDigraph,
    canonical_form,
    compact,
    cyclic_reduction,
    fold,
    path_edges,
    stallings_graph,
)
from .errors import InvalidAutomorphism, InvalidCut, PreconditionViolation, ResourceLimit
from .words import Alphabet, Word

DEFAULT_MAX_RANK = 6
DEFAULT_MAX_CLOSURE = 10 ** 5


def letter_key(x: int) -> Tuple[int, int]:
    """Order a, A, b, B, ... used for every deterministic tie-break."""
    return abs(x), int(x < 0)


def cut_key(cut) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted(letter_key(x) for x in cut))


def _bit(x: int) -> int:
    return 1 << (2 * (abs(x) - 1) + (x < 0))


def _mask(letters) -> int:
    m = 0
    for x in letters:
        m |= _bit(x)
    return m


@dataclass(frozen=True)
class TypeI:
    """Signed permutation of the generators: letter ``i`` goes to ``images[i-1]``."""

    images: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(abs(y) for y in self.images) != list(range(1, len(self.images) + 1)):
            raise InvalidAutomorphism(f"{self.images} is not a signed permutation")

    @property
    def rank(self) -> int:
        return len(self.images)

    def image(self, x: int) -> Word:
        y = self.images[abs(x) - 1]
        return (y,) if x > 0 else (-y,)

    @classmethod
    def swap(cls, rank: int, i: int, j: int) -> "TypeI":
        images = list(range(1, rank + 1))
        images[i - 1], images[j - 1] = j, i
        return cls(tuple(images))

    @classmethod
    def invert(cls, rank: int, i: int) -> "TypeI":
        images = list(range(1, rank + 1))
        images[i - 1] = -i
        return cls(tuple(images))


@dataclass(frozen=True)
class TypeII:
    """``x -> [m^-1 if x^-1 in cut] x [m if x in cut]`` for ``x != m^±``."""

    cut: FrozenSet[int]
    mult: int
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "cut", frozenset(self.cut))
        for x in self.cut | {self.mult}:
            if not isinstance(x, int) or x == 0 or abs(x) > self.rank:
                raise InvalidCut(f"letter {x!r} outside an alphabet of rank {self.rank}")
        if self.mult not in self.cut or -self.mult in self.cut:
            raise InvalidCut("the multiplier must lie in the cut and its inverse must not")

    def image(self, x: int) -> Word:
        m = self.mult
        if x == m or x == -m:
            return (x,)
        pre = (-m,) if -x in self.cut else ()
        post = (m,) if x in self.cut else ()
        return pre + (x,) + post

    def complement(self) -> FrozenSet[int]:
        full = {s for i in range(1, self.rank + 1) for s in (i, -i)}
        return frozenset(full - self.cut)

    def normalized(self) -> "TypeII":
        """Same action on unbased graphs, with a positive multiplier."""
        if self.mult > 0:
            return self
        return TypeII(self.complement(), -self.mult, self.rank)


WhiteheadAut = Union[TypeI, TypeII]


def type2(cut, m: int, rank: int) -> TypeII:
    return TypeII(frozenset(cut), m, rank)


def invert_whitehead(phi: WhiteheadAut) -> WhiteheadAut:
    if isinstance(phi, TypeI):
        images = [0] * phi.rank
        for i, y in enumerate(phi.images, start=1):
            images[abs(y) - 1] = i if y > 0 else -i
        return TypeI(tuple(images))
    return TypeII((phi.cut - {phi.mult}) | {-phi.mult}, -phi.mult, phi.rank)


@dataclass(frozen=True)
class AutSequence:
    """Whitehead automorphisms applied left to right."""

    steps: Tuple[WhiteheadAut, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if len({s.rank for s in self.steps}) > 1:
            raise InvalidAutomorphism("all steps must share one alphabet")

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def then(self, other: Union["AutSequence", WhiteheadAut]) -> "AutSequence":
        more = other.steps if isinstance(other, AutSequence) else (other,)
        return AutSequence(self.steps + tuple(more))

    def inverse(self) -> "AutSequence":
        return AutSequence(tuple(invert_whitehead(s) for s in reversed(self.steps)))

    def to_json(self, alphabet: Alphabet) -> list:
        out = []
        for s in self.steps:
            if isinstance(s, TypeI):
                out.append({"type": "I", "map": {
                    alphabet.letters[i]: alphabet.symbol(y) for i, y in enumerate(s.images)}})
            else:
                out.append({"type": "II",
                            "cut": [alphabet.symbol(x) for x in sorted(s.cut, key=letter_key)],
                            "mult": alphabet.symbol(s.mult)})
        return out

    @classmethod
    def from_json(cls, data, alphabet: Alphabet) -> "AutSequence":
        if isinstance(data, str):
            data = json.loads(data)
        steps = []
        for item in data:
            if item["type"] == "I":
                images = [alphabet.letter(item["map"].get(s, s)) for s in alphabet.letters]
                steps.append(TypeI(tuple(images)))
            elif item["type"] == "II":
                cut = {alphabet.letter(s) for s in item["cut"]}
                steps.append(TypeII(cut, alphabet.letter(item["mult"]), alphabet.rank))
            else:
                raise InvalidAutomorphism(f"unknown automorphism type {item['type']!r}")
        return cls(tuple(steps))


# ---------------------------------------------------------------------------
# hypergraph


@dataclass(frozen=True)
class WhiteheadHypergraph:
    rank: int
    hyperedges: Tuple[FrozenSet[int], ...]

    def capacity(self, cut) -> int:
        c = _mask(cut)
        full = (1 << (2 * self.rank)) - 1
        return sum(1 for h in self._masks if h & c and h & (full ^ c))

    def degree(self, letter: int) -> int:
        b = _bit(letter)
        return sum(1 for h in self._masks if h & b)

    @cached_property
    def _masks(self) -> List[int]:
        return [_mask(h) for h in self.hyperedges]


def whitehead_hypergraph(s: XDigraph) -> WhiteheadHypergraph:
    return WhiteheadHypergraph(s.alphabet.rank, tuple(s.hyperlink(v) for v in s.vertices))


def capacity(gamma: WhiteheadHypergraph, cut) -> int:
    return gamma.capacity(cut)


def degree(gamma: WhiteheadHypergraph, m: int) -> int:
    return gamma.degree(m)


def edge_delta(gamma: WhiteheadHypergraph, phi: TypeII) -> int:
    """Change in edge count (equally, in vertex count) caused by ``phi``."""
    phi = phi.normalized()
    return gamma.capacity(phi.cut) - gamma.degree(phi.mult)


def m_cuts(m: int, rank: int) -> Iterator[FrozenSet[int]]:
    """All m-cuts, in lexicographic order of their sorted letters."""
    others = [x for i in range(1, rank + 1) for x in (i, -i) if x not in (m, -m)]
    cuts = [frozenset({m, *sub}) for r in range(len(others) + 1)
            for sub in itertools.combinations(others, r)]
    return iter(sorted(cuts, key=cut_key))


# ---------------------------------------------------------------------------
# action on graphs


def _check_core(s: XDigraph) -> None:
    if not s.is_folded():
        raise PreconditionViolation("graph must be folded")
    if not s.forget_basepoint().is_cyclically_reduced():
        raise PreconditionViolation("graph must be cyclically reduced")
    if not s.is_connected():
        raise PreconditionViolation("graph must be connected")


def apply_to_graph(phi: Union[WhiteheadAut, AutSequence], s: XDigraph) -> XDigraph:
    """Subdivide each ``x``-edge into a path reading ``phi(x)``, fold, and trim."""
    if isinstance(phi, AutSequence):
        for step in phi.steps:
            s = apply_to_graph(step, s)
        return s
    if phi.rank != s.alphabet.rank:
        raise InvalidAutomorphism("automorphism and graph use different alphabets")
    if isinstance(phi, TypeI):
        edges = []
        for a, b, x in s.edges:
            y = phi.images[x - 1]
            edges.append((a, b, y) if y > 0 else (b, a, -y))
        return XDigraph(s.alphabet, s.vertices, edges, None)
    phi = phi.normalized()
    nid = max(s.vertices, default=-1) + 1
    edges = []
    for a, b, x in s.edges:
        es, _, nid = path_edges(a, phi.image(x), nid, end=b)
        edges.extend(es)
    sub = XDigraph(s.alphabet, range(nid), edges, None)
    return cyclic_reduction(fold(sub)[0])


@dataclass(frozen=True)
class AuxiliaryGraph:
    """The intermediate graph of the local construction, before trimming."""

    graph: XDigraph
    image: Dict[int, int]   # original vertex -> its (non-auxiliary) image
    aux: Dict[int, int]     # original vertex without an incoming m-edge -> its auxiliary vertex


def auxiliary_graph(phi: TypeII, s: XDigraph) -> AuxiliaryGraph:
    """Move each edge end whose letter lies in ``cut - {m}`` across the ``m``-edge.

    A vertex with an incoming ``m``-edge hands those ends to that edge's
    initial vertex; any other vertex grows an auxiliary vertex joined to it
    by a new ``m``-edge and hands them to that.
    """
    phi = phi.normalized()
    m, moving = phi.mult, phi.cut - {phi.mult}
    nid = max(s.vertices, default=-1) + 1
    target = {}
    aux = {}
    new_edges = []
    for v in s.vertices:
        u = s.follow(v, -m)  # initial vertex of the m-edge ending at v
        if u is not None:
            target[v] = u
        else:
            aux[v] = target[v] = nid
            new_edges.append((nid, v, m))
            nid += 1
    for a, b, x in s.edges:
        a2 = target[a] if -x in moving else a
        b2 = target[b] if x in moving else b
        new_edges.append((a2, b2, x))
    g = XDigraph(s.alphabet, list(s.vertices) + sorted(aux.values()), new_edges, None)
    return AuxiliaryGraph(g, {v: v for v in s.vertices}, aux)


def apply_to_graph_local(phi: TypeII, s: XDigraph) -> XDigraph:
    if not isinstance(phi, TypeII):
        raise InvalidAutomorphism("the local construction is defined for type II automorphisms")
    return cyclic_reduction(auxiliary_graph(phi, s).graph)


# ---------------------------------------------------------------------------
# reduction and minimization


def _scan(s: XDigraph, multipliers, max_rank: int):
    rank = s.alphabet.rank
    if rank > max_rank:
        raise ResourceLimit(f"alphabet rank {rank} exceeds the cap {max_rank}")
    gamma = whitehead_hypergraph(s)
    masks = gamma._masks
    full = (1 << (2 * rank)) - 1
    for m in multipliers:
        mb = _bit(m)
        deg = sum(1 for h in masks if h & mb)
        for cut in m_cuts(m, rank):
            c = _mask(cut)
            cap = sum(1 for h in masks if h & c and h & (full ^ c))
            yield m, cut, cap - deg


def find_reducing(s: XDigraph, max_rank: int = DEFAULT_MAX_RANK) -> Optional[TypeII]:
    """Most reducing type II automorphism with a multiplier present as a label.

    Ties go to the smaller multiplier, then the lexicographically least cut.
    """
    _check_core(s)
    best = None
    for m, cut, delta in _scan(s, sorted(s.labels()), max_rank):
        if delta < 0 and (best is None or delta < best[0]):
            best = (delta, m, cut)
    if best is None:
        return None
    return TypeII(best[2], best[1], s.alphabet.rank)


def minimize(s: XDigraph, max_rank: int = DEFAULT_MAX_RANK) -> Tuple[XDigraph, AutSequence]:
    s = compact(s.forget_basepoint())
    steps = []
    while True:
        phi = find_reducing(s, max_rank)
        if phi is None:
            return s, AutSequence(tuple(steps))
        s = apply_to_graph(phi, s)
        steps.append(phi)


def _type1_generators(rank: int) -> List[TypeI]:
    gens = [TypeI.swap(rank, i, i + 1) for i in range(1, rank)]
    gens.append(TypeI.invert(rank, 1))
    return gens


def _neighbours(s: XDigraph, max_rank: int) -> Iterator[Tuple[WhiteheadAut, XDigraph]]:
    """Minimal graphs one non-expanding move away from minimal ``s``."""
    rank = s.alphabet.rank
    for phi in _type1_generators(rank):
        yield phi, apply_to_graph(phi, s)
    full_minus = {m: frozenset(x for i in range(1, rank + 1) for x in (i, -i) if x != -m)
                  for m in range(1, rank + 1)}
    for m, cut, delta in _scan(s, range(1, rank + 1), max_rank):
        if delta != 0 or len(cut) == 1 or cut == full_minus[m]:
            continue
        phi = TypeII(cut, m, rank)
        yield phi, apply_to_graph(phi, s)


class MinSet:
    """Minimal automorphic images of a graph, keyed by canonical form.

    Each member remembers the move that discovered it, so a witness
    sequence from the original input can be rebuilt on demand.
    """

    def __init__(self, start_sequence: AutSequence):
        self.start_sequence = start_sequence
        self._members: Dict[bytes, Tuple[XDigraph, Optional[bytes], Optional[WhiteheadAut]]] = {}

    def _add(self, key, graph, parent, step):
        self._members[key] = (graph, parent, step)

    def __len__(self):
        return len(self._members)

    def __contains__(self, key):
        return key in self._members

    def __iter__(self):
        return iter(self._members)

    @property
    def edge_count(self) -> int:
        return next(iter(self._members.values()))[0].num_edges

    def keys(self):
        return list(self._members)

    def graph(self, key: bytes) -> XDigraph:
        return self._members[key][0]

    def graphs(self) -> List[XDigraph]:
        return [v[0] for v in self._members.values()]

    def witness(self, key: bytes) -> AutSequence:
        """Sequence carrying the original input to the member ``key``."""
        steps = []
        while True:
            _, parent, step = self._members[key]
            if parent is None:
                break
            steps.append(step)
            key = parent
        return self.start_sequence.then(AutSequence(tuple(reversed(steps))))

    def items(self) -> Iterator[Tuple[bytes, XDigraph, AutSequence]]:
        for key in self._members:
            yield key, self._members[key][0], self.witness(key)


def iter_min_set(s: XDigraph, max_rank: int = DEFAULT_MAX_RANK,
                 max_closure: int = DEFAULT_MAX_CLOSURE, into: Optional[MinSet] = None
                 ) -> Iterator[Tuple[bytes, XDigraph]]:
    """Breadth-first closure of the minimized graph under non-expanding moves.

    Members are yielded as they are found so callers can stop early; the
    ``into`` container collects them along with their witnesses.
    """
    low, seq = minimize(s, max_rank)
    store = into if into is not None else MinSet(seq)
    store.start_sequence = seq
    key0 = canonical_form(low)
    store._add(key0, low, None, None)
    yield key0, low
    queue = deque([key0])
    while queue:
        key = queue.popleft()
        g = store.graph(key)
        for phi, h in _neighbours(g, max_rank):
            k = canonical_form(h)
            if k in store:
                continue
            if len(store) >= max_closure:
                raise ResourceLimit(f"min-set closure exceeds {max_closure} graphs")
            store._add(k, h, key, phi)
            queue.append(k)
            yield k, h


def min_set(s: XDigraph, max_rank: int = DEFAULT_MAX_RANK,
            max_closure: int = DEFAULT_MAX_CLOSURE) -> MinSet:
    store = MinSet(AutSequence())
    for _ in iter_min_set(s, max_rank, max_closure, into=store):
        pass
    return store


def orbit_equivalent(gens_h: Sequence[Word], gens_k: Sequence[Word], alphabet: Alphabet,
                     max_rank: int = DEFAULT_MAX_RANK, max_closure: int = DEFAULT_MAX_CLOSURE
                     ) -> Tuple[bool, Optional[AutSequence]]:
    """Is some automorphic image of H conjugate to K?  Returns a witness on success.

    Both subgroups are taken up to conjugacy (unbased graphs).
    """
    sh = stallings_graph(gens_h, alphabet, based=False)
    sk = stallings_graph(gens_k, alphabet, based=False)
    low_k, seq_k = minimize(sk, max_rank)
    low_h, _ = minimize(sh, max_rank)
    if low_h.num_edges != low_k.num_edges:
        return False, None
    target = canonical_form(low_k)
    store = MinSet(AutSequence())
    for key, _ in iter_min_set(sh, max_rank, max_closure, into=store):
        if key == target:
            return True, store.witness(key).then(seq_k.inverse())
    return False, None
