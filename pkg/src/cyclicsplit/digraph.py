"""Edge-labelled directed multigraphs over an alphabet, and Stallings folding.

Every edge carries a positive letter; walking an ``x``-edge backwards reads
``x^-1``.  The hyperlink of a vertex is the set of signed letters seen at
its edge ends: ``x`` for an incoming ``x``-edge, ``x^-1`` for an outgoing
one.  A loop contributes both ends, so it adds 2 to the degree.
"""

from __future__ import annotations

import itertools
import json
import warnings
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import PreconditionViolation, ResourceLimit, TrivialSubgroup
from .words import Alphabet, Word, free_reduce

Edge = Tuple[int, int, int]  # (init, term, positive label)

DEFAULT_MAX_QUOTIENT_VERTICES = 12


@dataclass(frozen=True, eq=False)
class XDigraph:
    alphabet: Alphabet
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    basepoint: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        for s, t, x in self.edges:
            if s not in vs or t not in vs:
                raise ValueError(f"edge {(s, t, x)} has an endpoint outside the vertex set")
            if not (isinstance(x, int) and 1 <= x <= self.alphabet.rank):
                raise ValueError(f"edge label {x!r} is not a positive letter")
        if self.basepoint is not None and self.basepoint not in vs:
            raise ValueError("basepoint is not a vertex")

    def _key(self):
        return (self.alphabet, self.vertices, self.edges, self.basepoint)

    def __eq__(self, other):
        # literal equality; use canonical_form for isomorphism
        return isinstance(other, XDigraph) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        es = ", ".join(f"{s}-{self.alphabet.letters[x - 1]}->{t}" for s, t, x in self.edges)
        return f"XDigraph(V={list(self.vertices)}, E=[{es}], base={self.basepoint})"

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_count(self, letter: int) -> int:
        return sum(1 for e in self.edges if e[2] == abs(letter))

    def labels(self) -> frozenset:
        return frozenset(e[2] for e in self.edges)

    def forget_basepoint(self) -> "XDigraph":
        return XDigraph(self.alphabet, self.vertices, self.edges, None)

    @cached_property
    def ends(self) -> Dict[int, List[Tuple[int, int, int]]]:
        """vertex -> list of (signed letter contributed, other endpoint, edge index)."""
        ends = {v: [] for v in self.vertices}
        for i, (s, t, x) in enumerate(self.edges):
            ends[s].append((-x, t, i))
            ends[t].append((x, s, i))
        return ends

    def degree(self, v: int) -> int:
        return len(self.ends[v])

    def hyperlink(self, v: int) -> frozenset:
        return frozenset(c for c, _, _ in self.ends[v])

    @cached_property
    def _step(self) -> Dict[Tuple[int, int], int]:
        # (vertex, signed letter read) -> vertex reached; only meaningful when folded
        step = {}
        for s, t, x in self.edges:
            step[(s, x)] = t
            step[(t, -x)] = s
        return step

    def follow(self, v: int, letter: int) -> Optional[int]:
        return self._step.get((v, letter))

    def is_folded(self) -> bool:
        return all(len(self.hyperlink(v)) == self.degree(v) for v in self.vertices)

    def leaves(self) -> List[int]:
        return [v for v in self.vertices if self.degree(v) == 1]

    def is_cyclically_reduced(self) -> bool:
        return all(self.degree(v) != 1 or v == self.basepoint for v in self.vertices)

    def components(self) -> List[List[int]]:
        seen = set()
        comps = []
        for v0 in self.vertices:
            if v0 in seen:
                continue
            comp, queue = [], [v0]
            seen.add(v0)
            while queue:
                v = queue.pop()
                comp.append(v)
                for _, w, _ in self.ends[v]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def subgraph(self, vertices, edge_indices) -> "XDigraph":
        vs = set(vertices)
        base = self.basepoint if self.basepoint in vs else None
        return XDigraph(self.alphabet, sorted(vs), [self.edges[i] for i in sorted(edge_indices)], base)


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    source: XDigraph
    target: XDigraph
    vertex_map: Dict[int, int]
    edge_map: Tuple[int, ...]

    def is_valid(self) -> bool:
        """Label, orientation and incidence are preserved."""
        if set(self.vertex_map) != set(self.source.vertices):
            return False
        for i, (s, t, x) in enumerate(self.source.edges):
            ts, tt, tx = self.target.edges[self.edge_map[i]]
            if (ts, tt, tx) != (self.vertex_map[s], self.vertex_map[t], x):
                return False
        return True

    def is_surjective(self) -> bool:
        return (set(self.vertex_map.values()) == set(self.target.vertices)
                and set(self.edge_map) == set(range(self.target.num_edges)))

    def is_immersion(self) -> bool:
        for v in self.source.vertices:
            images = [(c, self.edge_map[i]) for c, _, i in self.source.ends[v]]
            if len(set(images)) != len(images):
                return False
        return True


def relabel(g: XDigraph, mapping: Dict[int, int], basepoint="keep") -> XDigraph:
    base = g.basepoint if basepoint == "keep" else basepoint
    return XDigraph(
        g.alphabet,
        sorted(mapping[v] for v in g.vertices),
        [(mapping[s], mapping[t], x) for s, t, x in g.edges],
        None if base is None else mapping[base],
    )


def compact(g: XDigraph) -> XDigraph:
    """Renumber vertices 0..n-1 keeping their order."""
    return relabel(g, {v: i for i, v in enumerate(sorted(g.vertices))})


def path_edges(start: int, w: Sequence[int], next_id: int, end: Optional[int] = None):
    """Edges of a path reading ``w`` from ``start``; new vertices from ``next_id``.

    Returns ``(edges, last_vertex, next_id)``.  If ``end`` is given the path
    closes there.
    """
    edges = []
    cur = start
    for i, x in enumerate(w):
        if i == len(w) - 1 and end is not None:
            nxt = end
        else:
            nxt = next_id
            next_id += 1
        edges.append((cur, nxt, x) if x > 0 else (nxt, cur, -x))
        cur = nxt
    return edges, cur, next_id


def bouquet_from_generators(gens: Sequence[Word], alphabet: Alphabet) -> XDigraph:
    """Wedge at basepoint 0 of one subdivided loop per nonempty generator."""
    edges = []
    nid = 1
    for w in gens:
        alphabet.check_word(w)
        if not w:
            continue
        es, _, nid = path_edges(0, w, nid, end=0)
        edges.extend(es)
    return XDigraph(alphabet, range(nid), edges, 0)


def fold(g: XDigraph) -> Tuple[XDigraph, GraphMorphism]:
    """Fold ``g`` completely; returns the folded graph and the quotient map."""
    parent = {v: v for v in g.vertices}
    size = {v: 1 for v in g.vertices}

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    out = {v: {} for v in g.vertices}
    inn = {v: {} for v in g.vertices}
    pending = []
    for s, t, x in g.edges:
        if x in out[s]:
            pending.append((out[s][x], t))
        else:
            out[s][x] = t
        if x in inn[t]:
            pending.append((inn[t][x], s))
        else:
            inn[t][x] = s
    while pending:
        a, b = pending.pop()
        a, b = find(a), find(b)
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
        for table in (out, inn):
            mine = table[a]
            for x, t in table.pop(b).items():
                if x in mine:
                    pending.append((mine[x], t))
                else:
                    mine[x] = t

    new_id = {}
    for v in g.vertices:
        r = find(v)
        if r not in new_id:
            new_id[r] = len(new_id)
    vmap = {v: new_id[find(v)] for v in g.vertices}
    edge_index = {}
    new_edges = []
    emap = []
    for s, t, x in g.edges:
        key = (vmap[s], vmap[t], x)
        if key not in edge_index:
            edge_index[key] = len(new_edges)
            new_edges.append(key)
        emap.append(edge_index[key])
    base = None if g.basepoint is None else vmap[g.basepoint]
    folded = XDigraph(g.alphabet, range(len(new_id)), new_edges, base)
    return folded, GraphMorphism(g, folded, vmap, tuple(emap))


def fold_stepwise(g: XDigraph, rng) -> XDigraph:
    """Fold one pair at a time, choosing each fold uniformly at random.

    Slow; exists to check that the result does not depend on fold order.
    """
    verts = set(g.vertices)
    edges = list(g.edges)
    base = g.basepoint
    while True:
        candidates = []
        for i, j in itertools.combinations(range(len(edges)), 2):
            (s1, t1, x1), (s2, t2, x2) = edges[i], edges[j]
            if x1 == x2 and (s1 == s2 or t1 == t2):
                candidates.append((i, j))
        if not candidates:
            break
        i, j = rng.choice(candidates)
        (s1, t1, _), (s2, t2, _) = edges[i], edges[j]
        merges = {}
        if s1 != s2:
            merges[max(s1, s2)] = min(s1, s2)
        if t1 != t2:
            merges[max(t1, t2)] = min(t1, t2)
        # identifying one pair of endpoints may also identify the other pair
        if len(merges) == 2:
            (a, ra), (b, rb) = merges.items()
            if ra == b:
                merges[a] = rb
            elif rb == a:
                merges[b] = ra
        del edges[j]

        def m(v):
            while v in merges:
                v = merges[v]
            return v

        edges = [(m(s), m(t), x) for s, t, x in edges]
        verts = {m(v) for v in verts}
        base = None if base is None else m(base)
    return compact(XDigraph(g.alphabet, sorted(verts), edges, base))


def _trim(g: XDigraph, keep_basepoint: bool) -> Tuple[XDigraph, Dict[int, int]]:
    deg = {v: g.degree(v) for v in g.vertices}
    alive_e = set(range(g.num_edges))
    alive_v = set(g.vertices)
    exempt = g.basepoint if keep_basepoint else None
    queue = deque(v for v in g.vertices if deg[v] == 1 and v != exempt)
    while queue:
        v = queue.popleft()
        if v not in alive_v or deg[v] != 1:
            continue
        (_, w, i), = [end for end in g.ends[v] if end[2] in alive_e]
        alive_e.discard(i)
        alive_v.discard(v)
        deg[v] = 0
        deg[w] -= 1
        if deg[w] == 1 and w != exempt:
            queue.append(w)
    order = sorted(alive_v)
    mapping = {v: i for i, v in enumerate(order)}
    base = g.basepoint if keep_basepoint and g.basepoint in alive_v else None
    trimmed = XDigraph(
        g.alphabet,
        range(len(order)),
        [(mapping[s], mapping[t], x) for i, (s, t, x) in enumerate(g.edges) if i in alive_e],
        None if base is None else mapping[base],
    )
    return trimmed, mapping


def cyclic_reduction(g: XDigraph, keep_basepoint: bool = False) -> XDigraph:
    """Delete leaves repeatedly.  Without ``keep_basepoint`` the basepoint is
    forgotten and may itself be deleted."""
    return _trim(g, keep_basepoint)[0]


def stallings_graph(gens: Sequence[Word], alphabet: Alphabet, based: bool = True) -> XDigraph:
    """Stallings graph of the subgroup generated by ``gens``.

    Based graphs keep the basepoint (it may be a leaf); unbased graphs are
    fully cyclically reduced and represent the conjugacy class.
    """
    gens = [free_reduce(w, alphabet) for w in gens]
    folded, _ = fold(bouquet_from_generators(gens, alphabet))
    g = cyclic_reduction(folded, keep_basepoint=based)
    if not based and g.num_edges == 0:
        raise TrivialSubgroup("the trivial subgroup has no unbased Stallings graph")
    return g


def contains_word(g: XDigraph, w: Sequence[int]) -> bool:
    if g.basepoint is None:
        raise PreconditionViolation("membership needs a based graph")
    if not g.is_folded():
        raise PreconditionViolation("membership needs a folded graph")
    v = g.basepoint
    for x in free_reduce(w):
        v = g.follow(v, x)
        if v is None:
            return False
    return v == g.basepoint


def read_path(g: XDigraph, start: int, w: Sequence[int]) -> Optional[int]:
    """End vertex of the path reading ``w`` from ``start`` in a folded graph."""
    v = start
    for x in w:
        v = g.follow(v, x)
        if v is None:
            return None
    return v


def path_word(g: XDigraph, start: int, end: int) -> Word:
    """Label of a shortest path from ``start`` to ``end`` (BFS, deterministic)."""
    prev = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v == end:
            break
        for c, w, _ in sorted(g.ends[v]):
            if w not in prev:
                # reading from v across this end: contribution c means the
                # path reads c^-1 (incoming x-edge walked backwards reads x^-1)
                prev[w] = (v, -c)
                queue.append(w)
    if end not in prev:
        raise PreconditionViolation(f"no path from {start} to {end}")
    word = []
    v = end
    while prev[v] is not None:
        v, x = prev[v]
        word.append(x)
    return tuple(reversed(word))


def rank(g: XDigraph):
    """First Betti number.  Disconnected input warns and gets a per-component list."""
    comps = g.components()
    if len(comps) <= 1:
        return g.num_edges - g.num_vertices + 1
    warnings.warn("rank of a disconnected graph: returning per-component ranks")
    return [component_rank(g, c) for c in comps]


def component_rank(g: XDigraph, comp) -> int:
    cs = set(comp)
    return sum(1 for s, _, _ in g.edges if s in cs) - len(cs) + 1


def _adjacency(t: XDigraph) -> Dict[Tuple[int, int], int]:
    return {(s, x): i for i, (s, _, x) in enumerate(t.edges)}


def find_morphism(s: XDigraph, t: XDigraph, surjective: bool = True) -> Optional[GraphMorphism]:
    """A label-preserving map from folded ``s`` to folded ``t``, optionally onto.

    Both graphs folded means the image of one vertex per component fixes
    the whole map, so the search backtracks only over those seeds.
    """
    if not s.is_folded():
        raise PreconditionViolation("source must be folded")
    if not t.is_folded():
        raise PreconditionViolation("target must be folded")
    out_t = _adjacency(t)
    in_t = {(tt, x): i for i, (_, tt, x) in enumerate(t.edges)}
    comps = s.components()

    def propagate(comp, seed_image):
        vmap = {comp[0]: seed_image}
        queue = [comp[0]]
        while queue:
            v = queue.pop()
            for c, w, _ in s.ends[v]:
                fv = vmap[v]
                key = (fv, -c) if c < 0 else (fv, c)
                idx = (out_t if c < 0 else in_t).get(key)
                if idx is None:
                    return None
                ts, tt, _ = t.edges[idx]
                fw = tt if c < 0 else ts
                if w in vmap:
                    if vmap[w] != fw:
                        return None
                else:
                    vmap[w] = fw
                    queue.append(w)
        return vmap

    options = []
    for comp in comps:
        opts = [m for m in (propagate(comp, p) for p in t.vertices) if m is not None]
        if not opts:
            return None
        options.append(opts)

    def edge_map(vmap):
        return tuple(out_t[(vmap[a], x)] for a, _, x in s.edges)

    for choice in itertools.product(*options):
        vmap = {}
        for part in choice:
            vmap.update(part)
        if s.basepoint is not None and t.basepoint is not None and vmap[s.basepoint] != t.basepoint:
            continue
        emap = edge_map(vmap)
        morph = GraphMorphism(s, t, vmap, emap)
        if not surjective or morph.is_surjective():
            return morph
    return None


def immerses_onto(s: XDigraph, t: XDigraph) -> Optional[GraphMorphism]:
    """A surjective immersion ``s -> t`` if one exists.

    ``s`` must be folded, so any morphism out of it is locally injective.
    Basepoints are ignored; pass unbased graphs.
    """
    return find_morphism(s.forget_basepoint(), t.forget_basepoint(), surjective=True)


def quotient(g: XDigraph, block_of: Dict[int, int]) -> XDigraph:
    """Identify vertices with equal block ids and merge identical parallel edges."""
    ids = {}
    for v in g.vertices:
        ids.setdefault(block_of[v], len(ids))
    edges = sorted({(ids[block_of[s]], ids[block_of[t]], x) for s, t, x in g.edges})
    base = None if g.basepoint is None else ids[block_of[g.basepoint]]
    return XDigraph(g.alphabet, range(len(ids)), edges, base)


def immersive_quotients(s: XDigraph, max_vertices: int = DEFAULT_MAX_QUOTIENT_VERTICES) -> List[XDigraph]:
    """All folded vertex-partition quotients of folded ``s``, up to isomorphism.

    Folded quotients of a folded graph are exactly the partitions closed
    under "same-label neighbours of identified vertices are identified".
    Every such partition is reached from the discrete one by repeatedly
    merging two blocks and folding, which is how they are enumerated.
    """
    if not s.is_folded():
        raise PreconditionViolation("immersive_quotients needs a folded graph")
    if s.num_vertices > max_vertices:
        raise ResourceLimit(f"{s.num_vertices} vertices exceeds the quotient cap {max_vertices}")
    s = s.forget_basepoint()
    index = {v: i for i, v in enumerate(s.vertices)}
    nbrs = [[(c, index[w]) for c, w, _ in s.ends[v]] for v in s.vertices]
    start = tuple(range(s.num_vertices))
    seen = {start}
    frontier = [start]
    results = {}
    while frontier:
        part = frontier.pop()
        q = quotient(s, {v: part[index[v]] for v in s.vertices})
        results.setdefault(canonical_form(q), q)
        reps = sorted(set(part))
        for a, b in itertools.combinations(reps, 2):
            new = _merge_closed(nbrs, part, a, b)
            if new not in seen:
                seen.add(new)
                frontier.append(new)
    return [results[k] for k in sorted(results)]


def _merge_closed(nbrs, part: Tuple[int, ...], a: int, b: int) -> Tuple[int, ...]:
    """Smallest folding-closed partition coarser than ``part`` joining blocks ``a`` and ``b``.

    ``part`` must itself be closed; blocks are named by their first vertex.
    """
    parent = list(part)

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    step = {}
    for v, ends in enumerate(nbrs):
        r = part[v]
        table = step.setdefault(r, {})
        for c, w in ends:
            table.setdefault(c, w)
    pending = [(a, b)]
    while pending:
        x, y = pending.pop()
        x, y = find(x), find(y)
        if x == y:
            continue
        if x > y:
            x, y = y, x
        parent[y] = x
        tx, ty = step[x], step.pop(y)
        for c, w in ty.items():
            if c in tx:
                pending.append((tx[c], w))
            else:
                tx[c] = w
    return _normalize_partition([find(v) for v in range(len(part))])


def _normalize_partition(labels: Sequence[int]) -> Tuple[int, ...]:
    """Name each block by its first vertex."""
    first = {}
    return tuple(first.setdefault(x, i) for i, x in enumerate(labels))


# ---------------------------------------------------------------------------
# canonical forms


def _orderings(g: XDigraph, start: int, comp_size: int) -> Iterator[List[int]]:
    """BFS vertex orders from ``start``; same-key ties branch over all orders."""
    adj = {}
    for v in g.vertices:
        groups = defaultdict(list)
        for c, w, _ in g.ends[v]:
            if w not in groups[c]:
                groups[c].append(w)
        adj[v] = sorted(groups.items())

    def extend(order, pos, pending):
        numbered = set(order)
        while True:
            if pending:
                (_, nbrs), pending = pending[0], pending[1:]
                fresh = [w for w in nbrs if w not in numbered]
                if len(fresh) > 1:
                    for perm in itertools.permutations(fresh):
                        yield from extend(order + list(perm), pos, pending)
                    return
                if fresh:
                    order = order + fresh
                    numbered.add(fresh[0])
                continue
            if pos >= len(order):
                break
            pending = adj[order[pos]]
            pos += 1
        if len(order) == comp_size:
            yield order

    yield from extend([start], 0, [])


def _vertex_invariant(g: XDigraph, v: int):
    return tuple(sorted(c for c, _, _ in g.ends[v]))


def _component_code(g: XDigraph, comp: List[int]) -> tuple:
    sub = g.subgraph(comp, [i for i, (s, _, _) in enumerate(g.edges) if s in set(comp)])
    if sub.basepoint is not None:
        starts = [sub.basepoint]
    else:
        inv = {v: _vertex_invariant(sub, v) for v in comp}
        best = min(inv.values())
        starts = [v for v in comp if inv[v] == best]
    best_code = None
    for st in starts:
        for order in _orderings(sub, st, len(comp)):
            num = {v: i for i, v in enumerate(order)}
            code = (
                len(comp),
                -1 if sub.basepoint is None else num[sub.basepoint],
                tuple(sorted((num[s], num[t], x) for s, t, x in sub.edges)),
            )
            if best_code is None or code < best_code:
                best_code = code
    return best_code


def canonical_form(g: XDigraph) -> bytes:
    """Byte string equal for two graphs iff they are isomorphic (respecting basepoints)."""
    codes = [_component_code(g, comp) for comp in g.components()]
    based = [c for c in codes if c[1] >= 0]
    rest = sorted(c for c in codes if c[1] < 0)
    return repr((g.alphabet.rank, tuple(based + rest))).encode()


def is_isomorphic(g: XDigraph, h: XDigraph) -> bool:
    return canonical_form(g) == canonical_form(h)


# ---------------------------------------------------------------------------
# serialization


def to_json(g: XDigraph) -> dict:
    letters = g.alphabet.letters
    return {
        "alphabet": list(letters),
        "vertices": list(g.vertices),
        "edges": [{"from": s, "to": t, "label": letters[x - 1]} for s, t, x in g.edges],
        "basepoint": g.basepoint,
    }


def from_json(data) -> XDigraph:
    if isinstance(data, str):
        data = json.loads(data)
    alphabet = Alphabet(tuple(data["alphabet"]))
    edges = []
    for e in data["edges"]:
        x = alphabet.letter(e["label"])
        if x < 0:
            raise ValueError("edge labels must be positive letters")
        edges.append((e["from"], e["to"], x))
    return XDigraph(alphabet, data["vertices"], edges, data.get("basepoint"))


def to_dot(g: XDigraph, name: str = "S") -> str:
    lines = [f"digraph {name} {{"]
    for v in g.vertices:
        shape = "doublecircle" if v == g.basepoint else "circle"
        lines.append(f'  {v} [shape={shape}];')
    for s, t, x in sorted(g.edges):
        lines.append(f'  {s} -> {t} [label="{g.alphabet.letters[x - 1]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
