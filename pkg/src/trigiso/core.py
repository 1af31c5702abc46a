"""The isomorphism pipeline for ternary graphs.

Generators of the group of automorphisms fixing a distinguished edge are
computed level by level along the layer tower: the kernel of the restriction
to the previous layer is generated by same-fiber transpositions, and the
image of the restriction is exactly the part of the previous group that
preserves the colors of the materialized tower elements (neighbor sets and
new edge pairs).  That color filtering is delegated to the coset solver;
surviving generators are lifted by matching fibers in sorted order.

Two graphs are isomorphic exactly when, after splitting one edge of each and
joining the split nodes, some generator of the edge-fixing group of the
joined graph exchanges the two split nodes (exchange parity is a
homomorphism onto a 2-element group, so a generating set contains an
exchanging element whenever the group does).  `is_isomorphic` follows that
recipe literally; `is_isomorphic_swap` restricts every level to the coset of
part-exchanging candidates instead, which lets non-matching edge choices
fail early.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coloraut import annotate, build_structure_tree, cb, cb_tree
from .graphs import GraphError, LabeledGraph, build_x, is_graph_isomorphism, require_valid
from .layers import LayerDecomposition, layer_sequence
from .perm import Coset, Permutation

_NEUTRAL_F = ("f", ())
_NEUTRAL_E = ("e", None)


def _solve_neutral(color) -> bool:
    # Node elements never constrain the filtering: every permutation that
    # reaches the solver is already a color-preserving automorphism of the
    # current layer.  Unmaterialized subsets are neutral by definition.
    return color[0] == "n" or color == _NEUTRAL_F or color == _NEUTRAL_E


class _LevelContext:
    """Ground set, colors, and permutation extension for one tower level."""

    def __init__(self, dec: LayerDecomposition, r: int, gens, rep):
        self.dec = dec
        self.r = r
        closing = list(gens) + ([rep] if rep is not None else [])
        elements = dec.b_set(r, closing)
        self.node_points = [x for x in elements if isinstance(x, int)]
        subset_elems = [x for x in elements if not isinstance(x, int)]
        self.elems = subset_elems
        self.index = {elem: dec.n + i for i, elem in enumerate(subset_elems)}
        self.m = dec.n + len(subset_elems)

        fibers = dec.fibers_set.get(r, {})
        cross = dec.cross.get(r, {})
        colors: list = [("n", c) for c in dec.colors]
        for elem in subset_elems:
            if isinstance(next(iter(elem)), tuple):  # labeled neighbor set
                fiber = fibers.get(elem, ())
                sig = tuple(sorted(dec.colors[v] for v in fiber))
                colors.append(("f", sig))
            else:  # node pair
                colors.append(("e", cross.get(elem)))
        self.colors = colors
        self.b_points = self.node_points + list(range(dec.n, self.m))

    def extend(self, p: Permutation) -> Permutation:
        img = np.empty(self.m, dtype=np.int32)
        img[: self.dec.n] = p.image
        for elem, i in self.index.items():
            if isinstance(next(iter(elem)), tuple):
                moved = frozenset((int(p.image[w]), lab) for w, lab in elem)
            else:
                moved = frozenset(int(p.image[w]) for w in elem)
            img[i] = self.index[moved]
        return Permutation(img, _checked=True)

    def restrict(self, p: Permutation) -> Permutation:
        return Permutation(p.image[: self.dec.n].copy(), _checked=True)

    def solve(self, gens, rep, use_tree: bool) -> Coset | None:
        """Color-preserving part of the (extended) coset over B_r."""
        ext_gens = tuple(self.extend(g) for g in gens)
        ext_rep = (
            self.extend(rep) if rep is not None else Permutation.identity(self.m)
        )
        coset = Coset(ext_rep, ext_gens)
        if not self.b_points:
            return coset
        if use_tree:
            root = build_structure_tree(self.b_points, ext_gens)
            annotate(root, self.colors, neutral=_solve_neutral)
            return cb_tree(coset, root, self.colors)
        return cb(coset, self.b_points, self.colors)


def lift(dec: LayerDecomposition, r: int, sigma: Permutation) -> Permutation:
    """Extend a certified level-r automorphism to the next layer.

    Each node entering at level r+1 is sent to the node at the matching
    position (sorted by index) of the image fiber: same labeled neighbor set
    pushed through sigma, same color.  The restriction of the result back to
    level r is sigma again.
    """
    img = np.array(sigma.image, dtype=np.int32)
    for (fset, color), members in dec.fibers_full.get(r, {}).items():
        target_key = (
            frozenset((int(sigma.image[w]), lab) for w, lab in fset),
            color,
        )
        targets = dec.fibers_full[r].get(target_key)
        if targets is None or len(targets) != len(members):
            raise GraphError(
                "fiber mismatch while lifting: permutation was not certified"
            )
        for u, v in zip(members, targets):
            img[u] = v
    return Permutation(img, _checked=True)


def _run_tower(dec: LayerDecomposition, use_tree: bool, swap: bool):
    """Run the level loop; returns (generators, representative) or None.

    With swap=False the result generates the full edge-fixing automorphism
    group of the working graph (representative is None).  With swap=True
    the maintained group is the part-preserving subgroup and the
    representative tracks a part-exchanging coset element; returns None as
    soon as the exchange coset dies, which certifies that no automorphism
    exchanges the base edge's endpoints.
    """
    a, b = dec.base_edge
    same_color = dec.colors[a] == dec.colors[b]
    if swap:
        if not same_color:
            return None
        gens: list[Permutation] = []
        rep: Permutation | None = Permutation.transposition(dec.n, a, b)
    else:
        gens = [Permutation.transposition(dec.n, a, b)] if same_color else []
        rep = None

    for r in range(1, dec.N):
        ctx = _LevelContext(dec, r, gens, rep)
        if not ctx.elems:
            out = None  # nothing materialized: the whole coset survives
            s_gens = gens
            s_rep = rep
        else:
            out = ctx.solve(gens, rep, use_tree)
            if out is None:
                if swap:
                    return None
                raise AssertionError("identity coset filtered to empty")
            s_gens = [ctx.restrict(g) for g in out.sub]
            s_rep = ctx.restrict(out.rep) if swap else None

        new_gens = list(dec.kernel_generators(r))
        seen = {g.image.tobytes() for g in new_gens}
        for g in s_gens:
            lifted = lift(dec, r, g)
            key = lifted.image.tobytes()
            if lifted.is_identity() or key in seen:
                continue
            seen.add(key)
            new_gens.append(lifted)
        gens = new_gens
        if swap:
            rep = lift(dec, r, s_rep)
    return gens, rep


def _original_positions(dec: LayerDecomposition):
    ids = sorted(set(dec.index_of) | set(dec.gadget_triple))
    pos = {v: i for i, v in enumerate(ids)}
    return ids, pos


def _contract(dec: LayerDecomposition, perms) -> list[Permutation]:
    """Map working-graph automorphisms back onto the input graph's nodes.

    Gadget corners collapse to their parent node; the reserved triangle
    labels force corners onto corners, so the parent map is well defined and
    the contraction is a group isomorphism.
    """
    ids, pos = _original_positions(dec)

    def entry_index(v: int) -> int:
        idx = dec.index_of.get(v)
        if idx is None:
            idx = dec.gadget_triple[v][0]
        return idx

    def owner(idx: int) -> int:
        oid = dec.orig_id[idx]
        return oid if oid is not None else dec.gadget_parent[idx]

    entry = [entry_index(v) for v in ids]
    out = []
    for p in perms:
        img = [pos[owner(int(p.image[i]))] for i in entry]
        out.append(Permutation(img))
    return out


@dataclass(frozen=True)
class AutResult:
    """Generators of the edge-fixing automorphism group of a graph.

    `generators` act on positions into `node_order` (the sorted original
    node ids); they form a smooth generating sequence.  `swap_witness`, when
    present, is a generator exchanging the endpoints of the base edge.
    """

    generators: tuple[Permutation, ...]
    node_order: tuple[int, ...]
    base_edge: tuple[int, int]
    swap_witness: Permutation | None


def aut_e_generators(
    g: LabeledGraph,
    e: tuple[int, int],
    use_tree: bool = True,
    gadget: bool = True,
) -> AutResult:
    """Smooth generators of the automorphisms of g that fix e setwise."""
    dec = layer_sequence(g, e, gadget=gadget)
    gens, _ = _run_tower(dec, use_tree=use_tree, swap=False)
    contracted = _contract(dec, gens)
    ids, pos = _original_positions(dec)
    a, b = min(e), max(e)
    witness = next(
        (s for s in contracted if s(pos[a]) == pos[b]),
        None,
    )
    return AutResult(
        generators=tuple(contracted),
        node_order=tuple(ids),
        base_edge=(a, b),
        swap_witness=witness,
    )


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    mapping: dict[int, int] | None = None

    def __bool__(self) -> bool:
        return self.isomorphic


class _LayerProfile:
    """Lazy per-level invariants of the tower rooted at an edge.

    Level d holds the sorted multiset of node signatures entering at BFS
    depth d from the edge's endpoint pair; a node's signature records its
    color and, for each incident edge, the label and whether the neighbor
    sits at a smaller, equal, or larger depth.  Any isomorphism carrying one
    edge onto another carries depth-d entrants onto depth-d entrants and
    preserves every signature, so a first differing (or missing) level rules
    the edge pairing out before any group machinery runs.
    """

    def __init__(self, g: LabeledGraph, e: tuple[int, int]):
        self.adj = g.adjacency()
        self.colors = {v: g.color(v) for v in g.node_ids}
        self.dist = {e[0]: 1, e[1]: 1}
        self.frontier = [e[0], e[1]]
        self.levels = [self._level_sig(self.frontier)]

    def _level_sig(self, nodes):
        dist = self.dist
        sigs = []
        for v in nodes:
            dv = dist[v]
            incident = sorted(
                (lab, min(max(dist.get(w, dv + 1) - dv, -1), 1))
                for w, lab in self.adj[v]
            )
            sigs.append((self.colors[v], tuple(incident)))
        return tuple(sorted(sigs))

    def level(self, d: int):
        """Signature of level d (0-based), or None past the last level."""
        while d >= len(self.levels) and self.frontier:
            nxt = []
            for v in self.frontier:
                for w, _ in self.adj[v]:
                    if w not in self.dist:
                        self.dist[w] = self.dist[v] + 1
                        nxt.append(w)
            self.frontier = nxt
            if nxt:
                self.levels.append(self._level_sig(nxt))
        return self.levels[d] if d < len(self.levels) else None


def _profiles_match(p1: _LayerProfile, p2: _LayerProfile) -> bool:
    d = 0
    while True:
        s1, s2 = p1.level(d), p2.level(d)
        if s1 != s2:
            return False
        if s1 is None:
            return True
        d += 1


def _pretests_pass(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    if g1.n_nodes != g2.n_nodes or g1.n_edges != g2.n_edges:
        return False
    if g1.degree_sequence() != g2.degree_sequence():
        return False
    if sorted(g1.colors().values()) != sorted(g2.colors().values()):
        return False
    if sorted(g1.edges().values()) != sorted(g2.edges().values()):
        return False
    return True


def _extract_mapping(sp, witness: Permutation) -> dict[int, int]:
    inv2 = {x: v for v, x in sp.map2.items()}
    return {u: inv2[witness(sp.map1[u])] for u in sp.map1}


def is_isomorphic(
    g1: LabeledGraph,
    g2: LabeledGraph,
    want_mapping: bool = False,
    use_tree: bool = True,
    gadget: bool = True,
    swap_only: bool = False,
) -> IsoResult:
    """Label- and color-preserving isomorphism test.

    Cheap pre-tests (node and edge counts, degree sequence, color and label
    multisets) short-circuit obvious mismatches.  Otherwise one edge of the
    first graph is split against every edge of the second, and the joined
    graph is searched for a generator exchanging the two split nodes.  Any
    returned mapping is re-verified before being surfaced.
    """
    require_valid(g1, "first graph")
    require_valid(g2, "second graph")
    if g1.n_nodes == 1 or g2.n_nodes == 1:
        same = (
            g1.n_nodes == 1
            and g2.n_nodes == 1
            and g1.color(g1.node_ids[0]) == g2.color(g2.node_ids[0])
        )
        mapping = None
        if same and want_mapping:
            mapping = {g1.node_ids[0]: g2.node_ids[0]}
        return IsoResult(same, mapping)
    if not _pretests_pass(g1, g2):
        return IsoResult(False)

    e1 = g1.sorted_edges()[0]
    lab1 = g1.label(*e1)
    profile1 = _LayerProfile(g1, e1)
    for e2 in g2.sorted_edges():
        if g2.label(*e2) != lab1:
            continue
        if not _profiles_match(profile1, _LayerProfile(g2, e2)):
            continue
        sp = build_x(g1, g2, e1, e2, validated=True)
        dec = layer_sequence(sp.graph, sp.e, gadget=gadget, validated=True)
        if swap_only:
            result = _run_tower(dec, use_tree=use_tree, swap=True)
            if result is None:
                continue
            _, rep = result
            witness = _contract(dec, [rep])[0]
        else:
            gens, _ = _run_tower(dec, use_tree=use_tree, swap=False)
            contracted = _contract(dec, gens)
            witness = next((s for s in contracted if s(sp.v1) == sp.v2), None)
            if witness is None:
                continue
        mapping = _extract_mapping(sp, witness)
        if not is_graph_isomorphism(g1, g2, mapping):
            raise AssertionError("internal error: witness failed verification")
        return IsoResult(True, mapping if want_mapping else None)
    return IsoResult(False)


def is_isomorphic_swap(
    g1: LabeledGraph,
    g2: LabeledGraph,
    want_mapping: bool = False,
    use_tree: bool = True,
    gadget: bool = True,
) -> IsoResult:
    """Same verdict as `is_isomorphic` via coset-restricted level solving.

    Each candidate edge pairing maintains only the part-exchanging coset, so
    pairings that cannot support an exchange die at the first layer where
    the local structure differs.
    """
    return is_isomorphic(
        g1,
        g2,
        want_mapping=want_mapping,
        use_tree=use_tree,
        gadget=gadget,
        swap_only=True,
    )
