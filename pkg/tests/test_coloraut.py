"""Tests for the color-automorphism solver and structure trees."""

import random

import pytest

from trigiso.coloraut import (
    StructureTreeNode,
    annotate,
    build_structure_tree,
    cb,
    cb_tree,
)
from trigiso.harness import random_smooth_2group
from trigiso.perm import (
    Coset,
    Permutation,
    compose,
    coset_elements,
    enumerate_group,
    orbit_partition,
    smoothness_violations,
)


def T(m, a, b):
    return Permutation.transposition(m, a, b)


def _oracle_filter(coset, points, colors):
    """Exhaustively enumerate the coset and keep the color-preserving part."""
    return {
        p
        for p in coset_elements(coset)
        if all(colors[p(b)] == colors[b] for b in points)
    }


def _as_set(coset):
    return coset_elements(coset) if coset is not None else set()


def test_cb_singleton_cases():
    ident = Permutation.identity(4)
    colors = [0, 1, 0, 0]
    keep = cb(Coset(T(4, 0, 2), (ident,)), [0], colors)
    assert keep is not None and _as_set(keep) == {T(4, 0, 2)}
    drop = cb(Coset(T(4, 0, 1), (ident,)), [0], colors)
    assert drop is None


def test_cb_monochromatic_is_identity_filter():
    gens = (T(4, 0, 1), T(4, 2, 3))
    coset = Coset(Permutation.identity(4), gens)
    out = cb(coset, [0, 1, 2, 3], [7, 7, 7, 7])
    assert _as_set(out) == _as_set(coset)
    # the no-op filter must not grow the generating sequence
    assert len(out.sub) == len(gens)


def test_cb_picks_color_preserving_subgroup():
    # <(0 1), (2 3)> with 0,1 distinct colors: only (2 3) survives.
    gens = (T(4, 0, 1), T(4, 2, 3))
    coset = Coset(Permutation.identity(4), gens)
    out = cb(coset, [0, 1, 2, 3], [0, 1, 2, 2])
    assert _as_set(out) == {Permutation.identity(4), T(4, 2, 3)}


def _random_instance(seed):
    rng = random.Random(seed)
    sgs = random_smooth_2group(16, 1 << 8, seed)
    m = 16
    if rng.random() < 0.5:
        rep = Permutation.identity(m)
    else:
        rep = Permutation(rng.sample(range(m), m))
    colors = [rng.choice([0, 0, 1, 2]) for _ in range(m)]
    return rng, sgs, rep, colors


@pytest.mark.parametrize("seed", range(40))
def test_cb_matches_exhaustive_filter(seed):
    rng, sgs, rep, colors = _random_instance(seed)
    coset = Coset(rep, sgs)
    points = list(range(16))
    got = cb(coset, points, colors)
    want = _oracle_filter(coset, points, colors)
    assert _as_set(got) == want
    if got is not None:
        assert smoothness_violations(got.sub) == []
        # Lemma check: the subgroup part is exactly the color-preserving
        # subgroup of the acting group.
        sub = enumerate_group(got.sub if got.sub else (Permutation.identity(16),))
        grp = enumerate_group(sgs if sgs else (Permutation.identity(16),))
        assert sub == {g for g in grp if all(colors[g(b)] == colors[b] for b in points)}


@pytest.mark.parametrize("seed", range(20))
def test_cb_on_stable_subsets_and_sequential_split(seed):
    rng, sgs, rep, colors = _random_instance(1000 + seed)
    coset = Coset(rep, sgs)
    orbits = orbit_partition(sgs, range(16))
    rng.shuffle(orbits)
    half = max(1, len(orbits) // 2)
    b1 = sorted(set().union(*orbits[:half]))
    b2 = sorted(set().union(*orbits[half:])) if orbits[half:] else []
    both = sorted(set(b1) | set(b2))
    inner = cb(coset, b1, colors)
    seq = cb(inner, b2, colors) if inner is not None and b2 else inner
    joint = cb(coset, both, colors) if b2 else inner
    assert _as_set(seq) == _as_set(joint)
    assert _as_set(joint) == _oracle_filter(coset, both, colors)


def test_structure_tree_singleton_and_identity_group():
    leaf = build_structure_tree([5], (Permutation.identity(8),))
    assert leaf.is_leaf() and leaf.content == (5,)
    root = build_structure_tree([0, 1], ())
    assert not root.is_leaf() and not root.transitive
    assert root.left.content == (0,) and root.right.content == (1,)


def test_structure_tree_klein_group():
    gens = (
        Permutation.from_cycles(4, [(0, 1), (2, 3)]),
        Permutation.from_cycles(4, [(0, 2), (1, 3)]),
    )
    root = build_structure_tree(range(4), gens)
    assert root.transitive
    assert {root.left.content, root.right.content} == {
        tuple(sorted(root.block_left)),
        tuple(sorted(set(range(4)) - root.block_left)),
    }
    # level-1 cells form a valid block system
    for g in gens:
        assert g.apply_set(root.block_left) in (
            root.block_left,
            frozenset(range(4)) - root.block_left,
        )
    # stored stabilizer really stabilizes and tau really swaps
    for h in root.stab_gens:
        assert h.apply_set(root.block_left) == root.block_left
    assert root.tau.apply_set(root.block_left) != root.block_left
    assert sorted(leaf.content[0] for leaf in root.leaves()) == [0, 1, 2, 3]


@pytest.mark.parametrize("seed", range(12))
def test_structure_tree_leaves_and_lifting(seed):
    sgs = random_smooth_2group(16, 1 << 8, 300 + seed)
    root = build_structure_tree(range(16), sgs)
    assert sorted(leaf.content[0] for leaf in root.leaves()) == list(range(16))
    # every generator's image of any node content is again a content at the
    # same depth: the action lifts to the tree
    by_depth: dict[int, set] = {}

    def walk(node, d):
        by_depth.setdefault(d, set()).add(frozenset(node.content))
        if not node.is_leaf():
            walk(node.left, d + 1)
            walk(node.right, d + 1)

    walk(root, 0)
    for g in sgs:
        for d, contents in by_depth.items():
            for c in contents:
                assert g.apply_set(c) in contents, (d, sorted(c))


def test_annotate_all_neutral_and_single_active():
    gens = ()
    root = build_structure_tree(range(4), gens)
    annotate(root, [0, 0, 0, 0], neutral=0)
    assert not root.active

    root = build_structure_tree(range(4), gens)
    annotate(root, [0, 0, 5, 0], neutral=0)
    assert root.active
    # chain of intransitive nodes with one active child: facile, and delta
    # jumps to the single active leaf
    assert root.facile
    assert root.delta.is_leaf() and root.delta.content == (2,)


def test_annotate_transitive_never_facile():
    gens = (
        Permutation.from_cycles(4, [(0, 1), (2, 3)]),
        Permutation.from_cycles(4, [(0, 2), (1, 3)]),
    )
    root = build_structure_tree(range(4), gens)
    annotate(root, [0, 0, 5, 0], neutral=0)
    assert root.active and root.transitive and not root.facile
    assert root.delta is root


class _CountingColors:
    def __init__(self, colors):
        self.colors = colors
        self.reads = 0

    def __getitem__(self, i):
        self.reads += 1
        return self.colors[i]


def test_cb_tree_skips_inactive_and_collapses_facile():
    # all-neutral: returned without descending (no color reads at all)
    root = build_structure_tree(range(8), ())
    spy = _CountingColors([0] * 8)
    annotate(root, [0] * 8, neutral=0)
    coset = Coset(Permutation.identity(8), ())
    out = cb_tree(coset, root, spy)
    assert out is coset and spy.reads == 0

    # one active leaf: exactly one singleton filter (two color reads)
    colors = [0, 0, 0, 0, 0, 9, 0, 0]
    root = build_structure_tree(range(8), ())
    annotate(root, colors, neutral=0)
    spy = _CountingColors(colors)
    out = cb_tree(coset, root, spy)
    assert out is coset
    assert spy.reads == 2


@pytest.mark.parametrize("seed", range(40))
def test_cb_tree_equals_cb(seed):
    rng, sgs, rep, colors = _random_instance(2000 + seed)
    coset = Coset(rep, sgs)
    points = list(range(16))
    plain = cb(coset, points, colors)
    root = build_structure_tree(points, sgs)
    annotate(root, colors, neutral=0)
    guided = cb_tree(coset, root, colors)
    assert _as_set(plain) == _as_set(guided)


def test_cb_tree_fallback_when_group_shrinks():
    # Build the tree for a transitive group, then solve for a coset whose
    # subgroup is intransitive on the stored split.
    gens = (
        Permutation.from_cycles(4, [(0, 2), (1, 3)]),
        Permutation.from_cycles(4, [(0, 1), (2, 3)]),
    )
    root = build_structure_tree(range(4), gens)
    colors = [1, 1, 2, 1]
    annotate(root, colors, neutral=0)
    small = (Permutation.from_cycles(4, [(0, 2), (1, 3)]),)  # crosses the blocks
    coset = Coset(Permutation.identity(4), small)
    out = cb_tree(coset, root, colors)
    want = _oracle_filter(Coset(Permutation.identity(4), small), range(4), colors)
    assert _as_set(out) == want


def test_cb_tree_requires_annotation():
    root = build_structure_tree(range(4), ())
    with pytest.raises(ValueError):
        cb_tree(Coset(Permutation.identity(4), ()), root, [0, 0, 0, 0])
