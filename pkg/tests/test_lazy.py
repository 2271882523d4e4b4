import pytest

from generators import Shape, box_and_tree, iterated_successor
from oracles import all_interleavings, brute_force_trees

from superlazy.build import Builder
from superlazy.lam import DELTA_DELTA, encode_cbv
from superlazy.lazy import (BlockedReduction, DereliftingTree, LeafKind, StrategyTag,
                            admissible_redexes, bounded_spine, match_derelicting_tree, normalize,
                            nsi_allows, path_cost, step, superlazy_step)
from superlazy.net import Label, isomorphic, validate
from superlazy.pr import decode_nat
from superlazy.rewrite import RuleTag

X, D, N, W = Label.X, Label.D, Label.N, Label.W

# v1..v10 laid out so that v1v2v4v7v10 and v1v3v6 reach -1 at a D leaf
SAMPLE_LABELS = {1: X, 2: N, 3: X, 4: D, 5: N, 6: D, 7: X, 8: W, 9: W, 10: D}
SAMPLE_KIDS = {1: (2, 3), 2: (4,), 4: (7,), 7: (9, 10), 3: (5, 6), 5: (8,)}


@pytest.fixture
def example_tree():
    return DereliftingTree.from_shape(1, SAMPLE_LABELS, SAMPLE_KIDS)


def test_path_cost_examples(example_tree):
    assert path_cost(example_tree, [1, 2, 4, 7, 10]) == -1
    assert path_cost(example_tree, [1, 3, 6]) == -1
    assert path_cost(example_tree, [1, 3, 5, 8]) == 1
    assert path_cost(example_tree, [1]) == 0


def test_example_tree_satisfies_conditions(example_tree):
    assert example_tree.satisfies_conditions()
    assert example_tree.der_leaves() == [6, 10]
    assert example_tree.leaves[8] is LeafKind.WEAK
    assert all(c >= 0 for v, c in example_tree.cost_by_prefix.items() if v not in (6, 10))


def test_path_cost_rejects_non_paths(example_tree):
    with pytest.raises(ValueError):
        path_cost(example_tree, [2, 4])
    with pytest.raises(ValueError):
        path_cost(example_tree, [1, 4])
    with pytest.raises(ValueError):
        path_cost(example_tree, [])


def test_shape_with_a_shallow_d_leaf_fails():
    # an inner D first then another D leaf: cost -2 at the leaf
    tree = DereliftingTree.from_shape(1, {1: D, 2: D}, {1: (2,)})
    assert not tree.satisfies_conditions()
    tree = DereliftingTree.from_shape(1, {1: N}, {})
    assert not tree.satisfies_conditions()


def test_single_dereliction_is_a_tree():
    net, box = box_and_tree(Shape(D, (None,)), "id")
    tree = match_derelicting_tree(net, box)
    assert tree is not None
    assert tree.count(D) == 1
    assert tree.cost_by_prefix[tree.root] == -1
    assert tree.leaves[tree.root] is LeafKind.DER


def test_lone_digging_is_not_a_tree():
    net, box = box_and_tree(Shape(N, (None,)), "id")
    assert match_derelicting_tree(net, box) is None
    assert brute_force_trees(net, box) == []


def test_weakening_is_a_tree():
    net, box = box_and_tree(Shape(W), "open")
    tree = match_derelicting_tree(net, box)
    assert tree is not None and tree.leaves == {tree.root: LeafKind.WEAK}


def test_dangling_contraction_output_rejected():
    net, box = box_and_tree(Shape(X, (Shape(D, (None,)), None)), "id")
    assert match_derelicting_tree(net, box) is None


def test_box_facing_a_lambda_has_no_tree():
    b = Builder()
    out = b.app(b.boxed([], lambda: b.lam(lambda x: x)), b.premise())
    net = b.conclude(out)
    # the box principal meets an L-o argument port, not a principal port
    assert match_derelicting_tree(net, next(iter(net.boxes))) is None


@pytest.mark.parametrize("n", range(21))
def test_bounded_spine_accepted(n):
    net, box, root = bounded_spine(n)
    assert validate(net).ok
    tree = match_derelicting_tree(net, box)
    assert tree is not None and tree.root == root
    assert tree.count(X) == n
    assert len(tree.der_leaves()) == n
    assert tree.count(W) == 1
    if n <= 10:  # the enumeration doubles with every X
        assert [frozenset(tree.nodes)] == brute_force_trees(net, box)


def test_spine_step_opens_one_copy_per_leaf():
    net, box, _ = bounded_spine(3)
    after = superlazy_step(net, box)
    assert box not in after.boxes
    assert not after.boxes
    assert sum(1 for lab in after.labels.values() if lab is Label.RLIMP) == 3
    assert validate(after).ok


def test_superlazy_step_matches_every_interleaving():
    shape = Shape(X, (Shape(D, (None,)), Shape(N, (Shape(D, (Shape(D, (None,)),)),))))
    for content in ("id", "open", "nested"):
        net, box = box_and_tree(shape, content)
        tree = match_derelicting_tree(net, box)
        assert tree is not None
        expected = superlazy_step(net, box, tree)
        assert validate(expected).ok
        results = all_interleavings(net, tree.nodes)
        assert len(results) > 1
        assert all(isomorphic(expected, r) for r in results)


def test_superlazy_step_shares_premises():
    net, box = box_and_tree(Shape(X, (Shape(D, (None,)), Shape(W))), "open")
    after = superlazy_step(net, box)
    # the aux door's premise now feeds one X mirroring the tree and a W
    labels = sorted(str(lab) for lab in after.labels.values())
    assert labels.count("X") == 1 and labels.count("W") == 1


def test_superlazy_step_refuses_non_tree():
    net, box = box_and_tree(Shape(N, (None,)), "id")
    with pytest.raises(BlockedReduction):
        superlazy_step(net, box)
    net, box, _ = bounded_spine(2)
    other = DereliftingTree.from_shape(0, {0: W}, {})
    with pytest.raises(BlockedReduction):
        superlazy_step(net, box, other)


def test_mpostponed_prefers_tensor_over_merge():
    b = Builder()
    inner = b.boxed([], lambda: b.lam(lambda x: x))
    outer = b.boxed([inner], lambda a: b.der(a))
    left, right = b.split(b.tensor(b.premise(), b.premise()))
    net = b.conclude(b.tensor(outer, b.tensor(left, right)))
    surface = [r.rule for r in admissible_redexes(net, StrategyTag.SURFACE)]
    assert set(surface) == {RuleTag.MERGE, RuleTag.LTENS}
    assert [r.rule for r in admissible_redexes(net, StrategyTag.MPOSTPONED)] == [RuleTag.LTENS]
    first, _ = step(net, StrategyTag.MPOSTPONED)
    assert first.rule is RuleTag.LTENS


def test_surface_never_fires_inside_boxes():
    b = Builder()
    net = b.conclude(b.boxed([], lambda: b.app(b.lam(lambda x: x), b.lam(lambda x: x))))
    for s in (StrategyTag.SURFACE, StrategyTag.MPOSTPONED, StrategyTag.NSI):
        assert admissible_redexes(net, s) == []
    assert [r.rule for r in admissible_redexes(net, StrategyTag.FULL)] == [RuleTag.LIMP]


def test_nsi_requires_closed_box_with_one_contraction():
    net, box = box_and_tree(Shape(D, (None,)), "open")
    assert not nsi_allows(net, box)
    assert admissible_redexes(net, StrategyTag.NSI) == []
    assert [r.rule for r in admissible_redexes(net, StrategyTag.SURFACE)] == [RuleTag.SUPERLAZY]

    b = Builder()
    succ_box = b.boxed([], lambda: b.lam(lambda v: b.app(*b.contract(v))))
    net = b.conclude(b.der(succ_box))
    box = next(iter(net.boxes))
    assert nsi_allows(net, box)
    assert [r.rule for r in admissible_redexes(net, StrategyTag.NSI)] == [RuleTag.NSI_SUPERLAZY]


def test_nsi_iterates_closed_successor():
    trace = normalize(iterated_successor(3, 2), StrategyTag.NSI)
    assert trace.normal
    assert decode_nat(trace.final) == 5
    assert trace.count(RuleTag.NSI_SUPERLAZY) >= 1


def test_normalize_fuel():
    net = encode_cbv(DELTA_DELTA)
    t = normalize(net, StrategyTag.SURFACE, fuel=1)
    assert len(t.steps) == 1 and not t.normal
    with pytest.raises(ValueError):
        normalize(net, fuel=0)


def test_normalize_reports_each_step():
    seen = []
    t = normalize(iterated_successor(2, 1), StrategyTag.SURFACE, on_step=lambda i, s: seen.append(i))
    assert seen == list(range(1, len(t.steps) + 1))
    assert all(s.redex.depth == 0 for s in t.steps)
