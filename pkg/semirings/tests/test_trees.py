import math

import numpy as np
from django.test import SimpleTestCase

from semirings.entropy import Measure, chain_values, entropy2, parse_measure
from semirings.exceptions import SemiringValidationError, TreeArityError, TreeLabelError, TreeParseError
from semirings.trees import (
    GuessingTree, Leaf, NaryFamily, Node, binary_trees, comb, graft, internal_alpha, mirror, parse_tree,
    prob_compose, prune, random_tree, relation_defect, tree_entropy, tree_eval, tree_eval_oracle,
)
from semirings.witt import WittContext, oplus, oplus_nary

SHANNON = Measure('shannon')
TREE_MEASURES = ('shannon', 'renyi:0.5', 'tsallis:2')


def relabel(node, sigma):
    if isinstance(node, Leaf):
        return Leaf(int(sigma[node.label - 1]))
    return Node(tuple(relabel(child, sigma) for child in node.children))


class ParseTreeTest(SimpleTestCase):
    def test_round_trip(self):
        for text in ('1', '(1 2)', '((1 2) 3)', '(3 (1 2) 4)', '((2 1) (4 3))'):
            self.assertEqual(str(parse_tree(text)), text)

    def test_whitespace_is_flexible(self):
        tree = parse_tree('  ( (1   2)\n3 ) ')
        self.assertEqual(str(tree), '((1 2) 3)')
        self.assertEqual(tree.n, 3)
        self.assertEqual(tree.v, 2)
        self.assertEqual(tree.labels, [1, 2, 3])

    def test_parse_errors(self):
        for text in ('', '(1 2', '(1 2))', '()', '(1 a)', '1 2', ')'):
            with self.assertRaises(TreeParseError, msg=repr(text)):
                parse_tree(text)

    def test_arity_errors(self):
        with self.assertRaises(TreeArityError):
            parse_tree('((1) 2)')
        with self.assertRaises(TreeArityError):
            parse_tree('(1 2 3)', v=2)

    def test_label_errors(self):
        for text in ('(1 1)', '(1 3)', '0', '(2 3)'):
            with self.assertRaises(TreeLabelError, msg=text):
                parse_tree(text)

    def test_errors_are_validation_errors(self):
        with self.assertRaises(SemiringValidationError):
            parse_tree('(1')


class TreeConstructionTest(SimpleTestCase):
    def test_binary_tree_counts(self):
        self.assertEqual(len(binary_trees(3)), 12)
        self.assertEqual(len({str(t) for t in binary_trees(3)}), 12)
        self.assertEqual(len(binary_trees(4)), 120)
        with self.assertRaises(SemiringValidationError):
            binary_trees(7)

    def test_comb(self):
        self.assertEqual(str(comb(4)), '(((1 2) 3) 4)')

    def test_random_trees_respect_arity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            tree = random_tree(5, 3, rng)
            self.assertEqual(tree.n, 5)
            self.assertEqual(tree.v, 3)
            self.assertEqual(sorted(tree.labels), [1, 2, 3, 4, 5])

    def test_mirror_keeps_labels(self):
        self.assertEqual(str(mirror(parse_tree('((1 2) 3)'))), '(3 (2 1))')

    def test_prune(self):
        self.assertEqual(str(prune(parse_tree('((1 2) 3)'), 2)), '(1 2)')
        self.assertEqual(str(prune(parse_tree('(1 (3 2 4))'), 1)), '(2 1 3)')
        with self.assertRaises(SemiringValidationError):
            prune(parse_tree('(1 2)'), 3)

    def test_graft_shifts_inner_labels(self):
        outer = parse_tree('(2 1)')
        grafted = graft(outer, [parse_tree('(1 2)'), parse_tree('(2 1)')])
        self.assertEqual(str(grafted), '((4 3) (1 2))')
        self.assertEqual(grafted.n, 4)

    def test_graft_needs_one_tree_per_leaf(self):
        with self.assertRaises(SemiringValidationError):
            graft(parse_tree('(1 2)'), [parse_tree('1')])

    def test_graft_unit_laws(self):
        unit = GuessingTree(Leaf(1))
        rng = np.random.default_rng(16)
        for _ in range(10):
            tree = random_tree(5, 3, rng)
            self.assertEqual(str(graft(tree, [unit] * tree.n)), str(tree))
            self.assertEqual(str(graft(unit, [tree])), str(tree))

    def test_graft_is_associative(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            outer = random_tree(3, 3, rng)
            inners = [random_tree(int(rng.integers(1, 4)), 2, rng) for _ in range(outer.n)]
            middle = graft(outer, inners)
            leaves = [random_tree(int(rng.integers(1, 3)), 2, rng) for _ in range(middle.n)]
            offsets = np.cumsum([0] + [inner.n for inner in inners])
            regrouped = [graft(inner, leaves[a:b]) for inner, a, b in zip(inners, offsets, offsets[1:])]
            self.assertEqual(str(graft(middle, leaves)), str(graft(outer, regrouped)))

    def test_prob_compose(self):
        self.assertEqual(prob_compose([0.5, 0.5], [[0.5, 0.5], [1.0]]), [0.25, 0.25, 0.5])
        p = [0.2, 0.3, 0.5]
        self.assertEqual(prob_compose(p, [[1.0]] * 3), p)


class TreeEntropyTest(SimpleTestCase):
    def test_flat_node_is_the_family_entropy(self):
        family = NaryFamily(Measure('renyi', alpha=0.5))
        p = [0.2, 0.5, 0.3]
        self.assertAlmostEqual(tree_entropy(parse_tree('(1 2 3)'), family, p), family.entropy(p), places=14)

    def test_shannon_tree_entropy_is_shape_free(self):
        family = NaryFamily(SHANNON)
        p = [0.1, 0.2, 0.3, 0.4]
        expected = -sum(x * math.log(x) for x in p)
        for tree in binary_trees(4):
            self.assertAlmostEqual(tree_entropy(tree, family, p), expected, places=12)

    def test_grafting_composes_entropies(self):
        rng = np.random.default_rng(4)
        outer = parse_tree('((1 2) 3)')
        inners = [parse_tree('(2 1)'), GuessingTree(Leaf(1)), parse_tree('(1 (3 2))')]
        grafted = graft(outer, inners)
        for spec in TREE_MEASURES:
            family = NaryFamily(parse_measure(spec))
            p = rng.dirichlet(np.ones(3))
            qs = [rng.dirichlet(np.ones(inner.n)) for inner in inners]
            composed = tree_entropy(grafted, family, prob_compose(p, qs))
            expected = tree_entropy(outer, family, p) + sum(
                pi * tree_entropy(inner, family, q) for pi, inner, q in zip(p, inners, qs))
            self.assertAlmostEqual(composed, expected, places=12, msg=spec)

    def test_pruning_matches_a_zero_probability(self):
        rng = np.random.default_rng(6)
        tree = parse_tree('((1 3) (2 4 5))')
        for spec in TREE_MEASURES:
            family = NaryFamily(parse_measure(spec))
            for label in range(1, 6):
                p = rng.dirichlet(np.ones(4))
                padded = np.insert(p, label - 1, 0.0)
                self.assertAlmostEqual(tree_entropy(tree, family, padded),
                                       tree_entropy(prune(tree, label), family, p), places=12)

    def test_nested_tree_matches_its_expansion(self):
        tree = parse_tree('(2 ((1 (4 3)) (5 6)))')
        rng = np.random.default_rng(15)
        for spec in ('renyi:0.5', 'tsallis:2', 'kl:0.3'):
            m = parse_measure(spec)
            family = NaryFamily(m)
            for p in rng.dirichlet(np.ones(6), size=5):
                p1, p2, p3, p4, p5, p6 = p
                block = p1 + p4 + p3
                expected = (entropy2(m, p2) + (1 - p2) * entropy2(m, block / (1 - p2))
                            + block * entropy2(m, p1 / block) + (p4 + p3) * entropy2(m, p4 / (p4 + p3))
                            + (p5 + p6) * entropy2(m, p5 / (p5 + p6)))
                self.assertAlmostEqual(tree_entropy(tree, family, p), float(expected), places=12, msg=spec)

    def test_relabelling_permutes_probabilities(self):
        rng = np.random.default_rng(21)
        tree = parse_tree('((1 3) (2 (4 5)))')
        for spec in TREE_MEASURES:
            family = NaryFamily(parse_measure(spec))
            for _ in range(5):
                sigma = rng.permutation(5) + 1
                p = rng.dirichlet(np.ones(5))
                relabelled = GuessingTree(relabel(tree.root, sigma))
                self.assertAlmostEqual(tree_entropy(relabelled, family, p),
                                       tree_entropy(tree, family, p[sigma - 1]), places=12, msg=spec)

    def test_coherence(self):
        for spec in TREE_MEASURES:
            for mode in ('chain', 'direct'):
                family = NaryFamily(parse_measure(spec), mode=mode)
                self.assertLessEqual(family.coherence_defect(4), 1e-12, (spec, mode))
        self.assertGreater(NaryFamily(Measure('kl', q=0.3)).coherence_defect(3), 1e-3)

    def test_overrides(self):
        family = NaryFamily(SHANNON, overrides={3: lambda P: np.zeros(P.shape[:-1])})
        self.assertEqual(family.entropy([0.2, 0.3, 0.5]), 0.0)
        self.assertAlmostEqual(family.entropy([0.5, 0.5]), math.log(2), places=14)
        with self.assertRaises(SemiringValidationError):
            NaryFamily(SHANNON, mode='symmetric')


class TreeEvalTest(SimpleTestCase):
    def test_three_equal_leaves(self):
        ctx = WittContext(SHANNON, 1.0)
        self.assertAlmostEqual(tree_eval(parse_tree('((1 2) 3)'), ctx, [0, 0, 0]), -math.log(3), places=8)
        self.assertAlmostEqual(tree_eval(parse_tree('(1 2 3)'), ctx, [0, 0, 0]), -math.log(3), places=6)

    def test_infinite_leaf_drops_out(self):
        ctx = WittContext(SHANNON, 1.0)
        tree = parse_tree('((1 2) 3)')
        self.assertAlmostEqual(tree_eval(tree, ctx, [0, 'inf', 0]), -math.log(2), places=8)
        self.assertAlmostEqual(tree_eval_oracle(tree, ctx, [0, 'inf', 0]), -math.log(2), delta=2e-3)

    def test_infinite_leaf_matches_pruning_at_every_position(self):
        rng = np.random.default_rng(19)
        tree = parse_tree('((1 3) (2 4 5))')
        for spec in TREE_MEASURES:
            ctx = WittContext(parse_measure(spec), 1.0)
            for label in range(1, 6):
                xs = rng.uniform(-2, 2, size=4)
                padded = list(np.insert(xs, label - 1, np.inf))
                self.assertAlmostEqual(tree_eval(tree, ctx, padded), tree_eval(prune(tree, label), ctx, xs),
                                       delta=1e-6, msg=f"{spec} label={label}")

    def test_grafted_trees_evaluate_blockwise(self):
        rng = np.random.default_rng(18)
        outer = parse_tree('((1 2) 3)')
        inners = [parse_tree('(2 1)'), GuessingTree(Leaf(1)), parse_tree('(1 (3 2 4))')]
        grafted = graft(outer, inners)
        offsets = np.cumsum([0] + [inner.n for inner in inners])
        for spec in TREE_MEASURES + ('kl:0.3',):
            ctx = WittContext(parse_measure(spec), 1.0)
            xs = rng.uniform(-2, 2, size=grafted.n)
            blocks = [tree_eval(inner, ctx, xs[a:b]) for inner, a, b in zip(inners, offsets, offsets[1:])]
            self.assertAlmostEqual(tree_eval(grafted, ctx, xs), tree_eval(outer, ctx, blocks), places=8, msg=spec)

    def test_binary_nodes_use_the_family_pair_entropy(self):
        ctx = WittContext(SHANNON, 1.0)
        halved = NaryFamily(SHANNON, overrides={2: lambda P: 0.5 * chain_values(SHANNON, P)})
        tree = parse_tree('((1 2) 3)')
        value = tree_eval(tree, ctx, [0, 0, 0], family=halved)
        self.assertAlmostEqual(value, -0.5 * math.log(3), places=6)
        self.assertAlmostEqual(value, tree_eval_oracle(tree, ctx, [0, 0, 0], family=halved), delta=2e-3)

    def test_family_base_overrides_the_context_measure(self):
        tsallis = Measure('tsallis', alpha=2.0)
        rng = np.random.default_rng(22)
        for tree in binary_trees(3)[::3]:
            xs = rng.uniform(-2, 2, size=3)
            borrowed = tree_eval(tree, WittContext(SHANNON, 1.0), xs, family=NaryFamily(tsallis))
            self.assertAlmostEqual(borrowed, tree_eval(tree, WittContext(tsallis, 1.0), xs), places=6, msg=str(tree))

    def test_value_count_must_match(self):
        with self.assertRaises(SemiringValidationError):
            tree_eval(parse_tree('(1 2)'), WittContext(SHANNON, 1.0), [0.0])

    def test_all_binary_three_leaf_trees_match_oracle(self):
        rng = np.random.default_rng(0)
        samples = rng.uniform(-2, 2, size=(10, 3))
        for spec in TREE_MEASURES:
            ctx = WittContext(parse_measure(spec), 1.0)
            for tree in binary_trees(3):
                for xs in samples:
                    value = tree_eval(tree, ctx, xs)
                    self.assertAlmostEqual(value, tree_eval_oracle(tree, ctx, xs), delta=2e-3,
                                           msg=f"{spec} {tree} {xs}")

    def test_random_trees_match_oracle(self):
        rng = np.random.default_rng(1)
        for n, v in ((4, 2), (5, 2), (4, 3)):
            for index in range(20):
                tree = random_tree(n, v, rng)
                ctx = WittContext(parse_measure(TREE_MEASURES[index % 3]), 1.0)
                xs = rng.uniform(-1, 1, size=n)
                self.assertAlmostEqual(tree_eval(tree, ctx, xs), tree_eval_oracle(tree, ctx, xs), delta=5e-3,
                                       msg=f"{ctx.measure.spec} {tree} {xs}")

    def test_oracle_size_limit(self):
        with self.assertRaises(SemiringValidationError):
            tree_eval_oracle(comb(6), WittContext(SHANNON, 1.0), [0.0] * 6)


class TreeRelationTest(SimpleTestCase):
    def test_shannon_trees_all_agree(self):
        ctx = WittContext(SHANNON, 1.0)
        base = comb(4)
        for tree in binary_trees(4)[::7]:
            self.assertLessEqual(relation_defect(base, tree, ctx, trials=5, seed=0), 1e-8, str(tree))

    def test_renyi_breaks_associativity(self):
        ctx = WittContext(Measure('renyi', alpha=0.5), 1.0)
        left, right = parse_tree('((1 2) 3)'), parse_tree('(1 (2 3))')
        self.assertGreater(relation_defect(left, right, ctx, trials=200, seed=0), 1e-3)

    def test_mirror_flips_kl_reference(self):
        ctx = WittContext(Measure('kl', q=0.3), 1.0)
        flipped = ctx.with_measure(ctx.measure.flipped())
        rng = np.random.default_rng(8)
        for tree in binary_trees(3):
            xs = rng.uniform(-2, 2, size=3)
            self.assertAlmostEqual(tree_eval(tree, ctx, xs), tree_eval(mirror(tree), flipped, xs), places=7)

    def test_mirror_invariance_for_commutative_measures(self):
        rng = np.random.default_rng(3)
        for spec in TREE_MEASURES:
            ctx = WittContext(parse_measure(spec), 1.0)
            tree = random_tree(5, 2, rng)
            self.assertLessEqual(relation_defect(tree, mirror(tree), ctx, trials=5, seed=1), 1e-7, spec)

    def test_relation_defect_needs_equal_sizes(self):
        with self.assertRaises(SemiringValidationError):
            relation_defect(comb(3), comb(4), WittContext(SHANNON, 1.0), trials=1, seed=0)


class InternalAlphaTest(SimpleTestCase):
    def test_nested_nodes(self):
        ctx = WittContext(SHANNON, 1.0)
        self.assertEqual(internal_alpha(parse_tree('(1 2)'), {2: 0.5}, ctx), 0.5)
        self.assertEqual(internal_alpha(parse_tree('((1 2) 3)'), {2: 1.0}, ctx), 2.0)
        self.assertAlmostEqual(internal_alpha(parse_tree('((1 2) (3 4))'), {2: 1.0}, ctx),
                               2.0 - math.log(2), places=8)

    def test_two_level_tree_expands_into_nested_sums(self):
        tree = parse_tree('((1 2 3 4 5) ((6 7 8) (9 10) (11 12)))')
        self.assertEqual(tree.v, 5)
        rng = np.random.default_rng(20)
        for spec in ('shannon', 'renyi:0.5'):
            ctx = WittContext(parse_measure(spec), 1.0)
            for h2, h3, h5 in rng.uniform(0.5, 3.0, size=(3, 3)):
                inner = oplus_nary(ctx, [h3, h2, h2])
                self.assertLessEqual(inner, min(h3, h2) + 1e-12)
                expected = h2 + oplus(ctx, h5, h3 + inner).value
                self.assertAlmostEqual(internal_alpha(tree, {2: h2, 3: h3, 5: h5}, ctx), expected,
                                       places=12, msg=spec)

    def test_missing_arity(self):
        with self.assertRaises(SemiringValidationError):
            internal_alpha(parse_tree('(1 (2 3 4))'), {2: 1.0}, WittContext(SHANNON, 1.0))

    def test_zero_temperature_sums_along_the_cheapest_branch(self):
        ctx = WittContext(SHANNON, 0.0)
        tree = parse_tree('((1 (2 3)) (4 5 6))')
        self.assertEqual(internal_alpha(tree, {2: 1.0, 3: 5.0}, ctx), 3.0)
