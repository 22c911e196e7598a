"""
Guessing trees: rooted ordered trees with labelled leaves.

A tree with n leaves and internal arities in [2, v] indexes an n-ary
entropy S_T and a nested evaluation of the deformed addition. The leaf
labelled k always carries x_k and p_k.
"""
import logging
import re
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .entropy import Measure, chain_values, check_simplex, direct_values
from .exceptions import SemiringValidationError, TreeArityError, TreeLabelError, TreeParseError
from .solvers import simplex_grid
from .tropical import tropical_value
from .witt import WittContext, gap, oplus, oplus_nary

logger = logging.getLogger(__name__)

ORACLE_STEPS = {2: 2000, 3: 400, 4: 100, 5: 60}
MAX_ORACLE_N = 5
MAX_ENUMERATED_N = 6
TOKEN = re.compile(r'\s*(?:(\()|(\))|(\d+)|(\S))')


@dataclass(frozen=True)
class Leaf:
    label: int

    def __str__(self):
        return str(self.label)


@dataclass(frozen=True)
class Node:
    children: Tuple['Tree', ...]

    def __str__(self):
        return '(' + ' '.join(str(child) for child in self.children) + ')'


Tree = Union[Leaf, Node]


def _leaves(node: Tree) -> Iterator[int]:
    if isinstance(node, Leaf):
        yield node.label
    else:
        for child in node.children:
            yield from _leaves(child)


def _arities(node: Tree) -> Iterator[int]:
    if isinstance(node, Node):
        yield len(node.children)
        for child in node.children:
            yield from _arities(child)


@dataclass(frozen=True)
class GuessingTree:
    """An (n, v)-tree. ``v`` defaults to the largest arity present (at least 2)."""
    root: Tree
    v: Optional[int] = None

    def __post_init__(self):
        arities = list(_arities(self.root))
        if any(arity < 2 for arity in arities):
            raise TreeArityError("Every internal node needs at least two children.")
        bound = self.v if self.v is not None else max(arities, default=2)
        if bound < 2:
            raise TreeArityError(f"The arity bound v must be at least 2, got {bound}.")
        if any(arity > bound for arity in arities):
            raise TreeArityError(f"A node has more than v={bound} children.")
        object.__setattr__(self, 'v', bound)
        labels = list(_leaves(self.root))
        if sorted(labels) != list(range(1, len(labels) + 1)):
            raise TreeLabelError(f"Leaf labels {labels} are not a permutation of 1..{len(labels)}.")

    @property
    def n(self) -> int:
        return sum(1 for _ in _leaves(self.root))

    @property
    def labels(self) -> List[int]:
        """Leaf labels in left-to-right order."""
        return list(_leaves(self.root))

    def __str__(self):
        return str(self.root)


def parse_tree(text: str, v: Optional[int] = None) -> GuessingTree:
    """
    Parse ``TREE := LABEL | '(' TREE (WS TREE)+ ')'`` with positive integer labels.

    Raises TreeParseError for malformed text, TreeArityError for unary or
    over-wide nodes and TreeLabelError when labels are not 1..n.
    """
    tokens = []
    position = 0
    text = str(text)
    while position < len(text):
        match = TOKEN.match(text, position)
        if match is None:
            break
        if match.group(4):
            raise TreeParseError(f"Unexpected character {match.group(4)!r} at offset {match.start(4)}.")
        tokens.append(match.group(1) or match.group(2) or int(match.group(3)))
        position = match.end()
    if not tokens:
        raise TreeParseError("Empty tree text.")

    def read(index: int) -> Tuple[Tree, int]:
        if index >= len(tokens):
            raise TreeParseError("Tree text ended early.")
        token = tokens[index]
        if isinstance(token, int):
            return Leaf(token), index + 1
        if token == ')':
            raise TreeParseError("Unexpected ')'.")
        children = []
        index += 1
        while index < len(tokens) and tokens[index] != ')':
            child, index = read(index)
            children.append(child)
        if index >= len(tokens):
            raise TreeParseError("Missing ')'.")
        if not children:
            raise TreeParseError("Empty parentheses.")
        return Node(tuple(children)), index + 1

    root, end = read(0)
    if end != len(tokens):
        raise TreeParseError("Trailing text after the tree.")
    return GuessingTree(root, v=v)


@dataclass(frozen=True)
class NaryFamily:
    """
    A family {S_j} of j-ary entropies built on a binary measure.

    ``mode='chain'`` extends the base measure by the chain rule,
    ``mode='direct'`` uses the symmetric closed forms. ``overrides`` maps an
    arity to a callable evaluating S_j along the last axis of its argument.
    """
    base: Measure
    mode: str = 'chain'
    overrides: Mapping[int, Callable] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ('chain', 'direct'):
            raise SemiringValidationError(f"Unknown family mode {self.mode!r}; expected 'chain' or 'direct'.")

    def values(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        arity = P.shape[-1]
        if arity in self.overrides:
            return np.asarray(self.overrides[arity](P), dtype=float)
        if self.mode == 'direct':
            return direct_values(self.base, P)
        return chain_values(self.base, P)

    def entropy(self, probs: Sequence[float]) -> float:
        return float(self.values(check_simplex(probs)))

    def pairs_use(self, measure: Measure) -> bool:
        """True when this family's S_2 is ``measure`` itself."""
        return 2 not in self.overrides and self.base == measure

    def coherence_defect(self, n: int, samples: int = 100, seed: int = 0) -> float:
        """max |S_n(p with a zero inserted) - S_{n-1}(p)| over seeded p and every insertion slot."""
        if n < 2:
            raise SemiringValidationError("Coherence compares S_n with S_{n-1} for n >= 2.")
        rng = np.random.default_rng(seed)
        P = rng.dirichlet(np.ones(n - 1), size=samples)
        shorter = self.values(P)
        worst = 0.0
        for slot in range(n):
            longer = self.values(np.insert(P, slot, 0.0, axis=1))
            worst = max(worst, float(np.max(np.abs(longer - shorter))))
        return worst


def _weighted_entropy(node: Tree, family: NaryFamily, P: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(mass-weighted S of the subtree, subtree mass) for each row of P."""
    if isinstance(node, Leaf):
        return np.zeros(P.shape[0]), P[:, node.label - 1]
    parts = [_weighted_entropy(child, family, P) for child in node.children]
    masses = np.stack([mass for _, mass in parts], axis=-1)
    total = masses.sum(axis=-1)
    positive = total > 0
    conditional = np.where(positive[:, None], masses / np.where(positive, total, 1.0)[:, None], 1.0 / masses.shape[-1])
    own = np.where(positive, total * family.values(conditional), 0.0)
    return own + sum(weighted for weighted, _ in parts), total


def tree_entropy_values(tree: GuessingTree, family: NaryFamily, P) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.shape[-1] != tree.n:
        raise SemiringValidationError(f"Tree has {tree.n} leaves but got {P.shape[-1]} probabilities.")
    return _weighted_entropy(tree.root, family, P)[0]


def tree_entropy(tree: GuessingTree, family: NaryFamily, probs: Sequence[float]) -> float:
    """
    S_T(p): at every node, the family entropy of the children's group
    masses (normalised) times the node mass, summed over nodes.
    """
    probs = check_simplex(probs)
    return float(tree_entropy_values(tree, family, probs[None, :])[0])


def _carrier(xs: Sequence, n: int) -> List[float]:
    values = [tropical_value(x) for x in xs]
    if len(values) != n:
        raise SemiringValidationError(f"Tree has {n} leaves but got {len(values)} values.")
    return values


def _combine(ctx: WittContext, family: NaryFamily, inner: List[float]) -> float:
    # the golden-section oplus only knows ctx.measure
    if len(inner) == 2 and family.pairs_use(ctx.measure):
        return oplus(ctx, inner[0], inner[1]).value
    return oplus_nary(ctx, inner, family)


def tree_eval(tree: GuessingTree, ctx: WittContext, xs: Sequence,
              family: Optional[NaryFamily] = None) -> float:
    """
    Nested evaluation with S_m from the family at every node. Binary nodes
    use oplus when the family's S_2 is ctx.measure, oplus_nary otherwise.
    """
    values = _carrier(xs, tree.n)
    family = family or NaryFamily(ctx.measure)

    def evaluate(node: Tree) -> float:
        if isinstance(node, Leaf):
            return values[node.label - 1]
        return _combine(ctx, family, [evaluate(child) for child in node.children])

    return evaluate(tree.root)


def tree_eval_oracle(tree: GuessingTree, ctx: WittContext, xs: Sequence,
                     family: Optional[NaryFamily] = None) -> float:
    """Brute-force min over a simplex grid of sum p_i x_i - T S_T(p), for n <= 5."""
    n = tree.n
    if n > MAX_ORACLE_N:
        raise SemiringValidationError(f"The simplex oracle supports at most {MAX_ORACLE_N} leaves, got {n}.")
    values = np.array(_carrier(xs, n))
    if ctx.T == 0 or n == 1:
        return float(np.min(values))
    family = family or NaryFamily(ctx.measure)
    P = simplex_grid(n, ORACLE_STEPS[n])
    infinite = np.isinf(values)
    energy = P @ np.where(infinite, 0.0, values)
    energy = np.where(np.any(P[:, infinite] > 0, axis=1), np.inf, energy)
    return float(np.min(energy - ctx.T * tree_entropy_values(tree, family, P)))


def _offset(node: Tree, shift: int) -> Tree:
    if isinstance(node, Leaf):
        return Leaf(node.label + shift)
    return Node(tuple(_offset(child, shift) for child in node.children))


def graft(outer: GuessingTree, inners: Sequence[GuessingTree], v: Optional[int] = None) -> GuessingTree:
    """
    Replace the leaf labelled i of ``outer`` by ``inners[i-1]``; the labels
    of inner tree i are shifted by the sizes of inners 1..i-1.
    """
    if len(inners) != outer.n:
        raise SemiringValidationError(f"Outer tree has {outer.n} leaves but {len(inners)} trees were given.")
    offsets = np.concatenate([[0], np.cumsum([inner.n for inner in inners])]).astype(int)

    def substitute(node: Tree) -> Tree:
        if isinstance(node, Leaf):
            return _offset(inners[node.label - 1].root, int(offsets[node.label - 1]))
        return Node(tuple(substitute(child) for child in node.children))

    bound = v if v is not None else max([outer.v] + [inner.v for inner in inners])
    return GuessingTree(substitute(outer.root), v=bound)


def prob_compose(p: Sequence[float], qs: Sequence[Sequence[float]]) -> List[float]:
    """The point (p_i q_il) of the composed simplex, blocks in the order of p."""
    p = check_simplex(p)
    if len(qs) != p.size:
        raise SemiringValidationError(f"Need {p.size} inner distributions, got {len(qs)}.")
    return [float(pi * qil) for pi, q in zip(p, qs) for qil in check_simplex(q)]


def internal_alpha(tree: GuessingTree, h: Mapping[int, float], ctx: WittContext,
                   family: Optional[NaryFamily] = None) -> float:
    """
    alpha(leaf) = 0 and alpha(node) = h_m + (+) of alpha over the node's
    non-leaf children; leaves are units and drop out of the sum.
    """
    weights: Dict[int, float] = {int(arity): float(value) for arity, value in h.items()}
    family = family or NaryFamily(ctx.measure)

    def evaluate(node: Tree) -> float:
        if isinstance(node, Leaf):
            return 0.0
        arity = len(node.children)
        if arity not in weights:
            raise SemiringValidationError(f"No h value for arity {arity}.")
        inner = [evaluate(child) for child in node.children if isinstance(child, Node)]
        if not inner:
            return weights[arity]
        combined = inner[0] if len(inner) == 1 else _combine(ctx, family, inner)
        return weights[arity] + combined

    return evaluate(tree.root)


def relation_defect(t1: GuessingTree, t2: GuessingTree, ctx: WittContext, trials: int, seed: int,
                    low: float = -3.0, high: float = 3.0, family: Optional[NaryFamily] = None) -> float:
    """max over seeded random xs of |tree_eval(t1, xs) - tree_eval(t2, xs)|."""
    if t1.n != t2.n:
        raise SemiringValidationError(f"Trees have different leaf counts ({t1.n} and {t2.n}).")
    worst = 0.0
    for child in np.random.SeedSequence(seed).spawn(trials):
        xs = np.random.default_rng(child).uniform(low, high, size=t1.n)
        difference = gap(tree_eval(t1, ctx, xs, family), tree_eval(t2, ctx, xs, family))
        worst = max(worst, float(difference))
    return worst


def mirror(tree: GuessingTree) -> GuessingTree:
    """Reverse the children of every node; leaves keep their labels."""
    def flip(node: Tree) -> Tree:
        if isinstance(node, Leaf):
            return node
        return Node(tuple(flip(child) for child in reversed(node.children)))

    return GuessingTree(flip(tree.root), v=tree.v)


def prune(tree: GuessingTree, label: int) -> GuessingTree:
    """Drop leaf ``label``, splice nodes left with one child and close the gap in the labels."""
    if tree.n == 1:
        raise SemiringValidationError("Cannot prune the only leaf of a tree.")
    if not 1 <= label <= tree.n:
        raise SemiringValidationError(f"No leaf labelled {label}.")

    def cut(node: Tree) -> Optional[Tree]:
        if isinstance(node, Leaf):
            if node.label == label:
                return None
            return Leaf(node.label - 1) if node.label > label else node
        kept = [child for child in (cut(child) for child in node.children) if child is not None]
        return kept[0] if len(kept) == 1 else Node(tuple(kept))

    return GuessingTree(cut(tree.root), v=tree.v)


def _shapes(n: int) -> List[Tree]:
    """Unlabelled full binary shapes with n leaves; leaves carry placeholder label 0."""
    if n == 1:
        return [Leaf(0)]
    shapes = []
    for left in range(1, n):
        for a in _shapes(left):
            for b in _shapes(n - left):
                shapes.append(Node((a, b)))
    return shapes


def _label(node: Tree, labels: Iterator[int]) -> Tree:
    if isinstance(node, Leaf):
        return Leaf(next(labels))
    return Node(tuple(_label(child, labels) for child in node.children))


def binary_trees(n: int) -> List[GuessingTree]:
    """Every labelled (n, 2)-tree: shapes times label permutations."""
    if not 1 <= n <= MAX_ENUMERATED_N:
        raise SemiringValidationError(f"binary_trees enumerates 1 <= n <= {MAX_ENUMERATED_N}, got {n}.")
    return [GuessingTree(_label(shape, iter(order)), v=2)
            for shape in _shapes(n)
            for order in permutations(range(1, n + 1))]


def random_tree(n: int, v: int, rng: np.random.Generator) -> GuessingTree:
    """A random (n, v)-tree: random labels, recursive random splits of random arity."""
    if n < 1 or v < 2:
        raise SemiringValidationError("random_tree needs n >= 1 and v >= 2.")
    labels = [int(label) for label in rng.permutation(n) + 1]

    def build(block: List[int]) -> Tree:
        if len(block) == 1:
            return Leaf(block[0])
        arity = int(rng.integers(2, min(v, len(block)) + 1))
        cuts = sorted(int(c) + 1 for c in rng.choice(len(block) - 1, size=arity - 1, replace=False))
        bounds = [0] + cuts + [len(block)]
        return Node(tuple(build(block[a:b]) for a, b in zip(bounds, bounds[1:])))

    return GuessingTree(build(labels), v=v)


def comb(n: int) -> GuessingTree:
    """The left comb ((..((1 2) 3)..) n)."""
    node: Tree = Leaf(1)
    for label in range(2, n + 1):
        node = Node((node, Leaf(label)))
    return GuessingTree(node, v=2)
