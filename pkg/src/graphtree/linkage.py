"""Single linkage on similarity matrices: merge matrices, dendrograms, level cuts.

The merge matrix entry (i, j) is the best bottleneck over simple paths, i.e.
the level at which i and j fall into a common cluster when edges below the
level are discarded. It is computed from a maximum spanning tree: the unique
tree path between two nodes realizes the max-min value. Diagonal fixed at 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "Leaf",
    "Merge",
    "Dendrogram",
    "merge_estimate",
    "build_dendrogram",
    "clusters_at_level",
    "dendrogram_merge_matrix",
]


def merge_estimate(sim: np.ndarray) -> np.ndarray:
    """Max-min path similarity for every pair, via a maximum spanning tree.

    Prim in O(n^2) builds the tree; a traversal from every node reads off the
    bottleneck of each unique tree path. Equals brute-force enumeration over
    all simple paths; ties in tree construction cannot change the values.
    """
    sim = np.asarray(sim, dtype=float)
    if sim.ndim != 2 or sim.shape[0] != sim.shape[1]:
        raise ValueError("similarity matrix must be square")
    n = sim.shape[0]
    if n < 2:
        raise ValueError("need at least two nodes")
    if not np.array_equal(sim, sim.T):
        raise ValueError("similarity matrix must be symmetric")

    # dense Prim, maximizing; ties go to the lowest index via argmax
    in_tree = np.zeros(n, dtype=bool)
    best = sim[0].copy()
    parent = np.zeros(n, dtype=int)
    in_tree[0] = True
    adj = [[] for _ in range(n)]
    for _ in range(n - 1):
        cand = np.where(in_tree, -np.inf, best)
        v = int(np.argmax(cand))
        in_tree[v] = True
        w = float(best[v])
        adj[parent[v]].append((v, w))
        adj[v].append((parent[v], w))
        improved = ~in_tree & (sim[v] > best)
        best[improved] = sim[v][improved]
        parent[improved] = v

    out = np.ones((n, n))
    for s in range(n):
        stack = [(s, np.inf)]
        seen = np.zeros(n, dtype=bool)
        seen[s] = True
        while stack:
            u, bottleneck = stack.pop()
            out[s, u] = bottleneck if u != s else 1.0
            for v, w in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, min(bottleneck, w)))
    return out


@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Merge:
    left: object
    right: object
    level: float


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree; levels never increase from leaves toward the root."""

    root: object
    n: int

    @property
    def leaf_order(self):
        """Leaves in display order (left subtree first)."""
        order = []

        def walk(node):
            if isinstance(node, Leaf):
                order.append(node.index)
            else:
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return order

    def cut(self, lam: float):
        """Clusters after removing merges below lam; equals clusters_at_level."""
        parts = []

        def leaves(node):
            if isinstance(node, Leaf):
                return [node.index]
            return leaves(node.left) + leaves(node.right)

        def walk(node):
            if isinstance(node, Leaf):
                parts.append([node.index])
            elif node.level >= lam:
                parts.append(sorted(leaves(node)))
            else:
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return sorted(parts)

    def to_json_dict(self):
        def enc(node):
            if isinstance(node, Leaf):
                return node.index
            return {"left": enc(node.left), "right": enc(node.right), "level": node.level}

        return enc(self.root)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc) -> "Dendrogram":
        def dec(node):
            if isinstance(node, int):
                return Leaf(node), 1
            if not isinstance(node, dict) or set(node) != {"left", "right", "level"}:
                raise ValidationError(f"bad dendrogram node: {node!r}")
            left, nl = dec(node["left"])
            right, nr = dec(node["right"])
            return Merge(left, right, float(node["level"])), nl + nr

        root, n = dec(doc)
        return cls(root=root, n=n)

    @classmethod
    def from_json(cls, text: str) -> "Dendrogram":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"invalid dendrogram JSON: {e}") from e
        return cls.from_json_dict(doc)

    def to_newick(self, labels=None, fmt: str = "%.12g") -> str:
        """Newick text; every child edge is annotated with its parent's merge level."""

        def name(i):
            if labels is None:
                return str(i)
            return _newick_safe(labels[i])

        def enc(node, parent_level):
            if isinstance(node, Leaf):
                s = name(node.index)
            else:
                s = "(" + enc(node.left, node.level) + "," + enc(node.right, node.level) + ")"
            if parent_level is None:
                return s
            return s + ":" + (fmt % parent_level)

        return enc(self.root, None) + ";"


def _newick_safe(label: str) -> str:
    out = str(label)
    for ch in " ,():;'\"[]":
        out = out.replace(ch, "_")
    return out


def build_dendrogram(m: np.ndarray) -> Dendrogram:
    """Agglomerate a merge matrix in descending level order.

    Tie rule: among pairs at the maximal level, the pair whose cluster
    leaders (smallest member indices) are lexicographically first merges
    first, and the lower leader becomes the left child. Cutting the result
    at any level reproduces clusters_at_level.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("merge matrix must be square")
    n = m.shape[0]
    if not np.array_equal(m, m.T):
        raise ValueError("merge matrix must be symmetric")
    if n == 1:
        return Dendrogram(root=Leaf(0), n=1)

    lvl = m.copy()
    np.fill_diagonal(lvl, -np.inf)
    nodes: dict = {i: Leaf(i) for i in range(n)}
    for _ in range(n - 1):
        flat = int(np.argmax(lvl))
        a, b = divmod(flat, n)
        if a > b:
            a, b = b, a
        level = float(lvl[a, b])
        nodes[a] = Merge(left=nodes[a], right=nodes[b], level=level)
        del nodes[b]
        row = np.maximum(lvl[a], lvl[b])
        row[a] = -np.inf
        row[b] = -np.inf
        lvl[a, :] = row
        lvl[:, a] = row
        lvl[b, :] = -np.inf
        lvl[:, b] = -np.inf
    (root,) = nodes.values()
    return Dendrogram(root=root, n=n)


def clusters_at_level(m: np.ndarray, lam: float):
    """Partition into connected components of the graph with edges m >= lam.

    Every node appears exactly once; clusters and the partition itself are
    sorted by smallest member.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    seen = np.zeros(n, dtype=bool)
    parts = []
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            nxt = np.flatnonzero(~seen & (m[u] >= lam))
            for v in nxt:
                if v != u:
                    seen[v] = True
                    comp.append(int(v))
                    stack.append(int(v))
        parts.append(sorted(comp))
    return sorted(parts)


def dendrogram_merge_matrix(d: Dendrogram) -> np.ndarray:
    """Pairwise merge levels encoded by a dendrogram (lowest common merge)."""
    out = np.ones((d.n, d.n))

    def walk(node):
        if isinstance(node, Leaf):
            return [node.index]
        left = walk(node.left)
        right = walk(node.right)
        for u in left:
            for v in right:
                out[u, v] = out[v, u] = node.level
        return left + right

    walk(d.root)
    return out
