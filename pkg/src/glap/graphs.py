"""Undirected graphs, grounded systems, and exact combinatorial quantities.

Everything in this module is integer/rational arithmetic: Laplacian-type
matrices are assembled with exact integer entries so identities such as
``grounded_laplacian(sys) == lbar + delta`` hold entrywise, and the
isoperimetric constant is returned as a :class:`fractions.Fraction`.
Floating point only appears once matrices reach the eigensolvers in
:mod:`glap.spectra`.

Vertices are integers ``0 .. n-1``.  Vertex sets are kept canonical (sorted,
deduplicated tuples) so that everything downstream is reproducible
byte-for-byte.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapExceededError, GraphInputError

# Exhaustive subset enumeration is O(2^n); 20 vertices ~ 10^6 subsets.
ISO_ENUM_CAP = 20


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertex count, canonical edge set, and derived
    per-vertex sorted neighbor lists.  Construct via :func:`build_graph`."""

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(nbrs) for nbrs in self.adjacency)

    @property
    def d_min(self) -> int:
        return min(self.degrees) if self.n else 0

    @property
    def d_max(self) -> int:
        return max(self.degrees) if self.n else 0

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]


@dataclass(frozen=True)
class SymMatrix:
    """Sparse symmetric matrix with exact integer entries.

    Entries are stored as sorted ``(row, col, value)`` triples with
    ``row <= col`` and no explicit zeros; the full matrix is implied by
    symmetry.  Conversion to floating point (`to_dense`, `to_csr`) is the
    only lossy step and is deferred to the solvers.
    """

    dim: int
    entries: tuple[tuple[int, int, int], ...]

    @staticmethod
    def from_dict(dim: int, data: dict[tuple[int, int], int]) -> "SymMatrix":
        triples = []
        for (i, j), v in data.items():
            if v == 0:
                continue
            if i > j:
                i, j = j, i
            triples.append((i, j, int(v)))
        return SymMatrix(dim, tuple(sorted(triples)))

    def entry_dict(self) -> dict[tuple[int, int], int]:
        return {(i, j): v for i, j, v in self.entries}

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        acc = self.entry_dict()
        for (i, j), v in other.entry_dict().items():
            acc[(i, j)] = acc.get((i, j), 0) + v
        return SymMatrix.from_dict(self.dim, acc)

    def diagonal(self) -> tuple[int, ...]:
        d = [0] * self.dim
        for i, j, v in self.entries:
            if i == j:
                d[i] = v
        return tuple(d)

    def row_sums(self) -> tuple[int, ...]:
        s = [0] * self.dim
        for i, j, v in self.entries:
            s[i] += v
            if i != j:
                s[j] += v
        return tuple(s)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim))
        for i, j, v in self.entries:
            a[i, j] = v
            a[j, i] = v
        return a

    def to_csr(self) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for i, j, v in self.entries:
            rows.append(i)
            cols.append(j)
            vals.append(float(v))
            if i != j:
                rows.append(j)
                cols.append(i)
                vals.append(float(v))
        return sp.csr_matrix(
            (vals, (rows, cols)), shape=(self.dim, self.dim), dtype=float
        )


@dataclass(frozen=True)
class GroundedSystem:
    """A graph with a nonempty proper grounded vertex set.

    ``floating_order`` fixes the row/column indexing of every derived matrix:
    floating vertices in ascending original id.  ``alpha[i]`` counts the
    grounded neighbors of the i-th floating vertex, so
    ``sum(alpha) == boundary_size == |edges between S and the rest|``.
    Construct via :func:`ground`.
    """

    graph: Graph
    grounded: tuple[int, ...]
    floating_order: tuple[int, ...]
    alpha: tuple[int, ...]

    @property
    def n_floating(self) -> int:
        return len(self.floating_order)

    @property
    def s_size(self) -> int:
        return len(self.grounded)

    @property
    def boundary_size(self) -> int:
        return sum(self.alpha)


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Validate and canonicalize a simple undirected graph.

    Duplicate pairs (including reversed duplicates) collapse to one edge.
    Raises :class:`GraphInputError` for endpoints outside ``[0, n)`` or
    self-loops.
    """
    if n < 1:
        raise GraphInputError(f"vertex count must be >= 1, got {n}")
    canon = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphInputError(f"edge ({u},{v}) has endpoint outside [0,{n})")
        if u == v:
            raise GraphInputError(f"self-loop at vertex {u}")
        if u > v:
            u, v = v, u
        canon.add((u, v))
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in sorted(canon):
        adj[u].append(v)
        adj[v].append(u)
    return Graph(n, tuple(sorted(canon)), tuple(tuple(sorted(a)) for a in adj))


def ground(g: Graph, grounded: Iterable[int]) -> GroundedSystem:
    """Designate a nonempty proper vertex subset as grounded."""
    s = tuple(sorted(set(int(v) for v in grounded)))
    if not s:
        raise GraphInputError("grounded set must be nonempty")
    if any(v < 0 or v >= g.n for v in s):
        raise GraphInputError(f"grounded set {s} has vertices outside [0,{g.n})")
    if len(s) == g.n:
        raise GraphInputError("grounded set must be a proper subset of the vertices")
    s_set = set(s)
    floating = tuple(v for v in range(g.n) if v not in s_set)
    alpha = tuple(sum(1 for u in g.adjacency[v] if u in s_set) for v in floating)
    return GroundedSystem(g, s, floating, alpha)


def laplacian(g: Graph) -> SymMatrix:
    """Combinatorial Laplacian: degrees on the diagonal, -1 per edge."""
    data: dict[tuple[int, int], int] = {}
    for v in range(g.n):
        d = g.degree(v)
        if d:
            data[(v, v)] = d
    for u, v in g.edges:
        data[(u, v)] = -1
    return SymMatrix.from_dict(g.n, data)


def grounded_laplacian(sys: GroundedSystem) -> SymMatrix:
    """Principal submatrix of the Laplacian on the floating vertices, indexed
    by ``sys.floating_order``."""
    pos = {v: i for i, v in enumerate(sys.floating_order)}
    g = sys.graph
    data: dict[tuple[int, int], int] = {}
    for v in sys.floating_order:
        data[(pos[v], pos[v])] = g.degree(v)
    for u, v in g.edges:
        if u in pos and v in pos:
            data[(pos[u], pos[v])] = -1
    return SymMatrix.from_dict(sys.n_floating, data)


def induced_subgraph(g: Graph, vertices: Sequence[int]) -> Graph:
    """Subgraph induced on ``vertices``, relabeled to 0..len-1 in the given
    (ascending) order."""
    pos = {v: i for i, v in enumerate(vertices)}
    edges = [(pos[u], pos[v]) for u, v in g.edges if u in pos and v in pos]
    return build_graph(len(vertices), edges)


def floating_subgraph(sys: GroundedSystem) -> Graph:
    return induced_subgraph(sys.graph, sys.floating_order)


def decompose(sys: GroundedSystem) -> tuple[SymMatrix, SymMatrix]:
    """Split the grounded Laplacian into the floating-subgraph Laplacian and
    the diagonal of grounded-neighbor counts.

    Returns ``(lbar, delta)`` with ``lbar + delta == grounded_laplacian(sys)``
    exactly (integer arithmetic).
    """
    lbar = laplacian(floating_subgraph(sys))
    delta = SymMatrix.from_dict(
        sys.n_floating, {(i, i): a for i, a in enumerate(sys.alpha)}
    )
    return lbar, delta


def edge_boundary(g: Graph, a: Iterable[int]) -> int:
    """Number of edges with exactly one endpoint in ``a``."""
    a_set = set(int(v) for v in a)
    if any(v < 0 or v >= g.n for v in a_set):
        raise GraphInputError("boundary set has vertices outside the graph")
    return sum(1 for u, v in g.edges if (u in a_set) != (v in a_set))


def is_connected(g: Graph) -> bool:
    """Breadth-first reachability from vertex 0."""
    if g.n <= 1:
        return True
    seen = bytearray(g.n)
    seen[0] = 1
    queue = deque([0])
    count = 1
    while queue:
        v = queue.popleft()
        for u in g.adjacency[v]:
            if not seen[u]:
                seen[u] = 1
                count += 1
                queue.append(u)
    return count == g.n


def connected_floating(sys: GroundedSystem) -> bool:
    """Whether the subgraph induced on the floating vertices is connected
    (i.e. whether the grounded set fails to be a vertex cut)."""
    return is_connected(floating_subgraph(sys))


def _gray_code_min_ratio(
    n_total: int,
    adjacency: Sequence[Sequence[int]],
    members: Sequence[int],
    size_cap: int | None,
):
    """Minimize boundary/|A| over nonempty subsets of ``members``.

    Walks all subsets in reflected Gray-code order, flipping one vertex per
    step and updating the boundary count incrementally.  The boundary counts
    every edge leaving the subset, including edges toward non-member
    vertices, so the same walk serves both the isoperimetric constant and
    floating-set cut ratios (boundary into the grounded set included).
    Ties are broken toward the lexicographically smallest vertex set.
    """
    m = len(members)
    degrees = {v: len(adjacency[v]) for v in members}
    in_set = bytearray(n_total)
    size = 0
    boundary = 0
    best: Fraction | None = None
    best_set: tuple[int, ...] | None = None
    for k in range(1, 1 << m):
        # bit that flips between Gray codes of k-1 and k
        bit = (k & -k).bit_length() - 1
        v = members[bit]
        inside = sum(1 for u in adjacency[v] if in_set[u])
        if in_set[v]:
            in_set[v] = 0
            size -= 1
            boundary -= degrees[v] - 2 * inside
        else:
            in_set[v] = 1
            size += 1
            boundary += degrees[v] - 2 * inside
        if size == 0 or (size_cap is not None and size > size_cap):
            continue
        ratio = Fraction(boundary, size)
        if best is None or ratio < best:
            best = ratio
            best_set = tuple(sorted(v2 for v2 in members if in_set[v2]))
        elif ratio == best:
            cand = tuple(sorted(v2 for v2 in members if in_set[v2]))
            if cand < best_set:
                best_set = cand
    return best, best_set


def isoperimetric_constant_exact(
    g: Graph, cap: int = ISO_ENUM_CAP
) -> tuple[Fraction, tuple[int, ...]]:
    """Exact isoperimetric constant min |boundary(A)|/|A| over nonempty
    vertex sets with |A| <= n/2, plus one minimizing set.

    Exhaustive (Gray-code) enumeration; refuses above ``cap`` vertices.
    """
    if g.n < 2:
        raise GraphInputError("isoperimetric constant needs at least 2 vertices")
    if g.n > cap:
        raise CapExceededError(
            f"exact enumeration capped at {cap} vertices (graph has {g.n}); "
            "use a sampled candidate-cut check instead"
        )
    members = list(range(g.n))
    best, best_set = _gray_code_min_ratio(g.n, g.adjacency, members, g.n // 2)
    return best, best_set


def min_cut_ratio_exact(
    sys: GroundedSystem, cap: int = ISO_ENUM_CAP
) -> tuple[Fraction, tuple[int, ...]]:
    """Exact min over nonempty floating subsets X of |boundary(X)|/|X|, with
    the boundary counted in the full graph (edges into the grounded set
    included), plus the lexicographically smallest minimizer."""
    if sys.n_floating > cap:
        raise CapExceededError(
            f"exact cut enumeration capped at {cap} floating vertices "
            f"(system has {sys.n_floating})"
        )
    g = sys.graph
    members = list(sys.floating_order)
    best, best_set = _gray_code_min_ratio(g.n, g.adjacency, members, None)
    return best, best_set


def read_edgelist(path: str | os.PathLike) -> Graph:
    """Read the text edge-list format: first non-comment line ``n m``, then
    ``m`` lines ``u v`` (0-indexed).  ``#`` starts a comment anywhere."""
    tokens_per_line: list[list[str]] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                tokens_per_line.append(line.split())
    if not tokens_per_line:
        raise GraphInputError(f"{path}: empty edge-list file")
    header = tokens_per_line[0]
    if len(header) != 2:
        raise GraphInputError(f"{path}: header must be 'n m', got {' '.join(header)!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError as exc:
        raise GraphInputError(f"{path}: non-integer header") from exc
    body = tokens_per_line[1:]
    if len(body) != m:
        raise GraphInputError(
            f"{path}: header promises {m} edges, found {len(body)} data lines"
        )
    edges = []
    for tok in body:
        if len(tok) != 2:
            raise GraphInputError(f"{path}: edge line must be 'u v', got {tok!r}")
        try:
            edges.append((int(tok[0]), int(tok[1])))
        except ValueError as exc:
            raise GraphInputError(f"{path}: non-integer edge {tok!r}") from exc
    try:
        return build_graph(n, edges)
    except GraphInputError as exc:
        raise GraphInputError(f"{path}: {exc}") from exc


def write_edgelist(path: str | os.PathLike, g: Graph) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")
