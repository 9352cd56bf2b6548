"""Base graph representation, edge-list ingestion, and spectral utilities.

Node ids are dense integers in [0, n); external labels are kept as strings
and mapped bijectively. Undirected edges are stored once but expanded to two
arcs in the adjacency view, since every downstream kernel works on arcs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FORMATS = ("snap-tsv", "matrix-market", "csv")

_CSV_HEADERS = {("u", "v"), ("source", "target"), ("src", "dst"), ("from", "to")}


class GraphParseError(ValueError):
    """Edge-list file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class Graph:
    """Unweighted graph over dense node ids with a CSR arc view.

    Duplicate edges are collapsed (counted in ``duplicates_collapsed``);
    self-loops are kept but counted once in degrees. Instances are immutable
    after construction and safe to share across workers.
    """

    def __init__(
        self,
        n: int,
        edges: Sequence[tuple[int, int]],
        directed: bool,
        labels: Sequence[str] | None = None,
    ):
        if n <= 0:
            raise ValueError("graph must have at least one node")
        self.n = int(n)
        self.directed = bool(directed)
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise ValueError("labels length must equal n")
        self.labels: list[str] = [str(x) for x in labels]
        self.label_to_id: dict[str, int] = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.label_to_id) != n:
            raise ValueError("labels must be unique")

        seen: set[tuple[int, int]] = set()
        kept: list[tuple[int, int]] = []
        dupes = 0
        loops = 0
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            key = (u, v) if directed else (min(u, v), max(u, v))
            if key in seen:
                dupes += 1
                continue
            seen.add(key)
            kept.append((u, v))
            if u == v:
                loops += 1
        if dupes:
            logger.warning("collapsed %d duplicate edge(s)", dupes)
        self.edges: list[tuple[int, int]] = kept
        self.m = len(kept)
        self.duplicates_collapsed = dupes
        self.self_loop_count = loops

        # Arc view: undirected edges become two arcs (self-loops one).
        if kept:
            arr = np.asarray(kept, dtype=np.int64)
            src, dst = arr[:, 0], arr[:, 1]
            if not directed:
                mask = src != dst
                src = np.concatenate([src, dst[mask]])
                dst = np.concatenate([dst, arr[:, 0][mask]])
        else:
            src = np.empty(0, dtype=np.int64)
            dst = np.empty(0, dtype=np.int64)
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, src + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.indices = dst
        # arc_src[a] is the tail of arc a; handy for vectorized matvecs.
        self.arc_src = src

    @property
    def n_arcs(self) -> int:
        return int(self.indices.shape[0])

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def out_neighbors(self, v: int) -> np.ndarray:
        """Out-neighbors of ``v`` in ascending order (all neighbors if undirected)."""
        if not (0 <= v < self.n):
            raise ValueError(f"node id {v} out of range [0,{self.n})")
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def reverse_indptr_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of the transposed arc view (in-neighbors)."""
        order = np.lexsort((self.arc_src, self.indices))
        rsrc = self.indices[order]
        rdst = self.arc_src[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, rsrc + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, rdst

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, m={self.m}, {kind})"


class RefillSet:
    """Set of refill node ids with O(1) membership via a boolean mask."""

    def __init__(self, members: Iterable[int], n: int):
        self.n = int(n)
        mem = sorted({int(v) for v in members})
        if mem and not (0 <= mem[0] and mem[-1] < n):
            raise ValueError("refill node id out of range")
        self.members: frozenset[int] = frozenset(mem)
        self.mask = np.zeros(n, dtype=bool)
        if mem:
            self.mask[mem] = True

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and bool(self.mask[v])

    def __len__(self) -> int:
        return len(self.members)

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def __repr__(self) -> str:
        return f"RefillSet({len(self.members)} of {self.n})"


@dataclass(frozen=True)
class SocInstance:
    """A graph plus refill set and hop budget; the unit all measures consume."""

    graph: Graph
    omega: RefillSet
    kappa: int

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if self.omega.n != self.graph.n:
            raise ValueError("refill set sized for a different graph")


def make_instance(graph: Graph, omega: Iterable[int], kappa: int) -> SocInstance:
    return SocInstance(graph, RefillSet(omega, graph.n), int(kappa))


def _finish(
    pairs: list[tuple[str, str]], directed: bool, n_hint: int | None = None
) -> Graph:
    labels: list[str] = []
    ids: dict[str, int] = {}
    if n_hint is not None:
        labels = [str(i + 1) for i in range(n_hint)]
        ids = {lab: i for i, lab in enumerate(labels)}
    edges = []
    for a, b in pairs:
        for lab in (a, b):
            if lab not in ids:
                ids[lab] = len(labels)
                labels.append(lab)
        edges.append((ids[a], ids[b]))
    if not labels:
        raise GraphParseError("empty graph: no nodes found")
    return Graph(len(labels), edges, directed, labels)


def _parse_snap(lines: Iterable[str]) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 2:
            raise GraphParseError(f"expected two fields, got {len(toks)}", lineno)
        try:
            int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphParseError(f"non-integer node id in {toks!r}", lineno) from None
        pairs.append((toks[0], toks[1]))
    return pairs


def _parse_csv(lines: Iterable[str]) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        toks = [t.strip() for t in line.split(",")]
        if lineno == 1 and tuple(t.lower() for t in toks) in _CSV_HEADERS:
            continue
        if len(toks) != 2:
            raise GraphParseError(f"expected two comma-separated fields, got {len(toks)}", lineno)
        pairs.append((toks[0], toks[1]))
    return pairs


def _parse_matrix_market(lines: list[str]) -> tuple[list[tuple[str, str]], int, bool]:
    if not lines or not lines[0].startswith("%%MatrixMarket"):
        raise GraphParseError("missing %%MatrixMarket header", 1)
    header = lines[0].lower().split()
    if "matrix" not in header or "coordinate" not in header:
        raise GraphParseError("only coordinate matrices are supported", 1)
    symmetric = "symmetric" in header
    dims = None
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        toks = line.split()
        if dims is None:
            if len(toks) < 3:
                raise GraphParseError("expected 'rows cols nnz' size line", lineno)
            try:
                rows, cols = int(toks[0]), int(toks[1])
            except ValueError:
                raise GraphParseError("non-integer size line", lineno) from None
            dims = max(rows, cols)
            continue
        if len(toks) < 2:
            raise GraphParseError("expected at least two fields", lineno)
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphParseError(f"non-integer coordinate in {toks!r}", lineno) from None
        if dims and not (1 <= i <= dims and 1 <= j <= dims):
            raise GraphParseError(f"coordinate ({i},{j}) outside {dims}x{dims}", lineno)
        pairs.append((str(i), str(j)))
    if dims is None or dims == 0:
        raise GraphParseError("empty graph: no size line or zero dimensions")
    return pairs, dims, symmetric


def load_edge_list(path: str | Path, format: str = "snap-tsv", directed: bool = False) -> Graph:
    """Load a graph from a file in one of: snap-tsv, matrix-market, csv."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    path = Path(path)
    text = path.read_text()
    lines = text.splitlines()
    if format == "snap-tsv":
        g = _finish(_parse_snap(lines), directed)
    elif format == "csv":
        g = _finish(_parse_csv(lines), directed)
    else:
        pairs, dims, symmetric = _parse_matrix_market(lines)
        if directed and symmetric:
            pairs = pairs + [(b, a) for a, b in pairs if a != b]
        g = _finish(pairs, directed, n_hint=dims)
    logger.info("loaded %s from %s", g, path)
    return g


def write_snap_tsv(g: Graph, path: str | Path) -> None:
    """Write edges as whitespace pairs of external labels, one per line."""
    with open(path, "w") as fh:
        fh.write(f"# nodes: {g.n} edges: {g.m}\n")
        for u, v in g.edges:
            fh.write(f"{g.labels[u]}\t{g.labels[v]}\n")


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    converged: bool
    iterations: int


def _is_acyclic(n: int, indptr: np.ndarray, indices: np.ndarray) -> bool:
    # Kahn's algorithm on the arc view; a cycle forces spectral radius >= 1.
    indeg = np.zeros(n, dtype=np.int64)
    np.add.at(indeg, indices, 1)
    stack = list(np.flatnonzero(indeg == 0))
    removed = 0
    while stack:
        v = stack.pop()
        removed += 1
        for w in indices[indptr[v] : indptr[v + 1]]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(int(w))
    return removed == n


def power_iteration_radius(
    n: int,
    indptr: np.ndarray,
    indices: np.ndarray,
    arc_src: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> PowerIterationResult:
    """Spectral radius of a nonnegative 0/1 arc set by shifted power iteration.

    Iterates x <- (B + I) x, which is aperiodic for any nonnegative B, and
    reports the 1-norm growth ratio minus one. Acyclic arc sets short-circuit
    to exactly zero.
    """
    if indices.shape[0] == 0 or _is_acyclic(n, indptr, indices):
        return PowerIterationResult(0.0, True, 0)
    x = np.full(n, 1.0 / n)
    est = 0.0
    for it in range(1, max_iter + 1):
        y = np.bincount(arc_src, weights=x[indices], minlength=n) + x
        norm = float(y.sum())
        new_est = norm - 1.0
        x = y / norm
        if abs(new_est - est) <= tol * max(abs(new_est), 1.0):
            return PowerIterationResult(new_est, True, it)
        est = new_est
    return PowerIterationResult(est, False, max_iter)


def spectral_radius(g: Graph, tol: float = 1e-10, max_iter: int = 10_000) -> PowerIterationResult:
    """Largest-eigenvalue estimate of the adjacency operator of ``g``."""
    return power_iteration_radius(g.n, g.indptr, g.indices, g.arc_src, tol, max_iter)
