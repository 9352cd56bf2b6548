"""Random-walk betweenness for directed graphs and its charge-aware variant.

For a source-target pair the walk is restricted to the subgraph of nodes that
lie on some s-to-t walk, so that absorption at the target is certain. The
expected per-arc usage follows from one linear solve against the restricted
out-degree Laplacian; a node's score is half the sum of absolute net usages
over its incident unordered neighbor pairs, which on symmetrized graphs
reduces to current-flow betweenness.

The charge-aware variant runs the same computation on the state graph with
all of the target's arrival states contracted into a single absorbing node,
then sums net flows over charge levels per node.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .graph import Graph, SocInstance
from .scores import ScoreVector
from .statespace import StateGraph, build_state_graph, frontier_bfs_distances

logger = logging.getLogger(__name__)

# Above this subgraph size the solve switches to sparse factorization.
DENSE_SOLVE_LIMIT = 2000


@dataclass
class WalkSubgraph:
    """Nodes lying on at least one s-to-t walk, with the induced arc set."""

    nodes: np.ndarray          # global ids, ascending
    local_of: dict[int, int]
    arc_src: np.ndarray        # local ids
    arc_dst: np.ndarray
    source: int                # local id of s
    target: int                # local id of t

    @property
    def n(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def empty(self) -> bool:
        return self.n == 0


def walk_subgraph(g: Graph, s: int, t: int) -> WalkSubgraph:
    """Intersection of forward reachability from s and backward reachability to t."""
    if s == t:
        raise ValueError("source and target must differ")
    fwd = frontier_bfs_distances(g.indptr, g.indices, g.n, [s])
    rptr, ridx = g.reverse_indptr_indices()
    bwd = frontier_bfs_distances(rptr, ridx, g.n, [t])
    keep = (fwd >= 0) & (bwd >= 0)
    if not (keep[s] and keep[t]):
        return WalkSubgraph(np.empty(0, np.int64), {}, np.empty(0, np.int64), np.empty(0, np.int64), -1, -1)
    nodes = np.flatnonzero(keep)
    local = np.full(g.n, -1, dtype=np.int64)
    local[nodes] = np.arange(nodes.shape[0])
    amask = keep[g.arc_src] & keep[g.indices]
    return WalkSubgraph(
        nodes,
        {int(v): int(local[v]) for v in nodes},
        local[g.arc_src[amask]],
        local[g.indices[amask]],
        int(local[s]),
        int(local[t]),
    )


@dataclass
class FlowSolution:
    """Per-node expected out-arc usage, per-arc usage, and net throughflow."""

    f: np.ndarray                       # over host-graph node ids; zero off-subgraph
    net_flow: np.ndarray                # same indexing
    arc_flow: dict[tuple[int, int], float] = field(default_factory=dict)
    subgraph: WalkSubgraph | None = None


def _solve_usage(sub: WalkSubgraph) -> np.ndarray:
    """Row of the inverse restricted Laplacian: expected per-out-arc usage."""
    m = sub.n
    t = sub.target
    outdeg = np.bincount(sub.arc_src, minlength=m).astype(float)
    keep = np.arange(m) != t
    dead = np.flatnonzero((outdeg == 0) & keep)
    if dead.size:  # cannot happen for a correctly built subgraph
        raise RuntimeError(f"restricted system singular: node {sub.nodes[dead[0]]} has no out-arc")
    idx_of = np.cumsum(keep) - 1  # position among non-target rows
    amask = (sub.arc_src != t) & (sub.arc_dst != t)
    rows = idx_of[sub.arc_src[amask]]
    cols = idx_of[sub.arc_dst[amask]]
    k = m - 1
    rhs = np.zeros(k)
    rhs[idx_of[sub.source]] = 1.0
    if k <= DENSE_SOLVE_LIMIT:
        mat = np.zeros((k, k))
        np.fill_diagonal(mat, outdeg[keep])
        mat[rows, cols] -= 1.0
        try:
            sol = np.linalg.solve(mat.T, rhs)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by subgraph
            raise RuntimeError(f"singular restricted system for subgraph of {m} nodes") from exc
    else:
        data = np.concatenate([outdeg[keep], -np.ones(rows.shape[0])])
        coo_r = np.concatenate([np.arange(k), rows])
        coo_c = np.concatenate([np.arange(k), cols])
        mat = scipy.sparse.csc_matrix((data, (coo_r, coo_c)), shape=(k, k))
        sol = scipy.sparse.linalg.splu(mat.T.tocsc()).solve(rhs)
    f = np.zeros(m)
    f[keep] = sol
    return f


def directed_rwbc_pair(g: Graph, s: int, t: int, sub: WalkSubgraph | None = None) -> FlowSolution:
    """Expected-usage flows and net throughflow for one source-target pair."""
    if sub is None:
        sub = walk_subgraph(g, s, t)
    if sub.empty:
        raise ValueError(f"no walk from {s} to {t}")
    f_local = _solve_usage(sub)
    flow = f_local[sub.arc_src]  # usage of each induced arc

    m = sub.n
    # Net flow per unordered neighbor pair, half credited to each endpoint.
    pair_key = sub.arc_src * m + sub.arc_dst
    signed = {}
    for k_, fl in zip(pair_key, flow):
        signed[int(k_)] = signed.get(int(k_), 0.0) + float(fl)
    net_local = np.zeros(m)
    seen: set[tuple[int, int]] = set()
    for k_ in signed:
        u, v = divmod(k_, m)
        a, b = (u, v) if u < v else (v, u)
        if (a, b) in seen or a == b:
            continue
        seen.add((a, b))
        net = abs(signed.get(a * m + b, 0.0) - signed.get(b * m + a, 0.0))
        net_local[a] += 0.5 * net
        net_local[b] += 0.5 * net

    f = np.zeros(g.n)
    f[sub.nodes] = f_local
    net = np.zeros(g.n)
    net[sub.nodes] = net_local
    arc_flow = {
        (int(sub.nodes[u]), int(sub.nodes[v])): float(fl)
        for u, v, fl in zip(sub.arc_src, sub.arc_dst, flow)
    }
    return FlowSolution(f, net, arc_flow, sub)


@dataclass(frozen=True)
class StPair:
    source: int
    target: int

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("source and target must differ")


def _contract_target(sg: StateGraph, t: int) -> tuple[Graph, np.ndarray, int]:
    """State graph with all (t, charge) states merged into one absorbing node.

    Returns the contracted digraph, the map state-index -> contracted id, and
    the absorbing node's id (which is the last one).
    """
    n = sg.n
    node_of = np.arange(sg.n_numeric) % n
    is_t = node_of == t
    mapping = np.cumsum(~is_t) - 1
    tau = int(sg.n_numeric - (sg.kappa + 1))
    mapping = np.where(is_t, tau, mapping)
    src_is_t = is_t[sg.arc_src]
    src = mapping[sg.arc_src[~src_is_t]]
    dst = mapping[sg.indices[~src_is_t]]
    contracted = Graph(tau + 1, list(zip(src.tolist(), dst.tolist())), directed=True)
    # Each state has at most one arc into the target's states, so contraction
    # must not merge arcs (that would skew the transition probabilities).
    assert contracted.duplicates_collapsed == 0
    return contracted, mapping, tau


def soc_rwbc(
    inst: SocInstance, pairs: Sequence[StPair | tuple[int, int]], sg: StateGraph | None = None
) -> ScoreVector:
    """Charge-aware random-walk betweenness accumulated over the given pairs.

    Pairs without a feasible walk contribute nothing and are counted in the
    metadata as skipped.
    """
    if not pairs:
        raise ValueError("at least one source-target pair required")
    if sg is None:
        sg = build_state_graph(inst, starred=False)
    n = inst.graph.n
    node_of = np.arange(sg.n_numeric) % n
    y_states = np.zeros(sg.n_numeric)
    skipped: list[tuple[int, int]] = []
    for p in pairs:
        s, t = (p.source, p.target) if isinstance(p, StPair) else (int(p[0]), int(p[1]))
        if s == t:
            raise ValueError("source and target must differ")
        contracted, mapping, tau = _contract_target(sg, t)
        src = int(mapping[sg.source_state(s)])
        sub = walk_subgraph(contracted, src, tau)
        if sub.empty:
            skipped.append((s, t))
            continue
        sol = directed_rwbc_pair(contracted, src, tau, sub)
        back = np.flatnonzero(node_of != t)  # contracted id -> state index
        y_states[back] += sol.net_flow[:tau]
    if skipped:
        logger.info("%d of %d pairs had no feasible walk", len(skipped), len(pairs))
    node_scores = y_states.reshape(inst.kappa + 1, n).sum(axis=0)
    meta = {
        "measure": "soc-rwbc",
        "kappa": inst.kappa,
        "omega": inst.omega.sorted_members(),
        "pairs": len(pairs),
        "skipped_pairs": len(skipped),
    }
    return ScoreVector.for_graph(inst.graph, node_scores, meta)


def dump_flow(sol: FlowSolution, labels: Sequence[str], fh) -> None:
    """Debug dump of one pair's solution: ``node,usage,net_flow`` per line."""
    fh.write("node_label,f,net_flow\n")
    for i, lab in enumerate(labels):
        fh.write(f"{lab},{float(sol.f[i])!r},{float(sol.net_flow[i])!r}\n")


def rwbc_all_pairs(g: Graph, pairs: Sequence[tuple[int, int]]) -> ScoreVector:
    """Plain directed random-walk betweenness summed over the given pairs."""
    total = np.zeros(g.n)
    skipped = 0
    for s, t in pairs:
        sub = walk_subgraph(g, int(s), int(t))
        if sub.empty:
            skipped += 1
            continue
        total += directed_rwbc_pair(g, int(s), int(t), sub).net_flow
    meta = {"measure": "rwbc", "pairs": len(pairs), "skipped_pairs": skipped}
    return ScoreVector.for_graph(g, total, meta)


def sample_feasible_pairs(
    inst: SocInstance, count: int, seed: int, max_resamples: int = 1000
) -> tuple[list[tuple[int, int]], int]:
    """Uniform ordered pairs restricted to those admitting a feasible walk.

    Returns the sampled pairs and the number of infeasible draws discarded.
    """
    from .statespace import reachable_nodes

    rng = np.random.default_rng(seed)
    sg = build_state_graph(inst, starred=False)
    n = inst.graph.n
    if n < 2:
        raise ValueError("need at least two nodes to sample pairs")
    reach_cache: dict[int, np.ndarray] = {}
    pairs: list[tuple[int, int]] = []
    resampled = 0
    while len(pairs) < count:
        for _ in range(max_resamples):
            s = int(rng.integers(n))
            t = int(rng.integers(n))
            if s == t:
                continue
            if s not in reach_cache:
                reach_cache[s] = reachable_nodes(sg, s)
            if reach_cache[s][t]:
                pairs.append((s, t))
                break
            resampled += 1
        else:
            raise RuntimeError(f"could not find a feasible pair in {max_resamples} draws")
    return pairs, resampled
