"""Brute-force oracles for property tests and small-input verification.

Everything here recomputes results from first principles (walk enumeration,
dense block matrices, Monte-Carlo sampling, electrical networks) and is
deliberately independent of the production kernels. Budget guards keep the
exponential paths on desk-sized inputs. Shipped with the library so the CLI
can cross-check kernels on small graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Graph, SocInstance
from .rwbc import WalkSubgraph, walk_subgraph
from .scores import ScoreVector

DEFAULT_MAX_WALKS = 2_000_000


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_nodes: int = 8
    max_kappa: int = 3
    max_walk_len: int = 16

    def check_instance(self, inst: SocInstance) -> None:
        if inst.graph.n > self.max_nodes:
            raise BudgetExceeded(f"{inst.graph.n} nodes exceeds oracle budget {self.max_nodes}")
        if inst.kappa > self.max_kappa:
            raise BudgetExceeded(f"kappa={inst.kappa} exceeds oracle budget {self.max_kappa}")


def _moves(inst: SocInstance, node: int, soc: int) -> list[tuple[int, int]]:
    """Legal single-hop transitions of a commodity, straight from the rules."""
    out = []
    for v in inst.graph.out_neighbors(node):
        v = int(v)
        if v in inst.omega:
            out.append((v, inst.kappa))
        elif soc >= 1:
            out.append((v, soc - 1))
    return out


def enumerate_feasible_walks(
    inst: SocInstance, s: int, t: int, max_len: int, budget: OracleBudget | None = None
) -> list[tuple[int, ...]]:
    """Every feasible walk from s ending at t with length <= max_len (DFS)."""
    budget = budget or OracleBudget()
    budget.check_instance(inst)
    if max_len > budget.max_walk_len:
        raise BudgetExceeded(f"max_len={max_len} exceeds oracle budget {budget.max_walk_len}")
    walks: list[tuple[int, ...]] = []
    walk = [s]

    def rec(node: int, soc: int) -> None:
        if node == t:
            walks.append(tuple(walk))
        if len(walk) - 1 >= max_len:
            return
        if len(walks) > DEFAULT_MAX_WALKS:
            raise BudgetExceeded("walk enumeration blew past the safety cap")
        for v, ns in _moves(inst, node, soc):
            walk.append(v)
            rec(v, ns)
            walk.pop()

    rec(s, inst.kappa)
    return walks


def _state_distances(inst: SocInstance, start: tuple[int, int]) -> dict[tuple[int, int], int]:
    dist = {start: 0}
    q = deque([start])
    while q:
        node, soc = q.popleft()
        for nxt in _moves(inst, node, soc):
            if nxt not in dist:
                dist[nxt] = dist[(node, soc)] + 1
                q.append(nxt)
    return dist


def _distances_to_target(inst: SocInstance, t: int) -> dict[tuple[int, int], int]:
    """Hops needed from each state to first reach node t (multi-source reverse BFS)."""
    radj: dict[tuple[int, int], list[tuple[int, int]]] = {}
    n, kappa = inst.graph.n, inst.kappa
    for node in range(n):
        for soc in range(kappa + 1):
            for nxt in _moves(inst, node, soc):
                radj.setdefault(nxt, []).append((node, soc))
    dist: dict[tuple[int, int], int] = {(t, soc): 0 for soc in range(kappa + 1)}
    q = deque(dist)
    while q:
        st = q.popleft()
        for prev in radj.get(st, []):
            if prev not in dist:
                dist[prev] = dist[st] + 1
                q.append(prev)
    return dist


def shortest_feasible_walks(
    inst: SocInstance, s: int, t: int, budget: OracleBudget | None = None
) -> list[tuple[int, ...]]:
    """All shortest feasible s-to-t walks via pruned exhaustive search."""
    budget = budget or OracleBudget()
    budget.check_instance(inst)
    if s == t:
        return [(s,)]
    start = (s, inst.kappa)
    fwd = _state_distances(inst, start)
    arrivals = [d for (node, _), d in fwd.items() if node == t]
    if not arrivals:
        return []
    length = min(arrivals)
    if length > budget.max_walk_len:
        raise BudgetExceeded(f"shortest walk length {length} exceeds {budget.max_walk_len}")
    to_t = _distances_to_target(inst, t)
    walks: list[tuple[int, ...]] = []
    walk = [s]

    def rec(node: int, soc: int, depth: int) -> None:
        if node == t and depth == length:
            walks.append(tuple(walk))
            return
        for v, ns in _moves(inst, node, soc):
            rest = to_t.get((v, ns))
            if rest is None or depth + 1 + rest > length:
                continue
            walk.append(v)
            rec(v, ns, depth + 1)
            walk.pop()

    rec(s, inst.kappa, 0)
    return walks


def brute_soc_bc(
    inst: SocInstance, endpoints: str = "target", budget: OracleBudget | None = None
) -> ScoreVector:
    """Definition-level betweenness: enumerate shortest feasible walks per pair
    and credit each visited position (arrival included under the target
    convention, source never)."""
    budget = budget or OracleBudget()
    budget.check_instance(inst)
    n = inst.graph.n
    score = np.zeros(n)
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            walks = shortest_feasible_walks(inst, s, t, budget)
            sigma = len(walks)
            if sigma == 0:
                continue
            last = len(walks[0]) - 1
            stop = last + 1 if endpoints == "target" else last
            for w in walks:
                for pos in range(1, stop):
                    score[w[pos]] += 1.0 / sigma
    meta = {"measure": "soc-bc-brute", "kappa": inst.kappa, "endpoints": endpoints}
    return ScoreVector.for_graph(inst.graph, score, meta)


def dense_adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for arc_s, arc_d in zip(g.arc_src, g.indices):
        a[arc_s, arc_d] = 1.0
    return a


def dense_bkappa(inst: SocInstance) -> np.ndarray:
    """State adjacency assembled directly from the block-matrix definition."""
    g, kappa = inst.graph, inst.kappa
    n = g.n
    a = dense_adjacency(g)
    j = np.diag(inst.omega.mask.astype(float))
    eye = np.eye(n)
    big = np.zeros((n * (kappa + 1), n * (kappa + 1)))
    for b in range(kappa + 1):
        rows = slice(b * n, (b + 1) * n)
        big[rows, 0:n] = a @ j
        if b < kappa:
            big[rows, (b + 1) * n : (b + 2) * n] = a @ (eye - j)
    return big


def dense_soc_katz(inst: SocInstance, alpha: float, max_states: int = 200) -> ScoreVector:
    """Direct resolvent inversion over the dense state adjacency."""
    n_states = inst.graph.n * (inst.kappa + 1)
    if n_states > max_states:
        raise BudgetExceeded(f"{n_states} states exceeds the dense-oracle cap {max_states}")
    big = dense_bkappa(inst)
    radius = max(abs(np.linalg.eigvals(big)))
    if alpha * radius >= 1.0:
        raise ValueError(f"alpha={alpha} at or above 1/lambda_max={1.0 / radius if radius else np.inf:.6g}")
    u = np.linalg.solve(np.eye(n_states) - alpha * big, np.ones(n_states))
    return ScoreVector.for_graph(inst.graph, u[: inst.graph.n], {"measure": "soc-katz-dense"})


def dense_katz(g: Graph, alpha: float) -> np.ndarray:
    a = dense_adjacency(g)
    radius = max(abs(np.linalg.eigvals(a)))
    if alpha * radius >= 1.0:
        raise ValueError("alpha at or above the spectral bound")
    return np.linalg.solve(np.eye(g.n) - alpha * a, np.ones(g.n))


@dataclass
class MonteCarloRwbc:
    """Empirical net-flow estimates with per-node standard errors."""

    estimate: np.ndarray
    stderr: np.ndarray
    n_walks: int
    subgraph: WalkSubgraph


def monte_carlo_rwbc(
    g: Graph, s: int, t: int, walks: int = 100_000, seed: int = 0, chunk: int = 10_000
) -> MonteCarloRwbc:
    """Sampled absorbing walks on the s-t subgraph, aggregated to net flows.

    Per-arc usage is counted per walk; the per-node statistic applies the
    empirical net-flow signs, making its mean the plug-in net-flow estimate
    with a delta-method standard error from the per-walk spread.
    """
    sub = walk_subgraph(g, s, t)
    if sub.empty:
        raise ValueError(f"no walk from {s} to {t}")
    m = sub.n
    order = np.lexsort((sub.arc_dst, sub.arc_src))
    asrc = sub.arc_src[order]
    adst = sub.arc_dst[order]
    n_arcs = asrc.shape[0]
    indptr = np.zeros(m + 1, dtype=np.int64)
    np.add.at(indptr, asrc + 1, 1)
    np.cumsum(indptr, out=indptr)
    s_loc, t_loc = sub.source, sub.target

    def chunks(rng: np.random.Generator):
        remaining = walks
        while remaining:
            b = min(chunk, remaining)
            remaining -= b
            states = np.full(b, s_loc, dtype=np.int64)
            active = np.arange(b)
            counts = np.zeros((b, n_arcs), dtype=np.int32)
            guard = 0
            while active.size:
                cur = states[active]
                starts = indptr[cur]
                deg = indptr[cur + 1] - starts
                arc = starts + (rng.random(active.size) * deg).astype(np.int64)
                counts[active, arc] += 1
                nxt = adst[arc]
                states[active] = nxt
                active = active[nxt != t_loc]
                guard += 1
                if guard > 10_000_000:  # pragma: no cover - absorbing chain safety
                    raise RuntimeError("walk simulation failed to absorb")
            yield counts

    total = np.zeros(n_arcs)
    for counts in chunks(np.random.default_rng(seed)):
        total += counts.sum(axis=0, dtype=np.float64)

    arc_id = {(int(u), int(v)): a for a, (u, v) in enumerate(zip(asrc, adst))}
    weight = np.zeros(n_arcs)
    for a in range(n_arcs):
        rev = arc_id.get((int(adst[a]), int(asrc[a])))
        net = total[a] - (total[rev] if rev is not None else 0.0)
        weight[a] = 0.5 * np.sign(net)
    # Each use of arc (u, v) moves half a signed unit at both endpoints.
    w_mat = np.zeros((n_arcs, m))
    for a in range(n_arcs):
        w_mat[a, asrc[a]] += weight[a]
        w_mat[a, adst[a]] += weight[a]

    zsum = np.zeros(m)
    zsq = np.zeros(m)
    for counts in chunks(np.random.default_rng(seed)):
        z = counts @ w_mat
        zsum += z.sum(axis=0)
        zsq += (z * z).sum(axis=0)
    mean = zsum / walks
    var = np.maximum(zsq / walks - mean**2, 0.0) * walks / max(walks - 1, 1)
    stderr_local = np.sqrt(var / walks)

    estimate = np.zeros(g.n)
    estimate[sub.nodes] = mean
    stderr = np.zeros(g.n)
    stderr[sub.nodes] = stderr_local
    return MonteCarloRwbc(estimate, stderr, walks, sub)


def current_flow_throughflow(g: Graph, s: int, t: int) -> np.ndarray:
    """Electrical-network oracle: unit current s to t, half the absolute
    incident currents per node (endpoints included, same uniform formula)."""
    if g.directed:
        raise ValueError("current-flow oracle applies to undirected graphs")
    n = g.n
    comp = np.zeros(n, dtype=bool)
    stack = [s]
    comp[s] = True
    while stack:
        v = stack.pop()
        for w in g.out_neighbors(v):
            if not comp[w]:
                comp[w] = True
                stack.append(int(w))
    if not comp[t]:
        raise ValueError("target not in the source's component")
    lap = np.zeros((n, n))
    for u, v in g.edges:
        if u == v:
            continue
        lap[u, u] += 1
        lap[v, v] += 1
        lap[u, v] -= 1
        lap[v, u] -= 1
    keep = np.flatnonzero(comp & (np.arange(n) != t))
    b = np.zeros(keep.shape[0])
    b[np.searchsorted(keep, s)] = 1.0
    phi = np.zeros(n)
    phi[keep] = np.linalg.solve(lap[np.ix_(keep, keep)], b)
    through = np.zeros(n)
    for u, v in g.edges:
        if u == v:
            continue
        current = abs(phi[u] - phi[v])
        through[u] += 0.5 * current
        through[v] += 0.5 * current
    return through


def plain_sir_outbreaks(
    g: Graph, seed_node: int, alpha: float, runs: int, seed: int = 0
) -> list[int]:
    """Standard infect-once spreading (no charge bookkeeping); outbreak sizes."""
    rng = np.random.default_rng(seed)
    sizes = []
    for _ in range(runs):
        susceptible = set(range(g.n)) - {seed_node}
        infected = [seed_node]
        ever = 1
        while infected:
            newly = set()
            for u in infected:
                for w in g.out_neighbors(u):
                    w = int(w)
                    if w in susceptible and w not in newly and rng.random() < alpha:
                        newly.add(w)
            susceptible -= newly
            infected = sorted(newly)
            ever += len(newly)
        sizes.append(ever)
    return sizes
