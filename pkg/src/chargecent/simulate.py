"""Realized-centrality simulators: spreading influence and traffic occupation.

The spreading model is a synchronous infect-once process where each infected
node carries a residual charge: transmission to a non-refill neighbor needs
charge >= 1 and hands down charge - 1 (refill neighbors always accept and
restart at full charge). A node's realized influence is its mean outbreak
size as seed.

The traffic model hops one particle per node per time step. Particles are
injected for sampled feasible source-target pairs and routed by charge- and
target-aware policies; a move into an occupied node blocks and the particle
waits. The realized score is each node's occupation ratio.
"""

from __future__ import annotations

import logging
from collections import OrderedDict, deque
from dataclasses import dataclass, field
import numpy as np

from .betweenness import _forward_levels
from .graph import SocInstance
from .scores import ScoreVector
from .statespace import StateGraph, build_state_graph

logger = logging.getLogger(__name__)

POLICIES = ("shortest-feasible", "random-feasible")


@dataclass
class SimOutcome:
    """Per-node realized scores plus run metadata."""

    values: np.ndarray
    labels: list[str]
    meta: dict = field(default_factory=dict)

    def to_scores(self) -> ScoreVector:
        return ScoreVector(self.values, self.labels, dict(self.meta))


# ---------------------------------------------------------------------------
# Spreading influence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SirParams:
    alpha: float
    runs: int = 1000
    max_steps: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("transmission probability must lie in [0,1]")
        if self.runs < 1:
            raise ValueError("runs must be positive")


@dataclass
class SirEpisode:
    ever_infected: int
    rounds: int
    active_edges: list[tuple[int, int]]


def run_sir_episode(
    inst: SocInstance, seed_node: int, rng: np.random.Generator,
    alpha: float, max_steps: int | None = None, record_edges: bool = False,
) -> SirEpisode:
    """One synchronous infect-once episode seeded at ``seed_node`` with full charge."""
    g = inst.graph
    kappa = inst.kappa
    refill = inst.omega.mask
    status = bytearray(g.n)  # 0 susceptible, 1 infected, 2 recovered
    status[seed_node] = 1
    soc = {seed_node: kappa}
    infected = [seed_node]
    ever = 1
    rounds = 0
    edges: list[tuple[int, int]] = []
    while infected and (max_steps is None or rounds < max_steps):
        newly: dict[int, int] = {}
        for u in infected:
            su = soc[u]
            nbrs = g.out_neighbors(u)
            if nbrs.shape[0] == 0:
                continue
            draws = rng.random(nbrs.shape[0])
            for w, r in zip(nbrs, draws):
                w = int(w)
                if status[w] != 0:
                    continue
                if refill[w]:
                    handed = kappa
                elif su >= 1:
                    handed = su - 1
                else:
                    continue  # exhausted attacker can only reach refill nodes
                if r < alpha:
                    if w not in newly or handed > newly[w]:
                        newly[w] = handed
                    if record_edges:
                        edges.append((u, w))
        for u in infected:
            status[u] = 2
            del soc[u]
        infected = sorted(newly)
        for w in infected:
            status[w] = 1
            soc[w] = newly[w]
        ever += len(infected)
        rounds += 1
    return SirEpisode(ever, rounds, edges)


def sir_influence(inst: SocInstance, p: SirParams) -> SimOutcome:
    """Mean outbreak size per seed node over ``p.runs`` episodes each.

    Episode randomness is drawn from a stream keyed by (seed, node, episode),
    so runs are reproducible and nodes are independent.
    """
    g = inst.graph
    scores = np.zeros(g.n)
    for v in range(g.n):
        total = 0
        for ep in range(p.runs):
            rng = np.random.default_rng([p.seed, v, ep])
            episode = run_sir_episode(inst, v, rng, p.alpha, p.max_steps)
            assert 1 <= episode.ever_infected <= g.n
            total += episode.ever_infected
        scores[v] = total / p.runs
    meta = {
        "simulation": "sir",
        "alpha": p.alpha,
        "runs": p.runs,
        "kappa": inst.kappa,
        "omega": inst.omega.sorted_members(),
        "seed": p.seed,
    }
    return SimOutcome(scores, list(g.labels), meta)


# ---------------------------------------------------------------------------
# Particle hopping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HoppingParams:
    policy: str = "shortest-feasible"
    duration: int = 10_000
    injection_rate: float = 0.5
    seed: int = 0
    pairs: tuple[tuple[int, int], ...] | None = None
    max_injections: int | None = None
    # Congestion relief: after this many consecutive blocked steps prefer a free
    # equally-short successor; after the larger threshold allow any free
    # feasibility-preserving successor. None disables the respective stage.
    stall_reroute_after: int | None = 3
    stall_escape_after: int | None = 25

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if self.duration < 1:
            raise ValueError("duration must be positive")
        if self.injection_rate < 0:
            raise ValueError("injection rate must be nonnegative")


class _TargetTables:
    """Per-target routing guidance over the augmented state graph.

    For target t, ``dist[x]`` is the number of hops from state x to the sink
    of t (arrival states have distance 1, unreachable -1) and ``paths[x]``
    counts the shortest continuations, used to sample uniformly among
    shortest feasible walks one hop at a time.
    """

    def __init__(self, sg: StateGraph, max_cached: int | None = None):
        self.sg = sg
        self.rptr, self.ridx = self._reverse_csr(sg)
        if max_cached is None:
            per_table = sg.n_states * 16  # int64 dist + float64 paths
            max_cached = max(16, int(3e8 // max(per_table, 1)))
        self.max_cached = max_cached
        self._cache: OrderedDict[int, tuple[np.ndarray, np.ndarray]] = OrderedDict()

    @staticmethod
    def _reverse_csr(sg: StateGraph) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(sg.indices, kind="stable")
        rsrc = sg.indices[order]
        rdst = sg.arc_src[order]
        indptr = np.zeros(sg.n_states + 1, dtype=np.int64)
        np.add.at(indptr, rsrc + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, rdst

    def for_target(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        if t in self._cache:
            self._cache.move_to_end(t)
            return self._cache[t]
        sg = self.sg
        star = sg.n_numeric + t
        # Reverse-graph BFS from the sink: distances to the sink, and path
        # counts that equal the number of shortest continuations per state.
        dist, sigma, _, _ = _forward_levels(self.rptr, self.ridx, sg.n_states, star)
        paths = sigma.astype(float)
        self._cache[t] = (dist, paths)
        if len(self._cache) > self.max_cached:
            self._cache.popitem(last=False)
        return dist, paths


class _Particle:
    __slots__ = ("state", "node", "target", "blocked_for")

    def __init__(self, state: int, node: int, target: int):
        self.state = state
        self.node = node
        self.target = target
        self.blocked_for = 0


def particle_hopping(inst: SocInstance, p: HoppingParams) -> SimOutcome:
    """Occupation ratios under charge- and target-aware routing.

    Requests arrive at the configured expected rate; each is a feasible
    (s, t) pair (infeasible draws are resampled, or skipped when an explicit
    pair list is given). A particle occupies one node per step, moves once
    per step in a seeded random order, and leaves the network on arrival.
    """
    g = inst.graph
    n = g.n
    sg = build_state_graph(inst, starred=True)
    tables = _TargetTables(sg)
    rng = np.random.default_rng(p.seed)

    # Injection schedule: whole part of the rate is deterministic, the
    # fractional part is a Bernoulli coin per step.
    base = int(np.floor(p.injection_rate))
    frac = p.injection_rate - base
    requested = 0
    infeasible_skipped = 0
    resampled = 0
    budget = p.max_injections
    schedule: list[list[tuple[int, int]]] = []
    for _ in range(p.duration):
        k = base + (1 if frac > 0 and rng.random() < frac else 0)
        step_requests: list[tuple[int, int]] = []
        for _ in range(k):
            if budget is not None and requested >= budget:
                break
            if p.pairs is not None:
                s, t = p.pairs[int(rng.integers(len(p.pairs)))]
                requested += 1
                dist, _ = tables.for_target(t)
                if dist[sg.source_state(s)] < 0:
                    infeasible_skipped += 1
                    continue
            else:
                for _ in range(1000):
                    s = int(rng.integers(n))
                    t = int(rng.integers(n))
                    if s == t:
                        continue
                    dist, _ = tables.for_target(t)
                    if dist[sg.source_state(s)] >= 0:
                        break
                    resampled += 1
                else:
                    raise RuntimeError("could not sample a feasible pair in 1000 draws")
                requested += 1
            step_requests.append((s, t))
        schedule.append(step_requests)

    occupied = np.zeros(n, dtype=bool)
    occ_steps = np.zeros(n, dtype=np.int64)
    particles: dict[int, _Particle] = {}
    pending: deque[tuple[int, int]] = deque()
    next_pid = 0
    placed = 0
    completed = 0
    delayed_steps = 0

    def choose_next(part: _Particle) -> int:
        """Pick the particle's next state; the caller blocks on occupancy."""
        dist, paths = tables.for_target(part.target)
        succ = sg.out_states(part.state)
        succ = succ[succ < sg.n_numeric]  # sink arcs are not moves
        if p.policy == "shortest-feasible":
            cand = succ[dist[succ] == dist[part.state] - 1]
            weights = paths[cand]
        else:
            cand = succ[dist[succ] >= 0]  # any feasibility-preserving move
            weights = np.ones(cand.shape[0])
        assert cand.shape[0] > 0, "particle stranded: no feasible continuation"
        free = ~occupied[cand % n]
        stalled = part.blocked_for
        if p.stall_reroute_after is not None and stalled >= p.stall_reroute_after and free.any():
            cand, weights = cand[free], weights[free]
        elif (
            p.policy == "shortest-feasible"
            and p.stall_escape_after is not None
            and stalled >= p.stall_escape_after
        ):
            wider = succ[dist[succ] >= 0]
            wfree = ~occupied[wider % n]
            if wfree.any():
                cand, weights = wider[wfree], np.ones(int(wfree.sum()))
        total = float(weights.sum())
        r = rng.random() * total
        pick = int(np.searchsorted(np.cumsum(weights), r, side="right"))
        return int(cand[min(pick, cand.shape[0] - 1)])

    for step in range(p.duration):
        # Move existing particles in a fresh random order; blocked moves are
        # not retried within the step, but cells freed earlier in the order
        # are available to later particles.
        pids = list(particles.keys())
        arrivals: list[int] = []
        for idx in rng.permutation(len(pids)) if pids else []:
            pid = pids[int(idx)]
            part = particles[pid]
            nxt = choose_next(part)
            node = nxt % n
            if occupied[node]:
                part.blocked_for += 1
                continue
            occupied[part.node] = False
            occupied[node] = True
            part.state = nxt
            part.node = node
            part.blocked_for = 0
            if node == part.target:
                arrivals.append(pid)

        # Pending injections enter when their source is free.
        pending.extend(schedule[step])
        still: deque[tuple[int, int]] = deque()
        while pending:
            s, t = pending.popleft()
            if occupied[s]:
                delayed_steps += 1
                still.append((s, t))
                continue
            occupied[s] = True
            particles[next_pid] = _Particle(sg.source_state(s), s, t)
            next_pid += 1
            placed += 1
        pending = still

        occ_steps[occupied] += 1

        for pid in arrivals:
            part = particles.pop(pid)
            occupied[part.node] = False
            completed += 1
        assert placed == completed + len(particles)
        if __debug__ and particles:
            nodes = [q.node for q in particles.values()]
            assert len(set(nodes)) == len(nodes), "occupancy exclusivity violated"

    meta = {
        "simulation": "hopping",
        "policy": p.policy,
        "duration": p.duration,
        "injection_rate": p.injection_rate,
        "seed": p.seed,
        "kappa": inst.kappa,
        "omega": inst.omega.sorted_members(),
        "requested": requested,
        "placed": placed,
        "completed": completed,
        "in_flight_at_end": len(particles),
        "pending_at_end": len(pending),
        "delayed_injection_steps": delayed_steps,
        "infeasible_skipped": infeasible_skipped,
        "resampled_draws": resampled,
    }
    logger.info(
        "hopping: %d requested, %d placed, %d completed, %d in flight",
        requested, placed, completed, len(particles),
    )
    return SimOutcome(occ_steps / p.duration, list(g.labels), meta)
