"""Sequential diversification strategies on an activity-relatedness graph.

Dynamics: starting from an active set, a planner targets exactly one inactive
activity per period; the attempt succeeds with probability
|active neighbors| / degree and is retried (geometrically) until it succeeds,
re-targeting allowed each period. Because failures leave the state unchanged,
any deterministic policy induces a fixed activation order, and its expected
completion time is the closed form sum of 1/p along that order. The optimal
policy is the exact minimizer of the subset-DP recursion
V(S) = min_a [1/p(a|S) + V(S + a)], V(complete) = 0.

All ties are broken toward the lexicographically lowest activity id.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import CapacityError, InfeasibleTargetError, UnknownIdError
from .metrics import ProximityNetwork

#: hard cap on inactive nodes for the exact subset DP (2^22 states)
DP_CAPACITY = 22

_Z95 = NormalDist().inv_cdf(0.975)


@dataclass(frozen=True, eq=False)
class ActivityGraph:
    """Undirected activity graph; isolated nodes are pruned at construction."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]   # (u, v) with u < v, sorted
    pruned: tuple[str, ...] = ()

    @classmethod
    def from_edges(cls, nodes, edges) -> "ActivityGraph":
        nodes = sorted(set(nodes))
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u not in nodes or v not in nodes:
                missing = u if u not in nodes else v
                raise UnknownIdError("activity", missing)
            norm.add((min(u, v), max(u, v)))
        if not norm:
            raise ValueError("activity graph has no edges")
        touched = {x for e in norm for x in e}
        pruned = tuple(n for n in nodes if n not in touched)
        kept = tuple(n for n in nodes if n in touched)
        return cls(kept, tuple(sorted(norm)), pruned)

    @property
    def adjacency(self) -> dict[str, frozenset[str]]:
        adj = self.__dict__.get("_adj_cache")
        if adj is None:
            d: dict[str, set[str]] = {n: set() for n in self.nodes}
            for u, v in self.edges:
                d[u].add(v)
                d[v].add(u)
            adj = {n: frozenset(s) for n, s in d.items()}
            self.__dict__["_adj_cache"] = adj
        return adj

    def degree(self, node: str) -> int:
        try:
            return len(self.adjacency[node])
        except KeyError:
            raise UnknownIdError("activity", node) from None


def build_activity_graph(phi: ProximityNetwork, edge_threshold: float) -> ActivityGraph:
    """Threshold the proximity network into an unweighted relatedness graph."""
    if not 0 < edge_threshold <= 1:
        raise ValueError(f"edge threshold must be in (0, 1], got {edge_threshold}")
    acts = phi.activities
    edges = [
        (acts[i], acts[j])
        for i in range(len(acts))
        for j in range(i + 1, len(acts))
        if phi.values[i, j] >= edge_threshold
    ]
    if not edges:
        raise ValueError(
            f"no proximity values reach the edge threshold {edge_threshold}"
        )
    return ActivityGraph.from_edges(acts, edges)


def entry_probability(g: ActivityGraph, active: frozenset[str], target: str) -> float:
    """p(target | active) = |neighbors(target) ∩ active| / degree(target)."""
    if target not in g.adjacency:
        raise UnknownIdError("activity", target)
    if target in active:
        raise ValueError(f"target {target!r} is already active")
    nbrs = g.adjacency[target]
    return len(nbrs & active) / len(nbrs)


@dataclass(frozen=True)
class Policy:
    """One of: greedy, optimal, lookahead (with depth), or a fixed order."""

    kind: str
    depth: int | None = None
    order: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("greedy", "optimal", "lookahead", "order"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "lookahead" and (self.depth is None or self.depth < 1):
            raise ValueError("lookahead policy needs depth >= 1")
        if self.kind == "order" and not self.order:
            raise ValueError("order policy needs a non-empty target order")

    @classmethod
    def parse(cls, spec: str, order: tuple[str, ...] | None = None) -> "Policy":
        """Parse 'greedy' | 'optimal' | 'lookahead:K' | 'order' policy strings."""
        if spec == "greedy":
            return cls("greedy")
        if spec == "optimal":
            return cls("optimal")
        if spec.startswith("lookahead:"):
            try:
                k = int(spec.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad lookahead depth in {spec!r}") from None
            return cls("lookahead", depth=k)
        if spec == "order":
            return cls("order", order=order)
        raise ValueError(f"unknown policy {spec!r}")

    def label(self) -> str:
        if self.kind == "lookahead":
            return f"lookahead:{self.depth}"
        return self.kind


@dataclass(frozen=True, eq=False)
class OptimalTable:
    """Exact DP solution: V and the minimizing target for every superset of S0."""

    nodes: tuple[str, ...]            # inactive nodes at S0, sorted (bit order)
    start_active: frozenset[str]
    values: np.ndarray                # V indexed by inactive-set bitmask
    best: np.ndarray                  # argmin action index, -1 for the full mask

    def _mask(self, active: frozenset[str]) -> int:
        mask = 0
        for i, n in enumerate(self.nodes):
            if n in active:
                mask |= 1 << i
        return mask

    def value_for(self, active: frozenset[str]) -> float:
        return float(self.values[self._mask(active)])

    def action_for(self, active: frozenset[str]) -> str | None:
        b = int(self.best[self._mask(active)])
        return None if b < 0 else self.nodes[b]


@dataclass(frozen=True, eq=False)
class SimulationStats:
    """Seeded Monte-Carlo summary of completion times."""

    trials: int
    seed: int
    mean: float
    stderr: float
    ci_level: float
    ci_lo: float
    ci_hi: float
    activations_by_period: np.ndarray  # index t-1 = number of activations in period t

    def __post_init__(self):
        a = np.ascontiguousarray(self.activations_by_period, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "activations_by_period", a)


@dataclass(frozen=True, eq=False)
class StrategyEvaluation:
    """Expected completion time of a policy plus its induced plan."""

    expected_time: float
    method: str                        # "exact-dp" | "closed-form-order"
    policy: str
    plan: tuple[str, ...]
    probabilities: tuple[float, ...]
    tie_break: str = "lowest-id"
    table: OptimalTable | None = None
    mc: SimulationStats | None = None

    def to_payload(self) -> dict:
        ci = None
        if self.mc is not None:
            ci = {
                "trials": self.mc.trials,
                "seed": self.mc.seed,
                "mean": self.mc.mean,
                "stderr": self.mc.stderr,
                "level": self.mc.ci_level,
                "lo": self.mc.ci_lo,
                "hi": self.mc.ci_hi,
            }
        return {
            "expected_time": self.expected_time,
            "method": self.method,
            "policy": self.policy,
            "plan": list(self.plan),
            "probabilities": list(self.probabilities),
            "tie_break": self.tie_break,
            "ci": ci,
        }


class _Engine:
    """Bitmask view of one instance: nodes indexed, active set as int mask."""

    def __init__(self, g: ActivityGraph, active: frozenset[str]):
        unknown = active - set(g.nodes)
        if unknown:
            raise UnknownIdError("activity", sorted(unknown)[0])
        self.g = g
        self.start_active = frozenset(active)
        self.inactive = tuple(n for n in g.nodes if n not in active)  # sorted
        idx = {n: i for i, n in enumerate(self.inactive)}
        adj = g.adjacency
        self.deg = np.array([len(adj[n]) for n in self.inactive], dtype=float)
        self.base = np.array(
            [len(adj[n] & active) for n in self.inactive], dtype=np.int64
        )
        self.nmask = np.zeros(len(self.inactive), dtype=np.int64)
        for i, n in enumerate(self.inactive):
            m = 0
            for nb in adj[n]:
                if nb in idx:
                    m |= 1 << idx[nb]
            self.nmask[i] = m
        self._check_reachable()

    def _check_reachable(self):
        """Every inactive node must be graph-reachable from the active set."""
        seen = set(self.start_active)
        stack = [n for n in self.start_active]
        adj = self.g.adjacency
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        for n in self.inactive:
            if n not in seen:
                raise InfeasibleTargetError(n)

    def k(self) -> int:
        return len(self.inactive)

    def probs_at(self, mask: int) -> np.ndarray:
        """Entry probability of every inactive-index node at the given mask.

        Nodes already in the mask get probability -1 (sentinel, never argmax).
        """
        active_n = self.base + np.array(
            [int(m & mask).bit_count() for m in self.nmask], dtype=np.int64
        )
        p = active_n / self.deg
        in_mask = ((mask >> np.arange(self.k())) & 1).astype(bool)
        p[in_mask] = -1.0
        return p


def _induced_order_greedy(eng: _Engine) -> tuple[list[int], list[float]]:
    order, probs = [], []
    mask = 0
    full = (1 << eng.k()) - 1
    while mask != full:
        p = eng.probs_at(mask)
        i = int(np.argmax(np.where(p > 0, p, -1.0)))  # first max = lowest id on ties
        pi = p[i]
        if pi <= 0:
            remaining = [n for j, n in enumerate(eng.inactive) if not mask >> j & 1]
            raise InfeasibleTargetError(remaining[0])
        order.append(i)
        probs.append(float(pi))
        mask |= 1 << i
    return order, probs


def _lookahead_value(eng: _Engine, mask: int, depth: int,
                     memo: dict[tuple[int, int], float]) -> float:
    """Depth-limited DP value; depth 0 scores a state by its remaining count."""
    full = (1 << eng.k()) - 1
    if mask == full:
        return 0.0
    if depth == 0:
        return float(eng.k() - int(mask).bit_count())
    key = (mask, depth)
    if key in memo:
        return memo[key]
    p = eng.probs_at(mask)
    best = math.inf
    for i in range(eng.k()):
        if p[i] > 0:
            v = 1.0 / p[i] + _lookahead_value(eng, mask | (1 << i), depth - 1, memo)
            if v < best:
                best = v
    memo[key] = best
    return best


def _induced_order_lookahead(eng: _Engine, depth: int) -> tuple[list[int], list[float]]:
    order, probs = [], []
    mask = 0
    full = (1 << eng.k()) - 1
    memo: dict[tuple[int, int], float] = {}
    while mask != full:
        p = eng.probs_at(mask)
        best_i, best_v = None, math.inf
        for i in range(eng.k()):  # ascending index = lowest id wins ties
            if p[i] <= 0:
                continue
            v = 1.0 / p[i] + _lookahead_value(eng, mask | (1 << i), depth - 1, memo)
            if v < best_v:
                best_i, best_v = i, v
        if best_i is None:
            remaining = [n for j, n in enumerate(eng.inactive) if not mask >> j & 1]
            raise InfeasibleTargetError(remaining[0])
        order.append(best_i)
        probs.append(float(p[best_i]))
        mask |= 1 << best_i
    return order, probs


def _solve_dp(eng: _Engine) -> OptimalTable:
    k = eng.k()
    if k > DP_CAPACITY:
        raise CapacityError(k, DP_CAPACITY)
    size = 1 << k
    V = np.full(size, np.inf)
    best = np.full(size, -1, dtype=np.int8)
    V[size - 1] = 0.0
    masks = np.arange(size, dtype=np.int64)
    pops = np.bitwise_count(masks.astype(np.uint64)).astype(np.int64)
    deg = eng.deg
    base = eng.base
    nmask = eng.nmask
    for t in range(k - 1, -1, -1):
        layer = masks[pops == t]
        layer_best_v = np.full(layer.shape, np.inf)
        layer_best_a = np.full(layer.shape, -1, dtype=np.int8)
        for a in range(k):
            bit = 1 << a
            feas = (layer & bit) == 0
            if not feas.any():
                continue
            sub = layer[feas]
            active_n = base[a] + np.bitwise_count(
                (sub & int(nmask[a])).astype(np.uint64)
            ).astype(np.int64)
            with np.errstate(divide="ignore"):
                cand = np.where(
                    active_n > 0,
                    deg[a] / np.maximum(active_n, 1) + V[sub | bit],
                    np.inf,
                )
            cur = layer_best_v[feas]
            upd = cand < cur  # strict: earlier (lower-id) action keeps ties
            if upd.any():
                idx = np.nonzero(feas)[0][upd]
                layer_best_v[idx] = cand[upd]
                layer_best_a[idx] = a
        V[layer] = layer_best_v
        best[layer] = layer_best_a
    return OptimalTable(eng.inactive, eng.start_active, V, best)


def _induced_order_optimal(eng: _Engine, table: OptimalTable) -> tuple[list[int], list[float]]:
    order, probs = [], []
    mask = 0
    full = (1 << eng.k()) - 1
    while mask != full:
        a = int(table.best[mask])
        if a < 0:
            remaining = [n for j, n in enumerate(eng.inactive) if not mask >> j & 1]
            raise InfeasibleTargetError(remaining[0])
        probs.append(float(eng.probs_at(mask)[a]))
        order.append(a)
        mask |= 1 << a
    return order, probs


def expected_completion(g: ActivityGraph, active: frozenset[str],
                        policy: Policy) -> StrategyEvaluation:
    """Expected completion time of a policy, exactly.

    Deterministic policies (greedy, lookahead, fixed order) induce a fixed
    activation order; the expectation is the closed form sum of 1/p along it.
    The optimal policy is evaluated by exact subset DP (and also reports its
    induced order). An already-complete start yields an empty plan and E = 0.
    """
    eng = _Engine(g, active)
    if eng.k() == 0:
        return StrategyEvaluation(0.0, "closed-form-order" if policy.kind != "optimal"
                                  else "exact-dp", policy.label(), (), ())
    table = None
    if policy.kind == "order":
        order_ids = list(policy.order or ())
        mentioned = set(order_ids)
        needed = set(eng.inactive)
        if mentioned != needed:
            missing = sorted(needed - mentioned) + sorted(mentioned - needed)
            raise ValueError(
                f"fixed order must cover exactly the inactive activities; "
                f"mismatch on {missing[0]!r}"
            )
        idx = {n: i for i, n in enumerate(eng.inactive)}
        order, probs, mask = [], [], 0
        for n in order_ids:
            i = idx[n]
            p = eng.probs_at(mask)[i]
            if p <= 0:
                raise InfeasibleTargetError(n)
            order.append(i)
            probs.append(float(p))
            mask |= 1 << i
        method = "closed-form-order"
    elif policy.kind == "greedy":
        order, probs = _induced_order_greedy(eng)
        method = "closed-form-order"
    elif policy.kind == "lookahead":
        order, probs = _induced_order_lookahead(eng, policy.depth or 1)
        method = "closed-form-order"
    else:  # optimal
        table = _solve_dp(eng)
        order, probs = _induced_order_optimal(eng, table)
        method = "exact-dp"

    expected = float(sum(1.0 / p for p in probs))
    if policy.kind == "optimal":
        expected = float(table.values[0])  # DP value; equals the plan sum
    return StrategyEvaluation(
        expected_time=expected, method=method, policy=policy.label(),
        plan=tuple(eng.inactive[i] for i in order),
        probabilities=tuple(probs), table=table,
    )


def optimal_policy(g: ActivityGraph, active: frozenset[str]) -> StrategyEvaluation:
    """Exact optimal policy: V(S) table plus the minimizing target per state."""
    return expected_completion(g, active, Policy("optimal"))


def simulate(g: ActivityGraph, active: frozenset[str], policy: Policy,
             trials: int, seed: int, ci_level: float = 0.95) -> StrategyEvaluation:
    """Seeded Monte Carlo of the policy's completion time.

    Trial t consumes the t-th fixed-length window of a counter-based Philox
    stream keyed by the seed (one uniform per activation, inverse-CDF
    geometric sampling), so every trial's draws are a pure function of
    (seed, trial index) and the result is bit-identical for a given seed.
    Returns the analytic evaluation with Monte-Carlo stats attached.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials for a standard error")
    ev = expected_completion(g, active, policy)
    probs = np.array(ev.probabilities)
    if probs.size == 0:
        stats = SimulationStats(trials, seed, 0.0, 0.0, ci_level, 0.0, 0.0,
                                np.zeros(0, dtype=np.int64))
        return StrategyEvaluation(ev.expected_time, ev.method, ev.policy, ev.plan,
                                  ev.probabilities, ev.tie_break, ev.table, stats)
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random((trials, probs.size))
    with np.errstate(divide="ignore"):
        draws = np.floor(np.log1p(-u) / np.log1p(-probs)).astype(np.int64) + 1
    draws = np.maximum(draws, 1)  # p == 1 gives log 0 / -inf -> 1 attempt
    times = draws.sum(axis=1)
    completion_of = np.cumsum(draws, axis=1)
    counts = np.bincount(completion_of.ravel())[1:]  # period t at index t-1
    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / math.sqrt(trials))
    z = NormalDist().inv_cdf(0.5 + ci_level / 2)
    stats = SimulationStats(trials, seed, mean, stderr, ci_level,
                            mean - z * stderr, mean + z * stderr, counts)
    return StrategyEvaluation(ev.expected_time, ev.method, ev.policy, ev.plan,
                              ev.probabilities, ev.tie_break, ev.table, stats)


@dataclass(frozen=True)
class TargetInfo:
    activity: str
    omega: float
    bridging: int


@dataclass(frozen=True)
class TargetClassification:
    """Non-specialized activities split at a relatedness threshold.

    The bridging score counts how many distinct connected components of the
    location's active set an activity's neighborhood touches — unrelated
    activities with high bridging can knit separate clusters together.
    """

    related: tuple[TargetInfo, ...]
    unrelated: tuple[TargetInfo, ...]


def classify_targets(g: ActivityGraph, active: frozenset[str],
                     omega_row: dict[str, float],
                     related_threshold: float) -> TargetClassification:
    """Split inactive activities by density >= threshold; annotate bridging."""
    adj = g.adjacency
    comp_of: dict[str, int] = {}
    cid = 0
    for n in sorted(active & set(g.nodes)):
        if n in comp_of:
            continue
        stack = [n]
        comp_of[n] = cid
        while stack:
            x = stack.pop()
            for nb in adj[x]:
                if nb in active and nb not in comp_of:
                    comp_of[nb] = cid
                    stack.append(nb)
        cid += 1

    related, unrelated = [], []
    for n in g.nodes:
        if n in active:
            continue
        if n not in omega_row:
            raise UnknownIdError("activity", n)
        bridging = len({comp_of[nb] for nb in adj[n] if nb in comp_of})
        info = TargetInfo(n, float(omega_row[n]), bridging)
        if info.omega >= related_threshold:
            related.append(info)
        else:
            unrelated.append(info)
    related.sort(key=lambda t: (-t.omega, t.activity))
    unrelated.sort(key=lambda t: (-t.bridging, -t.omega, t.activity))
    return TargetClassification(tuple(related), tuple(unrelated))


@dataclass(frozen=True)
class PortfolioSchedule:
    """Bell-shaped allocation of the unrelated-bet share along development."""

    peak: float = 0.0
    width: float = 1.0
    max_unrelated: float = 0.5

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError(f"width must be > 0, got {self.width}")
        if not 0 <= self.max_unrelated <= 1:
            raise ValueError(f"max_unrelated must be in [0, 1], got {self.max_unrelated}")


@dataclass(frozen=True)
class PortfolioSplit:
    eci: float
    related_share: float
    unrelated_share: float
    schedule: PortfolioSchedule

    def to_payload(self) -> dict:
        return {
            "eci": self.eci,
            "related_share": self.related_share,
            "unrelated_share": self.unrelated_share,
            "schedule": {
                "peak": self.schedule.peak,
                "width": self.schedule.width,
                "max_unrelated": self.schedule.max_unrelated,
            },
        }


def portfolio_split(eci: float, schedule: PortfolioSchedule = PortfolioSchedule()) -> PortfolioSplit:
    """Two-bucket budget split; the unrelated share peaks at mid development.

    unrelated = max_unrelated * exp(-(eci - peak)^2 / (2 width^2)); related is
    the complement.
    """
    unrelated = schedule.max_unrelated * math.exp(
        -((eci - schedule.peak) ** 2) / (2.0 * schedule.width**2)
    )
    return PortfolioSplit(float(eci), 1.0 - unrelated, unrelated, schedule)


def load_instance(source: str | dict) -> tuple[ActivityGraph, frozenset[str], str | None, dict]:
    """Load a strategy instance from JSON text/dict.

    Format: {"nodes": [...], "edges": [[u, v], ...], "active": [...],
             "policy": "greedy", "params": {...}} — policy/params optional.
    """
    obj = json.loads(source) if isinstance(source, str) else source
    for key in ("nodes", "edges", "active"):
        if key not in obj:
            raise ValueError(f"instance is missing the {key!r} field")
    g = ActivityGraph.from_edges(obj["nodes"], [tuple(e) for e in obj["edges"]])
    active = frozenset(obj["active"])
    unknown = active - set(g.nodes)
    if unknown:
        raise UnknownIdError("activity", sorted(unknown)[0])
    if not active:
        raise ValueError("instance has an empty active set")
    return g, active, obj.get("policy"), dict(obj.get("params") or {})
