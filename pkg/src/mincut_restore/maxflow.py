"""Exact max-flow with canonical minimal/maximal minimum-cut extraction.

Two interchangeable backends produce the same residual-reachability
answers: a scipy Dinic (fast, used whenever the flow bound fits in int32)
and a pure-Python Dinic on unbounded integers.  The canonical minimal cut
puts a node on the source side iff it is residual-reachable from s; the
canonical maximal cut puts a node on the sink side iff it residual-reaches
t.  These are the coordinate-wise least/greatest optimal labelings.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .netcore import CutLabeling, GNetwork, Network, NetworkError, normalize_to_G

_INT32_SAFE = 2**31 - 1


@dataclass
class FlowResult:
    """Completed solve: flow value plus residual adjacency for both BFS directions."""

    num_usual: int
    max_flow_value: int
    # residual[u] -> list of v with positive residual capacity u->v
    residual_out: list
    residual_in: list

    def reachable_from_source(self) -> Set[int]:
        return _bfs(self.residual_out, 0)

    def reaching_sink(self) -> Set[int]:
        return _bfs(self.residual_in, self.num_usual + 1)


def _bfs(adj: list, start: int) -> Set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def min_cut_minimal(fr: FlowResult) -> CutLabeling:
    """x_i = 1 iff usual node i is reachable from s in the residual graph."""
    reach = fr.reachable_from_source()
    return tuple(1 if i + 1 in reach else 0 for i in range(fr.num_usual))


def min_cut_maximal(fr: FlowResult) -> CutLabeling:
    """x_i = 0 iff usual node i can reach t in the residual graph."""
    reach = fr.reaching_sink()
    return tuple(0 if i + 1 in reach else 1 for i in range(fr.num_usual))


def max_flow(net: Network, backend: str = "auto") -> FlowResult:
    """Exact maximum s-t flow.  backend: auto | scipy | python."""
    if backend not in ("auto", "scipy", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "auto":
        backend = "scipy" if _int32_safe(net) else "python"
    if backend == "scipy":
        if not _int32_safe(net):
            raise OverflowError("capacities exceed the int32-safe scipy range")
        return _solve_scipy(net)
    return _solve_python(net)


def _int32_safe(net: Network) -> bool:
    # Flow value is bounded by both the total source-arc and sink-arc capacity.
    out_s = sum(c for u, _, c in net.arcs if u == net.source)
    in_t = sum(c for _, v, c in net.arcs if v == net.sink)
    if min(out_s, in_t) > _INT32_SAFE:
        return False
    return all(c <= _INT32_SAFE for _, _, c in net.arcs)


def _solve_scipy(net: Network) -> FlowResult:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_flow

    size = net.num_usual + 2
    if not net.arcs:
        return FlowResult(net.num_usual, 0, [[] for _ in range(size)], [[] for _ in range(size)])
    rows = np.fromiter((u for u, _, _ in net.arcs), dtype=np.int64)
    cols = np.fromiter((v for _, v, _ in net.arcs), dtype=np.int64)
    caps = np.fromiter((c for _, _, c in net.arcs), dtype=np.int64)
    cap = csr_matrix((caps, (rows, cols)), shape=(size, size))  # duplicates summed
    cap = cap.astype(np.int32)
    res = maximum_flow(cap, 0, size - 1)
    residual = cap - res.flow.astype(np.int32)  # antisymmetric flow: reverse residual included
    residual.eliminate_zeros()
    rout: list = [[] for _ in range(size)]
    rin: list = [[] for _ in range(size)]
    coo = residual.tocoo()
    for u, v, r in zip(coo.row, coo.col, coo.data):
        if r > 0:
            rout[u].append(int(v))
            rin[v].append(int(u))
    return FlowResult(net.num_usual, int(res.flow_value), rout, rin)


def _solve_python(net: Network) -> FlowResult:
    """Dinic on adjacency arrays with Python ints (no overflow)."""
    size = net.num_usual + 2
    s, t = 0, size - 1
    to: list = []
    cap: list = []
    head: list = [[] for _ in range(size)]

    def add_edge(u, v, c):
        head[u].append(len(to))
        to.append(v)
        cap.append(c)
        head[v].append(len(to))
        to.append(u)
        cap.append(0)

    merged: Dict[Tuple[int, int], int] = {}
    for u, v, c in net.arcs:
        merged[(u, v)] = merged.get((u, v), 0) + c
    for (u, v), c in sorted(merged.items()):
        add_edge(u, v, c)

    flow = 0
    level = [0] * size
    it = [0] * size

    def augment() -> int:
        # One augmenting path in the level graph, current-arc pointers kept.
        path = []
        u = s
        while True:
            if u == t:
                pushed = min(cap[e] for e in path)
                for e in path:
                    cap[e] -= pushed
                    cap[e ^ 1] += pushed
                return pushed
            advanced = False
            while it[u] < len(head[u]):
                e = head[u][it[u]]
                v = to[e]
                if cap[e] > 0 and level[v] == level[u] + 1:
                    path.append(e)
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if advanced:
                continue
            if u == s:
                return 0
            level[u] = -1  # dead end, prune for this phase
            e = path.pop()
            u = to[e ^ 1]
            it[u] += 1

    while True:
        for i in range(size):
            level[i] = -1
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in head[u]:
                v = to[e]
                if cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        if level[t] < 0:
            break
        for i in range(size):
            it[i] = 0
        while True:
            pushed = augment()
            if not pushed:
                break
            flow += pushed

    rout: list = [[] for _ in range(size)]
    rin: list = [[] for _ in range(size)]
    for e in range(len(to)):
        if cap[e] > 0:
            u, v = to[e ^ 1], to[e]
            rout[u].append(v)
            rin[v].append(u)
    return FlowResult(net.num_usual, flow, rout, rin)


@dataclass(frozen=True)
class FrontierCondition:
    """Cell E plus an assumed labeling of everything outside it.

    Nodes in `fixed` take their fixed bit; remaining outside nodes take the
    `boundary` value (a constant 0/1, or an explicit per-node mapping).
    """

    cell: FrozenSet[int]
    boundary: Union[int, Mapping[int, int]] = 0
    fixed: Mapping[int, int] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.fixed is None:
            object.__setattr__(self, "fixed", {})
        overlap = self.cell & set(self.fixed)
        if overlap:
            raise NetworkError(f"fixed nodes inside the cell: {sorted(overlap)[:5]}")

    def outside_label(self, j: int) -> int:
        if j in self.fixed:
            return self.fixed[j]
        if isinstance(self.boundary, int):
            return self.boundary
        return self.boundary[j]


def restricted_solve(g: GNetwork, fc: FrontierCondition, pick: str = "minimal") -> Dict[int, int]:
    """Minimize the energy over the cell with the frontier folded into terminals.

    The cell subnetwork keeps intra-cell usual arcs; each cell node i gets
    source capacity lam_i*y_i plus the beta mass of in-arcs from outside
    nodes labeled 1, and sink capacity lam_i*(1-y_i) plus the beta mass of
    out-arcs to outside nodes labeled 0.  The canonical cut requested by
    `pick` is returned as {node: bit} over the cell.
    """
    if pick not in ("minimal", "maximal"):
        raise ValueError(f"unknown pick {pick!r}")
    nodes = sorted(fc.cell)
    local = {nid: k for k, nid in enumerate(nodes)}
    k = len(nodes)
    out_adj = g.out_adj()
    in_adj = g.in_adj()
    arcs = []
    for nid in nodes:
        i = local[nid]
        d_s = g.lam[nid] * g.y[nid]
        d_t = g.lam[nid] * (1 - g.y[nid])
        for j, c in in_adj[nid]:
            if j not in fc.cell and fc.outside_label(j) == 1:
                d_s += c
        for j, c in out_adj[nid]:
            if j not in fc.cell:
                if fc.outside_label(j) == 0:
                    d_t += c
            elif c:
                arcs.append((i + 1, local[j] + 1, c))
        if d_s:
            arcs.append((0, i + 1, d_s))
        if d_t:
            arcs.append((i + 1, k + 1, d_t))
    sub = normalize_to_G(Network(k, tuple(arcs)))
    fr = max_flow(sub.to_network())
    x = min_cut_minimal(fr) if pick == "minimal" else min_cut_maximal(fr)
    return {nid: x[local[nid]] for nid in nodes}


def solve_gnetwork(g: GNetwork, pick: str = "minimal") -> Tuple[CutLabeling, int]:
    """Global solve: canonical cut labeling and its cut capacity (incl. offset)."""
    fr = max_flow(g.to_network())
    x = min_cut_minimal(fr) if pick == "minimal" else min_cut_maximal(fr)
    return x, fr.max_flow_value + g.offset
