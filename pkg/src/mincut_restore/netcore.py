"""Graph data model, terminal-arc normalization, cut/energy evaluation, DIMACS I/O.

Capacities are plain Python integers (fixed-point scaled), so arithmetic
never overflows silently.  Node ids: source is 0, usual nodes are 1..n,
sink is n+1.  Inside a GNetwork usual nodes are re-indexed 0..n-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Tuple

CutLabeling = Tuple[int, ...]


class NetworkError(ValueError):
    pass


class DimacsError(NetworkError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _check_capacity(cap: int) -> int:
    cap = int(cap)
    if cap < 0:
        raise NetworkError(f"negative capacity {cap}")
    return cap


@dataclass(frozen=True)
class Network:
    """Directed s-t network.  Arcs are (from, to, capacity) with s=0, t=n+1."""

    num_usual: int
    arcs: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        n = self.num_usual
        if n < 0:
            raise NetworkError("negative node count")
        arcs = tuple((int(u), int(v), _check_capacity(c)) for u, v, c in self.arcs)
        for u, v, _ in arcs:
            if not (0 <= u <= n + 1 and 0 <= v <= n + 1):
                raise NetworkError(f"arc ({u},{v}) references out-of-range node id")
            if u == v:
                raise NetworkError(f"self-arc at node {u}")
            if v == self.source:
                raise NetworkError(f"arc ({u},{v}) enters the source")
            if u == self.sink:
                raise NetworkError(f"arc ({u},{v}) leaves the sink")
        object.__setattr__(self, "arcs", arcs)

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return self.num_usual + 1


@dataclass
class GNetwork:
    """Network normalized so each usual node has exactly one terminal arc.

    y[i] = 1 means a source arc (s,i) of capacity lam[i]; y[i] = 0 means a
    sink arc (i,t).  beta_arcs are directed usual-usual arcs with 0-based
    ids.  offset is the constant absorbed by the normalization: for every
    labeling x, the cut capacity of the equivalent Network equals
    energy_U(x) + sum(lam[i]*y[i]) + offset.
    """

    num_usual: int
    lam: Tuple[int, ...]
    y: Tuple[int, ...]
    beta_arcs: Tuple[Tuple[int, int, int], ...]
    offset: int = 0
    # Layout hints used by the MNFC partitioner; not part of the cut model.
    grid_shape: Optional[Tuple[int, int]] = None
    layer_shape: Optional[Tuple[int, int, int]] = None
    _out: Optional[list] = field(default=None, repr=False, compare=False)
    _in: Optional[list] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = self.num_usual
        if len(self.lam) != n or len(self.y) != n:
            raise NetworkError("lam/y length mismatch")
        self.lam = tuple(_check_capacity(v) for v in self.lam)
        self.y = tuple(int(b) for b in self.y)
        if any(b not in (0, 1) for b in self.y):
            raise NetworkError("y entries must be bits")
        arcs = []
        for i, j, c in self.beta_arcs:
            i, j, c = int(i), int(j), _check_capacity(c)
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise NetworkError(f"bad beta arc ({i},{j})")
            arcs.append((i, j, c))
        self.beta_arcs = tuple(arcs)

    def out_adj(self) -> list:
        """Outgoing usual-arc adjacency: out_adj()[i] = [(j, cap), ...]."""
        if self._out is None:
            out = [[] for _ in range(self.num_usual)]
            for i, j, c in self.beta_arcs:
                out[i].append((j, c))
            self._out = out
        return self._out

    def in_adj(self) -> list:
        if self._in is None:
            inc = [[] for _ in range(self.num_usual)]
            for i, j, c in self.beta_arcs:
                inc[j].append((i, c))
            self._in = inc
        return self._in

    def terminal_weight_sum(self) -> int:
        """sum(lam[i]*y[i]); the labeling-independent part of the cut."""
        return sum(l for l, b in zip(self.lam, self.y) if b)

    def to_network(self) -> Network:
        """Equivalent Network with 1-based usual ids (offset not representable)."""
        n = self.num_usual
        arcs = []
        for i in range(n):
            if self.lam[i] == 0:
                continue
            if self.y[i]:
                arcs.append((0, i + 1, self.lam[i]))
            else:
                arcs.append((i + 1, n + 1, self.lam[i]))
        for i, j, c in self.beta_arcs:
            if c:
                arcs.append((i + 1, j + 1, c))
        return Network(n, tuple(arcs))


def normalize_to_G(net: Network) -> GNetwork:
    """Fold both-terminal nodes into one surviving arc plus a constant offset.

    When node i has source capacity a and sink capacity b, every s-t cut
    pays min(a, b) regardless of where i lands, so min(a, b) moves to the
    offset and the survivor keeps |a - b|.  Nodes with no terminal arc get
    a zero-capacity sink arc (y=0, lam=0).  Parallel usual arcs are summed.
    """
    n = net.num_usual
    src = [0] * n
    snk = [0] * n
    beta: dict = {}
    for u, v, c in net.arcs:
        if u == net.source:
            src[v - 1] += c
        elif v == net.sink:
            snk[u - 1] += c
        else:
            key = (u - 1, v - 1)
            beta[key] = beta.get(key, 0) + c
    lam, y = [], []
    offset = 0
    for i in range(n):
        a, b = src[i], snk[i]
        offset += min(a, b)
        if a > b:
            lam.append(a - b)
            y.append(1)
        else:
            lam.append(b - a)
            y.append(0)
    return GNetwork(
        num_usual=n,
        lam=tuple(lam),
        y=tuple(y),
        beta_arcs=tuple((i, j, c) for (i, j), c in sorted(beta.items())),
        offset=offset,
    )


def cut_capacity(g: GNetwork, x: Sequence[int]) -> int:
    """Capacity of the s-t cut induced by labeling x (1 = source side)."""
    if len(x) != g.num_usual:
        raise NetworkError("labeling length mismatch")
    total = g.offset
    for i in range(g.num_usual):
        if x[i] and not g.y[i]:
            total += g.lam[i]
        elif not x[i] and g.y[i]:
            total += g.lam[i]
    for i, j, c in g.beta_arcs:
        if x[i] and not x[j]:
            total += c
    return total


def energy_U(g: GNetwork, x: Sequence[int]) -> int:
    """Pseudo-Boolean energy sharing argmins with cut_capacity.

    cut_capacity(g, x) == energy_U(g, x) + terminal_weight_sum + offset.
    """
    if len(x) != g.num_usual:
        raise NetworkError("labeling length mismatch")
    total = 0
    for i in range(g.num_usual):
        if x[i]:
            total += g.lam[i] * (1 - 2 * g.y[i])
    for i, j, c in g.beta_arcs:
        if x[i] and not x[j]:
            total += c
    return total


def parse_dimacs(text) -> Network:
    """Parse DIMACS max-flow text into a Network.

    File node ids are 1-based; the designated source maps to 0, the sink to
    n+1, and the remaining ids map to 1..n preserving their order.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    num_nodes = num_arcs = None
    source = sink = None
    raw_arcs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "p":
            if num_nodes is not None:
                raise DimacsError("duplicate problem line", lineno)
            if len(parts) != 4 or parts[1] != "max":
                raise DimacsError(f"malformed problem line {line!r}", lineno)
            try:
                num_nodes, num_arcs = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed problem line {line!r}", lineno)
            if num_nodes < 2:
                raise DimacsError("need at least source and sink", lineno)
        elif kind == "n":
            if num_nodes is None:
                raise DimacsError("node designation before problem line", lineno)
            if len(parts) != 3 or parts[2] not in ("s", "t"):
                raise DimacsError(f"malformed node line {line!r}", lineno)
            nid = int(parts[1])
            if not (1 <= nid <= num_nodes):
                raise DimacsError(f"node id {nid} out of range", lineno)
            if parts[2] == "s":
                source = nid
            else:
                sink = nid
        elif kind == "a":
            if num_nodes is None:
                raise DimacsError("arc before problem line", lineno)
            if len(parts) != 4:
                raise DimacsError(f"malformed arc line {line!r}", lineno)
            try:
                u, v, cap = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"malformed arc line {line!r}", lineno)
            for nid in (u, v):
                if not (1 <= nid <= num_nodes):
                    raise DimacsError(f"node id {nid} out of range", lineno)
            if cap < 0:
                raise DimacsError(f"negative capacity {cap}", lineno)
            raw_arcs.append((u, v, cap))
        else:
            raise DimacsError(f"unknown line kind {kind!r}", lineno)
    if num_nodes is None:
        raise DimacsError("missing problem line")
    if source is None or sink is None:
        raise DimacsError("missing source/sink designation")
    if source == sink:
        raise DimacsError("source and sink coincide")
    n = num_nodes - 2
    mapping = {source: 0, sink: n + 1}
    next_id = 1
    for nid in range(1, num_nodes + 1):
        if nid not in mapping:
            mapping[nid] = next_id
            next_id += 1
    arcs = tuple((mapping[u], mapping[v], c) for u, v, c in raw_arcs)
    try:
        return Network(n, arcs)
    except NetworkError as exc:
        raise DimacsError(str(exc)) from exc


def write_dimacs(net: Network) -> str:
    """Serialize a Network; round-trips through parse_dimacs.

    Internal id k maps to file id k+1, so the source is file node 1 and the
    sink is the last node.  Arcs are emitted in (from, to) order.
    """
    n = net.num_usual
    lines = [f"p max {n + 2} {len(net.arcs)}", "n 1 s", f"n {n + 2} t"]
    for u, v, c in sorted(net.arcs):
        lines.append(f"a {u + 1} {v + 1} {c}")
    return "\n".join(lines) + "\n"
