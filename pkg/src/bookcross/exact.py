"""Exact k-page crossing numbers via max-k-cut on the chord-overlap graph.

The crossing number of K_n in k pages equals C(n,4) minus the maximum
k-cut of the chord-overlap graph: pages induce vertex colors and
same-colored adjacent chords are crossings.  This module carries the
embedded branch-and-bound solver, a weighted Max-SAT (DIMACS WCNF)
export/import for cross-checking with external solvers, and a brute
force oracle for tiny instances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import ceil, comb
from typing import TextIO

import numpy as np

from .chordgraph import ChordGraph, InputError, build_chord_graph
from .drawings import Drawing, dds_drawing

__all__ = [
    "CutAssignment",
    "WcnfInstance",
    "ExactResult",
    "Budget",
    "cut_value",
    "coloring_from_drawing",
    "drawing_from_cut",
    "max_k_cut_bnb",
    "nu_exact",
    "brute_force_nu",
    "encode_wcnf",
    "emit_dimacs_wcnf",
    "parse_wcnf_model",
]


@dataclass(frozen=True)
class CutAssignment:
    """A k-coloring of the chord-overlap graph's vertices."""

    graph_n: int
    k: int
    color_of: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= c < self.k for c in self.color_of):
            raise InputError("color index out of range")


@dataclass(frozen=True)
class Budget:
    """Search limits; None means unlimited."""

    max_nodes: int | None = None
    max_seconds: float | None = None


@dataclass
class ExactResult:
    n: int
    k: int
    nu: int
    cut_size: int
    assignment: CutAssignment
    proved_optimal: bool
    nodes_explored: int
    wall_time: float

    def __post_init__(self):
        if self.nu + self.cut_size != comb(self.n, 4):
            raise InputError("nu + cut_size must equal C(n,4)")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "nu": self.nu,
            "cut": self.cut_size,
            "optimal": self.proved_optimal,
            "nodes": self.nodes_explored,
            "seconds": round(self.wall_time, 3),
        }


def cut_value(g: ChordGraph, a: CutAssignment) -> int:
    """Number of edges of g whose endpoints got different colors."""
    if len(a.color_of) != g.num_vertices or a.graph_n != g.n:
        raise InputError(
            f"assignment for n={a.graph_n} with {len(a.color_of)} colors "
            f"does not fit graph n={g.n} with {g.num_vertices} vertices"
        )
    colors = np.array(a.color_of)
    differ = colors[:, None] != colors[None, :]
    return int((g.adjacency & differ).sum()) // 2


def coloring_from_drawing(g: ChordGraph, dr: Drawing) -> CutAssignment:
    """Read each chord's page as its color."""
    if dr.n != g.n:
        raise InputError(f"drawing is of K_{dr.n}, graph is for n={g.n}")
    colors = tuple(dr.page_of[(c.a, c.b)] for c in g.chords)
    return CutAssignment(graph_n=g.n, k=dr.k, color_of=colors)


def drawing_from_cut(a: CutAssignment, g: ChordGraph | None = None) -> Drawing:
    """Turn colors back into pages.

    Cycle edges are not graph vertices; they cross nothing in the circular
    model and are pinned to page 0 so serialization is canonical.
    """
    if g is None:
        g = build_chord_graph(a.graph_n)
    elif g.n != a.graph_n:
        raise InputError("graph/assignment mismatch")
    n = a.graph_n
    page_of = {}
    for i in range(n):
        e = tuple(sorted((i, (i + 1) % n)))
        page_of[e] = 0
    for chord, color in zip(g.chords, a.color_of):
        page_of[(chord.a, chord.b)] = color
    return Drawing(n=n, k=a.k, page_of=page_of)


def _bnb_search(g: ChordGraph, k: int, budget: Budget, warm: CutAssignment):
    """Depth-first branch and bound over colorings in descending-degree order.

    Prunes with current conflict count plus, for every uncolored vertex,
    the fewest conflicts any color would incur against its already-colored
    neighbors.  Color symmetry is broken by only opening new colors in
    index order (so the first branched vertex always takes color 0).
    """
    nv = g.num_vertices
    degrees = g.adjacency.sum(axis=1)
    order = sorted(range(nv), key=lambda v: (-int(degrees[v]), v))
    pos_of = {v: t for t, v in enumerate(order)}
    # adjacency among reordered indices, restricted to later positions
    adj_gt = [0] * nv
    for v in range(nv):
        m = 0
        for u in g.neighbors(v):
            if pos_of[u] > pos_of[v]:
                m |= 1 << pos_of[u]
        adj_gt[pos_of[v]] = m

    best_cost = comb(g.n, 4) - cut_value(g, warm)
    best_colors = [warm.color_of[v] for v in range(nv)]

    cnt = [[0] * k for _ in range(nv)]
    minv = [0] * nv
    colored = [-1] * nv
    state = {"future": 0, "cost": 0, "used": 0, "nodes": 0, "best": best_cost,
             "exhausted": False}
    deadline = None if budget.max_seconds is None else time.monotonic() + budget.max_seconds
    max_nodes = budget.max_nodes

    def dfs(t: int) -> None:
        state["nodes"] += 1
        if state["exhausted"]:
            return
        if max_nodes is not None and state["nodes"] > max_nodes:
            state["exhausted"] = True
            return
        if deadline is not None and state["nodes"] % 1024 == 0 and time.monotonic() > deadline:
            state["exhausted"] = True
            return
        if state["cost"] + state["future"] >= state["best"]:
            return
        if t == nv:
            state["best"] = state["cost"]
            for tt in range(nv):
                best_colors[order[tt]] = colored[tt]
            return
        state["future"] -= minv[t]
        new_color_cap = min(state["used"] + 1, k)
        saved_used = state["used"]
        row = cnt[t]
        for c in range(new_color_cap):
            add = row[c]
            if state["cost"] + add + state["future"] >= state["best"]:
                continue
            state["cost"] += add
            state["used"] = max(saved_used, c + 1)
            colored[t] = c
            trail = []
            m = adj_gt[t]
            while m:
                u = (m & -m).bit_length() - 1
                m &= m - 1
                cu = cnt[u]
                cu[c] += 1
                new_min = min(cu)
                if new_min != minv[u]:
                    trail.append((u, minv[u]))
                    state["future"] += new_min - minv[u]
                    minv[u] = new_min
            dfs(t + 1)
            m = adj_gt[t]
            while m:
                u = (m & -m).bit_length() - 1
                m &= m - 1
                cnt[u][c] -= 1
            for u, old in trail:
                state["future"] += old - minv[u]
                minv[u] = old
            state["cost"] -= add
            state["used"] = saved_used
            colored[t] = -1
            if state["exhausted"]:
                break
        state["future"] += minv[t]

    t0 = time.monotonic()
    dfs(0)
    elapsed = time.monotonic() - t0
    return state["best"], tuple(best_colors), not state["exhausted"], state["nodes"], elapsed


def max_k_cut_bnb(g: ChordGraph, k: int, budget: Budget = Budget()) -> ExactResult:
    """Maximum k-cut of g by exhaustive branch and bound.

    The incumbent starts from the matching-construction drawing, so the
    search only has to refute better colorings.  Budget exhaustion returns
    the best coloring found with proved_optimal=False; nu is then only an
    upper bound.
    """
    if k < 1:
        raise InputError(f"need k >= 1, got {k}")
    warm = coloring_from_drawing(g, dds_drawing(g.n, k))
    cost, colors, proved, nodes, elapsed = _bnb_search(g, k, budget, warm)
    total = comb(g.n, 4)
    return ExactResult(
        n=g.n,
        k=k,
        nu=cost,
        cut_size=total - cost,
        assignment=CutAssignment(graph_n=g.n, k=k, color_of=colors),
        proved_optimal=proved,
        nodes_explored=nodes,
        wall_time=elapsed,
    )


def nu_exact(n: int, k: int, budget: Budget = Budget()) -> ExactResult:
    """Exact k-page crossing number of K_n (subject to budget).

    Short-circuits to 0 for k >= ceil(n/2), where the construction is
    crossing-free.
    """
    if n < 5:
        raise InputError(f"need n >= 5, got {n}")
    if k >= ceil(n / 2):
        g = build_chord_graph(n)
        warm = coloring_from_drawing(g, dds_drawing(n, k))
        total = comb(n, 4)
        cut = cut_value(g, warm)
        assert cut == total, "crossing-free construction expected for k >= ceil(n/2)"
        return ExactResult(
            n=n, k=k, nu=0, cut_size=total, assignment=warm,
            proved_optimal=True, nodes_explored=0, wall_time=0.0,
        )
    g = build_chord_graph(n)
    return max_k_cut_bnb(g, k, budget)


def brute_force_nu(n: int, k: int, cap: int = 300_000_000) -> int:
    """Minimum same-color edge count over all k-colorings, by enumeration.

    The first vertex's color is fixed; the remaining k^(|V|-1) colorings
    are enumerated in chunks.  Independent of the branch-and-bound path;
    refuses instances whose enumeration exceeds `cap`.
    """
    g = build_chord_graph(n)
    nv = g.num_vertices
    size = k ** (nv - 1)
    if size > cap:
        raise InputError(f"enumeration of {size} colorings exceeds cap {cap}")
    iu, ju = np.nonzero(np.triu(g.adjacency, k=1))
    best = comb(n, 4)
    chunk = 1 << 18
    for start in range(0, size, chunk):
        ids = np.arange(start, min(start + chunk, size), dtype=np.int64)
        cols = np.zeros((len(ids), nv), dtype=np.int8)
        rem = ids.copy()
        for v in range(1, nv):
            rem, digit = np.divmod(rem, k)
            cols[:, v] = digit
        mono = np.zeros(len(ids), dtype=np.int32)
        for u, v in zip(iu, ju):
            mono += cols[:, u] == cols[:, v]
        m = int(mono.min())
        if m < best:
            best = m
    return best


@dataclass
class WcnfInstance:
    """Clause system whose minimum unsatisfied weight is nu_k(K_n).

    Variable x_{v,p} ("vertex v has color p") gets DIMACS index v*k+p+1.
    Soft clauses (weight 1) forbid equal colors across each edge; hard
    clauses (weight k|E|) require each vertex to take some color.
    """

    graph_n: int
    k: int
    num_vars: int
    hard_weight: int
    soft_clauses: list[tuple[int, int]] = field(default_factory=list)
    hard_clauses: list[tuple[int, ...]] = field(default_factory=list)

    def var(self, vertex: int, color: int) -> int:
        return vertex * self.k + color + 1


def encode_wcnf(g: ChordGraph, k: int) -> WcnfInstance:
    """Build the max-k-cut Max-SAT encoding for g."""
    if k < 1:
        raise InputError(f"need k >= 1, got {k}")
    inst = WcnfInstance(
        graph_n=g.n,
        k=k,
        num_vars=g.num_vertices * k,
        hard_weight=k * g.num_edges,
    )
    for u, v in g.edges():
        for p in range(k):
            inst.soft_clauses.append((-inst.var(u, p), -inst.var(v, p)))
    for v in range(g.num_vertices):
        inst.hard_clauses.append(tuple(inst.var(v, p) for p in range(k)))
    return inst


def emit_dimacs_wcnf(w: WcnfInstance, out: TextIO, style: str = "strict-top") -> None:
    """Write DIMACS WCNF.

    strict-top (default): hard clauses carry top = k|E|+1 so modern solvers
    treat them as unbreakable.  paper-literal: hard clauses carry exactly
    k|E|, staying below top, i.e. formally soft with prohibitive weight.
    """
    if style not in ("strict-top", "paper-literal"):
        raise InputError(f"unknown WCNF style {style!r}")
    top = w.hard_weight + 1
    hard_w = top if style == "strict-top" else w.hard_weight
    n_clauses = len(w.soft_clauses) + len(w.hard_clauses)
    out.write(f"p wcnf {w.num_vars} {n_clauses} {top}\n")
    for a, b in w.soft_clauses:
        out.write(f"1 {a} {b} 0\n")
    for clause in w.hard_clauses:
        out.write(f"{hard_w} {' '.join(map(str, clause))} 0\n")


def parse_wcnf_model(w: WcnfInstance, text: str) -> CutAssignment:
    """Map a solver model ("v" lines of signed literals) back to colors.

    Vertices whose at-least-one clause admits several true colors take the
    lowest.  A vertex with no true color violates its hard clause and
    raises InputError naming it.
    """
    true_vars: set[int] = set()
    saw_model = False
    for line in text.splitlines():
        line = line.strip()
        if not line.startswith("v"):
            continue
        saw_model = True
        for tok in line[1:].split():
            try:
                lit = int(tok)
            except ValueError as exc:
                raise InputError(f"malformed literal {tok!r} in model line") from exc
            if lit > 0:
                true_vars.add(lit)
    if not saw_model:
        raise InputError("no model ('v') line found")
    num_vertices = w.num_vars // w.k
    colors = []
    for v in range(num_vertices):
        chosen = [p for p in range(w.k) if w.var(v, p) in true_vars]
        if not chosen:
            raise InputError(f"model violates hard clause {v}: vertex {v} has no color")
        colors.append(chosen[0])
    return CutAssignment(graph_n=w.graph_n, k=w.k, color_of=tuple(colors))
