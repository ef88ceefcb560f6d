"""Chord-overlap graph of the n-cycle.

Vertices are the chords of a cycle on n points (pairs at cyclic distance
at least 2); two chords are adjacent when their endpoints interleave
around the cycle.  The vertex order groups chords by cyclic distance
("orbits") so that the adjacency matrix splits into symmetric circulant
blocks, which is what the spectral reduction in `sdpbound` relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, TextIO

import numpy as np

__all__ = [
    "Chord",
    "ChordGraph",
    "CirculantBlock",
    "chords_overlap",
    "build_chord_graph",
    "block_shift",
    "block_first_row",
    "adjacency_matrix",
    "laplacian",
    "write_edge_list",
    "read_edge_list",
]


class InputError(ValueError):
    """Raised for arguments outside an operation's domain."""


@dataclass(frozen=True, order=True)
class Chord:
    """A chord {a, b} of the n-cycle, stored with a < b."""

    a: int
    b: int

    @staticmethod
    def of(a: int, b: int) -> "Chord":
        if a == b:
            raise InputError(f"degenerate chord ({a},{a})")
        return Chord(min(a, b), max(a, b))

    def cyclic_distance(self, n: int) -> int:
        span = (self.b - self.a) % n
        return min(span, n - span)


def _require_chord(c: Chord, n: int) -> None:
    if not (0 <= c.a < c.b <= n - 1):
        raise InputError(f"chord {c} has endpoints outside 0..{n - 1}")
    if c.cyclic_distance(n) < 2:
        raise InputError(f"{c} is a cycle edge, not a chord (cyclic distance < 2)")


def chords_overlap(c1: Chord, c2: Chord, n: int) -> bool:
    """True iff the endpoints of c1 and c2 strictly interleave on the cycle.

    Chords sharing an endpoint, nested chords and disjoint chords do not
    overlap.  Raises InputError if either argument is not a valid chord
    (cyclic distance < 2).
    """
    _require_chord(c1, n)
    _require_chord(c2, n)
    if len({c1.a, c1.b, c2.a, c2.b}) < 4:
        return False
    # c2 separated by c1 <=> exactly one endpoint of c2 in the open arc (a, b)
    return (c1.a < c2.a < c1.b) != (c1.a < c2.b < c1.b)


def block_shift(i: int, j: int, n: int) -> int:
    """Offset of the first 1-run in the circulant first row of block (i, j).

    Equals d*(i-j) mod n when i and j share parity and (d*(i-j) - j) mod n
    otherwise, with d = floor(n/2).
    """
    d = n // 2
    if not (2 <= i <= j <= d):
        raise InputError(f"block index ({i},{j}) outside 2..{d} for n={n}")
    if (i - j) % 2 == 0:
        return (d * (i - j)) % n
    return (d * (i - j) - j) % n


@dataclass(frozen=True)
class CirculantBlock:
    """First-row description of adjacency block (i, j), odd n only."""

    i: int
    j: int
    shift: int
    first_row: tuple[int, ...]

    def matrix(self) -> np.ndarray:
        n = len(self.first_row)
        row = np.array(self.first_row, dtype=np.int64)
        return np.stack([np.roll(row, s) for s in range(n)])


def block_first_row(i: int, j: int, n: int) -> CirculantBlock:
    """Circulant first row [0 0^shift 1^(i-1) 0^* 1^(i-1) 0^shift] of block (i, j)."""
    if n % 2 == 0:
        raise InputError(f"circulant block description requires odd n, got {n}")
    shift = block_shift(i, j, n)
    middle = n - 2 * (i - 1) - 1 - 2 * shift
    if middle < 0:
        raise InputError(f"first-row pattern does not fit: i={i}, j={j}, n={n}")
    row = [0] + [0] * shift + [1] * (i - 1) + [0] * middle + [1] * (i - 1) + [0] * shift
    return CirculantBlock(i=i, j=j, shift=shift, first_row=tuple(row))


class ChordGraph:
    """The overlap graph of chords of the n-cycle, in canonical vertex order.

    Vertices are grouped by cyclic distance i = 2..d, each group ("orbit")
    listed starting from the chord {d*i mod n, (d+1)*i mod n} and continuing
    by +1 cyclic shifts.  For odd n every orbit has n vertices; for even n
    the diameter orbit i = d has n/2.
    """

    def __init__(self, n: int, chords: list[Chord], orbit_of: list[int]):
        self.n = n
        self.d = n // 2
        self.chords: tuple[Chord, ...] = tuple(chords)
        self.orbit_of: tuple[int, ...] = tuple(orbit_of)
        self.index_of: dict[Chord, int] = {c: v for v, c in enumerate(self.chords)}
        self._adj = self._build_adjacency()
        self.num_vertices = len(self.chords)
        self.num_edges = int(self._adj.sum()) // 2

    def _build_adjacency(self) -> np.ndarray:
        a = np.array([c.a for c in self.chords])
        b = np.array([c.b for c in self.chords])
        lo_in = (a[:, None] < a[None, :]) & (a[None, :] < b[:, None])
        hi_in = (a[:, None] < b[None, :]) & (b[None, :] < b[:, None])
        overlap = lo_in != hi_in
        shared = (
            (a[:, None] == a[None, :])
            | (a[:, None] == b[None, :])
            | (b[:, None] == a[None, :])
            | (b[:, None] == b[None, :])
        )
        overlap &= ~shared
        return overlap

    @property
    def adjacency(self) -> np.ndarray:
        """Boolean adjacency matrix in canonical vertex order."""
        return self._adj

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self._adj[v])

    def degree(self, v: int) -> int:
        return int(self._adj[v].sum())

    def edges(self) -> Iterable[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self._adj, k=1))
        return zip(iu.tolist(), ju.tolist())

    def orbit_vertices(self, i: int) -> list[int]:
        return [v for v, o in enumerate(self.orbit_of) if o == i]


def build_chord_graph(n: int) -> ChordGraph:
    """Construct the chord-overlap graph on the n-cycle, n >= 5."""
    if n < 5:
        raise InputError(f"need n >= 5, got {n}")
    d = n // 2
    chords: list[Chord] = []
    orbit_of: list[int] = []
    for i in range(2, d + 1):
        orbit_size = n if (n % 2 == 1 or i < d) else n // 2
        start_a = (d * i) % n
        start_b = ((d + 1) * i) % n
        for t in range(orbit_size):
            chords.append(Chord.of((start_a + t) % n, (start_b + t) % n))
            orbit_of.append(i)
    g = ChordGraph(n, chords, orbit_of)
    assert g.num_vertices == comb(n, 2) - n
    assert g.num_edges == comb(n, 4)
    return g


def adjacency_matrix(g: ChordGraph) -> np.ndarray:
    """Integer 0/1 adjacency matrix of g."""
    return g.adjacency.astype(np.int64)


def laplacian(g: ChordGraph) -> np.ndarray:
    """Laplacian matrix (degree minus adjacency) of g, integer entries."""
    a = adjacency_matrix(g)
    return np.diag(a.sum(axis=1)) - a


def write_edge_list(g: ChordGraph, out: TextIO) -> None:
    """Edge-list text: header "p <|V|> <|E|>", then one "u v" line per edge."""
    out.write(f"p {g.num_vertices} {g.num_edges}\n")
    for u, v in g.edges():
        out.write(f"{u} {v}\n")


def read_edge_list(text: str) -> tuple[int, list[tuple[int, int]]]:
    """Parse the edge-list format back into (num_vertices, edges)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("p "):
        raise InputError("missing 'p <|V|> <|E|>' header")
    _, nv, ne = lines[0].split()
    edges = []
    for ln in lines[1:]:
        u, v = ln.split()
        edges.append((int(u), int(v)))
    if len(edges) != int(ne):
        raise InputError(f"header announces {ne} edges, found {len(edges)}")
    return int(nv), edges
