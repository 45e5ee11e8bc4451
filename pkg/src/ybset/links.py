"""Flat-link diagrams, colorings by a solution, and local rewriting moves.

A crossing is a record ``(inL, inR, outL, outR)`` of edge ids.  The strand
entering at inL leaves at outR and the one entering at inR leaves at outL; a
coloring c must satisfy ``S(c(inL), c(inR)) = (c(outL), c(outR))``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import SolutionTable
from .errors import DiagramError

IN_L, IN_R, OUT_L, OUT_R = range(4)
MOVES = ("R1a", "R1b", "R2a", "R2b", "R2c", "R3a", "R3b")
PORTS = ("inL", "inR", "outL", "outR")


@dataclass
class LinkDiagram:
    edge_count: int
    crossings: list = field(default_factory=list)
    free_loops: int = 0

    def __post_init__(self):
        self.crossings = [tuple(int(e) for e in c) for c in self.crossings]
        self.validate()

    def validate(self) -> None:
        E = self.edge_count
        if E < 0 or self.free_loops < 0:
            raise DiagramError("negative edge or loop count")
        seen_in = [0] * E
        seen_out = [0] * E
        for k, c in enumerate(self.crossings):
            if len(c) != 4:
                raise DiagramError(f"crossing {k} does not have four ports")
            for p, e in enumerate(c):
                if not 0 <= e < E:
                    raise DiagramError(f"crossing {k} port {PORTS[p]} names unknown edge {e}")
                (seen_in if p < 2 else seen_out)[e] += 1
        for e in range(E):
            if seen_in[e] != 1 or seen_out[e] != 1:
                raise DiagramError(
                    f"edge {e} appears {seen_in[e]} times as input and {seen_out[e]} times as output"
                )

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinkDiagram):
            return NotImplemented
        return (self.edge_count, self.crossings, self.free_loops) == (
            other.edge_count,
            other.crossings,
            other.free_loops,
        )

    def successor(self) -> list:
        """Edge following each edge along its strand."""
        nxt = [-1] * self.edge_count
        for a, b, c, d in self.crossings:
            nxt[a] = d
            nxt[b] = c
        return nxt

    def to_json(self) -> dict:
        return {
            "edges": self.edge_count,
            "free_loops": self.free_loops,
            "crossings": [dict(zip(PORTS, c)) for c in self.crossings],
        }

    @classmethod
    def from_json(cls, obj) -> "LinkDiagram":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            cr = [tuple(c[p] for p in PORTS) for c in obj["crossings"]]
            return cls(int(obj["edges"]), cr, int(obj.get("free_loops", 0)))
        except (KeyError, TypeError) as exc:
            raise DiagramError(f"malformed diagram JSON: {exc}") from exc


def unknot(k: int = 1) -> LinkDiagram:
    """k disjoint crossing-less loops."""
    return LinkDiagram(0, [], k)


def obstruction_diagram() -> LinkDiagram:
    """Two closed strands sharing a single crossing where each strand re-enters
    itself.  Its colorings are the pairs with ``S(x, y) = (y, x)``, i.e. the
    fixed points of ``R = swap o S``; no planar picture has this shape."""
    return LinkDiagram(2, [(0, 1, 1, 0)], 0)


def component_count(d: LinkDiagram) -> int:
    d.validate()
    nxt = d.successor()
    seen = [False] * d.edge_count
    comps = 0
    for e in range(d.edge_count):
        if seen[e]:
            continue
        comps += 1
        while not seen[e]:
            seen[e] = True
            e = nxt[e]
    return comps + d.free_loops


# ---------------------------------------------------------------------------
# Colorings
# ---------------------------------------------------------------------------


def _quads(s: SolutionTable) -> np.ndarray:
    n = s.n
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.stack([x.ravel(), y.ravel(), s.s1.ravel(), s.s2.ravel()], axis=1)


def count_colorings(d: LinkDiagram, s: SolutionTable) -> int:
    """Edge colorings respecting s at every crossing, by backtracking over
    crossings (most constrained first) with forward checking."""
    d.validate()
    quads = _quads(s)
    # per crossing: rows already consistent with repeated edges
    base = []
    for c in d.crossings:
        ok = np.ones(len(quads), dtype=bool)
        for p in range(4):
            for q in range(p + 1, 4):
                if c[p] == c[q]:
                    ok &= quads[:, p] == quads[:, q]
        base.append(quads[ok])
    colors = [-1] * d.edge_count
    crossings = d.crossings

    def candidates(k):
        rows = base[k]
        for p, e in enumerate(crossings[k]):
            v = colors[e]
            if v >= 0:
                rows = rows[rows[:, p] == v]
        return rows

    def dfs() -> int:
        best = None
        best_rows = None
        for k, c in enumerate(crossings):
            rows = candidates(k)
            if len(rows) == 0:
                return 0
            if all(colors[e] >= 0 for e in c):
                continue
            if best is None or len(rows) < len(best_rows):
                best, best_rows = k, rows
                if len(rows) == 1:
                    break
        if best is None:
            return 1
        c = crossings[best]
        total = 0
        for row in best_rows:
            touched = [e for e in set(c) if colors[e] < 0]
            for p, e in enumerate(c):
                colors[e] = int(row[p])
            total += dfs()
            for e in touched:
                colors[e] = -1
        return total

    # every closed crossing-free edge is impossible (validate forbids it), so
    # colors of all edges are fixed once every crossing is resolved
    for k in range(len(crossings)):
        if len(base[k]) == 0:
            return 0
    for k, c in enumerate(crossings):
        if all(colors[e] >= 0 for e in c) and len(candidates(k)) == 0:
            return 0
    return dfs() * s.n ** d.free_loops


@dataclass
class ObstructionReport:
    colorings: int
    expected: int
    components: int

    @property
    def obstructed(self) -> bool:
        return self.colorings != self.expected


def planarity_obstruction(d: LinkDiagram, s: SolutionTable) -> ObstructionReport:
    k = component_count(d)
    return ObstructionReport(count_colorings(d, s), s.n**k, k)


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------

# Three-crossing patterns as (crossing templates, internal edge names).
# Letters: a/b/c are the incoming edges of the three strands, A/B/C the
# outgoing ones; x/y/z are internal.  Both sides share names for boundary
# edges; internal edges are matched position by position.
_R3 = {
    # braid-like: the sides compose the crossing map as 12-23-12 and 23-12-23
    "R3a": (
        [("a", "b", "x", "y"), ("y", "c", "z", "C"), ("x", "z", "A", "B")],
        [("b", "c", "y", "x"), ("a", "y", "A", "z"), ("z", "x", "B", "C")],
        ("x", "y", "z"),
    ),
    # cyclically oriented triangle, one strand moved across the opposite vertex
    "R3b": (
        [("a", "z", "C", "x"), ("b", "x", "A", "y"), ("c", "y", "B", "z")],
        [("x", "c", "z", "A"), ("y", "a", "x", "B"), ("z", "b", "y", "C")],
        ("x", "y", "z"),
    ),
}


def _match(cross: Sequence[tuple], template: Sequence[tuple]) -> Optional[dict]:
    env: dict = {}
    for c, t in zip(cross, template):
        for e, name in zip(c, t):
            if env.setdefault(name, e) != e:
                return None
    return env


class _Editor:
    """Mutable working copy with id allocation and union-based contraction."""

    def __init__(self, d: LinkDiagram):
        self.E = d.edge_count
        self.cr = [list(c) for c in d.crossings]
        self.loops = d.free_loops

    def new(self) -> int:
        self.E += 1
        return self.E - 1

    def head(self, e: int):
        for k, c in enumerate(self.cr):
            for p in (IN_L, IN_R):
                if c[p] == e:
                    return k, p
        raise DiagramError(f"edge {e} has no head")

    def open(self, e: int) -> int:
        """Cut e before its head; e keeps its tail, the returned id its head."""
        k, p = self.head(e)
        f = self.new()
        self.cr[k][p] = f
        return f

    def contract(self, drop: Sequence[int]) -> None:
        """Delete the given crossings, joining each strand through them."""
        parent = list(range(self.E))

        def find(u):
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        def union(u, v):
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)

        for k in drop:
            a, b, c, d = self.cr[k]
            union(a, d)
            union(b, c)
        dropped = set(drop)
        kept = [[find(e) for e in c] for k, c in enumerate(self.cr) if k not in dropped]
        used = sorted({e for c in kept for e in c})
        touched = {find(e) for k in drop for e in self.cr[k]}
        self.loops += len(touched - set(used))
        remap = {e: i for i, e in enumerate(used)}
        self.cr = [[remap[e] for e in c] for c in kept]
        self.E = len(used)

    def done(self) -> LinkDiagram:
        return LinkDiagram(self.E, [tuple(c) for c in self.cr], self.loops)


def apply_move(
    d: LinkDiagram,
    move: str,
    site: Union[int, str, Sequence[int]],
    direction: str = "insert",
) -> LinkDiagram:
    """Rewrite d locally.

    Sites: for R1 insertion an edge id or ``"loop"``; for R1 removal a
    crossing index.  For R2 insertion a pair of distinct edges ``(a, b)``,
    for removal a pair of crossing indices.  For R3 a triple of crossing
    indices; ``insert`` rewrites the first side of the pattern into the
    second and ``remove`` goes back.
    """
    if move not in MOVES:
        raise DiagramError(f"unknown move {move!r}")
    if direction not in ("insert", "remove"):
        raise DiagramError(f"direction must be insert or remove, not {direction!r}")
    d.validate()
    ed = _Editor(d)
    if move in ("R1a", "R1b"):
        if direction == "insert":
            if site == "loop":
                if ed.loops == 0:
                    raise DiagramError("no free loop to kink")
                ed.loops -= 1
                e = ed.new()
                loop, out = ed.new(), e
            else:
                e = int(site)
                if not 0 <= e < d.edge_count:
                    raise DiagramError(f"no edge {e}")
                loop = ed.new()
                out = ed.open(e)
            ed.cr.append([e, loop, out, loop] if move == "R1a" else [loop, e, loop, out])
        else:
            k = int(site)
            if not 0 <= k < len(ed.cr):
                raise DiagramError(f"no crossing {k}")
            a, b, c, dd = ed.cr[k]
            ok = (b == dd and b not in (a, c)) if move == "R1a" else (a == c and a not in (b, dd))
            if not ok:
                raise DiagramError(f"crossing {k} is not an {move} kink")
            ed.contract([k])
        return ed.done()

    if move in ("R2a", "R2b", "R2c"):
        if direction == "insert":
            a, b = (int(v) for v in site)
            if a == b or not (0 <= a < d.edge_count and 0 <= b < d.edge_count):
                raise DiagramError("R2 needs two distinct existing edges")
            a_out = ed.open(a)
            b_out = ed.open(b)
            u, v = ed.new(), ed.new()
            if move == "R2a":
                c1, c2 = [a, b, u, v], [u, v, a_out, b_out]
            elif move == "R2b":
                c1, c2 = [v, a, u, b_out], [u, b, v, a_out]
            else:
                c1, c2 = [a, v, b_out, u], [b, u, a_out, v]
            ed.cr += [c1, c2]
        else:
            i, j = (int(v) for v in site)
            if i == j or not (0 <= i < len(ed.cr) and 0 <= j < len(ed.cr)):
                raise DiagramError("R2 removal needs two distinct crossings")
            c1, c2 = ed.cr[i], ed.cr[j]
            if move == "R2a":
                ok = c1[OUT_L] == c2[IN_L] and c1[OUT_R] == c2[IN_R]
            elif move == "R2b":
                ok = c1[OUT_L] == c2[IN_L] and c2[OUT_L] == c1[IN_L]
            else:
                ok = c1[OUT_R] == c2[IN_R] and c2[OUT_R] == c1[IN_R]
            if not ok:
                raise DiagramError(f"crossings {i}, {j} do not form an {move} pattern")
            ed.contract([i, j])
        return ed.done()

    # R3: in-place rewrite of three crossings, edge ids preserved
    idx = [int(v) for v in site]
    if len(set(idx)) != 3 or not all(0 <= k < len(ed.cr) for k in idx):
        raise DiagramError("R3 needs three distinct crossing indices")
    src, dst, _ = _R3[move]
    if direction == "remove":
        src, dst = dst, src
    env = _match([ed.cr[k] for k in idx], src)
    if env is None:
        raise DiagramError(f"crossings {idx} do not match the {move} pattern")
    for k, t in zip(idx, dst):
        ed.cr[k] = [env[name] for name in t]
    return ed.done()


def find_sites(d: LinkDiagram, move: str, direction: str = "insert") -> list:
    """All sites where ``apply_move`` succeeds."""
    E, C = d.edge_count, len(d.crossings)
    if move in ("R1a", "R1b"):
        if direction == "insert":
            return list(range(E)) + (["loop"] if d.free_loops else [])
        cand = [k for k in range(C)]
    elif move in ("R2a", "R2b", "R2c"):
        if direction == "insert":
            return [(a, b) for a in range(E) for b in range(E) if a != b]
        cand = [(i, j) for i in range(C) for j in range(C) if i != j]
    else:
        src = _R3[move][0 if direction == "insert" else 1]
        cand = []
        # chain through shared internal edges rather than trying all triples
        for i in range(C):
            for j in range(C):
                for k in range(C):
                    if len({i, j, k}) == 3 and _match([d.crossings[i], d.crossings[j], d.crossings[k]], src):
                        cand.append((i, j, k))
        return cand
    out = []
    for site in cand:
        try:
            apply_move(d, move, site, direction)
        except DiagramError:
            continue
        out.append(site)
    return out


def random_diagram(loops: int, moves: int, rng: Optional[random.Random] = None, kinds=MOVES) -> LinkDiagram:
    """Start from ``loops`` disjoint circles and apply up to ``moves`` random
    rewrites (insertions, plus R3 rewrites wherever a pattern exists)."""
    rng = rng or random.Random()
    d = unknot(loops)
    for _ in range(moves):
        options = []
        for mv in kinds:
            if mv.startswith("R3"):
                for direction in ("insert", "remove"):
                    options += [(mv, s, direction) for s in find_sites(d, mv, direction)]
            elif mv.startswith("R2"):
                if d.edge_count >= 2:
                    a, b = rng.sample(range(d.edge_count), 2)
                    options.append((mv, (a, b), "insert"))
            else:
                sites = list(range(d.edge_count)) + (["loop"] if d.free_loops else [])
                options.append((mv, rng.choice(sites), "insert"))
        mv, site, direction = rng.choice(options)
        d = apply_move(d, mv, site, direction)
    return d
