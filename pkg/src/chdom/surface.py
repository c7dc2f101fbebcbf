"""Ideal triangulations of punctured surfaces and words of closed curves.

A triangulation lists, for every triangle, its three edge slots in
counterclockwise order.  Slot ``i`` of a triangle runs from its corner ``i``
to corner ``i+1``; the side marker says whether that traversal agrees with
the edge's own orientation (``+``) or not (``-``).  Each edge is glued from
one ``+`` slot and one ``-`` slot, which makes the surface oriented.

A closed curve is given as a walk in the dual graph: a cyclic list of
``(triangle, exit edge)`` steps.  Each step contributes a turn letter
(left turn -> +1, right turn -> -1) followed by the edge letter.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    BadPunctureIndex,
    NotAdjacent,
    NotBipartite,
    NotClosed,
    ParseError,
    TopologyError,
    UTurn,
)


@dataclass(frozen=True)
class TLetter:
    delta: int

    def __post_init__(self):
        if self.delta not in (1, -1):
            raise ValueError("turn letter exponent must be +1 or -1")

    def __str__(self):
        return "t+" if self.delta == 1 else "t-"


@dataclass(frozen=True)
class ELetter:
    edge: int

    def __str__(self):
        return f"e{self.edge}"


@dataclass(frozen=True)
class Word:
    """Alternating turn/edge letters, starting with a turn letter."""

    letters: tuple = ()
    peripheral: bool = False
    puncture: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        for i, letter in enumerate(self.letters):
            want = TLetter if i % 2 == 0 else ELetter
            if not isinstance(letter, want):
                raise ValueError(f"letter {i} should be a {want.__name__}")
        if self.peripheral and len(set(self.deltas)) > 1:
            raise ValueError("peripheral words have a constant turn exponent")

    @classmethod
    def from_pairs(cls, pairs, **kw) -> "Word":
        """Build from ``(delta, edge)`` pairs."""
        letters = []
        for delta, edge in pairs:
            letters.append(TLetter(delta))
            letters.append(ELetter(edge))
        return cls(tuple(letters), **kw)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``"t+ e0 t- e1"``."""
        letters = []
        for tok in text.split():
            if tok in ("t+", "t-"):
                letters.append(TLetter(1 if tok == "t+" else -1))
            elif re.fullmatch(r"e\d+", tok):
                letters.append(ELetter(int(tok[1:])))
            else:
                raise ParseError(f"bad word letter {tok!r}")
        return cls(tuple(letters))

    @property
    def deltas(self) -> tuple:
        return tuple(letter.delta for letter in self.letters[0::2])

    @property
    def edges(self) -> tuple:
        return tuple(letter.edge for letter in self.letters[1::2])

    @property
    def constant_turn(self) -> int | None:
        """The common exponent when all turn letters agree, else None."""
        ds = set(self.deltas)
        return ds.pop() if len(ds) == 1 else None

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        if len(self.letters) % 2:
            raise ValueError("can only concatenate after an edge letter")
        return Word(self.letters + other.letters)

    def __str__(self):
        return " ".join(str(letter) for letter in self.letters)


def rotations_equal(u: Word, v: Word) -> bool:
    """Whether ``u`` and ``v`` agree up to a cyclic rotation by whole (t, e) pairs."""
    a, b = u.letters, v.letters
    if len(a) != len(b):
        return False
    return any(a[i:] + a[:i] == b for i in range(0, max(len(a), 1), 2))


@dataclass(frozen=True)
class DualColoring:
    colors: tuple

    def __getitem__(self, tri):
        return self.colors[tri]


@dataclass(frozen=True)
class Triangulation:
    genus: int
    punctures: int
    triangles: tuple  # triangles[t][i] = (edge, side)
    edges: tuple = field(init=False)
    slots: dict = field(init=False, repr=False, compare=False)
    corner_orbits: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g, k = self.genus, self.punctures
        if g < 0 or k < 1:
            raise TopologyError("need genus >= 0 and at least one puncture")
        chi = 2 - 2 * g - k
        if chi >= 0:
            raise TopologyError(f"Euler characteristic {chi} is not negative")
        tris = tuple(tuple((int(e), int(s)) for e, s in tri) for tri in self.triangles)
        object.__setattr__(self, "triangles", tris)
        if len(tris) != -2 * chi:
            raise TopologyError(f"expected {-2 * chi} triangles, found {len(tris)}")
        slots: dict = {}
        for t, tri in enumerate(tris):
            if len(tri) != 3:
                raise TopologyError(f"triangle {t} needs three slots")
            for i, (e, s) in enumerate(tri):
                if s not in (1, -1):
                    raise TopologyError(f"bad side marker on e{e}")
                if (e, s) in slots:
                    raise TopologyError(f"edge e{e} used twice with the same side")
                slots[(e, s)] = (t, i)
        edges = sorted({e for e, _ in slots})
        for e in edges:
            if (e, 1) not in slots or (e, -1) not in slots:
                raise TopologyError(f"edge e{e} is glued to only one slot")
        if len(edges) != -3 * chi:
            raise TopologyError(f"expected {-3 * chi} edges, found {len(edges)}")
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "corner_orbits", self._corner_orbits())
        if len(self.corner_orbits) != k:
            raise TopologyError(
                f"gluing has {len(self.corner_orbits)} punctures, header says {k}"
            )
        if not self._connected():
            raise TopologyError("dual graph is disconnected")

    # -- combinatorics -----------------------------------------------------

    def glued(self, t: int, i: int) -> tuple:
        """The slot on the other side of slot ``i`` of triangle ``t``."""
        e, s = self.triangles[t][i]
        return self.slots[(e, -s)]

    def edge_slots(self, t: int, edge: int) -> list:
        return [i for i, (e, _) in enumerate(self.triangles[t]) if e == edge]

    def neighbours(self, t: int) -> list:
        return [self.glued(t, i)[0] for i in range(3)]

    def _corner_orbits(self) -> tuple:
        parent = {(t, c): (t, c) for t in range(len(self.triangles)) for c in range(3)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in sorted({e for e, _ in self.slots}):
            t, i = self.slots[(e, 1)]
            u, j = self.slots[(e, -1)]
            for a, b in (((t, i), (u, (j + 1) % 3)), ((t, (i + 1) % 3), (u, j))):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups: dict = {}
        for x in sorted(parent):
            groups.setdefault(find(x), []).append(x)
        return tuple(tuple(v) for _, v in sorted(groups.items()))

    def _connected(self) -> bool:
        seen = {0}
        todo = [0]
        while todo:
            for u in self.neighbours(todo.pop()):
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        return len(seen) == len(self.triangles)

    def to_text(self) -> str:
        lines = [f"surface g={self.genus} k={self.punctures}"]
        for t, tri in enumerate(self.triangles):
            slots = " ".join(f"e{e}{'+' if s == 1 else '-'}" for e, s in tri)
            lines.append(f"triangle {t} {slots}")
        return "\n".join(lines) + "\n"


_HEADER = re.compile(r"surface\s+g=(-?\d+)\s+k=(-?\d+)")
_SLOT = re.compile(r"e(\d+)([+\-−])")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_triangulation(text: str) -> Triangulation:
    header = None
    found = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        body = line.strip()
        if header is None:
            m = _HEADER.fullmatch(body)
            if not m:
                raise ParseError("expected 'surface g=<int> k=<int>'", lineno, col)
            header = int(m.group(1)), int(m.group(2))
            continue
        toks = body.split()
        if toks[0] != "triangle" or len(toks) != 5:
            raise ParseError("expected 'triangle <id> <slot> <slot> <slot>'", lineno, col)
        try:
            tid = int(toks[1])
        except ValueError:
            raise ParseError(f"bad triangle id {toks[1]!r}", lineno, line.index(toks[1]) + 1)
        if tid in found:
            raise ParseError(f"triangle {tid} defined twice", lineno, col)
        slots = []
        for tok in toks[2:]:
            m = _SLOT.fullmatch(tok)
            if not m:
                raise ParseError(f"bad edge slot {tok!r}", lineno, line.index(tok) + 1)
            slots.append((int(m.group(1)), 1 if m.group(2) == "+" else -1))
        found[tid] = tuple(slots)
    if header is None:
        raise ParseError("missing 'surface' header")
    if sorted(found) != list(range(len(found))):
        raise TopologyError("triangle ids must be 0..n-1")
    return Triangulation(header[0], header[1], tuple(found[t] for t in range(len(found))))


BUILTIN_TEXT = {
    "S11": "# once-punctured torus: two triangles, three edges\n"
    "surface g=1 k=1\n"
    "triangle 0 e0+ e1+ e2+\n"
    "triangle 1 e0- e1- e2-\n",
    "S03": "# thrice-punctured sphere: two triangles, three edges\n"
    "surface g=0 k=3\n"
    "triangle 0 e0+ e1+ e2+\n"
    "triangle 1 e2- e1- e0-\n",
}


def builtin_text(name: str) -> str:
    key = name.replace("_", "").replace("{", "").replace("}", "").replace(",", "").upper()
    if key not in BUILTIN_TEXT:
        raise KeyError(f"unknown builtin triangulation {name!r}")
    return BUILTIN_TEXT[key]


def builtin(name: str) -> Triangulation:
    """``"S11"`` (once-punctured torus) or ``"S03"`` (thrice-punctured sphere)."""
    return parse_triangulation(builtin_text(name))


def bipartite_coloring(t: Triangulation) -> DualColoring:
    """2-colour the dual graph by BFS from triangle 0, or raise with an odd cycle."""
    n = len(t.triangles)
    color = [None] * n
    parent = [None] * n
    color[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in t.neighbours(u):
            if color[v] is None:
                color[v] = 1 - color[u]
                parent[v] = u
                queue.append(v)
            elif color[v] == color[u]:
                raise NotBipartite("dual graph is not bipartite", _odd_cycle(parent, u, v))
    return DualColoring(tuple(color))


def _odd_cycle(parent, u, v):
    def path(x):
        out = [x]
        while parent[x] is not None:
            x = parent[x]
            out.append(x)
        return out

    pu, pv = path(u), path(v)
    common = set(pu) & set(pv)
    pu = pu[: next(i for i, x in enumerate(pu) if x in common) + 1]
    pv = pv[: next(i for i, x in enumerate(pv) if x in common)]
    return pu + pv[::-1] + [u] if u != v else [u, u]


def _exit_slot(t: Triangulation, tri: int, edge: int, entry: int | None) -> int:
    cands = t.edge_slots(tri, edge)
    if not cands:
        raise NotAdjacent(f"edge e{edge} is not a side of triangle {tri}")
    if len(cands) > 1 and entry in cands:
        cands = [c for c in cands if c != entry]
    return cands[0]


def turn(entry: int, exit_: int) -> int:
    """+1 for a left turn, -1 for a right turn, inside a counterclockwise triangle."""
    if entry == exit_:
        raise UTurn("walk leaves through the side it entered")
    return 1 if exit_ == (entry + 2) % 3 else -1


def compile_word(t: Triangulation, path) -> Word:
    """Word of the closed dual walk ``path = [(triangle, exit edge), ...]``."""
    bipartite_coloring(t)
    path = [(int(tri), int(edge)) for tri, edge in path]
    if not path:
        raise NotClosed("empty walk")
    n = len(path)
    exits = []
    for tri, edge in path:
        if not 0 <= tri < len(t.triangles):
            raise NotAdjacent(f"no triangle {tri}")
        exits.append(_exit_slot(t, tri, edge, None))
    for i, (tri, _) in enumerate(path):
        nxt, _ = t.glued(tri, exits[i])
        want = path[(i + 1) % n][0]
        if nxt != want:
            if i == n - 1:
                raise NotClosed(f"walk ends in triangle {nxt}, not {want}")
            raise NotAdjacent(f"step {i} leads to triangle {nxt}, not {want}")
    pairs = []
    for i, (tri, edge) in enumerate(path):
        prev_tri, _ = path[i - 1]
        entry = t.glued(prev_tri, exits[i - 1])[1]
        pairs.append((turn(entry, exits[i]), edge))
    return Word.from_pairs(pairs)


def reverse_walk(t: Triangulation, path) -> list:
    """The same closed curve traversed backwards, starting in the same triangle."""
    path = list(path)
    n = len(path)
    out = []
    for k in range(n):
        i = (-k) % n  # triangle index visited
        tri = path[i][0]
        edge = path[(i - 1) % n][1]
        out.append((tri, edge))
    return out


def peripheral_word(t: Triangulation, puncture: int) -> Word:
    """Word of the loop around ``puncture``, keeping the puncture on the left."""
    if not 0 <= puncture < len(t.corner_orbits):
        raise BadPunctureIndex(f"puncture {puncture} out of range 0..{len(t.corner_orbits) - 1}")
    start = t.corner_orbits[puncture][0]
    tri, corner = start
    pairs = []
    while True:
        exit_ = (corner - 1) % 3
        pairs.append((turn(corner, exit_), t.triangles[tri][exit_][0]))
        tri, corner = t.glued(tri, exit_)
        if (tri, corner) == start:
            break
    return Word.from_pairs(pairs, peripheral=True, puncture=puncture)


def peripheral_walk(t: Triangulation, puncture: int) -> list:
    """The dual walk whose compiled word is :func:`peripheral_word`."""
    if not 0 <= puncture < len(t.corner_orbits):
        raise BadPunctureIndex(f"puncture {puncture} out of range")
    tri, corner = start = t.corner_orbits[puncture][0]
    steps = []
    while True:
        exit_ = (corner - 1) % 3
        steps.append((tri, t.triangles[tri][exit_][0]))
        tri, corner = t.glued(tri, exit_)
        if (tri, corner) == start:
            return steps


def random_closed_walk(t: Triangulation, steps: int, rng, start: int = 0, max_tries: int = 1000) -> list:
    """A random non-backtracking closed dual walk of exactly ``steps`` steps."""
    if steps < 2 or steps % 2:
        raise ValueError("closed walks in a bipartite dual graph have even length >= 2")
    for _ in range(max_tries):
        tri = start
        first_exit = int(rng.integers(3))
        exit_ = first_exit
        path = []
        ok = True
        for k in range(steps):
            path.append((tri, t.triangles[tri][exit_][0]))
            nxt, entry = t.glued(tri, exit_)
            if k == steps - 1:
                ok = nxt == start and entry != first_exit
                break
            tri = nxt
            choices = [c for c in range(3) if c != entry]
            if k == steps - 2:
                # last step must come home without a U-turn at the base
                good = [c for c in choices if t.glued(tri, c)[0] == start
                        and t.glued(tri, c)[1] != first_exit]
                if not good:
                    ok = False
                    break
                choices = good
            exit_ = choices[int(rng.integers(len(choices)))]
        if ok:
            return path
    raise RuntimeError(f"no closed walk of length {steps} found")


def parse_walks(text: str) -> list:
    """Parse lines ``walk <name>: (<tri>,<edge>) ...`` into ``[(name, path)]``."""
    out = []
    pair = re.compile(r"\(\s*(\d+)\s*,\s*e?(\d+)\s*\)")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = re.fullmatch(r"walk\s+([^:\s]+)\s*:\s*(.*)", line)
        if not m:
            raise ParseError("expected 'walk <name>: (<tri>,<edge>) ...'", lineno, 1)
        body = m.group(2)
        steps = [(int(a), int(b)) for a, b in pair.findall(body)]
        if pair.sub("", body).strip():
            raise ParseError("unparseable step in walk", lineno, line.index(body) + 1)
        out.append((m.group(1), steps))
    return out


def format_walk(name: str, path) -> str:
    return f"walk {name}: " + " ".join(f"({tri},e{edge})" for tri, edge in path)
