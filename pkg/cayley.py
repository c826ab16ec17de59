"""
cayley.py - Finite balls of Cayley graphs

A Ball is built breadth-first from the identity, layer by layer, with an
EqualityOracle deciding which candidate words name elements already seen.
Vertices are stored by their shortlex-least word, edges by generator label.

Oracle backends:
    FreeOracle        free reduction (free groups)
    AbelianOracle     exponent vectors, optionally reduced mod torsion orders
    CosetOracle       a closed coset table of the trivial subgroup (finite groups)
    NormalFormOracle  any user-supplied normal form
    DehnOracle        Dehn's algorithm (C'(1/6) presentations)

Distances read off a ball are exact when dist0(u) + dist0(v) ≤ radius:
every geodesic between u and v then stays inside the ball.
"""

import json
import logging
import math
import struct
from abc import ABC, abstractmethod
from functools import cached_property
from itertools import islice
from typing import Callable, Hashable, Iterable, Literal, Optional, Sequence

import networkx as nx
import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from config import SETTINGS
from dehn import MU_LIMIT, DehnSolver
from errors import (
    BadParameter,
    MemoryBudgetExceeded,
    NotAQuotient,
    NotExact,
    NotInBall,
    OracleBudgetExceeded,
)
from exact import RationalLike, parse_rational
from freeword import (
    IDENTITY_TEXT,
    Alphabet,
    Word,
    free_reduce,
    inverse_letter,
    parse_word,
    render,
    symmetrize,
)
from presentation import Presentation, coset_table

logger = logging.getLogger(__name__)

BINARY_MAGIC = b"LCB1"


# ═══════════════════════════════════════════════════════════════════════
#  Equality oracles
# ═══════════════════════════════════════════════════════════════════════

class EqualityOracle(ABC):
    """Decides u = v in a fixed group on the alphabet's letters.

    key(w) is an invariant of the element w names. When exact_keys is set
    it is a complete invariant and equality is key comparison; otherwise
    equal keys only make equality possible and equal() decides.
    """

    name: str = "oracle"
    exact_keys: bool = True

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.calls = 0

    @abstractmethod
    def _key(self, w: Word) -> Hashable:
        ...

    def key(self, w: Word) -> Hashable:
        self.calls += 1
        return self._key(w)

    def _equal(self, u: Word, v: Word) -> bool:
        return self._key(u) == self._key(v)

    def equal(self, u: Word, v: Word) -> bool:
        self.calls += 1
        return self._equal(u, v)

    def is_trivial(self, w: Word) -> bool:
        return self.equal(w, "")


class FreeOracle(EqualityOracle):
    name = "free"

    def _key(self, w: Word) -> Hashable:
        return free_reduce(w)


class AbelianOracle(EqualityOracle):
    """ℤ^k, or a product of cyclic groups when moduli are given (0 = infinite)."""

    name = "abelian"

    def __init__(self, alphabet: Alphabet, moduli: Optional[Sequence[int]] = None):
        super().__init__(alphabet)
        moduli = tuple(moduli) if moduli is not None else (0,) * len(alphabet)
        if len(moduli) != len(alphabet) or any(m < 0 for m in moduli):
            raise BadParameter("one nonnegative modulus per generator")
        self.moduli = moduli

    def _key(self, w: Word) -> Hashable:
        sums = self.alphabet.exponent_sums(w)
        return tuple(e % m if m else e for e, m in zip(sums, self.moduli))


class CosetOracle(EqualityOracle):
    """Finite group given by a presentation whose coset enumeration closes."""

    name = "coset"

    def __init__(self, p: Presentation, max_cosets: Optional[int] = None):
        super().__init__(p.alphabet)
        table = coset_table(p, (), max_cosets)
        if table is None:
            raise OracleBudgetExceeded(
                f"coset enumeration of {p.name or 'the presentation'} did not close "
                f"within {max_cosets or SETTINGS.max_cosets} cosets"
            )
        self.table = table

    @property
    def order(self) -> int:
        return self.table.index

    def _key(self, w: Word) -> Hashable:
        return self.table.trace(w)


class NormalFormOracle(EqualityOracle):
    name = "normal-form"

    def __init__(self, alphabet: Alphabet, normal_form: Callable[[Word], Hashable], name: str = "normal-form"):
        super().__init__(alphabet)
        self.normal_form = normal_form
        self.name = name

    def _key(self, w: Word) -> Hashable:
        return self.normal_form(w)


class DehnOracle(EqualityOracle):
    """Dehn's algorithm; keys are exponent sums modulo the relators' gcds."""

    name = "dehn"
    exact_keys = False

    def __init__(self, p: Presentation, mu: RationalLike = MU_LIMIT):
        super().__init__(p.alphabet)
        self.solver = DehnSolver(symmetrize(p.relators), parse_rational(mu)) if p.relators else None
        moduli = []
        for i in range(len(p.alphabet)):
            g = 0
            for r in p.relators:
                g = math.gcd(g, p.alphabet.exponent_sums(r)[i])
            moduli.append(g)
        self.moduli = tuple(moduli)

    def _key(self, w: Word) -> Hashable:
        sums = self.alphabet.exponent_sums(w)
        return tuple(e % m if m else e for e, m in zip(sums, self.moduli))

    def _equal(self, u: Word, v: Word) -> bool:
        if self._key(u) != self._key(v):
            return False
        if self.solver is None:
            return free_reduce(u) == free_reduce(v)
        return self.solver.equal(u, v)


def make_oracle(
    kind: str,
    p: Presentation,
    mu: RationalLike = MU_LIMIT,
    max_cosets: Optional[int] = None,
) -> EqualityOracle:
    """Oracle for the group of p by backend name."""
    if kind == "free":
        if p.relators:
            raise BadParameter("the free oracle ignores relators; use dehn, coset or abelian")
        return FreeOracle(p.alphabet)
    if kind == "abelian":
        if any(len(set(map(str.lower, r))) > 1 for r in p.relators if not _is_commutator(r)):
            raise BadParameter("the abelian oracle accepts commutators and generator powers only")
        moduli = [0] * len(p.alphabet)
        for r in p.relators:
            if not _is_commutator(r):
                i = p.alphabet.generator_index(r[0])
                moduli[i] = math.gcd(moduli[i], len(r))
        return AbelianOracle(p.alphabet, moduli)
    if kind == "coset":
        return CosetOracle(p, max_cosets)
    if kind == "dehn":
        return DehnOracle(p, mu)
    raise BadParameter(f"unknown oracle {kind!r}")


def _is_commutator(r: Word) -> bool:
    return len(r) == 4 and r[2] == r[0].swapcase() and r[3] == r[1].swapcase()


# ═══════════════════════════════════════════════════════════════════════
#  Ball
# ═══════════════════════════════════════════════════════════════════════

class Ball:
    """Radius-r ball of a Cayley graph (or, loaded from JSON, of any graph)."""

    def __init__(
        self,
        radius: int,
        reps: list[Word],
        dist0: list[int],
        step: list[dict[str, int]],
        alphabet: Optional[Alphabet],
        oracle: str = "",
        cayley: bool = True,
        edges: Optional[Iterable[tuple[int, int]]] = None,
    ):
        self.radius = radius
        self.reps = reps
        self.dist0 = dist0
        self.step = step
        self.alphabet = alphabet
        self.oracle = oracle
        self.cayley = cayley
        self._extra_edges = sorted(edges) if edges is not None else []

    def __len__(self) -> int:
        return len(self.reps)

    def __repr__(self) -> str:
        return f"Ball(radius={self.radius}, vertices={len(self)}, oracle={self.oracle!r})"

    @cached_property
    def position(self) -> dict[Word, int]:
        return {w: i for i, w in enumerate(self.reps)}

    @cached_property
    def graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(len(self.reps)))
        G.add_edges_from(self.edges())
        return G

    def edges(self) -> list[tuple[int, int]]:
        if not self.step:
            return list(self._extra_edges)
        out = set()
        for v, row in enumerate(self.step):
            for u in row.values():
                if u != v:
                    out.add((min(u, v), max(u, v)))
        return sorted(out)

    def layer_sizes(self) -> list[int]:
        sizes = [0] * (self.radius + 1)
        for d in self.dist0:
            sizes[d] += 1
        return sizes

    def sizes_by_radius(self) -> list[int]:
        return list(np.cumsum(self.layer_sizes()).tolist())

    def core(self, scan_radius: Optional[int] = None) -> list[int]:
        """Vertices with dist0 ≤ scan_radius (default radius // 2)."""
        scan_radius = self.radius // 2 if scan_radius is None else scan_radius
        return [v for v, d in enumerate(self.dist0) if d <= scan_radius]

    def is_exact(self, u: int, v: int) -> bool:
        return self.dist0[u] + self.dist0[v] <= self.radius

    def locate(self, w: Word) -> int:
        """Vertex reached from the identity by reading w; NotInBall if the walk leaves."""
        if not self.step:
            if w in self.position:
                return self.position[w]
            raise NotInBall(f"{render(w)!r} is not a vertex label of this graph")
        v = 0
        for i, letter in enumerate(w):
            nxt = self.step[v].get(letter)
            if nxt is None:
                raise NotInBall(f"{render(w)!r} leaves the radius-{self.radius} ball after {i} letters")
            v = nxt
        return v

    def vertex(self, ref: int | Word) -> int:
        """Accept a vertex index or any word (text form allowed, "1" for the identity)."""
        if isinstance(ref, int):
            if not 0 <= ref < len(self.reps):
                raise NotInBall(f"no vertex {ref}")
            return ref
        if self.alphabet is not None:
            return self.locate(parse_word(ref, self.alphabet))
        key = "" if ref == IDENTITY_TEXT else ref
        if key not in self.position:
            raise NotInBall(f"{ref!r} is not a vertex label of this graph")
        return self.position[key]

    def label(self, v: int) -> str:
        return render(self.reps[v])

    def bfs_from(self, v: int, cutoff: Optional[int] = None) -> dict[int, int]:
        return nx.single_source_shortest_path_length(self.graph, v, cutoff=cutoff)

    # ── export ──────────────────────────────────────────────────────────

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "alphabet": list(self.alphabet.generators) if self.alphabet else None,
            "oracle": self.oracle,
            "cayley": self.cayley,
            "vertices": [render(w) for w in self.reps],
            "dist0": list(self.dist0),
            "step": [dict(sorted(row.items())) for row in self.step],
            "edges": [list(e) for e in self.edges()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Ball":
        if "result" in data and "ball" in data.get("result", {}):
            data = data["result"]["ball"]
        reps = ["" if v == IDENTITY_TEXT else v for v in data["vertices"]]
        alphabet = Alphabet(tuple(data["alphabet"])) if data.get("alphabet") else None
        step = [{k: int(u) for k, u in row.items()} for row in data.get("step") or []]
        edges = [tuple(e) for e in data.get("edges", [])]
        dist0 = data.get("dist0")
        if dist0 is None:
            G = nx.Graph()
            G.add_nodes_from(range(len(reps)))
            G.add_edges_from(edges)
            lengths = nx.single_source_shortest_path_length(G, 0)
            dist0 = [lengths.get(v, 0) for v in range(len(reps))]
        radius = data.get("radius", max(dist0, default=0))
        return cls(
            radius=radius,
            reps=reps,
            dist0=list(dist0),
            step=step,
            alphabet=alphabet,
            oracle=data.get("oracle", ""),
            cayley=bool(data.get("cayley", bool(step))),
            edges=None if step else edges,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_binary(self) -> bytes:
        """magic, radius, vertex count, length-prefixed reps, edge count, edge pairs (<u4)."""
        parts = [BINARY_MAGIC, struct.pack("<II", self.radius, len(self.reps))]
        for w in self.reps:
            data = w.encode("ascii")
            parts.append(struct.pack("<I", len(data)))
            parts.append(data)
        edges = np.asarray(self.edges(), dtype="<u4").reshape(-1, 2)
        parts.append(struct.pack("<I", len(edges)))
        parts.append(edges.tobytes())
        return b"".join(parts)


def load_ball(path) -> Ball:
    with open(path, "r", encoding="utf-8") as fh:
        return Ball.from_dict(json.load(fh))


# ═══════════════════════════════════════════════════════════════════════
#  BFS construction
# ═══════════════════════════════════════════════════════════════════════

def build_ball(
    oracle: EqualityOracle,
    radius: int,
    max_vertices: Optional[int] = None,
    oracle_budget: Optional[int] = None,
    progress: bool = False,
) -> Ball:
    """Breadth-first ball around the identity.

    Layer k-1 is expanded in shortlex order, letters in alphabet order, so the
    first word found for an element is its shortlex normal form. A candidate
    v·x can only equal a vertex of layers k-2..k, which bounds the search.
    The last layer is expanded without creating vertices, to collect the
    edges between equidistant boundary vertices.
    """
    if radius < 0:
        raise BadParameter("radius must be nonnegative")
    max_vertices = max_vertices if max_vertices is not None else SETTINGS.max_vertices
    oracle_budget = oracle_budget if oracle_budget is not None else SETTINGS.oracle_budget
    letters = oracle.alphabet.letters
    start_calls = oracle.calls

    reps: list[Word] = [""]
    dist0: list[int] = [0]
    step: list[dict[str, int]] = [{}]
    position: dict[Word, int] = {"": 0}
    buckets: dict[Hashable, list[int]] = {oracle.key(""): [0]}
    layers: list[list[int]] = [[0]]

    def spent() -> None:
        if oracle.calls - start_calls > oracle_budget:
            raise OracleBudgetExceeded(f"ball build exceeded {oracle_budget} oracle calls")

    def find(cand: Word, key: Hashable, k: int) -> Optional[int]:
        for u in buckets.get(key, ()):
            if dist0[u] < k - 2:
                continue
            if oracle.exact_keys or oracle.equal(cand, reps[u]):
                return u
        return None

    for k in tqdm(range(1, radius + 2), desc="ball", disable=not progress, leave=False):
        creating = k <= radius
        new_layer: list[int] = []
        for v in layers[k - 1]:
            w = reps[v]
            for x in letters:
                if x in step[v]:
                    continue
                if w and w[-1] == inverse_letter(x):
                    u = position[w[:-1]]
                else:
                    cand = w + x
                    key = oracle.key(cand)
                    u = find(cand, key, k)
                    spent()
                    if u is None:
                        if not creating:
                            continue
                        u = len(reps)
                        reps.append(cand)
                        dist0.append(k)
                        step.append({})
                        position[cand] = u
                        buckets.setdefault(key, []).append(u)
                        new_layer.append(u)
                        if len(reps) > max_vertices:
                            raise MemoryBudgetExceeded(f"ball exceeds {max_vertices} vertices")
                step[v][x] = u
                step[u].setdefault(inverse_letter(x), v)
        if creating:
            layers.append(new_layer)
            logger.info("[Ball] radius %d: %d vertices", k, len(reps))

    logger.info("[Ball] done: radius %d, %d vertices, %d oracle calls",
                radius, len(reps), oracle.calls - start_calls)
    return Ball(
        radius=radius,
        reps=reps,
        dist0=dist0,
        step=step,
        alphabet=oracle.alphabet,
        oracle=oracle.name,
    )


# ═══════════════════════════════════════════════════════════════════════
#  Distances and paths
# ═══════════════════════════════════════════════════════════════════════

class Distance(BaseModel):
    value: int
    status: Literal["EXACT", "UNCERTAIN"]


def dist(b: Ball, u: int | Word, v: int | Word) -> Distance:
    u, v = b.vertex(u), b.vertex(v)
    value = nx.shortest_path_length(b.graph, u, v)
    return Distance(value=value, status="EXACT" if b.is_exact(u, v) else "UNCERTAIN")


def geodesics(b: Ball, u: int | Word, v: int | Word, limit: int = 100) -> list[list[int]]:
    u, v = b.vertex(u), b.vertex(v)
    if not b.is_exact(u, v):
        raise NotExact(f"dist({b.label(u)}, {b.label(v)}) is not exact in a radius-{b.radius} ball")
    return [list(p) for p in islice(nx.all_shortest_paths(b.graph, u, v), limit)]


class AvoidingPath(BaseModel):
    length: int
    path: list[int]


def shortest_path_avoiding(
    b: Ball,
    u: int | Word,
    v: int | Word,
    forbidden: Iterable[int] = (),
) -> Optional[AvoidingPath]:
    """BFS in the ball minus the forbidden vertices; None when disconnected."""
    u, v = b.vertex(u), b.vertex(v)
    blocked = set(forbidden)
    if u in blocked or v in blocked:
        raise BadParameter("endpoints must not be forbidden")
    view = nx.subgraph_view(b.graph, filter_node=lambda n: n not in blocked)
    try:
        path = nx.shortest_path(view, u, v)
    except nx.NetworkXNoPath:
        return None
    return AvoidingPath(length=len(path) - 1, path=path)


# ═══════════════════════════════════════════════════════════════════════
#  Injectivity radius and relative growth
# ═══════════════════════════════════════════════════════════════════════

class InjectivityReport(BaseModel):
    value: int
    at_least: bool
    cap: int
    witness: Optional[tuple[str, str]] = None


def injectivity_radius(
    oracle_G: EqualityOracle,
    oracle_Q: EqualityOracle,
    cap: int,
    max_vertices: Optional[int] = None,
    oracle_budget: Optional[int] = None,
) -> InjectivityReport:
    """Largest r ≤ cap with Ball_G(r) mapped injectively into Q.

    Two G-distinct vertices u, v that agree in Q make every ball of radius
    max(|u|, |v|) non-injective, so the answer is the least such level minus one.
    """
    ball = build_ball(oracle_G, cap, max_vertices=max_vertices, oracle_budget=oracle_budget)

    for v, row in enumerate(ball.step):
        for x, u in row.items():
            if not oracle_Q.equal(ball.reps[v] + x, ball.reps[u]):
                raise NotAQuotient(
                    f"{render(ball.reps[v] + x)} = {render(ball.reps[u])} holds in G but not in Q"
                )

    order = sorted(range(len(ball)), key=lambda v: ball.dist0[v])
    seen: dict[Hashable, list[int]] = {}
    best: Optional[tuple[int, int, int]] = None
    for v in order:
        key = oracle_Q.key(ball.reps[v])
        for u in seen.get(key, ()):
            if oracle_Q.exact_keys or oracle_Q.equal(ball.reps[u], ball.reps[v]):
                level = max(ball.dist0[u], ball.dist0[v])
                if best is None or level < best[0]:
                    best = (level, u, v)
                break
        if best is not None and ball.dist0[v] > best[0]:
            break
        seen.setdefault(key, []).append(v)

    if best is None:
        return InjectivityReport(value=cap, at_least=True, cap=cap)
    level, u, v = best
    logger.info("[Injectivity] collision %s ~ %s at level %d", ball.label(u), ball.label(v), level)
    return InjectivityReport(
        value=level - 1, at_least=False, cap=cap, witness=(ball.label(u), ball.label(v)),
    )


def growth_intersection(b: Ball, member: Callable[[Word], bool]) -> list[int]:
    """counts[n] = #(Ball(n) ∩ H) for n = 0..radius."""
    per_layer = [0] * (b.radius + 1)
    for w, d in zip(b.reps, b.dist0):
        if member(w):
            per_layer[d] += 1
    return list(np.cumsum(per_layer).tolist())
