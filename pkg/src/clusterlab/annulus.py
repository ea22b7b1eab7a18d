r"""The marked annulus: arcs, crossings, triangulations, flips, and lifts.

Everything is computed in the universal cover, an infinite horizontal
strip.  Marked points on the outer boundary live at integer positions on
line 0, points on the inner boundary at integer positions on line 1, and
the deck translation shifts line-0 positions by p and line-1 positions by
q simultaneously.  An arc of the annulus is stored as one lift, a chord
between two strip boundary points, normalized by translating its anchor
endpoint into the fundamental window.  Winding is then simply a large
position difference; no extra winding field exists.

Chords between boundary points of the strip behave like chords of a disk
whose boundary circle runs left to right along line 0 and right to left
along line 1.  Two chords cross (in minimal position) exactly when their
endpoints interleave in that cyclic order, so crossing numbers reduce to
counting interleaving deck translates, and a triangulation drawn in the
strip is a genuine planar triangulation whose faces can be walked
combinatorially.

    line 1:   ... -2 -1  0  1  2 ...     (inner boundary, period q)
              ----o--o--o--o--o----
                   \  |  |  /            chords = arc lifts
              ----o--o--o--o--o----
    line 0:   ... -2 -1  0  1  2 ...     (outer boundary, period p)
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .engine import Seed, initial_seed, mutate_seed
from .errors import (
    FlipSearchExceeded,
    InvalidArc,
    LimitExceeded,
    MalformedTriangulation,
)
from .laurent import LaurentPoly
from .quiver import Quiver

Endpoint = tuple[int, int]  # (boundary, position)
Chord = tuple[Endpoint, Endpoint]


@dataclass(frozen=True)
class MarkedAnnulus:
    """Annulus with p marked points on the outer boundary and q on the inner."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError("need at least one marked point on each boundary")

    def period(self, boundary: int) -> int:
        if boundary == 0:
            return self.p
        if boundary == 1:
            return self.q
        raise ValueError("boundary must be 0 or 1")


@dataclass(frozen=True, order=True)
class Arc:
    """Canonical lift of an arc: endpoints ordered, anchor in the fundamental window."""

    e1: Endpoint
    e2: Endpoint

    @property
    def boundaries(self) -> tuple[int, int]:
        return (self.e1[0], self.e2[0])

    @property
    def chord(self) -> Chord:
        return (self.e1, self.e2)


def classify_arc(arc: Arc) -> tuple[str, Optional[int]]:
    """("peripheral", boundary) or ("bridging", None), by endpoint boundaries."""
    b1, b2 = arc.boundaries
    if b1 == b2:
        return ("peripheral", b1)
    return ("bridging", None)


def deck_endpoint(point: Endpoint, k: int, annulus: MarkedAnnulus) -> Endpoint:
    b, x = point
    return (b, x + k * annulus.period(b))


def deck_chord(chord: Chord, k: int, annulus: MarkedAnnulus) -> Chord:
    return (deck_endpoint(chord[0], k, annulus), deck_endpoint(chord[1], k, annulus))


def _norm_chord(chord: Chord) -> Chord:
    a, b = chord
    return (a, b) if a <= b else (b, a)


def _cut_key(point: Endpoint):
    # linear order along the strip boundary circle, cut at far left of line 0:
    # line 0 left to right, then line 1 right to left
    b, x = point
    return (0, x) if b == 0 else (1, -x)


def _chords_cross(c1: Chord, c2: Chord) -> bool:
    """Strict interleaving of endpoints in the boundary cyclic order.

    Chords sharing an endpoint never count as crossing; they can always be
    pulled apart at the shared marked point.
    """
    a, b = c1
    u, v = c2
    if a in (u, v) or b in (u, v):
        return False
    lo, hi = sorted((_cut_key(a), _cut_key(b)))
    return (lo < _cut_key(u) < hi) != (lo < _cut_key(v) < hi)


def _alignment_shifts(c1: Chord, c2: Chord, annulus: MarkedAnnulus) -> list[int]:
    shifts = []
    for ea in c1:
        for eb in c2:
            if ea[0] == eb[0]:
                period = annulus.period(ea[0])
                delta = ea[1] - eb[1]
                shifts.append(delta // period)
                shifts.append(-((-delta) // period))
    return shifts


def _chord_crossings(c1: Chord, c2: Chord, annulus: MarkedAnnulus,
                     skip_zero: bool = False) -> int:
    """Crossings of c1 with all deck translates of c2.

    Only translates aligning some same-boundary endpoint pair can
    interleave, so the sum is scanned over that finite shift range with a
    safety margin.  Without any same-boundary endpoints (peripheral arcs of
    opposite boundaries) no translate ever interleaves.
    """
    shifts = _alignment_shifts(c1, c2, annulus)
    if not shifts:
        return 0
    total = 0
    for k in range(min(shifts) - 2, max(shifts) + 3):
        if skip_zero and k == 0:
            continue
        if _chords_cross(c1, deck_chord(c2, k, annulus)):
            total += 1
    return total


def self_crossing(chord: Chord, annulus: MarkedAnnulus) -> int:
    """Crossings of a chord with its own nonzero deck translates."""
    return _chord_crossings(chord, chord, annulus, skip_zero=True)


def arc_check(annulus: MarkedAnnulus, e1: Endpoint, e2: Endpoint) -> tuple[bool, str]:
    """Validity of a raw endpoint pair, with the failing clause on rejection."""
    for b, _ in (e1, e2):
        if b not in (0, 1):
            return False, "endpoint boundary must be 0 or 1"
    if e1[0] == e2[0]:
        gap = abs(e1[1] - e2[1])
        if gap == 0:
            return False, "contractible loop at a marked point"
        if gap == 1:
            return False, "boundary segment"
    if self_crossing((e1, e2), annulus) > 0:
        return False, "crosses its own deck translates"
    return True, ""


def make_arc(annulus: MarkedAnnulus, e1: Endpoint, e2: Endpoint) -> Arc:
    """Canonicalize a raw endpoint pair into an Arc, validating it."""
    ok, reason = arc_check(annulus, e1, e2)
    if not ok:
        raise InvalidArc(f"({e1}, {e2}): {reason}")
    anchor = min(e1, e2)
    shift = -(anchor[1] // annulus.period(anchor[0]))
    p1 = deck_endpoint(e1, shift, annulus)
    p2 = deck_endpoint(e2, shift, annulus)
    if p2 < p1:
        p1, p2 = p2, p1
    return Arc(p1, p2)


def crossing_number(a: Arc, b: Arc, annulus: MarkedAnnulus) -> int:
    """Minimal intersection count of two arcs, summed over deck translates."""
    return _chord_crossings(a.chord, b.chord, annulus)


def arc_to_json(arc: Arc) -> dict:
    return {
        "e1": {"b": arc.e1[0], "pos": arc.e1[1]},
        "e2": {"b": arc.e2[0], "pos": arc.e2[1]},
    }


def arc_from_json(annulus: MarkedAnnulus, data: Mapping) -> Arc:
    return make_arc(
        annulus,
        (int(data["e1"]["b"]), int(data["e1"]["pos"])),
        (int(data["e2"]["b"]), int(data["e2"]["pos"])),
    )


# ---------------------------------------------------------------------------
# triangulations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Triangulation:
    """Maximal compatible arc collection, in a stable positional order.

    Flips replace an arc in place, so positions track identity across
    mutation and quiver extraction keeps one point per position.
    """

    annulus: MarkedAnnulus
    arcs: tuple[Arc, ...]

    @property
    def arc_set(self) -> frozenset[Arc]:
        return frozenset(self.arcs)

    def index_of(self, arc: Arc) -> int:
        return self.arcs.index(arc)


def triangulation(annulus: MarkedAnnulus, arcs: Sequence[Arc], validate: bool = True) -> Triangulation:
    tri = Triangulation(annulus, tuple(arcs))
    if validate:
        n = annulus.p + annulus.q
        if len(set(tri.arcs)) != len(tri.arcs):
            raise MalformedTriangulation("repeated arc")
        if len(tri.arcs) != n:
            raise MalformedTriangulation(f"expected {n} interior arcs, got {len(tri.arcs)}")
        for i, a in enumerate(tri.arcs):
            for b in tri.arcs[i + 1:]:
                if crossing_number(a, b, annulus):
                    raise MalformedTriangulation(f"arcs {a} and {b} cross")
    return tri


def initial_triangulation(annulus: MarkedAnnulus) -> Triangulation:
    """The fan triangulation: bridging arcs (0@i, 1@0) for i = 0..p sweeping
    the outer boundary, closed by the fan (0@p, 1@j) for j = 1..q-1 on the
    inner one.  Exactly p + q arcs, pairwise compatible."""
    p, q = annulus.p, annulus.q
    arcs = [make_arc(annulus, (0, i), (1, 0)) for i in range(p)]
    arcs.extend(make_arc(annulus, (0, p), (1, j)) for j in range(1, q))
    arcs.append(make_arc(annulus, (0, p), (1, 0)))
    return triangulation(annulus, arcs)


def triangulation_to_json(tri: Triangulation) -> dict:
    return {
        "p": tri.annulus.p,
        "q": tri.annulus.q,
        "arcs": [arc_to_json(a) for a in tri.arcs],
    }


def triangulation_from_json(data: Mapping) -> Triangulation:
    ann = MarkedAnnulus(int(data["p"]), int(data["q"]))
    return triangulation(ann, [arc_from_json(ann, a) for a in data["arcs"]])


# ---------------------------------------------------------------------------
# strip drawings and face walks
# ---------------------------------------------------------------------------


def _rotation_key(v: Endpoint, u: Endpoint):
    # order of edges around v, counterclockwise, given by the position of the
    # far endpoint along the boundary circle starting just after v
    vb, vx = v
    ub, ux = u
    if vb == 0:
        if ub == 0:
            return (0, ux - vx) if ux > vx else (2, ux)
        return (1, -ux)
    if ub == 1:
        return (0, vx - ux) if ux < vx else (2, -ux)
    return (1, ux)


class _Strip:
    """A finite window of the universal cover with an explicit chord family.

    Vertices are every integer boundary position spanned by the chords;
    edges are the chords plus unit boundary segments.  Faces are traced
    from the vertex rotations, interior kept on the left.
    """

    def __init__(self, annulus: MarkedAnnulus, chords: Iterable[Chord],
                 safe: Optional[dict[int, tuple[int, int]]] = None):
        self.annulus = annulus
        self.chords = {_norm_chord(c) for c in chords}
        self.safe = safe
        lo = {0: None, 1: None}
        hi = {0: None, 1: None}
        for c in self.chords:
            for b, x in c:
                lo[b] = x if lo[b] is None else min(lo[b], x)
                hi[b] = x if hi[b] is None else max(hi[b], x)
        if lo[0] is None or lo[1] is None:
            raise MalformedTriangulation("chord family must touch both boundaries")
        self.lo, self.hi = lo, hi
        edges = set(self.chords)
        for b in (0, 1):
            for x in range(lo[b], hi[b]):
                edges.add(((b, x), (b, x + 1)))
        neighbors: dict[Endpoint, list[Endpoint]] = {}
        for u, v in edges:
            neighbors.setdefault(u, []).append(v)
            neighbors.setdefault(v, []).append(u)
        for v, nbrs in neighbors.items():
            nbrs.sort(key=lambda u: _rotation_key(v, u))
        self.neighbors = neighbors
        self._position = {
            (v, u): i for v, nbrs in neighbors.items() for i, u in enumerate(nbrs)
        }

    def vertex_safe(self, v: Endpoint) -> bool:
        if self.safe is None:
            return True
        lo, hi = self.safe[v[0]]
        return lo <= v[1] <= hi

    def faces(self) -> list[list[tuple[Endpoint, Endpoint]]]:
        """All dart orbits; interior faces come out counterclockwise."""
        seen: set[tuple[Endpoint, Endpoint]] = set()
        out = []
        darts = [(u, v) for v, nbrs in self.neighbors.items() for u in nbrs]
        for start in darts:
            if start in seen:
                continue
            face = []
            d = start
            while True:
                seen.add(d)
                face.append(d)
                u, v = d
                nbrs = self.neighbors[v]
                w = nbrs[self._position[(v, u)] - 1]
                d = (v, w)
                if d == start:
                    break
            out.append(face)
        return out

    def safe_triangles(self) -> list[list[tuple[Endpoint, Endpoint]]]:
        """Faces whose vertices are all inside the safe region.

        Any such face is a genuine face of the infinite lift, and for a
        triangulation it must have three sides.
        """
        out = []
        for face in self.faces():
            if all(self.vertex_safe(v) for v, _ in face):
                if len(face) != 3:
                    raise MalformedTriangulation(
                        f"interior face with {len(face)} sides"
                    )
                out.append(face)
        return out


def _strip_of(tri: Triangulation, pad_periods: int = 3) -> _Strip:
    ann = tri.annulus
    ext = {0: 0, 1: 0}
    for arc in tri.arcs:
        for b, x in arc.chord:
            ext[b] = max(ext[b], abs(x))
    k_span = 0
    for b in (0, 1):
        period = ann.period(b)
        k_span = max(k_span, -(-(2 * ext[b] + 2 * period) // period))
    K = k_span + pad_periods
    chords = {
        _norm_chord(deck_chord(arc.chord, k, ann))
        for arc in tri.arcs
        for k in range(-K, K + 1)
    }
    safe = {}
    for b in (0, 1):
        period = ann.period(b)
        margin = K * period - ext[b] - period
        safe[b] = (-margin, margin)
    return _Strip(ann, chords, safe)


def _project_chord(annulus: MarkedAnnulus, chord: Chord) -> Optional[Arc]:
    """Arc class of a strip chord; None when it is a boundary segment."""
    (b1, x1), (b2, x2) = chord
    if b1 == b2 and abs(x1 - x2) == 1:
        return None
    return make_arc(annulus, chord[0], chord[1])


@dataclass(frozen=True)
class Triangle:
    """One triangle of the annulus, as a counterclockwise dart cycle.

    sides[i] is the side from vertices[i] to vertices[(i+1) % 3]; each side
    carries its strip chord and its projected arc (None for a boundary
    segment).
    """

    vertices: tuple[Endpoint, Endpoint, Endpoint]
    chords: tuple[Chord, Chord, Chord]
    sides: tuple[Optional[Arc], Optional[Arc], Optional[Arc]]


def _face_orbit_key(annulus: MarkedAnnulus, face) -> tuple:
    vertices = sorted(v for v, _ in face)
    anchor = vertices[0]
    shift = -(anchor[1] // annulus.period(anchor[0]))
    return tuple(deck_endpoint(v, shift, annulus) for v in vertices)


def _face_to_triangle(annulus: MarkedAnnulus, face) -> Triangle:
    verts = tuple(v for v, _ in face)
    chords = tuple(_norm_chord(d) for d in face)
    sides = tuple(_project_chord(annulus, c) for c in chords)
    return Triangle(verts, chords, sides)


@functools.lru_cache(maxsize=8192)
def triangles(tri: Triangulation) -> tuple[Triangle, ...]:
    """One representative triangle per deck orbit; always p + q of them."""
    ann = tri.annulus
    strip = _strip_of(tri)
    reps: dict[tuple, Triangle] = {}
    for face in strip.safe_triangles():
        key = _face_orbit_key(ann, face)
        if key not in reps:
            reps[key] = _face_to_triangle(ann, face)
    expected = ann.p + ann.q
    if len(reps) != expected:
        raise MalformedTriangulation(
            f"found {len(reps)} triangle orbits, expected {expected}"
        )
    return tuple(reps[key] for key in sorted(reps))


@functools.lru_cache(maxsize=8192)
def quiver_of(tri: Triangulation) -> Quiver:
    """Quiver on the interior arcs: one arrow per triangle corner whose two
    sides are distinct interior arcs, oriented with the face traversal.
    Opposite contributions from doubly glued corners cancel in the
    skew-symmetric matrix; parallel ones accumulate."""
    index = {arc: i for i, arc in enumerate(tri.arcs)}
    n = len(tri.arcs)
    b = [[0] * n for _ in range(n)]
    for triangle in triangles(tri):
        for s in range(3):
            first = triangle.sides[s]
            second = triangle.sides[(s + 1) % 3]
            if first is None or second is None or first == second:
                continue
            b[index[first]][index[second]] += 1
            b[index[second]][index[first]] -= 1
    return Quiver(b)


Side = Optional[Arc]  # None stands for a boundary segment


@dataclass(frozen=True)
class FlipResult:
    """Outcome of one flip: the new triangulation, the new diagonal, and the
    quadrilateral sides grouped into the two opposite pairs that multiply
    together in the exchange identity."""

    triangulation: Triangulation
    removed: Arc
    new_arc: Arc
    pairs: tuple[tuple[Side, Side], tuple[Side, Side]]


def flip(tri: Triangulation, target: "Arc | int") -> FlipResult:
    """Replace one arc by the opposite diagonal of its quadrilateral."""
    idx = target if isinstance(target, int) else tri.index_of(target)
    gamma = tri.arcs[idx]
    chord = _norm_chord(gamma.chord)
    strip = _strip_of(tri)
    adjacent = [
        face
        for face in strip.safe_triangles()
        if chord in (_norm_chord(d) for d in face)
    ]
    # the canonical lift sits deep inside the safe window, so both of its
    # neighboring faces are present; more than two is impossible in a plane
    if len(adjacent) != 2:
        raise MalformedTriangulation(
            f"arc {gamma} lies on {len(adjacent)} safe faces, expected 2"
        )

    def rotated(face):
        for i, dart in enumerate(face):
            if _norm_chord(dart) == chord:
                return face[i:] + face[:i]
        raise AssertionError("face lost its own side")

    # each face holds one of the two darts along gamma, so the rotated faces
    # glue into the quadrilateral cycle regardless of their order
    first, second = (rotated(face) for face in adjacent)
    cycle = [first[1], first[2], second[1], second[2]]
    apex1 = first[1][1]
    apex2 = second[1][1]
    ann = tri.annulus
    new_arc = make_arc(ann, apex1, apex2)
    sides = [_project_chord(ann, _norm_chord(d)) for d in cycle]
    arcs = list(tri.arcs)
    arcs[idx] = new_arc
    return FlipResult(
        Triangulation(ann, tuple(arcs)),
        removed=gamma,
        new_arc=new_arc,
        pairs=((sides[0], sides[2]), (sides[1], sides[3])),
    )


@dataclass(frozen=True)
class PtolemyRelation:
    gamma: Arc
    gamma_prime: Arc
    pairs: tuple[tuple[Side, Side], tuple[Side, Side]]
    products: tuple[LaurentPoly, LaurentPoly]

    @property
    def rhs(self) -> LaurentPoly:
        return self.products[0] + self.products[1]


def ptolemy_relation(
    tri: Triangulation, target: "Arc | int", assignment: Mapping[Arc, LaurentPoly]
) -> PtolemyRelation:
    """The exchange identity of a flip: the diagonal product equals the sum
    of the two opposite side products, boundary sides contributing 1."""
    result = flip(tri, target)
    arity = next(iter(assignment.values())).arity

    def value(side: Side) -> LaurentPoly:
        if side is None:
            return LaurentPoly.one(arity)
        got = assignment.get(side)
        if got is None:
            raise KeyError(f"assignment missing arc {side}")
        return got

    products = tuple(value(a) * value(b) for a, b in result.pairs)
    return PtolemyRelation(result.removed, result.new_arc, result.pairs, products)


# ---------------------------------------------------------------------------
# triangulations and seeds in lockstep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriSeed:
    """A triangulation with its cluster attached positionally: the variable
    of arcs[i] is cluster[i], always in the frame of the initial seed."""

    tri: Triangulation
    seed: Seed

    @property
    def assignment(self) -> dict[Arc, LaurentPoly]:
        return dict(zip(self.tri.arcs, self.seed.cluster))

    def variable(self, arc: Arc) -> LaurentPoly:
        return self.seed.cluster[self.tri.index_of(arc)]


@dataclass(frozen=True)
class FlipRecord:
    """One lockstep step: the exchange identity old * new == p1 + p2."""

    index: int
    removed: Arc
    new_arc: Arc
    old_var: LaurentPoly
    new_var: LaurentPoly
    pairs: tuple[tuple[Side, Side], tuple[Side, Side]]
    products: tuple[LaurentPoly, LaurentPoly]


def initial_state(annulus: MarkedAnnulus) -> TriSeed:
    tri = initial_triangulation(annulus)
    return TriSeed(tri, initial_seed(quiver_of(tri)))


def flip_state(state: TriSeed, target: "Arc | int") -> tuple[TriSeed, FlipRecord]:
    """Flip an arc and mutate the seed at the matching direction.

    The quadrilateral products are checked against the algebraic exchange
    on every step; a mismatch would mean the geometric and algebraic layers
    lost alignment and is raised immediately.
    """
    idx = target if isinstance(target, int) else state.tri.index_of(target)
    result = flip(state.tri, idx)
    new_seed = mutate_seed(state.seed, idx)
    assignment = state.assignment
    arity = state.seed.cluster[0].arity

    def value(side: Side) -> LaurentPoly:
        return LaurentPoly.one(arity) if side is None else assignment[side]

    products = tuple(value(a) * value(b) for a, b in result.pairs)
    old_var = state.seed.cluster[idx]
    new_var = new_seed.cluster[idx]
    if old_var * new_var != products[0] + products[1]:
        raise MalformedTriangulation(
            "exchange relation disagrees with the flip quadrilateral"
        )
    record = FlipRecord(
        idx, result.removed, result.new_arc, old_var, new_var, result.pairs, products
    )
    return TriSeed(result.triangulation, new_seed), record


def variable_of_arc(
    annulus: MarkedAnnulus, arc: Arc, rng=None
) -> LaurentPoly:
    """Cluster variable of an arc, rooted at the fan triangulation.

    Repeatedly flips an arc of the current triangulation with maximal
    crossing against the target (ties broken by smallest canonical form, or
    by the supplied rng, which must not change the answer).  The crossing
    total strictly decreases, so the cap is pure paranoia.
    """
    state = initial_state(annulus)
    if arc in state.tri.arcs:
        return state.variable(arc)
    crossings = [crossing_number(a, arc, annulus) for a in state.tri.arcs]
    cap = 4 * sum(crossings) + 4 * (annulus.p + annulus.q) + 16
    steps = 0
    while arc not in state.tri.arcs:
        steps += 1
        if steps > cap:
            raise FlipSearchExceeded(f"no flip path to {arc} within {cap} steps")
        crossings = [crossing_number(a, arc, annulus) for a in state.tri.arcs]
        top = max(crossings)
        if top == 0:
            raise MalformedTriangulation(
                f"{arc} is compatible with a maximal collection it does not belong to"
            )
        ties = sorted(i for i, c in enumerate(crossings) if c == top)
        if rng is not None and len(ties) > 1:
            pick = ties[rng.randrange(len(ties))]
        else:
            pick = min(ties, key=lambda i: state.tri.arcs[i])
        state, _ = flip_state(state, pick)
    return state.variable(arc)


def reach_state(annulus: MarkedAnnulus, target: Triangulation) -> TriSeed:
    """Lockstep state of an arbitrary triangulation, found by flipping from
    the fan.

    At every step some current arc outside the target crosses a target arc
    (p + q + 1 pairwise compatible arcs cannot exist), and flipping a
    maximal-crossing one strictly shrinks the total crossing with the
    target.  The returned state is reordered to the target's positional
    order.
    """
    ann = annulus
    want = target.arc_set
    state = initial_state(ann)
    totals = [
        sum(crossing_number(a, w, ann) for w in want) for a in state.tri.arcs
    ]
    cap = 4 * sum(totals) + 8 * (ann.p + ann.q) + 16
    steps = 0
    while state.tri.arc_set != want:
        steps += 1
        if steps > cap:
            raise FlipSearchExceeded(f"no flip path to {target} within {cap} steps")
        best_idx, best_total = None, 0
        for i, arc in enumerate(state.tri.arcs):
            if arc in want:
                continue
            total = sum(crossing_number(arc, w, ann) for w in want)
            if total > best_total or (
                total == best_total
                and best_idx is not None
                and arc < state.tri.arcs[best_idx]
            ):
                best_idx, best_total = i, total
        if best_idx is None or best_total == 0:
            raise MalformedTriangulation(
                "target set admits an extra compatible arc; it cannot be maximal"
            )
        state, _ = flip_state(state, best_idx)
    perm = [state.tri.index_of(arc) for arc in target.arcs]
    seed = Seed(
        state.seed.quiver.permuted(perm),
        tuple(state.seed.cluster[i] for i in perm),
    )
    return TriSeed(target, seed)


@dataclass
class FlipNode:
    state: TriSeed
    depth: int


def flip_bfs(
    annulus: MarkedAnnulus, depth: int, node_limit: int = 100_000
) -> dict[frozenset[Arc], FlipNode]:
    """All triangulations within the given flip distance of the fan, with
    their clusters, keyed by arc set.  The arc-to-variable correspondence
    is accumulated across nodes and must be single valued."""
    root = initial_state(annulus)
    nodes = {root.tri.arc_set: FlipNode(root, 0)}
    queue = [root.tri.arc_set]
    variables: dict[Arc, LaurentPoly] = root.assignment
    while queue:
        next_queue = []
        for key in queue:
            node = nodes[key]
            if node.depth >= depth:
                continue
            for idx in range(len(node.state.tri.arcs)):
                new_state, record = flip_state(node.state, idx)
                new_key = new_state.tri.arc_set
                known = variables.get(record.new_arc)
                if known is None:
                    variables[record.new_arc] = record.new_var
                elif known != record.new_var:
                    raise MalformedTriangulation(
                        f"arc {record.new_arc} received two distinct variables"
                    )
                if new_key not in nodes:
                    if len(nodes) >= node_limit:
                        raise LimitExceeded(f"flip graph exceeded {node_limit} nodes")
                    nodes[new_key] = FlipNode(new_state, node.depth + 1)
                    next_queue.append(new_key)
        queue = next_queue
    return nodes


def arc_variable_map(nodes: Mapping[frozenset[Arc], FlipNode]) -> dict[Arc, LaurentPoly]:
    out: dict[Arc, LaurentPoly] = {}
    for node in nodes.values():
        for arc, var in node.state.assignment.items():
            existing = out.get(arc)
            if existing is None:
                out[arc] = var
            elif existing != var:
                raise MalformedTriangulation(
                    f"arc {arc} received two distinct variables"
                )
    return out


def candidate_arcs(annulus: MarkedAnnulus, winding: int = 2) -> list[Arc]:
    """Every peripheral arc plus all bridging arcs within the winding bound,
    canonical and sorted.  Handy as a finite search pool."""
    out = set()
    for b in (0, 1):
        period = annulus.period(b)
        for start in range(period):
            for span in range(2, period + 1):
                ok, _ = arc_check(annulus, (b, start), (b, start + span))
                if ok:
                    out.add(make_arc(annulus, (b, start), (b, start + span)))
    reach = winding * annulus.q + annulus.q
    for start in range(annulus.p):
        for inner in range(-reach, reach + 1):
            out.add(make_arc(annulus, (0, start), (1, inner)))
    return sorted(out)


# ---------------------------------------------------------------------------
# lifted triangulations
# ---------------------------------------------------------------------------


def lift_triangulation(tri: Triangulation, window: int) -> list[Chord]:
    """Deck translates of every arc across the given number of fundamental
    windows, as raw strip chords."""
    if window < 2:
        raise ValueError("window must cover at least two deck periods")
    return sorted(
        _norm_chord(deck_chord(arc.chord, k, tri.annulus))
        for arc in tri.arcs
        for k in range(window)
    )


def _chord_flip(annulus: MarkedAnnulus, chords: set[Chord], chord: Chord,
                trusted) -> bool:
    """Flip a single chord inside an explicit chord family.

    Returns False without touching anything when the chord's quadrilateral
    is not fully inside the trusted region (possible only near the padded
    ends of the window)."""
    strip = _Strip(annulus, chords, safe=None)
    adjacent = []
    for face in strip.faces():
        if len(face) == 3 and chord in (_norm_chord(d) for d in face):
            adjacent.append(face)
    if len(adjacent) != 2:
        return False
    vertices = {v for face in adjacent for v, _ in face}
    if not all(trusted(v) for v in vertices):
        return False
    apexes = [v for v in vertices if v not in chord]
    if len(apexes) != 2:
        raise MalformedTriangulation("flip quadrilateral lost its apexes")
    chords.remove(chord)
    chords.add(_norm_chord((apexes[0], apexes[1])))
    return True


def verify_cover_flip(tri: Triangulation, index: int, window: int) -> bool:
    """Flip every lift of one arc in the windowed strip and compare the
    interior of the result with the lift of the flipped triangulation.

    The strip is padded on both sides so that every flip whose
    quadrilateral can influence the comparison region is performed on a
    complete neighborhood; flips skipped at the ragged pad ends cannot
    reach the interior.
    """
    if window < 2:
        raise ValueError("window must cover at least two deck periods")
    ann = tri.annulus
    span = 1
    for arc in tri.arcs:
        for b, x in arc.chord:
            span = max(span, -(-abs(x) // ann.period(b)))
    pad = 2 * span + 4
    ks = range(-pad, window + pad)
    current = {
        _norm_chord(deck_chord(arc.chord, k, ann)) for arc in tri.arcs for k in ks
    }

    lo = {b: -pad * ann.period(b) - span * ann.period(b) for b in (0, 1)}
    hi = {
        b: (window + pad) * ann.period(b) + span * ann.period(b) for b in (0, 1)
    }
    guard = {b: (span + 2) * ann.period(b) for b in (0, 1)}

    def trusted(v: Endpoint) -> bool:
        return lo[v[0]] + guard[v[0]] <= v[1] <= hi[v[0]] - guard[v[0]]

    gamma = tri.arcs[index]
    flipped_any = False
    for k in ks:
        chord = _norm_chord(deck_chord(gamma.chord, k, ann))
        if _chord_flip(ann, current, chord, trusted):
            flipped_any = True
    if not flipped_any:
        raise ValueError("window too small to flip any full fundamental domain")

    expected = {
        _norm_chord(deck_chord(arc.chord, k, ann))
        for arc in flip(tri, index).triangulation.arcs
        for k in ks
    }

    def interior(chord: Chord) -> bool:
        return all(0 <= x <= window * ann.period(b) for b, x in chord)

    got_interior = {c for c in current if interior(c)}
    want_interior = {c for c in expected if interior(c)}
    if len(want_interior) < len(tri.arcs):
        raise ValueError("window too small to compare a full fundamental domain")
    return got_interior == want_interior
