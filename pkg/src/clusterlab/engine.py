"""Seeds, the exchange relation, and bounded exchange-graph enumeration.

Every cluster variable is carried as a Laurent polynomial in the root
seed's variables, so equality questions across presentations reduce to
normal-form equality in one global coordinate frame.  All enumeration is
depth- and node-bounded; the algebras here are infinite type and nothing
ever tries to close them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import laurent
from .errors import (
    AmbiguousPartner,
    ExactDivisionFailed,
    InconsistentExchangePattern,
    LimitExceeded,
    NoPartnerFound,
    NotTwoMonomials,
)
from .laurent import LaurentPoly, coordinates, poly_to_json, poly_from_json
from .quiver import Quiver, quiver_from_json, quiver_to_json

DEFAULT_NODE_LIMIT = 100_000


@dataclass(frozen=True)
class Seed:
    """A quiver together with an ordered cluster, one variable per point."""

    quiver: Quiver
    cluster: tuple[LaurentPoly, ...]

    def __post_init__(self):
        if len(self.cluster) != self.quiver.n:
            raise ValueError("cluster size must match quiver size")
        if len(set(self.cluster)) != len(self.cluster):
            raise ValueError("cluster members must be pairwise distinct")

    @property
    def rank(self) -> int:
        return self.quiver.n


def initial_seed(quiver: Quiver) -> Seed:
    """Seed whose cluster is the coordinate variables x_1, ..., x_n."""
    return Seed(quiver, coordinates(quiver.n))


def exchange_sum(seed: Seed, k: int) -> LaurentPoly:
    """The two-term exchange sum at direction k: product over arrows out of
    k plus product over arrows into k, empty products equal to 1."""
    if not 0 <= k < seed.rank:
        raise ValueError(f"direction {k} out of range")
    b = seed.quiver.b
    arity = seed.cluster[0].arity
    plus = LaurentPoly.one(arity)
    minus = LaurentPoly.one(arity)
    for j in range(seed.rank):
        m = b[k][j]
        if m > 0:
            plus = plus * seed.cluster[j] ** m
        elif m < 0:
            minus = minus * seed.cluster[j] ** (-m)
    return plus + minus


def mutate_seed(seed: Seed, k: int) -> Seed:
    """Replace x_k by the exchange quotient and mutate the quiver.

    The quotient is an exact Laurent division; inexactness would contradict
    the Laurent property and raises ExactDivisionFailed.
    """
    total = exchange_sum(seed, k)
    new_var = laurent.try_div_exact(total, seed.cluster[k])
    if new_var is None:
        raise ExactDivisionFailed(
            f"exchange sum at direction {k} is not divisible by the leaving variable"
        )
    cluster = list(seed.cluster)
    cluster[k] = new_var
    return Seed(seed.quiver.mutate(k), tuple(cluster))


def canonical_seed(seed: Seed) -> Seed:
    """Sort the cluster by the deterministic polynomial order and permute the
    quiver along.  Node identity in the exchange graph is then plain equality."""
    order = sorted(range(seed.rank), key=lambda i: seed.cluster[i].sort_key())
    return Seed(seed.quiver.permuted(order), tuple(seed.cluster[i] for i in order))


ClusterKey = tuple[LaurentPoly, ...]


@dataclass
class GraphNode:
    seed: Seed  # canonical
    depth: int


@dataclass
class ExchangeGraph:
    """Depth-bounded exchange graph over canonicalized seeds."""

    root: ClusterKey
    depth: int
    nodes: dict[ClusterKey, GraphNode] = field(default_factory=dict)
    adjacency: dict[ClusterKey, dict[int, ClusterKey]] = field(default_factory=dict)

    def clusters(self) -> set[frozenset[LaurentPoly]]:
        return {frozenset(key) for key in self.nodes}

    def variables(self) -> set[LaurentPoly]:
        out: set[LaurentPoly] = set()
        for key in self.nodes:
            out.update(key)
        return out

    def node_count(self) -> int:
        return len(self.nodes)

    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency.values()) // 2

    def to_json(self) -> dict:
        keys = sorted(self.nodes)
        index = {key: i for i, key in enumerate(keys)}
        return {
            "root": index[self.root],
            "depth": self.depth,
            "nodes": [
                {
                    "cluster": [poly_to_json(v) for v in key],
                    "quiver": quiver_to_json(self.nodes[key].seed.quiver),
                    "depth": self.nodes[key].depth,
                }
                for key in keys
            ],
            "edges": sorted(
                [index[key], k, index[other]]
                for key, nbrs in self.adjacency.items()
                for k, other in nbrs.items()
                if index[key] <= index[other]
            ),
        }

    def to_dot(self) -> str:
        keys = sorted(self.nodes)
        index = {key: i for i, key in enumerate(keys)}
        lines = ["graph exchange {"]
        for key in keys:
            label = ",".join(
                "(" + " ".join(str(d) for d in denominator_vector(v)) + ")" for v in key
            )
            lines.append(f'  n{index[key]} [label="{label}"];')
        seen = set()
        for key, nbrs in self.adjacency.items():
            for other in nbrs.values():
                pair = frozenset((index[key], index[other]))
                if pair not in seen and len(pair) == 2:
                    seen.add(pair)
                    a, b = sorted(pair)
                    lines.append(f"  n{a} -- n{b};")
        lines.append("}")
        return "\n".join(lines)


def exchange_graph(
    seed: Seed, depth: int, node_limit: int = DEFAULT_NODE_LIMIT
) -> ExchangeGraph:
    """Breadth-first enumeration of seeds to the given depth.

    Nodes are identified by their sorted cluster.  Two seeds with equal
    clusters must carry the same quiver after sorting; a conflict would
    make cluster-level deduplication unsound and is asserted away.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    root = canonical_seed(seed)
    graph = ExchangeGraph(root=root.cluster, depth=depth)
    graph.nodes[root.cluster] = GraphNode(root, 0)
    graph.adjacency[root.cluster] = {}
    queue = deque([root.cluster])
    while queue:
        key = queue.popleft()
        node = graph.nodes[key]
        if node.depth >= depth:
            continue
        for k in range(node.seed.rank):
            neighbor = canonical_seed(mutate_seed(node.seed, k))
            nkey = neighbor.cluster
            existing = graph.nodes.get(nkey)
            if existing is None:
                if len(graph.nodes) >= node_limit:
                    raise LimitExceeded(f"exchange graph exceeded {node_limit} nodes")
                graph.nodes[nkey] = GraphNode(neighbor, node.depth + 1)
                graph.adjacency[nkey] = {}
                queue.append(nkey)
            elif existing.seed.quiver != neighbor.quiver:
                raise AssertionError(
                    "two seeds share a cluster but disagree on the quiver; "
                    "cluster-keyed deduplication would be unsound"
                )
            new_var = neighbor.cluster[_replaced_index(key, nkey)]
            graph.adjacency[key][k] = nkey
            graph.adjacency[nkey][nkey.index(new_var)] = key
    return graph


def _replaced_index(old_key: ClusterKey, new_key: ClusterKey) -> int:
    for i, variable in enumerate(new_key):
        if variable not in old_key:
            return i
    raise AssertionError("adjacent clusters must differ in exactly one variable")


def variables_up_to_depth(
    seed: Seed, depth: int, node_limit: int = DEFAULT_NODE_LIMIT
) -> set[LaurentPoly]:
    return exchange_graph(seed, depth, node_limit).variables()


def denominator_vector(variable: LaurentPoly) -> tuple[int, ...]:
    """Reduced-form denominator exponents with respect to the ambient frame."""
    if variable.is_zero():
        raise ValueError("zero polynomial has no denominator vector")
    _, denom = variable.reduced_form()
    return denom


def jacobian_determinant(variables: Sequence[LaurentPoly]) -> LaurentPoly:
    """Determinant of the matrix of formal partials, expanded exactly.

    Minor expansion along the first remaining row, memoized on column
    subsets, which keeps the work at O(2^n) polynomial products.
    """
    n = len(variables)
    if n == 0:
        raise ValueError("need at least one variable")
    arity = variables[0].arity
    if any(v.arity != arity for v in variables):
        raise ValueError("variables must share one arity")
    if n != arity:
        raise ValueError("need exactly one variable per ambient coordinate")
    rows = [[variables[i].derivative(j) for j in range(n)] for i in range(n)]
    cache: dict[frozenset[int], LaurentPoly] = {}

    def minor(cols: frozenset[int]) -> LaurentPoly:
        got = cache.get(cols)
        if got is not None:
            return got
        row = n - len(cols)
        if not cols:
            value = LaurentPoly.one(arity)
        else:
            value = LaurentPoly.zero(arity)
            for position, j in enumerate(sorted(cols)):
                term = rows[row][j] * minor(cols - {j})
                value = value + (term if position % 2 == 0 else -term)
        cache[cols] = value
        return value

    return minor(frozenset(range(n)))


def is_algebraically_independent(variables: Sequence[LaurentPoly]) -> bool:
    """Jacobian criterion over characteristic zero: independent iff the
    determinant is a nonzero Laurent polynomial."""
    return not jacobian_determinant(variables).is_zero()


@dataclass
class PositivityReport:
    checked: int
    violations: list[LaurentPoly]

    @property
    def passed(self) -> bool:
        return not self.violations


def positivity_audit(
    seed: Seed, depth: int, node_limit: int = DEFAULT_NODE_LIMIT
) -> PositivityReport:
    """Check every enumerated variable for positive numerator coefficients.

    A violation falsifies this implementation, not the positivity theorem.
    """
    pool = variables_up_to_depth(seed, depth, node_limit)
    violations = [v for v in sorted(pool) if not v.has_positive_coefficients()]
    return PositivityReport(checked=len(pool), violations=violations)


def _split_two_monomials(product: LaurentPoly) -> tuple[tuple[int, ...], tuple[int, ...]]:
    terms = sorted(product.terms.items())
    if len(terms) != 2 or any(c != 1 for _, c in terms) or any(
        e < 0 for exps, _ in terms for e in exps
    ):
        raise NotTwoMonomials(
            f"expected a sum of two unit monomials, got {laurent.format_poly(product)}"
        )
    return terms[0][0], terms[1][0]


def infer_exchange_quiver(
    reference: Sequence[LaurentPoly], pool: Iterable[LaurentPoly]
) -> Quiver:
    """Recover the exchange quiver of a cluster from its exchange partners.

    For each position i the unique pool variable with unit denominator e_i
    is multiplied back by the reference variable; the two monomials of the
    product carry the neighbor multiplicities.  Which monomial is the
    arrows-out product is a per-position binary choice; 2-cycle freedom
    forces all choices once one is fixed, so the result is well defined up
    to one global opposite.

    The reference cluster must be the coordinate frame of the pool.
    """
    n = len(reference)
    if list(reference) != list(coordinates(n)):
        raise ValueError("reference cluster must be the coordinate variables")
    pool = list(pool)

    monomial_pairs: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for i in range(n):
        unit = tuple(1 if j == i else 0 for j in range(n))
        partners = [v for v in pool if denominator_vector(v) == unit]
        if not partners:
            raise NoPartnerFound(f"no pool variable has denominator vector e_{i + 1}")
        if len(partners) > 1:
            raise AmbiguousPartner(
                f"{len(partners)} pool variables share denominator vector e_{i + 1}"
            )
        monomial_pairs.append(_split_two_monomials(partners[0] * reference[i]))

    def consistent(i: int, ci: int, j: int, cj: int) -> bool:
        out_i, in_i = monomial_pairs[i][ci], monomial_pairs[i][1 - ci]
        out_j, in_j = monomial_pairs[j][cj], monomial_pairs[j][1 - cj]
        return out_i[j] == in_j[i] and in_i[j] == out_j[i]

    def interacting(i: int, j: int) -> bool:
        return any(monomial_pairs[x][c][y] for x, y in ((i, j), (j, i)) for c in (0, 1))

    # choice[i] selects which monomial of pair i is the arrows-out product;
    # fixing position 0 and propagating pins everything up to a global opposite
    choice: list[Optional[int]] = [None] * n
    choice[0] = 0
    pending = deque([0])
    while pending:
        i = pending.popleft()
        for j in range(n):
            if j == i or not interacting(i, j):
                continue
            fits = [cj for cj in (0, 1) if consistent(i, choice[i], j, cj)]
            if choice[j] is None:
                if not fits:
                    raise InconsistentExchangePattern(
                        f"positions {i + 1} and {j + 1} admit no consistent orientation"
                    )
                choice[j] = fits[0]
                pending.append(j)
            elif choice[j] not in fits:
                raise InconsistentExchangePattern(
                    f"positions {i + 1} and {j + 1} admit no consistent orientation"
                )
    for j in range(n):
        if choice[j] is None:
            choice[j] = 0  # no interaction with the fixed component; either works

    b = [[0] * n for _ in range(n)]
    for i in range(n):
        out_m = monomial_pairs[i][choice[i]]
        in_m = monomial_pairs[i][1 - choice[i]]
        for j in range(n):
            if i != j:
                if out_m[j] and in_m[j]:
                    raise InconsistentExchangePattern(
                        f"both exchange monomials at position {i + 1} involve "
                        f"position {j + 1}, contradicting 2-cycle freedom"
                    )
                b[i][j] = out_m[j] - in_m[j]
    return Quiver(b)


def check_automorphism_candidate(
    seed: Seed,
    images: Sequence[LaurentPoly],
    depth: int,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> bool:
    """Bounded test of the two cluster-automorphism conditions.

    The map sends seed variable i to images[i] and extends to arbitrary
    variables as a substitution.  Checked to the given depth: the image of
    the cluster must be an enumerated cluster, and the map must commute
    with mutation wherever both sides stay inside the enumerated radius.
    False is conclusive; True means no violation was found to this depth.
    """
    if len(images) != seed.rank:
        raise ValueError("need one image per cluster variable")
    if list(seed.cluster) != list(coordinates(seed.rank)):
        raise ValueError("candidate checking is rooted at a coordinate seed")
    graph = exchange_graph(seed, depth, node_limit)

    def apply(variable: LaurentPoly) -> Optional[LaurentPoly]:
        return laurent.substitute(variable, images)

    image_cluster = [apply(v) for v in seed.cluster]
    if any(v is None for v in image_cluster):
        return False
    image_key = tuple(sorted(image_cluster, key=lambda v: v.sort_key()))
    if image_key not in graph.nodes:
        return False

    for key, node in graph.nodes.items():
        if node.depth >= depth:
            continue
        mapped = [apply(v) for v in node.seed.cluster]
        if any(v is None for v in mapped):
            return False
        mapped_key = tuple(sorted(mapped, key=lambda v: v.sort_key()))
        target = graph.nodes.get(mapped_key)
        if target is None:
            continue  # image cluster out of radius; undecided here
        for k in range(node.seed.rank):
            mutated = mutate_seed(node.seed, k).cluster[k]
            expected = apply(mutated)
            if expected is None:
                return False
            j = mapped_key.index(mapped[k])
            got = mutate_seed(target.seed, j).cluster[j]
            if expected != got:
                return False
    return True


def seed_to_json(seed: Seed) -> dict:
    return {
        "quiver": quiver_to_json(seed.quiver),
        "cluster": [poly_to_json(v) for v in seed.cluster],
    }


def seed_from_json(data: Mapping) -> Seed:
    return Seed(
        quiver_from_json(data["quiver"]),
        tuple(poly_from_json(v) for v in data["cluster"]),
    )
