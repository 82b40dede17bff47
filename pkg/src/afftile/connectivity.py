"""Connectedness verdicts for planar integral self-affine attractors.

The ground truth is the chain criterion: the attractor is connected exactly
when the graph on digits, with an edge wherever the digit difference is a
neighbor, is connected. Special-purpose routes (collinear digit sets, the
scalar modulus-2 case, the dimension-based disconnectedness test) feed the
same verdict pipeline and are cross-checked against that criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotExpandingError, PreconditionError, SizeGuardError
from .lattice import (
    DigitSet,
    IntMatrix2,
    Vec,
    attractor_radius,
    collinear_direction,
    eigenvalue_along,
    is_eigen_collinear,
    is_expanding,
    square_reduce,
    triangular_form,
    vec_sub,
)
from .neighbors import (
    DEFAULT_MAX_CELLS,
    NeighborOutcome,
    brute_force_neighbors,
    closed_form_neighbors,
)

CONNECTED = "connected"
DISCONNECTED = "disconnected"
UNKNOWN = "unknown"

# Rule identifiers recorded in the analysis, in the order they fire.
RULE_SINGLE_DIGIT = "single-digit"
RULE_SCALAR_TWO = "scalar-two-universal"
RULE_COLLINEAR = "collinear-line-reduction"
RULE_SQUARE_REDUCE = "square-reduce"
RULE_CLOSED_FORM = "closed-form-neighbors"
RULE_CLOSED_CLAUSE = "closed-form-disconnected-clause"
RULE_DIMENSION = "dimension-test"
RULE_ORACLE = "oracle-neighbors"
RULE_CHAIN = "chain-criterion"

# Digit sets larger than this are not worth squaring: the oracle on the
# original instance is cheaper than one on q^2 digits.
MAX_REDUCED_DIGITS = 4096


@dataclass(frozen=True)
class ChainGraph:
    """Graph on digit indices with an edge where the difference is a neighbor."""

    q: int
    edges: frozenset[tuple[int, int]]  # (i, j) with i < j

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.q)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for row in adj:
            row.sort()
        return adj

    def components(self) -> list[list[int]]:
        adj = self.adjacency()
        seen = [False] * self.q
        comps: list[list[int]] = []
        for start in range(self.q):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            comp = []
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def spanning_walk(self, start: int = 0) -> tuple[int, ...]:
        """A walk (repeats allowed) visiting every vertex of a connected graph.

        Depth-first traversal recording both the descent and the return
        steps, so consecutive entries are always adjacent.
        """
        adj = self.adjacency()
        walk = [start]
        seen = {start}
        stack: list[tuple[int, list[int]]] = [(start, list(adj[start]))]
        while stack:
            u, todo = stack[-1]
            while todo and todo[0] in seen:
                todo.pop(0)
            if not todo:
                stack.pop()
                if stack:
                    walk.append(stack[-1][0])
                continue
            v = todo.pop(0)
            seen.add(v)
            walk.append(v)
            stack.append((v, list(adj[v])))
        if len(seen) != self.q:
            raise PreconditionError("spanning walk requested on a disconnected graph")
        return tuple(walk)


@dataclass(frozen=True)
class Verdict:
    """Connected with a witness walk, disconnected with a certificate, or unknown."""

    status: str
    witness: tuple[int, ...] | None = None
    certificate: dict | None = None

    @property
    def is_connected(self) -> bool:
        return self.status == CONNECTED


@dataclass(frozen=True)
class DimensionTest:
    """Data of the dimension-based disconnectedness test.

    The inequality between the row/column filling exponent and the closed
    two-branch dimension formula is decided exactly; the float fields are
    display values only and must agree with the exact decision.
    """

    n: int
    m: int
    q: int
    r: int
    branch: str          # "upper" when q > m, "lower" when q <= m
    lhs: float
    dim_value: float
    triggered: bool


@dataclass
class Analysis:
    """Trace of a connectedness decision: rules fired and evidence gathered."""

    rules: list[str] = field(default_factory=list)
    matrix: IntMatrix2 | None = None          # instance actually analyzed
    digits: DigitSet | None = None
    original_matrix: IntMatrix2 | None = None
    original_digits: DigitSet | None = None
    reductions: int = 0
    closed_form: NeighborOutcome | None = None
    oracle: frozenset | None = None
    neighbor_agreement: str | None = None     # "exact" | "mismatch" | None
    dimension: DimensionTest | None = None
    collinear: dict | None = None
    notes: list[str] = field(default_factory=list)

    def neighbor_set_used(self) -> frozenset | None:
        if self.oracle is not None:
            return self.oracle
        if self.closed_form is not None and not self.closed_form.is_disconnected:
            return self.closed_form.neighbors
        return None


def chain_graph(ds: DigitSet, neighbors: frozenset[Vec]) -> ChainGraph:
    digits = ds.digits
    edges = set()
    for i in range(len(digits)):
        for j in range(i + 1, len(digits)):
            if vec_sub(digits[i], digits[j]) in neighbors:
                edges.add((i, j))
    return ChainGraph(len(digits), frozenset(edges))


def chain_verdict(ds: DigitSet, neighbors: frozenset[Vec]) -> Verdict:
    """Connected iff the digits chain together through the neighbor set."""
    graph = chain_graph(ds, neighbors)
    comps = graph.components()
    if len(comps) == 1:
        return Verdict(CONNECTED, witness=graph.spanning_walk())
    part = comps[0]
    rest = sorted(i for comp in comps[1:] for i in comp)
    return Verdict(
        DISCONNECTED,
        certificate={"type": "partition", "part": part, "rest": rest},
    )


def onedim_tile_connected(q: int, digits) -> bool:
    """Connectedness of the 1-D tile with q digits and scale factor +-q.

    Holds exactly when the sorted digits form an arithmetic progression,
    i.e. the digit set is a translate of {0, a, 2a, ..., (q-1)a}.
    """
    values = list(digits)
    if len(values) != q:
        raise PreconditionError(f"digit count {len(values)} does not match q={q}")
    if q < 2:
        raise PreconditionError("need q >= 2")
    if len(set(values)) != q:
        raise PreconditionError("digits must be distinct")
    values.sort()
    gaps = {values[i + 1] - values[i] for i in range(q - 1)}
    return len(gaps) == 1


def convex_hull_interval(p: int, offsets) -> tuple[Fraction, Fraction]:
    """Exact endpoints of the convex hull of the 1-D attractor x -> (x + d) / p.

    For p > 0 the endpoints are fixed points of the extreme maps. For p < 0
    the maps flip orientation, so the endpoints solve a 2x2 linear system
    coupling them; the two solutions are returned sorted and the resulting
    interval maps into itself.
    """
    offsets = [int(d) for d in offsets]
    if not offsets:
        raise PreconditionError("offsets must be non-empty")
    if abs(p) <= 1:
        raise PreconditionError("scale factor must satisfy |p| > 1")
    lo, hi = min(offsets), max(offsets)
    if p > 0:
        return (Fraction(lo, p - 1), Fraction(hi, p - 1))
    first = Fraction(hi + p * lo, p * p - 1)
    second = Fraction(lo + p * hi, p * p - 1)
    return (min(first, second), max(first, second))


def collinear_cover(p: int, offsets) -> dict:
    """Interval covering data for the 1-D attractor: hull, pieces, first gap.

    The attractor is connected exactly when the scaled translates of the
    hull cover the hull with no gap.
    """
    offsets = [int(d) for d in offsets]
    lo, hi = convex_hull_interval(p, offsets)
    pieces = []
    for idx, d in enumerate(offsets):
        a = (lo + d) / p
        b = (hi + d) / p
        if a > b:
            a, b = b, a
        pieces.append((a, b, idx))
    order = sorted(pieces, key=lambda t: (t[0], t[1], t[2]))
    reach = lo
    gap = None
    covered_idx: list[int] = []
    for a, b, idx in order:
        if a > reach:
            gap = (reach, a)
            break
        covered_idx.append(idx)
        if b > reach:
            reach = b
    covered = gap is None and reach == hi
    left = sorted(covered_idx) if gap is not None else None
    return {
        "hull": (lo, hi),
        "pieces": order,
        "covered": covered,
        "gap": gap,
        "left_of_gap": left,
    }


def collinear_connected(p: int, offsets) -> bool:
    """Connectedness of the 1-D attractor via exact interval covering."""
    return collinear_cover(p, offsets)["covered"]


def count_rows(ds: DigitSet) -> int:
    """Number of distinct second coordinates among the digits."""
    return len({y for _, y in ds.digits})


def singular_value_dimension(n: int, m: int, q: int) -> tuple[str, float]:
    """Closed two-branch dimension formula for the n-by-m triangular family.

    Returns ("lower", log_m q) when q <= m and ("upper", 1 + log_n(q / m))
    when m < q <= n*m; both branches give exactly 1 at q = m.
    """
    if n <= 1 or m <= 1 or n < m:
        raise PreconditionError("need n >= m >= 2")
    if q < 2:
        raise PreconditionError("need q >= 2")
    if q > n * m:
        raise PreconditionError(f"q={q} exceeds n*m={n * m}")
    if q == m:
        return ("lower", 1.0)
    if q < m:
        return ("lower", math.log(q) / math.log(m))
    return ("upper", 1.0 + (math.log(q) - math.log(m)) / math.log(n))


def dimension_test(n: int, m: int, q: int, r: int) -> DimensionTest:
    """Dimension-based disconnectedness test, decided exactly.

    The attractor is disconnected when log_m(r) + log_n(q/r) differs from
    the closed dimension formula. Clearing logarithms, the difference is
    ln(r/m) * (1/ln m - 1/ln n) on the upper branch and
    ln(q/r) * (1/ln n - 1/ln m) on the lower branch, so inequality holds
    exactly when n != m and (r != m if q > m else r != q). Floats are
    computed for display only.
    """
    if not (1 <= r <= min(q, m)):
        raise PreconditionError(f"need 1 <= r <= min(q, m), got r={r}")
    branch, dim_value = singular_value_dimension(n, m, q)
    if q > m:
        triggered = n != m and r != m
    else:
        triggered = n != m and r != q
    lhs = math.log(r) / math.log(m) + (math.log(q) - math.log(r)) / math.log(n)
    return DimensionTest(n, m, q, r, branch, lhs, dim_value, triggered)


def _decide_collinear(T: IntMatrix2, ds: DigitSet, analysis: Analysis) -> Verdict:
    direction, offsets = collinear_direction(ds)
    scale = eigenvalue_along(T, direction)
    cover = collinear_cover(scale, offsets)
    analysis.rules.append(RULE_COLLINEAR)
    analysis.collinear = {
        "direction": direction,
        "offsets": offsets,
        "scale": scale,
        "hull": cover["hull"],
        "gap": cover["gap"],
    }
    if cover["covered"]:
        return Verdict(CONNECTED)
    left = cover["left_of_gap"] or []
    rest = sorted(set(range(ds.q)) - set(left))
    gap = cover["gap"]
    return Verdict(
        DISCONNECTED,
        certificate={
            "type": "interval-gap",
            "part": sorted(left),
            "rest": rest,
            "gap": [str(gap[0]), str(gap[1])] if gap else None,
        },
    )


def _try_square_reductions(
    T: IntMatrix2, ds: DigitSet, analysis: Analysis
) -> tuple[IntMatrix2, DigitSet]:
    """Square-reduce up to twice when that lands on a usable triangular form.

    Squaring turns negative diagonal entries positive and flattens some
    non-triangular matrices (their square can be diagonal). When no square
    helps, the original instance is kept: the oracle works on it directly
    and squaring only inflates the digit count.
    """
    cur_T, cur_ds = T, ds
    for _ in range(2):
        nf = triangular_form(cur_T)
        if nf is not None and nf[0] >= 2 and nf[1] >= 2:
            break
        if cur_ds.q * cur_ds.q > MAX_REDUCED_DIGITS:
            break
        squared = cur_T.squared()
        if triangular_form(squared) is None:
            break
        cur_T, cur_ds = square_reduce(cur_T, cur_ds)
        analysis.rules.append(RULE_SQUARE_REDUCE)
        analysis.reductions += 1
    return cur_T, cur_ds


def _oracle_chain(
    T: IntMatrix2, ds: DigitSet, analysis: Analysis, max_cells: int
) -> Verdict:
    nset = brute_force_neighbors(T, ds, max_cells=max_cells)
    analysis.oracle = nset
    analysis.rules.append(RULE_ORACLE)
    verdict = chain_verdict(ds, nset)
    analysis.rules.append(RULE_CHAIN)
    return verdict


def decide_connected(
    T: IntMatrix2,
    ds: DigitSet,
    *,
    skip_closed_form: bool = False,
    cross_check: bool = False,
    oracle_max_cells: int = DEFAULT_MAX_CELLS,
) -> tuple[Verdict, Analysis]:
    """Full connectedness decision pipeline.

    Route order: trivial single digit; the scalar modulus-2 matrices
    (connected for every digit set, confirmed against the oracle chain);
    digit sets collinear along an eigenvector (exact 1-D interval
    covering); square reduction toward a positive triangular form; the
    closed-form neighbor set plus chain criterion with the dimension test
    as corroboration; otherwise the brute-force oracle plus chain
    criterion. Disconnectedness clauses short-circuit; corroborating tests
    only annotate.

    ``skip_closed_form`` forces the oracle even when the closed form
    applies; ``cross_check`` computes the oracle alongside the closed form
    and records whether they agree exactly.
    """
    if not is_expanding(T):
        raise NotExpandingError("matrix not expanding")
    analysis = Analysis(original_matrix=T, original_digits=ds, matrix=T, digits=ds)

    if ds.q == 1:
        analysis.rules.append(RULE_SINGLE_DIGIT)
        return Verdict(CONNECTED, witness=(0,)), analysis

    scale = T.scalar()
    if scale in (2, -2):
        analysis.rules.append(RULE_SCALAR_TWO)
        verdict = Verdict(CONNECTED)
        try:
            confirmation = _oracle_chain(T, ds, analysis, oracle_max_cells)
            if confirmation.is_connected:
                verdict = Verdict(CONNECTED, witness=confirmation.witness)
            else:
                analysis.notes.append("confirmation-disagreement")
        except SizeGuardError:
            analysis.notes.append("oracle confirmation skipped: candidate box too large")
        return verdict, analysis

    if is_eigen_collinear(T, ds):
        return _decide_collinear(T, ds, analysis), analysis

    cur_T, cur_ds = _try_square_reductions(T, ds, analysis)
    analysis.matrix = cur_T
    analysis.digits = cur_ds

    nf = triangular_form(cur_T)
    if nf is not None and not skip_closed_form:
        n, m, t = nf
        if n >= 2 and m >= 2:
            try:
                outcome = closed_form_neighbors(n, m, t, cur_ds)
            except PreconditionError:
                outcome = None  # digits outside the grid etc.: fall to the oracle
            if outcome is not None and t == 0:
                return (
                    _closed_form_verdict(
                        n, m, cur_T, cur_ds, outcome, analysis, cross_check, oracle_max_cells
                    ),
                    analysis,
                )
            if outcome is not None:
                # The shear-case closed form is demonstrably incomplete (the
                # tests carry exactly certified counterexamples), so it is
                # recorded for comparison but the oracle decides the verdict.
                analysis.closed_form = outcome
                analysis.rules.append(RULE_CLOSED_FORM)
                analysis.dimension = dimension_test(n, m, cur_ds.q, count_rows(cur_ds))
                analysis.rules.append(RULE_DIMENSION)
                analysis.notes.append("shear-closed-form-advisory")
                verdict = _oracle_chain(cur_T, cur_ds, analysis, oracle_max_cells)
                if not outcome.is_disconnected:
                    analysis.neighbor_agreement = (
                        "exact" if analysis.oracle == outcome.neighbors else "mismatch"
                    )
                elif verdict.is_connected:
                    analysis.notes.append("shear-clause-disagreement")
                if analysis.dimension.triggered and verdict.is_connected:
                    analysis.notes.append("dimension-test-disagreement")
                return verdict, analysis

    verdict = _oracle_chain(cur_T, cur_ds, analysis, oracle_max_cells)
    return verdict, analysis


def _closed_form_verdict(
    n: int,
    m: int,
    T: IntMatrix2,
    ds: DigitSet,
    outcome: NeighborOutcome,
    analysis: Analysis,
    cross_check: bool,
    oracle_max_cells: int,
) -> Verdict:
    analysis.closed_form = outcome
    analysis.rules.append(RULE_CLOSED_FORM)

    analysis.dimension = dimension_test(n, m, ds.q, count_rows(ds))
    analysis.rules.append(RULE_DIMENSION)

    if outcome.is_disconnected:
        analysis.rules.append(RULE_CLOSED_CLAUSE)
        verdict = Verdict(
            DISCONNECTED,
            certificate={"type": "missing-contact", "clause": outcome.clause},
        )
    else:
        verdict = chain_verdict(ds, outcome.neighbors)
        analysis.rules.append(RULE_CHAIN)

    if analysis.dimension.triggered and verdict.is_connected:
        analysis.notes.append("dimension-test-disagreement")

    if cross_check:
        try:
            oracle = brute_force_neighbors(T, ds, max_cells=oracle_max_cells)
            analysis.oracle = oracle
            analysis.rules.append(RULE_ORACLE)
            if not outcome.is_disconnected:
                analysis.neighbor_agreement = (
                    "exact" if oracle == outcome.neighbors else "mismatch"
                )
                if analysis.neighbor_agreement == "mismatch":
                    analysis.notes.append("closed-form/oracle mismatch")
        except SizeGuardError:
            analysis.notes.append("oracle cross-check skipped: candidate box too large")
    return verdict
