"""Neighbor sets: which lattice translates of the attractor touch it.

A nonzero integer vector u is a neighbor when the attractor F and F + u
intersect, i.e. u lies in F - F. Three computations are provided:

* a closed form for expanding lower-triangular systems with digits in the
  base grid (fast, but only valid under those hypotheses),
* a general lower bound built from digit differences that telescope to
  lattice vectors under the inverse powers,
* an exact brute-force oracle that prunes a certified candidate box to the
  greatest fixed point of the self-difference system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PreconditionError, SizeGuardError
from .lattice import (
    DigitSet,
    IntMatrix2,
    Vec,
    attractor_radius,
    is_eigen_collinear,
    triangular_form,
    vec_neg,
)

E_RIGHT: Vec = (1, 0)
E_UP: Vec = (0, 1)
E_DIAG: Vec = (1, 1)
E_ANTI: Vec = (1, -1)

# Disconnectedness clause identifiers for the closed forms.
CLAUSE_NO_VERTICAL_CONTACT = "vertical-contact-missing"
CLAUSE_NO_CONTACT = "adjacent-contact-missing"

DEFAULT_MAX_CELLS = 4_000_000


@dataclass(frozen=True)
class NeighborOutcome:
    """Either a disconnectedness clause or the complete neighbor set."""

    clause: str | None
    neighbors: frozenset[Vec] | None

    def __post_init__(self):
        if (self.clause is None) == (self.neighbors is None):
            raise ValueError("exactly one of clause / neighbors must be set")

    @classmethod
    def disconnected(cls, clause: str) -> "NeighborOutcome":
        return cls(clause, None)

    @classmethod
    def of_set(cls, vecs) -> "NeighborOutcome":
        return cls(None, frozenset(vecs))

    @property
    def is_disconnected(self) -> bool:
        return self.clause is not None


def _with_negatives(vecs) -> frozenset[Vec]:
    out = set()
    for v in vecs:
        out.add(v)
        out.add(vec_neg(v))
    return frozenset(out)


def contact_vectors(n: int, m: int, t: int) -> dict[Vec, Vec]:
    """Map each candidate neighbor to the digit difference that realizes it.

    These are the differences whose repeated expansion under the inverse
    powers telescopes to a unit-type lattice vector; with t = 1 the shear
    couples the axes, so crossing one grid to the right needs a one-row
    rise and the plain diagonal candidate drops out.
    """
    if t == 1:
        return {
            E_RIGHT: (n - 1, 1),
            E_UP: (0, m - 1),
            E_ANTI: (n - 1, 2 - m),
        }
    return {
        E_RIGHT: (n - 1, 0),
        E_UP: (0, m - 1),
        E_DIAG: (n - 1, m - 1),
        E_ANTI: (n - 1, 1 - m),
    }


def closed_form_neighbors(n: int, m: int, t: int, ds: DigitSet) -> NeighborOutcome:
    """Closed-form neighbor set for T = [[n, 0], [t, m]] with digits in the base grid.

    Hypotheses enforced: n, m >= 2 (the triangular matrix must be
    expanding), t in {0, 1}, at least two digits, every digit inside
    {0..n-1} x {0..m-1}, and the digits not collinear along an eigenvector.
    Violations raise PreconditionError rather than returning a guess.
    """
    if t not in (0, 1):
        raise PreconditionError(f"subdiagonal entry must be 0 or 1, got {t}")
    if n < 2 or m < 2:
        raise PreconditionError("triangular system must be expanding (n, m >= 2)")
    if ds.q < 2:
        raise PreconditionError("need at least two digits")
    for x, y in ds.digits:
        if not (0 <= x < n and 0 <= y < m):
            raise PreconditionError(f"digit {(x, y)} outside the {n}x{m} base grid")
    T = IntMatrix2(n, 0, t, m)
    if is_eigen_collinear(T, ds):
        raise PreconditionError("digit set is collinear along an eigenvector")

    delta = ds.delta()
    contacts = contact_vectors(n, m, t)
    if t == 1:
        if contacts[E_UP] not in delta:
            return NeighborOutcome.disconnected(CLAUSE_NO_VERTICAL_CONTACT)
        hits = [unit for unit, diff in contacts.items() if diff in delta]
        return NeighborOutcome.of_set(_with_negatives(hits))
    hits = [unit for unit, diff in contacts.items() if diff in delta]
    if not hits:
        return NeighborOutcome.disconnected(CLAUSE_NO_CONTACT)
    return NeighborOutcome.of_set(_with_negatives(hits))


def neighbor_lower_bound(T: IntMatrix2, ds: DigitSet) -> frozenset[Vec]:
    """Neighbors guaranteed for any finite digit set, from scaled contact vectors.

    For T = [[n, 0], [t, m]] with n, m > 0: if k times a contact vector is a
    digit difference the geometric series puts k times the matching unit
    vector in F - F, and mixed combinations k*first +- l*second yield
    (k, +-l). The scan is finite: components of the scaled contacts grow
    linearly, so k is bounded by the largest difference component and l by
    twice that (the mixed second component can cancel against k).
    """
    nf = triangular_form(T)
    if nf is None or nf[0] <= 0 or nf[1] <= 0:
        raise PreconditionError("matrix must be [[n,0],[t,m]] with n, m > 0 and t in {0,1}")
    n, m, t = nf
    delta = ds.delta()
    span = max((max(abs(x), abs(y)) for x, y in delta), default=0)
    contacts = contact_vectors(n, m, t)
    axis = [(diff, unit) for unit, diff in contacts.items() if unit != E_ANTI]
    first = contacts[E_RIGHT]
    second = contacts[E_UP]

    found: set[Vec] = set()
    for k in range(1, span + 1):
        for diff, unit in axis:
            target = (k * diff[0], k * diff[1])
            if target != (0, 0) and target in delta:
                found.add((k * unit[0], k * unit[1]))
        for sign in (1, -1):
            for l in range(1, 2 * span + 1):
                target = (
                    k * first[0] + sign * l * second[0],
                    k * first[1] + sign * l * second[1],
                )
                if target != (0, 0) and target in delta:
                    found.add((k, sign * l))
    return _with_negatives(found)


def _candidate_bound(T: IntMatrix2, ds: DigitSet, max_cells: int) -> int:
    radius = attractor_radius(T, ds)
    bound = math.floor(2 * radius)
    width = 2 * bound + 1
    if width * width > max_cells:
        raise SizeGuardError(
            f"candidate box {width}x{width} exceeds the {max_cells}-cell guard"
        )
    return bound


def pruning_history(
    T: IntMatrix2, ds: DigitSet, max_cells: int = DEFAULT_MAX_CELLS
) -> list[frozenset[Vec]]:
    """Successive candidate sets of the fixed-point pruning, ending at the result.

    An integer u lies in F - F exactly when T u - delta stays in F - F for
    some digit difference delta, so the integer points of F - F form the
    greatest fixed point of that closure inside the certified box
    ||u|| <= 2R. Each pass removes points with no surviving successor; the
    sequence is strictly shrinking until it stabilizes, so it terminates in
    at most |box| passes.
    """
    bound = _candidate_bound(T, ds, max_cells)
    deltas = tuple(ds.delta())
    current: set[Vec] = {
        (x, y)
        for x in range(-bound, bound + 1)
        for y in range(-bound, bound + 1)
    }
    image = {u: T.matvec(u) for u in current}
    history = [frozenset(current)]
    while True:
        keep: set[Vec] = set()
        for u in current:
            tx, ty = image[u]
            for dx, dy in deltas:
                if (tx - dx, ty - dy) in current:
                    keep.add(u)
                    break
        if len(keep) == len(current):
            break
        current = keep
        history.append(frozenset(current))
    return history


def brute_force_neighbors(
    T: IntMatrix2, ds: DigitSet, max_cells: int = DEFAULT_MAX_CELLS
) -> frozenset[Vec]:
    """Exact neighbor set: integer points of F - F with the origin removed."""
    final = pruning_history(T, ds, max_cells)[-1]
    return frozenset(final - {(0, 0)})


def is_neighbor(T: IntMatrix2, ds: DigitSet, u: Vec) -> bool:
    """Point query: does the translate of the attractor by u touch it?"""
    if u == (0, 0):
        raise PreconditionError("neighbor query vector must be nonzero")
    return u in brute_force_neighbors(T, ds)
