"""Exact 2x2 integer matrix and digit-set primitives.

Everything in this module is exact: integers, integer vectors, and
fractions. Floating point is reserved for display and rendering in other
modules, because connectedness verdicts must be bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotExpandingError, PreconditionError

Vec = tuple[int, int]

ZERO: Vec = (0, 0)

# Largest inverse power probed when certifying a contracting norm.
MAX_CONTRACTION_POWER = 64


def _as_vec(p) -> Vec:
    try:
        x, y = p
    except (TypeError, ValueError):
        raise PreconditionError(f"not a 2-vector: {p!r}") from None
    if not isinstance(x, int) or not isinstance(y, int):
        raise PreconditionError(f"vector entries must be integers: {p!r}")
    return (x, y)


def vec_add(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def vec_sub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def vec_neg(u: Vec) -> Vec:
    return (-u[0], -u[1])


def vec_scale(k: int, u: Vec) -> Vec:
    return (k * u[0], k * u[1])


@dataclass(frozen=True)
class IntMatrix2:
    """2x2 integer matrix with row-major entries [[a, b], [c, d]]."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix2":
        try:
            (a, b), (c, d) = rows
        except (TypeError, ValueError):
            raise PreconditionError(f"need a 2x2 row-major matrix, got {rows!r}") from None
        for entry in (a, b, c, d):
            if not isinstance(entry, int):
                raise PreconditionError(f"matrix entries must be integers: {rows!r}")
        return cls(a, b, c, d)

    @classmethod
    def scalar_matrix(cls, p: int) -> "IntMatrix2":
        return cls(p, 0, 0, p)

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def discriminant(self) -> int:
        return self.trace * self.trace - 4 * self.det

    def matvec(self, v: Vec) -> Vec:
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def squared(self) -> "IntMatrix2":
        return self @ self

    def scalar(self) -> int | None:
        """p such that the matrix equals p times the identity, else None."""
        if self.b == 0 and self.c == 0 and self.a == self.d:
            return self.a
        return None

    def inverse_entries(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        det = self.det
        if det == 0:
            raise PreconditionError("matrix is singular")
        return (
            Fraction(self.d, det),
            Fraction(-self.b, det),
            Fraction(-self.c, det),
            Fraction(self.a, det),
        )

    def inverse_apply(self, v: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
        ia, ib, ic, id_ = self.inverse_entries()
        return (ia * v[0] + ib * v[1], ic * v[0] + id_ * v[1])

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


@dataclass(frozen=True)
class CharData:
    """Characteristic data of a 2x2 integer matrix.

    ``eigenvalues`` holds the exact integer pair when the characteristic
    polynomial splits over the integers (the discriminant is a perfect
    square); otherwise the certified triple (trace, det, discriminant)
    describes the pair without rounding.
    """

    trace: int
    det: int
    discriminant: int
    eigenvalues: tuple[int, int] | None

    @property
    def real(self) -> bool:
        return self.discriminant >= 0

    @property
    def modulus_sq(self) -> int | None:
        """Squared modulus shared by a complex-conjugate pair, else None."""
        return self.det if self.discriminant < 0 else None


def _perfect_square_root(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def char_data(T: IntMatrix2) -> CharData:
    tr, det = T.trace, T.det
    disc = tr * tr - 4 * det
    root = _perfect_square_root(disc)
    eig = None
    if root is not None:
        # disc = tr^2 - 4 det forces root and tr to share parity, so both are integers
        eig = ((tr - root) // 2, (tr + root) // 2)
    return CharData(tr, det, disc, eig)


def is_reducible(T: IntMatrix2) -> bool:
    """True when the characteristic polynomial factors over the integers."""
    return _perfect_square_root(T.discriminant) is not None


def is_expanding(T: IntMatrix2) -> bool:
    """Exact test that both eigenvalue moduli exceed 1.

    Complex pair: the shared squared modulus is det, so det > 1 decides.
    Real pair: evaluate the characteristic polynomial at +-1 and use the
    vertex position; no floating point and no square roots are needed.
    """
    tr, det = T.trace, T.det
    disc = tr * tr - 4 * det
    if disc < 0:
        return det > 1
    at_pos = 1 - tr + det   # char poly at +1
    at_neg = 1 + tr + det   # char poly at -1
    return (
        (tr > 2 and at_pos > 0)
        or (tr < -2 and at_neg > 0)
        or (at_pos < 0 and at_neg < 0)
    )


def triangular_form(T: IntMatrix2) -> tuple[int, int, int] | None:
    """(n, m, t) when T is literally [[n, 0], [t, m]] with |n| >= |m|, t in {0, 1}.

    No conjugation search is attempted; callers must supply T already
    triangular (or square-reduce first).
    """
    if T.b != 0:
        return None
    n, t, m = T.a, T.c, T.d
    if t not in (0, 1) or abs(n) < abs(m):
        return None
    return (n, m, t)


@dataclass(frozen=True)
class DigitSet:
    """Ordered collection of distinct integer translation vectors."""

    digits: tuple[Vec, ...]

    def __post_init__(self):
        if not self.digits:
            raise PreconditionError("digit set must be non-empty")
        seen = set()
        for d in self.digits:
            v = _as_vec(d)
            if v in seen:
                raise PreconditionError(f"duplicate digit {v}")
            seen.add(v)

    @classmethod
    def of(cls, points) -> "DigitSet":
        return cls(tuple(_as_vec(p) for p in points))

    @property
    def q(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    def delta(self) -> frozenset[Vec]:
        """All pairwise differences, including the zero vector."""
        out = set()
        for di in self.digits:
            for dj in self.digits:
                out.add(vec_sub(di, dj))
        return frozenset(out)

    def translate(self, w: Vec) -> "DigitSet":
        w = _as_vec(w)
        return DigitSet(tuple(vec_add(d, w) for d in self.digits))

    def max_abs(self) -> int:
        """Largest max-norm among the digits."""
        return max(max(abs(x), abs(y)) for x, y in self.digits)

    def sorted_digits(self) -> tuple[Vec, ...]:
        return tuple(sorted(self.digits))


def rect_grid(n: int, m: int) -> DigitSet:
    """The full n-by-m grid {0..n-1} x {0..m-1} in row-major order."""
    if n < 1 or m < 1:
        raise PreconditionError("grid dimensions must be positive")
    return DigitSet(tuple((i, j) for j in range(m) for i in range(n)))


def _primitive(v: Vec) -> Vec:
    g = math.gcd(v[0], v[1])
    v = (v[0] // g, v[1] // g)
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = vec_neg(v)
    return v


def collinear_direction(ds: DigitSet) -> tuple[Vec, tuple[int, ...]] | None:
    """Primitive direction and integer offsets when all digits share one line.

    Returns (v, offsets) with digits[i] = digits[0] + offsets[i] * v and v
    primitive with its first nonzero component positive, or None if the
    digits are not collinear. A single digit reports direction (1, 0).
    """
    digits = ds.digits
    base = digits[0]
    direction = None
    for d in digits[1:]:
        if d != base:
            direction = _primitive(vec_sub(d, base))
            break
    if direction is None:
        return ((1, 0), (0,) * len(digits))
    vx, vy = direction
    offsets = []
    for d in digits:
        rx, ry = vec_sub(d, base)
        if rx * vy != ry * vx:
            return None
        offsets.append(rx // vx if vx != 0 else ry // vy)
    return (direction, tuple(offsets))


def is_eigen_collinear(T: IntMatrix2, ds: DigitSet) -> bool:
    """True when the digits are collinear along an eigenvector of T."""
    cd = collinear_direction(ds)
    if cd is None:
        return False
    v = cd[0]
    w = T.matvec(v)
    return w[0] * v[1] - w[1] * v[0] == 0


def eigenvalue_along(T: IntMatrix2, v: Vec) -> int:
    """The integer eigenvalue of T for the eigenvector direction v."""
    w = T.matvec(v)
    if w[0] * v[1] - w[1] * v[0] != 0:
        raise PreconditionError(f"{v} is not an eigenvector of {T}")
    return w[0] // v[0] if v[0] != 0 else w[1] // v[1]


def square_reduce(T: IntMatrix2, ds: DigitSet) -> tuple[IntMatrix2, DigitSet]:
    """Replace (T, D) by (T^2, D + T D); the attractor is unchanged.

    The new digit set is {d_i + T d_j} with duplicates removed, first
    occurrence order kept (i outer, j inner).
    """
    if T.det == 0:
        raise PreconditionError("matrix is singular")
    out: list[Vec] = []
    seen = set()
    for di in ds.digits:
        for dj in ds.digits:
            v = vec_add(di, T.matvec(dj))
            if v not in seen:
                seen.add(v)
                out.append(v)
    return (T.squared(), DigitSet(tuple(out)))


FracMat = tuple[Fraction, Fraction, Fraction, Fraction]


def _frac_mul(M: FracMat, N: FracMat) -> FracMat:
    return (
        M[0] * N[0] + M[1] * N[2],
        M[0] * N[1] + M[1] * N[3],
        M[2] * N[0] + M[3] * N[2],
        M[2] * N[1] + M[3] * N[3],
    )


def _row_norm(M: FracMat) -> Fraction:
    """Row-sum norm, i.e. the operator norm induced by the max-norm."""
    return max(abs(M[0]) + abs(M[1]), abs(M[2]) + abs(M[3]))


def inverse_power_norm(T: IntMatrix2, k: int) -> Fraction:
    """Exact row-sum norm of the k-th inverse power of T."""
    if k < 1:
        raise PreconditionError("power must be >= 1")
    inv = T.inverse_entries()
    power = inv
    for _ in range(k - 1):
        power = _frac_mul(power, inv)
    return _row_norm(power)


def attractor_radius(T: IntMatrix2, ds: DigitSet) -> Fraction:
    """Certified rational R with the attractor inside the max-norm ball of radius R.

    Finds the smallest k with ||T^-k|| < 1 in the row-sum norm, then bounds
    every digit expansion by the geometric tail:

        R = (sum_{j=1..k} ||T^-j||) * max_d ||d|| / (1 - ||T^-k||)

    Any expanding 2x2 integer matrix certifies within a few powers; the
    probe is capped so a non-expanding matrix fails loudly instead of
    looping.
    """
    if not is_expanding(T):
        raise NotExpandingError("matrix not expanding")
    max_digit = ds.max_abs()
    inv = T.inverse_entries()
    power = inv
    norm_sum = Fraction(0)
    for _ in range(MAX_CONTRACTION_POWER):
        norm = _row_norm(power)
        norm_sum += norm
        if norm < 1:
            return norm_sum * max_digit / (1 - norm)
        power = _frac_mul(power, inv)
    raise NotExpandingError(
        f"matrix not expanding: no contracting inverse power up to {MAX_CONTRACTION_POWER}"
    )
