"""Dense complex and exact rational matrix kernels.

Dense matrices are plain ``numpy`` complex arrays.  Exact matrices hold
``fractions.Fraction`` entries, or :class:`GaussianRational` entries when an
imaginary part is present, and are reduced with fraction-free (Bareiss)
elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from numbers import Rational

import numpy as np

from .errors import DimensionMismatchError, SingularMatrixError


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used for rank and structure decisions.

    Attributes
    ----------
    rank_tol : float
        Singular values below ``rank_tol * sigma_max`` count as zero.
    eig_cluster_tol : float
        Eigenvalues closer than ``eig_cluster_tol * max(1, rho(A))`` are
        always merged.
    verify_tol : float
        Residual threshold for reconstruction and inverse checks.
    """

    rank_tol: float = 1e-10
    eig_cluster_tol: float = 1e-8
    verify_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "eig_cluster_tol", "verify_tol"):
            value = getattr(self, name)
            if not (value > 0 and np.isfinite(value)):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")

    @property
    def span_tol(self) -> float:
        """Largest principal-angle sine accepted for equal subspaces."""
        return float(np.sqrt(self.rank_tol))


DEFAULT_TOL = ToleranceConfig()


# ---------------------------------------------------------------------------
# exact scalars
# ---------------------------------------------------------------------------


class GaussianRational:
    """Complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Rational)):
            return GaussianRational(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero")
        return GaussianRational((self.re * o.re + self.im * o.im) / den,
                                (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def exact_scalar(x):
    """Coerce ``x`` to ``Fraction`` (real) or ``GaussianRational``."""
    if isinstance(x, GaussianRational):
        return x.re if x.im == 0 else x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def rationalize(z, max_denominator=10**6):
    """Exact rational equal to the float(s) in ``z``, or ``None``."""
    z = complex(z)
    parts = []
    for x in (z.real, z.imag):
        if not np.isfinite(x):
            return None
        fr = Fraction(x).limit_denominator(max_denominator)
        if float(fr) != x:
            return None
        parts.append(fr)
    return exact_scalar(GaussianRational(*parts))


class ExactMatrix:
    """Immutable matrix of exact rational (or Gaussian rational) entries."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, entries):
        data = tuple(tuple(exact_scalar(x) for x in row) for row in entries)
        if data and any(len(r) != len(data[0]) for r in data):
            raise DimensionMismatchError("ragged rows")
        self.rows = len(data)
        self.cols = len(data[0]) if data else 0
        self._entries = data

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def from_numpy(cls, a, max_denominator=10**6):
        """Exact copy of a float array; ``None`` if an entry is not a
        small-denominator rational."""
        a = np.atleast_2d(np.asarray(a))
        out = []
        for row in a:
            new = []
            for x in row:
                q = rationalize(x, max_denominator)
                if q is None:
                    return None
                new.append(q)
            out.append(new)
        return cls(out)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self):
        return self._entries

    def __getitem__(self, ij):
        i, j = ij
        return self._entries[i][j]

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self._entries == other._entries

    def __hash__(self):
        return hash(self._entries)

    def __repr__(self):
        return f"ExactMatrix({[list(map(str, r)) for r in self._entries]})"

    @property
    def is_real(self):
        return all(isinstance(x, Fraction) for row in self._entries for x in row)

    def to_numpy(self):
        return np.array([[complex(x) for x in row] for row in self._entries],
                        dtype=complex).reshape(self.rows, self.cols)

    def column(self, j):
        return [row[j] for row in self._entries]

    def transpose(self):
        return ExactMatrix(list(zip(*self._entries)) if self.rows else [])

    def __matmul__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        ot = list(zip(*other._entries))
        return ExactMatrix([[sum((a * b for a, b in zip(row, col)), Fraction(0))
                             for col in ot] for row in self._entries])

    def __add__(self, other):
        self._check_same(other)
        return ExactMatrix([[a + b for a, b in zip(r, s)]
                            for r, s in zip(self._entries, other._entries)])

    def __sub__(self, other):
        self._check_same(other)
        return ExactMatrix([[a - b for a, b in zip(r, s)]
                            for r, s in zip(self._entries, other._entries)])

    def _check_same(self, other):
        if not isinstance(other, ExactMatrix) or other.shape != self.shape:
            raise DimensionMismatchError("shape mismatch")

    def shift(self, q):
        """Return ``self - q*I``."""
        q = exact_scalar(q)
        return ExactMatrix([[x - q if i == j else x for j, x in enumerate(row)]
                            for i, row in enumerate(self._entries)])

    def apply(self, vec):
        """Matrix-vector product with an exact vector."""
        return [sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in self._entries]


# ---------------------------------------------------------------------------
# dense helpers
# ---------------------------------------------------------------------------


def as_dense(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array."""
    if isinstance(a, ExactMatrix):
        return a.to_numpy()
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def as_exact(a, max_denominator=10**6):
    """Exact view of ``a`` when all entries are small-denominator rationals."""
    if isinstance(a, ExactMatrix):
        return a
    return ExactMatrix.from_numpy(as_dense(a), max_denominator)


def _square(a):
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got {a.shape}")


def matmul(a, b) -> np.ndarray:
    a, b = as_dense(a), as_dense(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def induced_l1_norm(a) -> float:
    """Maximum absolute column sum."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    if a.size == 0:
        return 0.0
    return float(np.abs(a).sum(axis=0).max())


def rank_and_kernel(a, tol: ToleranceConfig = DEFAULT_TOL, scale=None):
    """Numeric rank and an orthonormal kernel basis (columns).

    Singular values at or below ``rank_tol * scale`` count as zero, where
    ``scale`` defaults to the largest singular value of ``a``.  Pass an
    outside scale when ``a`` is itself a projection that may vanish.
    """
    a = as_dense(a)
    m, n = a.shape
    if a.size == 0:
        return 0, np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if s.size else 0.0
    ref = smax if scale is None else scale
    rank = int(np.sum(s > tol.rank_tol * ref)) if ref > 0 else 0
    return rank, vh[rank:].conj().T


def inverse(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    a = as_dense(a)
    _square(a)
    n = a.shape[0]
    rank, _ = rank_and_kernel(a, tol)
    if rank < n:
        raise SingularMatrixError(f"matrix is singular (numeric rank {rank} < {n})")
    inv = np.linalg.inv(a)
    if induced_l1_norm(a @ inv - np.eye(n)) > tol.verify_tol:
        raise SingularMatrixError("matrix is numerically singular: inverse residual too large")
    return inv


def orth(a) -> np.ndarray:
    """Orthonormal basis for the column span of full-column-rank ``a``."""
    a = np.asarray(a, dtype=complex)
    if a.shape[1] == 0:
        return a
    q, _ = np.linalg.qr(a)
    return q


def subspace_sine(a, b) -> float:
    """Sine of the largest principal angle between ``span(a)`` and ``span(b)``.

    Returns 1.0 when the dimensions differ.
    """
    qa, qb = orth(a), orth(b)
    if qa.shape[1] != qb.shape[1]:
        return 1.0
    if qa.shape[1] == 0:
        return 0.0
    resid = qb - qa @ (qa.conj().T @ qb)
    return float(min(1.0, np.linalg.norm(resid, 2)))


def span_residual(basis, x) -> float:
    """Relative least-squares residual of ``x`` against ``span(basis)``."""
    x = np.asarray(x, dtype=complex)
    nx = np.linalg.norm(x)
    if nx == 0:
        return 0.0
    q = orth(basis)
    return float(np.linalg.norm(x - q @ (q.conj().T @ x)) / nx)


def jordan_block(value, size) -> np.ndarray:
    """Upper bidiagonal Jordan block."""
    return value * np.eye(size, dtype=complex) + np.eye(size, k=1, dtype=complex)


# ---------------------------------------------------------------------------
# exact elimination
# ---------------------------------------------------------------------------


def _integerize(rows):
    """Scale each real rational row by the lcm of its denominators."""
    out = []
    for row in rows:
        m = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * m) for x in row])
    return out


def _bareiss(rows):
    """Fraction-free row echelon form, in place.  Returns pivot columns."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    integral = all(isinstance(x, int) for row in rows for x in row)
    prev = 1
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            lead = rows[i][c]
            for j in range(c + 1, ncols):
                num = piv * rows[i][j] - lead * rows[r][j]
                rows[i][j] = num // prev if integral else num / prev
            rows[i][c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return pivots


def exact_rank_and_kernel(a: ExactMatrix):
    """Exact rank and reduced-echelon kernel basis of ``a``.

    Each kernel column has a 1 in one free position, 0 in the other free
    positions, and the pivot entries solved for.
    """
    if not isinstance(a, ExactMatrix):
        a = as_exact(a)
        if a is None:
            raise TypeError("matrix has no exact rational representation")
    n = a.cols
    if a.rows == 0 or n == 0:
        return 0, ExactMatrix([[] for _ in range(n)]) if n else ExactMatrix([])
    if a.is_real:
        work = _integerize([list(r) for r in a.entries])
    else:
        work = [[GaussianRational(x.re, x.im) if isinstance(x, GaussianRational)
                 else GaussianRational(x) for x in r] for r in a.entries]
    pivots = _bareiss(work)
    rank = len(pivots)
    # back-substitute to reduced echelon form over the field
    red = [[exact_scalar(x) if not isinstance(x, int) else Fraction(x) for x in work[i]]
           for i in range(rank)]
    for k in range(rank - 1, -1, -1):
        c = pivots[k]
        piv = red[k][c]
        red[k] = [x / piv for x in red[k]]
        for i in range(k):
            f = red[i][c]
            if f != 0:
                red[i] = [x - f * y for x, y in zip(red[i], red[k])]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for k, c in enumerate(pivots):
            vec[c] = exact_scalar(-red[k][f])
        basis.append(vec)
    kernel = ExactMatrix([[basis[k][i] for k in range(len(basis))] for i in range(n)])
    return rank, kernel


def exact_rank(columns, n):
    """Exact rank of the matrix whose columns are the given exact vectors."""
    if not columns:
        return 0
    m = ExactMatrix([[col[i] for col in columns] for i in range(n)])
    return exact_rank_and_kernel(m)[0]
