"""Jordan decomposition ``A = V J V^{-1}`` with explicit Jordan chains.

Eigenvalues come from a dense eigensolver and are grouped by a clustering
step that is validated with nested-kernel (staircase) rank tests.  When the
input has small-denominator rational entries, rational eigenvalues are
detected and their chains are built in exact arithmetic.

Canonical block order: eigenvalues by ``(|1 - lambda|, Re, Im)``; blocks of
one eigenvalue by decreasing size.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import (DimensionMismatchError, IllConditionedStructureError,
                     SingularMatrixError)
from .matcore import (DEFAULT_TOL, ExactMatrix, ToleranceConfig, as_dense,
                      as_exact, exact_rank, exact_rank_and_kernel, induced_l1_norm,
                      inverse, jordan_block, rank_and_kernel)

#: Largest dimension for which the exact rational path is attempted.
EXACT_MAX_N = 40

_CLUSTER_START = 1e-1
_ROUND = 9


@dataclass(frozen=True)
class Eigenvalue:
    """One distinct eigenvalue and its multiplicities.

    ``weyr`` holds ``dim Ker(A - lambda I)^p`` for ``p = 1..index``.
    ``exact_value`` is set when the eigenvalue was confirmed in exact
    arithmetic.
    """

    value: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    index: int
    weyr: tuple
    exact_value: object = None

    @property
    def segre(self) -> tuple:
        return segre_from_weyr(self.weyr)


@dataclass(frozen=True)
class JordanChain:
    """Columns ``v_1..v_r`` with ``A v_1 = lambda v_1`` and
    ``A v_p = lambda v_p + v_{p-1}``."""

    i: int
    j: int
    value: complex
    vectors: np.ndarray = field(repr=False)
    start: int = 0

    @property
    def size(self) -> int:
        return self.vectors.shape[1]

    @property
    def stop(self) -> int:
        return self.start + self.size


@dataclass(frozen=True)
class JordanForm:
    """Ordered ``(eigenvalue, block size)`` pairs."""

    blocks: tuple

    @property
    def n(self) -> int:
        return sum(size for _, size in self.blocks)

    def matrix(self) -> np.ndarray:
        n = self.n
        out = np.zeros((n, n), dtype=complex)
        pos = 0
        for value, size in self.blocks:
            out[pos:pos + size, pos:pos + size] = jordan_block(value, size)
            pos += size
        return out

    def matches(self, other: "JordanForm", atol: float) -> bool:
        """Equal as multisets of blocks, eigenvalues within ``atol``."""
        if sorted(s for _, s in self.blocks) != sorted(s for _, s in other.blocks):
            return False
        unused = list(other.blocks)
        for value, size in self.blocks:
            hit = next((k for k, (v, s) in enumerate(unused)
                        if s == size and abs(v - value) <= atol), None)
            if hit is None:
                return False
            unused.pop(hit)
        return True

    def is_unicellular(self) -> bool:
        return len(self.blocks) == 1


@dataclass(frozen=True)
class JordanDecomposition:
    """``matrix = V @ J @ inv(V)`` with ``W = inv(V)^H``."""

    matrix: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    chains: tuple
    eigenvalues: tuple

    @property
    def n(self) -> int:
        return self.V.shape[0]

    @property
    def form(self) -> JordanForm:
        return JordanForm(tuple((c.value, c.size) for c in self.chains))

    @property
    def J(self) -> np.ndarray:
        return self.form.matrix()

    def chain(self, i: int, j: int) -> JordanChain:
        for c in self.chains:
            if c.i == i and c.j == j:
                return c
        raise IndexError(f"no Jordan block ({i}, {j})")

    def dual_rows(self, i: int, j: int) -> np.ndarray:
        """Rows of ``W^H`` paired with block ``(i, j)``."""
        c = self.chain(i, j)
        return self.W[:, c.start:c.stop].conj().T

    def is_unicellular(self) -> bool:
        return len(self.chains) == 1


# ---------------------------------------------------------------------------
# Weyr / Segre bookkeeping
# ---------------------------------------------------------------------------


def segre_from_weyr(weyr) -> tuple:
    """Block sizes (descending) from cumulative kernel dimensions."""
    dims = [0] + list(weyr)
    w = [dims[p] - dims[p - 1] for p in range(1, len(dims))]
    if any(x <= 0 for x in w) or any(w[p] < w[p + 1] for p in range(len(w) - 1)):
        raise IllConditionedStructureError(f"inconsistent Weyr characteristic {tuple(weyr)}")
    sizes = []
    for p in range(len(w), 0, -1):
        count = w[p - 1] - (w[p] if p < len(w) else 0)
        sizes.extend([p] * count)
    return tuple(sizes)


def weyr_from_segre(sizes) -> tuple:
    sizes = list(sizes)
    m = max(sizes)
    dims, total = [], 0
    for p in range(1, m + 1):
        total += sum(1 for s in sizes if s >= p)
        dims.append(total)
    return tuple(dims)


def _sort_key(value: complex):
    return (round(abs(1 - value), _ROUND), round(value.real, _ROUND), round(value.imag, _ROUND))


# ---------------------------------------------------------------------------
# numeric nested kernels
# ---------------------------------------------------------------------------


def _nested_kernels(a: np.ndarray, lam: complex, tol: ToleranceConfig, limit=None):
    """Orthonormal bases of ``Ker(A - lam I)^p`` until stabilization."""
    n = a.shape[0]
    b = a - lam * np.eye(n)
    scale = max(np.linalg.norm(a, 2), 1.0)
    bases = []
    q = np.zeros((n, 0), dtype=complex)
    while limit is None or len(bases) < limit:
        proj = b - q @ (q.conj().T @ b)
        _, k = rank_and_kernel(proj, tol, scale=scale)
        if k.shape[1] < q.shape[1]:
            raise IllConditionedStructureError("kernel dimensions decreased in staircase")
        if k.shape[1] == q.shape[1]:
            break
        bases.append(k)
        q = k
        if k.shape[1] == n:
            break
    return bases


def weyr_characteristic(a, lam, tol: ToleranceConfig = DEFAULT_TOL) -> tuple:
    """``dim Ker(A - lam I)^p`` for ``p = 1, 2, ...`` until stabilization."""
    dense = as_dense(a)
    _require_square(dense)
    dims = tuple(k.shape[1] for k in _nested_kernels(dense, complex(lam), tol))
    if not dims:
        raise ValueError(f"{lam!r} is not an eigenvalue (trivial kernel)")
    return dims


def _exact_kernels(ex: ExactMatrix, q, limit=None):
    """Exact reduced-echelon bases of ``Ker(A - q I)^p`` until stabilization."""
    b = ex.shift(q)
    n = ex.rows
    power = b
    bases = []
    while limit is None or len(bases) < limit:
        _, ker = exact_rank_and_kernel(power)
        if bases and ker.cols == len(bases[-1]):
            break
        if ker.cols == 0:
            break
        bases.append([ker.column(c) for c in range(ker.cols)])
        if ker.cols == n:
            break
        power = power @ b
    return bases


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------


def _require_square(a):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")


def _exact_view(a, exact):
    if exact is False:
        return None
    ex = as_exact(a)
    if ex is None or ex.rows > EXACT_MAX_N:
        if exact is True:
            raise ValueError("matrix has no usable exact representation")
        return None
    return ex


def _rational_candidate(z: complex, scale: float):
    from .matcore import GaussianRational, exact_scalar

    re = Fraction(z.real).limit_denominator(1000)
    im = Fraction(z.imag).limit_denominator(1000)
    q = exact_scalar(GaussianRational(re, im))
    if abs(complex(q) - z) > _CLUSTER_START * scale:
        return None
    return q


def _components(points, radius):
    """Single-linkage groups of indices at the given radius."""
    n = len(points)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(points[i])
    return list(groups.values())


def _try_cluster(dense, group, tol):
    """Validated eigenvalue for a candidate cluster, or ``None``."""
    m = len(group)
    mu = complex(np.mean(group))
    if m == 1:
        return Eigenvalue(mu, 1, 1, 1, (1,))
    try:
        bases = _nested_kernels(dense, mu, tol, limit=m + 1)
    except IllConditionedStructureError:
        return None
    if not bases or bases[-1].shape[1] != m:
        return None
    # refine the centroid with the compressed trace on the generalized eigenspace
    q = bases[-1]
    mu_ref = mu + np.trace(q.conj().T @ (dense - mu * np.eye(len(dense))) @ q) / m
    try:
        ref = _nested_kernels(dense, mu_ref, tol, limit=m + 1)
    except IllConditionedStructureError:
        ref = []
    if ref and ref[-1].shape[1] == m:
        mu, bases = complex(mu_ref), ref
    dims = tuple(k.shape[1] for k in bases)
    return Eigenvalue(mu, m, dims[0], len(dims), dims)


def _resolve(dense, group, radius, base, tol, out):
    found = _try_cluster(dense, group, tol)
    if found is not None:
        out.append(found)
        return
    if radius <= base:
        raise IllConditionedStructureError(
            f"cannot resolve Jordan structure for {len(group)} eigenvalues near "
            f"{complex(np.mean(group)):.6g}")
    smaller = max(radius / 10, base)
    for sub in _components(group, smaller):
        _resolve(dense, sub, smaller, base, tol, out)


def distinct_eigenvalues(a, tol: ToleranceConfig = DEFAULT_TOL, exact="auto") -> list:
    """Distinct eigenvalues with multiplicities, in canonical order.

    Parameters
    ----------
    a : array_like or ExactMatrix
        Square matrix.
    exact : {"auto", True, False}
        Whether to confirm rational eigenvalues exactly.
    """
    dense = as_dense(a)
    _require_square(dense)
    n = dense.shape[0]
    if n == 0:
        return []
    ev = [complex(z) for z in np.linalg.eigvals(dense)]
    scale = max(1.0, max(abs(z) for z in ev))
    ex = _exact_view(a, exact)

    found = []
    remaining = sorted(ev, key=lambda z: (z.real, z.imag))
    if ex is not None:
        tried = set()
        for z in list(remaining):
            q = _rational_candidate(z, scale)
            if q is None or q in tried:
                continue
            tried.add(q)
            bases = _exact_kernels(ex, q)
            if not bases:
                continue
            dims = tuple(len(b) for b in bases)
            mult = dims[-1]
            qc = complex(q)
            remaining.sort(key=lambda x: abs(x - qc))
            remaining = sorted(remaining[mult:], key=lambda x: (x.real, x.imag))
            found.append(Eigenvalue(qc, mult, dims[0], len(dims), dims, exact_value=q))

    base = tol.eig_cluster_tol * scale
    start = max(_CLUSTER_START * scale, base)
    for group in _components(remaining, start):
        _resolve(dense, group, start, base, tol, found)

    if not np.any(dense.imag):
        found = [replace(e, value=complex(e.value.real, 0.0))
                 if abs(e.value.imag) <= base and e.exact_value is None else e for e in found]
    if sum(e.algebraic_multiplicity for e in found) != n:
        raise IllConditionedStructureError("algebraic multiplicities do not sum to N")
    found.sort(key=lambda e: _sort_key(e.value))
    return found


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------


def _orth_svd(m, rtol):
    if m.shape[1] == 0:
        return m
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return m[:, :0]
    return u[:, s > rtol * s[0]]


def _level_counts(dims):
    d = [0] + list(dims)
    return [d[p] - d[p - 1] for p in range(1, len(d))]


def _assemble(tops, apply_b):
    """Chains ``[B^{s-1}x, ..., Bx, x]`` for tops ``(s, x)``, largest first."""
    chains = []
    for s, x in sorted(tops, key=lambda t: -t[0]):
        vecs = [x]
        for _ in range(s - 1):
            vecs.insert(0, apply_b(vecs[0]))
        chains.append(vecs)
    return chains


def _numeric_chains(dense, lam, tol, dims=None):
    n = dense.shape[0]
    b = dense - lam * np.eye(n)
    bases = _nested_kernels(dense, lam, tol)
    got = tuple(k.shape[1] for k in bases)
    if dims is not None and got != tuple(dims):
        raise IllConditionedStructureError(
            f"Weyr characteristic {got} at {lam:.6g} disagrees with expected {tuple(dims)}")
    w = _level_counts(got)
    segre_from_weyr(got)
    tops = []
    for p in range(len(w), 0, -1):
        level = [np.linalg.matrix_power(b, s - p) @ x for s, x in tops]
        need = w[p - 1] - len(level)
        if need < 0:
            raise IllConditionedStructureError("more chain vectors than kernel growth allows")
        if need == 0:
            continue
        prev = bases[p - 2] if p >= 2 else np.zeros((n, 0), dtype=complex)
        q = _orth_svd(np.hstack([prev] + [v[:, None] for v in level]), tol.rank_tol)
        kp = bases[p - 1]
        z = kp - q @ (q.conj().T @ kp)
        _, s, vh = np.linalg.svd(z, full_matrices=False)
        if s.size < need or s[need - 1] <= tol.span_tol:
            raise IllConditionedStructureError("no complement left for new chain tops")
        x = (z @ vh[:need].conj().T) / s[:need]
        tops.extend((p, x[:, c]) for c in range(need))
    return [np.column_stack(vs) for vs in _assemble(tops, lambda v: b @ v)], got


def _exact_chains(ex: ExactMatrix, q):
    n = ex.rows
    b = ex.shift(q)
    bases = _exact_kernels(ex, q)
    dims = tuple(len(k) for k in bases)
    w = _level_counts(dims)
    segre_from_weyr(dims)
    tops = []
    for p in range(len(w), 0, -1):
        level = []
        for s, x in tops:
            v = x
            for _ in range(s - p):
                v = b.apply(v)
            level.append(v)
        need = w[p - 1] - len(level)
        span = (list(bases[p - 2]) if p >= 2 else []) + level
        rank = exact_rank(span, n)
        for cand in bases[p - 1]:
            if need == 0:
                break
            if exact_rank(span + [cand], n) > rank:
                span.append(cand)
                rank += 1
                tops.append((p, cand))
                need -= 1
        if need:
            raise IllConditionedStructureError("exact chain selection failed")
    chains = _assemble(tops, b.apply)
    return [np.array([[complex(x) for x in v] for v in vs], dtype=complex).T
            for vs in chains], dims


def jordan_chains(a, eig: Eigenvalue, tol: ToleranceConfig = DEFAULT_TOL,
                  eig_index: int = 0, exact="auto") -> list:
    """Jordan chains of one eigenvalue, longest first."""
    dense = as_dense(a)
    _require_square(dense)
    ex = _exact_view(a, exact) if eig.exact_value is not None else None
    if ex is not None:
        mats, dims = _exact_chains(ex, eig.exact_value)
    else:
        mats, dims = _numeric_chains(dense, eig.value, tol, eig.weyr)
    if dims != tuple(eig.weyr):
        raise IllConditionedStructureError("chain construction disagrees with Weyr characteristic")
    return [JordanChain(eig_index, j, eig.value, m) for j, m in enumerate(mats)]


def dual_basis(v, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``W = V^{-H}``."""
    return inverse(v, tol).conj().T


def _finish(a, chains, eigenvalues, tol, check=True):
    n = a.shape[0]
    v = np.column_stack([c.vectors for c in chains]) if chains else np.zeros((0, 0), complex)
    placed, pos = [], 0
    for c in chains:
        placed.append(replace(c, start=pos))
        pos += c.size
    if pos != n:
        raise IllConditionedStructureError("chains do not span the whole space")
    try:
        w = dual_basis(v, tol)
    except SingularMatrixError as exc:
        raise IllConditionedStructureError(f"Jordan basis is singular: {exc}") from exc
    d = JordanDecomposition(a, v, w, tuple(placed), tuple(eigenvalues))
    if check:
        resid = induced_l1_norm(a - v @ d.J @ w.conj().T)
        if resid > tol.verify_tol * max(induced_l1_norm(a), 1.0):
            raise IllConditionedStructureError(f"reconstruction residual {resid:.3g} too large")
    return d


def normalize_chains(d: JordanDecomposition, tol: ToleranceConfig = DEFAULT_TOL):
    """Scale every chain to unit induced L1 norm and recompute ``W``."""
    chains = []
    for c in d.chains:
        norm = induced_l1_norm(c.vectors)
        chains.append(replace(c, vectors=c.vectors / norm) if norm > 0 else c)
    return _finish(d.matrix, chains, d.eigenvalues, tol, check=False)


def jordan_decompose(a, tol: ToleranceConfig = DEFAULT_TOL, exact="auto") -> JordanDecomposition:
    """Jordan decomposition with normalized chains in canonical order."""
    dense = as_dense(a)
    _require_square(dense)
    eigs = distinct_eigenvalues(a, tol, exact)
    chains = []
    for i, eig in enumerate(eigs):
        chains.extend(jordan_chains(a, eig, tol, eig_index=i, exact=exact))
    d = _finish(dense, chains, eigs, tol, check=False)
    d = normalize_chains(d, tol)
    return _finish(dense, list(d.chains), eigs, tol, check=True)


def decomposition_from_basis(v, blocks, a=None, tol: ToleranceConfig = DEFAULT_TOL,
                             check_chains=True) -> JordanDecomposition:
    """Decomposition from an explicit basis.

    Parameters
    ----------
    v : array_like
        ``N x N`` basis; columns grouped by block in the order of ``blocks``.
    blocks : sequence of (eigenvalue, size)
    a : array_like, optional
        Shift matrix.  Defaults to ``V J V^{-1}``.  When given and
        ``check_chains`` is true, ``A V = V J`` is verified.
    """
    v = as_dense(v)
    form = JordanForm(tuple((complex(x), int(s)) for x, s in blocks))
    jm = form.matrix()
    if jm.shape != v.shape:
        raise DimensionMismatchError("block sizes do not match the basis dimension")
    if a is None:
        a = v @ jm @ inverse(v, tol)
    else:
        a = as_dense(a)
        if check_chains:
            resid = induced_l1_norm(a @ v - v @ jm)
            if resid > tol.verify_tol * max(induced_l1_norm(a), 1.0) * max(induced_l1_norm(v), 1.0):
                raise IllConditionedStructureError(f"columns are not Jordan chains (residual {resid:.3g})")
    atol = tol.eig_cluster_tol * max(1.0, max(abs(x) for x, _ in form.blocks))
    distinct, chains, pos = [], [], 0
    for value, size in form.blocks:
        i = next((k for k, x in enumerate(distinct) if abs(x - value) <= atol), None)
        if i is None:
            distinct.append(value)
            i = len(distinct) - 1
        j = sum(1 for c in chains if c.i == i)
        chains.append(JordanChain(i, j, value, v[:, pos:pos + size]))
        pos += size
    eigs = []
    for i, value in enumerate(distinct):
        sizes = sorted((c.size for c in chains if c.i == i), reverse=True)
        dims = weyr_from_segre(sizes)
        eigs.append(Eigenvalue(value, sum(sizes), len(sizes), sizes[0], dims))
    return _finish(a, chains, eigs, tol, check=False)
