"""Isomorphic and Jordan equivalence of graphs.

Two graphs are isomorphic when their adjacency matrices are similar through
a permutation matrix.  They are Jordan equivalent when they share the Jordan
normal form *and* the set of Jordan subspaces, which is exactly what makes
the projector-based GFT identical over them.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, SizeLimitError
from .jordan import (JordanDecomposition, JordanForm, _nested_kernels,
                     decomposition_from_basis, jordan_decompose)
from .matcore import (DEFAULT_TOL, ToleranceConfig, as_dense, induced_l1_norm,
                      inverse, orth, subspace_sine)

#: Largest N for which exhaustive isomorphism search is attempted.
ISO_SEARCH_LIMIT = 12
#: Largest N accepted by :func:`invariant_subspace_subset_check`.
INVARIANT_CHECK_LIMIT = 6
#: Resampling cap on ``cond(Y_ij)`` for random block transforms.
MAX_TRANSFORM_COND = 1e3


class PreconditionWarning(UserWarning):
    """A construction was returned although its guarantee does not apply."""


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermutationMap:
    """Node relabeling ``u -> image[u]``.

    The matrix form ``T`` has ``T[image[u], u] = 1`` so that
    ``B = T A T^{-1}`` satisfies ``B[image[u], image[v]] = A[u, v]``.
    """

    image: tuple

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        if sorted(img) != list(range(len(img))):
            raise ValueError(f"not a permutation: {img}")
        object.__setattr__(self, "image", img)

    @classmethod
    def identity(cls, n: int) -> "PermutationMap":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.image)

    def matrix(self) -> np.ndarray:
        t = np.zeros((self.n, self.n))
        t[list(self.image), list(range(self.n))] = 1.0
        return t

    def inverse(self) -> "PermutationMap":
        inv = [0] * self.n
        for u, v in enumerate(self.image):
            inv[v] = u
        return PermutationMap(tuple(inv))

    def apply_vector(self, s) -> np.ndarray:
        """``T s``."""
        s = np.asarray(s)
        out = np.empty_like(s)
        out[list(self.image)] = s
        return out

    def __str__(self):
        return ",".join(str(x) for x in self.image)


def apply_isomorphism(a, p: PermutationMap) -> np.ndarray:
    """``T A T^{-1}``: rows and columns of ``a`` relabeled by ``p``."""
    a = as_dense(a)
    if a.shape != (p.n, p.n):
        raise DimensionMismatchError(f"permutation of size {p.n} vs matrix {a.shape}")
    inv = list(p.inverse().image)
    return a[np.ix_(inv, inv)]


def _vertex_signature(a, u, digits):
    def key(vals):
        return tuple(sorted((round(z.real, digits), round(z.imag, digits)) for z in vals))

    d = a[u, u]
    return (round(d.real, digits), round(d.imag, digits),
            key(np.delete(a[u], u)), key(np.delete(a[:, u], u)))


def find_isomorphism(a, b, tol: ToleranceConfig = DEFAULT_TOL,
                     limit: int = ISO_SEARCH_LIMIT):
    """Permutation ``p`` with ``apply_isomorphism(a, p) == b``, or ``None``.

    Backtracking over candidate vertices that share a signature (diagonal
    entry plus sorted row and column entries).  The search is exhaustive, so
    ``None`` means no isomorphism exists.

    Raises
    ------
    SizeLimitError
        If ``N > limit``.
    """
    a, b = as_dense(a), as_dense(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"shapes {a.shape} and {b.shape} are not comparable")
    n = a.shape[0]
    if n > limit:
        raise SizeLimitError(f"isomorphism search limited to N <= {limit}, got {n}")
    scale = max(induced_l1_norm(a), induced_l1_norm(b), 1.0)
    atol = tol.verify_tol * scale
    digits = max(0, int(-np.log10(atol)) - 1)

    sig_a = [_vertex_signature(a, u, digits) for u in range(n)]
    sig_b = [_vertex_signature(b, v, digits) for v in range(n)]
    if sorted(sig_a) != sorted(sig_b):
        return None
    cands = [[v for v in range(n) if sig_b[v] == sig_a[u]] for u in range(n)]
    # most constrained vertices first, then by connectivity to earlier choices
    order = sorted(range(n), key=lambda u: (len(cands[u]), u))

    image = [-1] * n
    used = [False] * n

    def consistent(u, v):
        if abs(a[u, u] - b[v, v]) > atol:
            return False
        for w in range(n):
            pw = image[w]
            if pw < 0:
                continue
            if abs(a[u, w] - b[v, pw]) > atol or abs(a[w, u] - b[pw, v]) > atol:
                return False
        return True

    def search(k):
        if k == n:
            return True
        u = order[k]
        for v in cands[u]:
            if used[v] or not consistent(u, v):
                continue
            image[u], used[v] = v, True
            if search(k + 1):
                return True
            image[u], used[v] = -1, False
        return False

    if not search(0):
        return None
    p = PermutationMap(tuple(image))
    if induced_l1_norm(b - apply_isomorphism(a, p)) > tol.verify_tol * scale:
        return None
    return p


# ---------------------------------------------------------------------------
# Jordan equivalence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of an equivalence test.

    ``isomorphic`` is ``None`` when isomorphism was not tested.
    ``certificate`` maps each block ``(i, j)`` of the first matrix to the
    matching block of the second (``"span"`` method) or to ``None`` when the
    block was shown to be a Jordan subspace of the other matrix directly
    (``"invariant"`` method).
    """

    jordan_equivalent: bool
    same_jordan_form: bool
    same_subspaces: bool
    isomorphic: bool = None
    permutation: PermutationMap = None
    method: str = ""
    certificate: dict = field(default_factory=dict, repr=False)
    block_order: tuple = ()

    @property
    def failed_conditions(self) -> tuple:
        out = []
        if not self.same_subspaces:
            out.append(1)
        if not self.same_jordan_form:
            out.append(2)
        return tuple(out)

    @property
    def failed_condition(self):
        """First failing condition of the definition (1: subspaces, 2: Jordan form)."""
        f = self.failed_conditions
        return f[0] if f else None

    @property
    def relation(self):
        if self.isomorphic is None:
            return None
        if self.isomorphic and self.jordan_equivalent:
            return "both"
        if self.isomorphic:
            return "isomorphic"
        if self.jordan_equivalent:
            return "jordan_equivalent"
        return "neither"


def _b(x) -> str:
    return "true" if x else "false"


def format_verdict(v: EquivalenceVerdict) -> str:
    """``isomorphic=<bool> [perm=<p>] jordan_equivalent=<bool> [failed_condition=<c>]``."""
    parts = ["isomorphic=" + ("?" if v.isomorphic is None else _b(v.isomorphic))]
    if v.permutation is not None:
        parts.append(f"perm={v.permutation}")
    parts.append("jordan_equivalent=" + _b(v.jordan_equivalent))
    if v.failed_condition is not None:
        parts.append(f"failed_condition={v.failed_condition}")
    return " ".join(parts)


def _as_decomposition(x, tol):
    if isinstance(x, JordanDecomposition):
        return x
    return jordan_decompose(x, tol)


def _form_atol(da, db, tol):
    vals = [abs(c.value) for c in da.chains + db.chains]
    return tol.eig_cluster_tol * max([1.0] + vals)


def _span_matching(da, db, tol):
    """Perfect matching of equal spans between blocks of equal size."""
    cand = {}
    for ca in da.chains:
        cand[(ca.i, ca.j)] = [(cb.i, cb.j) for cb in db.chains
                               if cb.size == ca.size
                               and subspace_sine(ca.vectors, cb.vectors) <= tol.span_tol]
    if len(da.chains) != len(db.chains):
        return None
    match = {}
    owner = {}

    def augment(key, seen):
        for other in cand[key]:
            if other in seen:
                continue
            seen.add(other)
            if other not in owner or augment(owner[other], seen):
                owner[other] = key
                match[key] = other
                return True
        return False

    for key in cand:
        if not augment(key, set()):
            return None
    return match


def is_jordan_subspace(b, basis, value, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether ``span(basis)`` is a Jordan subspace of ``b`` for ``value``.

    The span must be ``b``-invariant and ``b`` restricted to it must be a
    single Jordan block ``J_r(value)``.
    """
    b = as_dense(b)
    q = orth(basis)
    r = q.shape[1]
    bq = b @ q
    c = q.conj().T @ bq
    scale = max(np.linalg.norm(b, 2), 1.0)
    if np.linalg.norm(bq - q @ c, 2) > tol.span_tol * scale:
        return False
    if abs(np.trace(c) / r - value) > tol.span_tol * scale:
        return False
    try:
        dims = tuple(k.shape[1] for k in _nested_kernels(c, value, tol))
    except ArithmeticError:
        return False
    return dims == tuple(range(1, r + 1))


def _invariant_cover(da, b, tol):
    return all(is_jordan_subspace(b, c.vectors, c.value, tol) for c in da.chains)


def is_jordan_equivalent(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> EquivalenceVerdict:
    """Test both conditions of Jordan equivalence.

    Condition 2 compares canonical Jordan forms.  Condition 1 first looks
    for a perfect matching of equal chain spans; when the computed bases of
    a repeated eigenvalue happen to differ, it falls back to checking that
    every Jordan subspace of one matrix is a Jordan subspace of the other,
    which is equivalent to the existence of a common Jordan basis up to a
    block-diagonal change of basis.

    ``a`` and ``b`` may be matrices or precomputed decompositions.
    """
    da, db = _as_decomposition(a, tol), _as_decomposition(b, tol)
    if da.n != db.n:
        raise DimensionMismatchError(f"N={da.n} and N={db.n} differ")
    same_form = da.form.matches(db.form, _form_atol(da, db, tol))
    match = _span_matching(da, db, tol)
    method, cert = "", {}
    if match is not None:
        method, cert = "span", match
    elif same_form and (_invariant_cover(da, db.matrix, tol) or _invariant_cover(db, da.matrix, tol)):
        method = "invariant"
        cert = {(c.i, c.j): None for c in da.chains}
    same_sub = bool(method)
    return EquivalenceVerdict(
        jordan_equivalent=same_form and same_sub,
        same_jordan_form=same_form,
        same_subspaces=same_sub,
        method=method,
        certificate=cert,
        block_order=tuple((c.value, c.size) for c in da.chains),
    )


def classify(a, b, tol: ToleranceConfig = DEFAULT_TOL,
             limit: int = ISO_SEARCH_LIMIT) -> EquivalenceVerdict:
    """Isomorphism search plus Jordan-equivalence test."""
    ma = a.matrix if isinstance(a, JordanDecomposition) else as_dense(a)
    mb = b.matrix if isinstance(b, JordanDecomposition) else as_dense(b)
    p = find_isomorphism(ma, mb, tol, limit)
    v = is_jordan_equivalent(a, b, tol)
    return EquivalenceVerdict(
        v.jordan_equivalent, v.same_jordan_form, v.same_subspaces,
        isomorphic=p is not None, permutation=p, method=v.method,
        certificate=v.certificate, block_order=v.block_order)


# ---------------------------------------------------------------------------
# constructing equivalent graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockDiagonalTransform:
    """Invertible blocks ``Y_ij`` matching a decomposition's chain sizes."""

    blocks: tuple

    def __post_init__(self):
        for y in self.blocks:
            y = np.asarray(y)
            if y.ndim != 2 or y.shape[0] != y.shape[1]:
                raise DimensionMismatchError("transform blocks must be square")
            if np.linalg.matrix_rank(y) < y.shape[0]:
                raise ValueError("transform block is singular")

    @classmethod
    def identity(cls, d: JordanDecomposition) -> "BlockDiagonalTransform":
        return cls(tuple(np.eye(c.size, dtype=complex) for c in d.chains))

    @classmethod
    def random(cls, d: JordanDecomposition, rng=None, only=None) -> "BlockDiagonalTransform":
        """Entries uniform in the complex unit square, resampled until
        ``cond(Y_ij) < MAX_TRANSFORM_COND``.

        ``only`` restricts randomization to the listed ``(i, j)`` blocks;
        the others get identity blocks.
        """
        rng = np.random.default_rng(rng)
        out = []
        for c in d.chains:
            if only is not None and (c.i, c.j) not in only:
                out.append(np.eye(c.size, dtype=complex))
                continue
            while True:
                y = rng.random((c.size, c.size)) + 1j * rng.random((c.size, c.size))
                if np.linalg.cond(y) < MAX_TRANSFORM_COND:
                    break
            out.append(y)
        return cls(tuple(out))

    def matrix(self) -> np.ndarray:
        n = sum(np.shape(y)[0] for y in self.blocks)
        out = np.zeros((n, n), dtype=complex)
        pos = 0
        for y in self.blocks:
            r = np.shape(y)[0]
            out[pos:pos + r, pos:pos + r] = y
            pos += r
        return out


def transform_decomposition(d: JordanDecomposition, y: BlockDiagonalTransform,
                            tol: ToleranceConfig = DEFAULT_TOL):
    """Matrix ``B = (VY) J (VY)^{-1}`` and its decomposition with basis ``VY``.

    ``B`` is assembled as ``A + V diag(Y N Y^{-1} - N) V^{-1}`` where ``N``
    is the nilpotent part of ``J``, so blocks whose ``Y_ij`` commutes with
    ``J_ij`` (every 1x1 block in particular) leave ``A`` untouched.
    """
    if len(y.blocks) != len(d.chains):
        raise DimensionMismatchError("transform does not match the number of blocks")
    delta = np.zeros((d.n, d.n), dtype=complex)
    for c, yb in zip(d.chains, y.blocks):
        yb = np.asarray(yb, dtype=complex)
        if yb.shape != (c.size, c.size):
            raise DimensionMismatchError(f"block ({c.i}, {c.j}) needs a {c.size}x{c.size} transform")
        if c.size == 1:
            continue
        nil = np.eye(c.size, k=1)
        delta[c.start:c.stop, c.start:c.stop] = yb @ nil @ np.linalg.inv(yb) - nil
    b = d.matrix + d.V @ delta @ d.W.conj().T
    x = d.V @ y.matrix()
    dx = decomposition_from_basis(x, [(c.value, c.size) for c in d.chains], b, tol)
    return b, dx


def random_jordan_equivalent(d: JordanDecomposition, seed=None, only=None,
                             tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """A random member of the Jordan equivalence class of ``d.matrix``."""
    y = BlockDiagonalTransform.random(d, seed, only)
    return transform_decomposition(d, y, tol)[0]


def canonical_decomposition(form: JordanForm, tol: ToleranceConfig = DEFAULT_TOL):
    """Decomposition of ``J`` with the canonical basis ``V = I``."""
    return decomposition_from_basis(np.eye(form.n), form.blocks, None, tol)


def canonical_representative(d, tol: ToleranceConfig = DEFAULT_TOL):
    """``(J, flag)``: the Jordan form itself and whether ``A`` is Jordan
    equivalent to it.

    The chain graph ``J`` computes the GFT with ``V = I``; it can replace
    ``A`` only when ``flag`` is true.
    """
    d = _as_decomposition(d, tol)
    dj = canonical_decomposition(d.form, tol)
    return dj.matrix, is_jordan_equivalent(d, dj, tol).jordan_equivalent


# ---------------------------------------------------------------------------
# structural shortcuts
# ---------------------------------------------------------------------------


def _close(x, y, atol):
    return abs(x - y) <= atol


def _unicellular_block(m, atol):
    """``lambda`` if ``m`` is upper triangular with constant diagonal and a
    nonzero first superdiagonal, else ``None``."""
    r = m.shape[0]
    if r == 0 or np.any(np.abs(np.tril(m, -1)) > atol):
        return None
    lam = m[0, 0]
    if any(not _close(m[k, k], lam, atol) for k in range(r)):
        return None
    if any(abs(m[k, k + 1]) <= atol for k in range(r - 1)):
        return None
    return complex(lam)


def toeplitz_upper(b) -> np.ndarray:
    """``T_p(b_1, ..., b_p)``: upper triangular Toeplitz with ``b_1`` on the diagonal."""
    p = len(b)
    out = np.zeros((p, p), dtype=complex)
    for k, x in enumerate(b):
        out += x * np.eye(p, k=k)
    return out


def toeplitz_extended(b, f) -> np.ndarray:
    """``R_q(b_1, ..., b_p; F)`` with ``q = p + dim F``.

    Bands ``0..p-1`` hold ``b``; the entries above band ``p-1`` come from
    the upper triangular filler ``F``.
    """
    b = list(b)
    f = np.asarray(f, dtype=complex)
    p, extra = len(b), f.shape[0]
    q = p + extra
    out = np.zeros((q, q), dtype=complex)
    for k, x in enumerate(b):
        out += x * np.eye(q, k=k)
    for row in range(extra):
        for col in range(row, extra):
            out[row, p + col] = f[row, col]
    return out


def _matches_extended(m, b, atol):
    """Whether ``m`` has the ``R_q(b; F)`` shape for the given ``b``."""
    q, p = m.shape[0], len(b)
    if np.any(np.abs(np.tril(m, -1)) > atol):
        return False
    for k in range(min(p, q)):
        if any(not _close(x, b[k], atol) for x in np.diag(m, k)):
            return False
    return True


def structural_membership_check(a, tol: ToleranceConfig = DEFAULT_TOL):
    """Jordan form implied by upper-triangular structure, or ``None``.

    Recognized patterns, none of which needs an eigendecomposition:

    * one upper triangular block with constant diagonal and nonzero first
      superdiagonal: ``J_N(lambda)``;
    * ``diag(A_1, A_2)`` of two such blocks with different diagonals;
    * ``diag(A_1, A_2)`` with equal diagonals, ``A_2 = T_p(b)`` and
      ``A_1 = R_q(b; F)`` (``q >= p``, ``b_2 != 0``).

    Every recognized matrix is Jordan equivalent to the returned form.
    """
    a = as_dense(a)
    n = a.shape[0]
    atol = tol.verify_tol * max(induced_l1_norm(a), 1.0)
    lam = _unicellular_block(a, atol)
    if lam is not None:
        return JordanForm(((lam, n),))
    for k in range(1, n):
        if np.any(np.abs(a[:k, k:]) > atol) or np.any(np.abs(a[k:, :k]) > atol):
            continue
        a1, a2 = a[:k, :k], a[k:, k:]
        l1, l2 = _unicellular_block(a1, atol), _unicellular_block(a2, atol)
        if l1 is None or l2 is None:
            continue
        if not _close(l1, l2, tol.eig_cluster_tol * max(1.0, abs(l1))):
            blocks = sorted([(l1, k), (l2, n - k)], key=lambda t: (abs(1 - t[0]), t[0].real, t[0].imag))
            return JordanForm(tuple(blocks))
        p = n - k
        if k < p:
            continue
        b = [a2[0, c] for c in range(p)]
        if np.allclose(a2, toeplitz_upper(b), atol=atol) and _matches_extended(a1, b, atol):
            return JordanForm(((l1, k), (l1, p)))
    return None


def dual_basis_graph(d, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``A_W = W J W^{-1}``.

    The result is Jordan equivalent to ``A`` when ``A`` is unicellular or
    when ``V`` is block diagonal (``A`` equivalent to its Jordan form).
    Otherwise a :class:`PreconditionWarning` is issued and the matrix is
    still returned.
    """
    d = _as_decomposition(d, tol)
    if not (d.is_unicellular() or _block_diagonal_basis(d, tol)):
        warnings.warn("A_W is only guaranteed Jordan equivalent for unicellular A "
                      "or a block-diagonal eigenvector matrix", PreconditionWarning,
                      stacklevel=2)
    return d.W @ d.J @ d.V.conj().T


def _block_diagonal_basis(d, tol):
    scale = max(induced_l1_norm(d.V), 1.0)
    mask = np.ones(d.V.shape, dtype=bool)
    for c in d.chains:
        mask[c.start:c.stop, c.start:c.stop] = False
    return not np.any(np.abs(d.V[mask]) > tol.verify_tol * scale)


def _generated_subspaces(d):
    """Sums of chain prefixes ``span(v_1..v_k)`` over all chains."""
    ranges = [range(c.size + 1) for c in d.chains]
    for lens in itertools.product(*ranges):
        cols = [c.vectors[:, :k] for c, k in zip(d.chains, lens) if k]
        if cols and 0 < sum(lens) < d.n:
            yield np.hstack(cols)


def _is_invariant(m, basis, tol):
    q = orth(basis)
    mq = m @ q
    return np.linalg.norm(mq - q @ (q.conj().T @ mq), 2) <= tol.span_tol * max(np.linalg.norm(m, 2), 1.0)


def invariant_subspace_subset_check(a, b, tol: ToleranceConfig = DEFAULT_TOL,
                                    limit: int = INVARIANT_CHECK_LIMIT) -> bool:
    """Whether ``a`` and ``b`` share the invariant subspaces generated by
    their Jordan chains.

    The subspaces tested are all sums of chain prefixes
    ``span(v_1, ..., v_k)``, which include every sum of Jordan subspaces.
    Each one must be invariant under the other matrix, in both directions.
    """
    da, db = _as_decomposition(a, tol), _as_decomposition(b, tol)
    if max(da.n, db.n) > limit:
        raise SizeLimitError(f"invariant subspace check limited to N <= {limit}")
    if da.n != db.n:
        raise DimensionMismatchError(f"N={da.n} and N={db.n} differ")
    return (all(_is_invariant(db.matrix, s, tol) for s in _generated_subspaces(da))
            and all(_is_invariant(da.matrix, s, tol) for s in _generated_subspaces(db)))
