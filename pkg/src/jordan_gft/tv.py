"""Total variation of signals and spectral components, and the frequency
ordering of spectral components.

For a normalized Jordan chain ``V_ij`` (``||V_ij||_1 = 1``)::

    TV(V_ij) = ||V_ij - A V_ij||_1 = ||V_ij (I - J_ij)||_1 <= |1 - lambda| + 1

with the induced (maximum column sum) L1 norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NormalizationUndefinedError, NotAChainError
from .jordan import JordanDecomposition, _exact_view, distinct_eigenvalues
from .matcore import (DEFAULT_TOL, ExactMatrix, ToleranceConfig, as_dense,
                      exact_rank_and_kernel, induced_l1_norm, jordan_block,
                      rank_and_kernel)

#: Agreement required between the direct and closed-form chain TV.
CLOSED_FORM_TOL = 1e-10
_KEY_DIGITS = 9


@dataclass(frozen=True)
class TVValue:
    value: float
    basis_dependent: bool
    bound_only: bool = False

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"total variation must be nonnegative, got {self.value}")

    def __float__(self):
        return float(self.value)

    def __str__(self):
        return f"bound_only:{self.value:.12g}" if self.bound_only else f"{self.value:.12g}"


def tv_bound(value) -> float:
    """``|1 - lambda| + 1``."""
    return abs(1 - complex(value)) + 1.0


def signal_tv(a, s, normalize: bool = False, tol: ToleranceConfig = DEFAULT_TOL) -> TVValue:
    """``||s - A s||_1``; with ``normalize`` the shift is ``A / |lambda_max|``."""
    a = as_dense(a)
    s = np.asarray(s, dtype=complex)
    if s.shape != (a.shape[1],):
        from .errors import DimensionMismatchError
        raise DimensionMismatchError(f"signal of shape {s.shape} does not match N={a.shape[1]}")
    if normalize:
        rho = max((abs(e.value) for e in distinct_eigenvalues(a, tol)), default=0.0)
        if rho <= tol.eig_cluster_tol * max(1.0, induced_l1_norm(a)):
            raise NormalizationUndefinedError("spectral radius is zero; A/|lambda_max| is undefined")
        a = a / rho
    return TVValue(float(np.sum(np.abs(s - a @ s))), basis_dependent=False)


def chain_eigenvalue(a, v) -> complex:
    """Rayleigh quotient of the first chain vector."""
    a, v = as_dense(a), as_dense(v)
    v1 = v[:, 0]
    return complex(v1.conj() @ (a @ v1) / (v1.conj() @ v1))


def chain_residual(a, v, value) -> float:
    """``||A V - V J_r(lambda)||_1``."""
    a, v = as_dense(a), as_dense(v)
    return induced_l1_norm(a @ v - v @ jordan_block(value, v.shape[1]))


def _check_chain(a, v, value, tol):
    if v.ndim != 2 or v.shape[0] != a.shape[0] or v.shape[1] == 0:
        raise NotAChainError(f"chain matrix of shape {v.shape} does not fit N={a.shape[0]}")
    if not np.any(v[:, 0]):
        raise NotAChainError("first chain vector is zero")
    if value is None:
        value = chain_eigenvalue(a, v)
    resid = chain_residual(a, v, value)
    if resid > tol.verify_tol * max(induced_l1_norm(a), 1.0):
        raise NotAChainError(f"columns are not a Jordan chain (residual {resid:.3g})")
    return complex(value)


def chain_tv(a, v, value=None, tol: ToleranceConfig = DEFAULT_TOL) -> TVValue:
    """Total variation of a normalized Jordan chain.

    Raises
    ------
    NotAChainError
        If ``v`` is not normalized, is not a chain of ``a``, or the direct
        and closed-form values disagree by more than ``CLOSED_FORM_TOL``.
    """
    a, v = as_dense(a), as_dense(v)
    norm = induced_l1_norm(v) if v.size else 0.0
    if abs(norm - 1.0) > CLOSED_FORM_TOL:
        raise NotAChainError(f"chain is not normalized (||V||_1 = {norm:.12g})")
    value = _check_chain(a, v, value, tol)
    direct = induced_l1_norm(v - a @ v)
    closed = induced_l1_norm(v @ (np.eye(v.shape[1]) - jordan_block(value, v.shape[1])))
    if abs(direct - closed) > CLOSED_FORM_TOL:
        raise NotAChainError(f"direct TV {direct:.15g} and closed form {closed:.15g} disagree")
    return TVValue(direct, basis_dependent=True)


def normalized_chain_tv(a, v, value=None, tol: ToleranceConfig = DEFAULT_TOL) -> TVValue:
    """:func:`chain_tv` after scaling ``v`` to unit induced L1 norm."""
    v = as_dense(v)
    norm = induced_l1_norm(v)
    if norm == 0:
        raise NotAChainError("zero chain")
    return chain_tv(a, v / norm, value, tol)


def _in_jordan_form_class(d, tol):
    from .equiv import canonical_representative
    return canonical_representative(d, tol)[1]


def class_tv(d: JordanDecomposition, i: int, j: int, tol: ToleranceConfig = DEFAULT_TOL,
             _jj=None) -> TVValue:
    """Class total variation of the Jordan subspace of block ``(i, j)``.

    ``|1 - lambda|`` for one-dimensional subspaces.  For larger blocks the
    value is ``|1 - lambda| + 1``; it is flagged ``bound_only`` unless the
    supremum is known to be attained: ``A`` unicellular, ``A`` Jordan
    equivalent to its Jordan form, or the block's own normalized chain
    reaching the bound.
    """
    c = d.chain(i, j)
    if c.size == 1:
        return TVValue(abs(1 - c.value), basis_dependent=False)
    bound = tv_bound(c.value)
    if d.is_unicellular():
        return TVValue(bound, basis_dependent=False)
    jj = _in_jordan_form_class(d, tol) if _jj is None else _jj
    if jj:
        return TVValue(bound, basis_dependent=False)
    try:
        own = normalized_chain_tv(d.matrix, c.vectors, c.value, tol).value
    except NotAChainError:
        own = -1.0
    if abs(own - bound) <= CLOSED_FORM_TOL:
        return TVValue(bound, basis_dependent=False)
    return TVValue(bound, basis_dependent=False, bound_only=True)


# ---------------------------------------------------------------------------
# TV profile along one free generalized-vector component
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TVProfile:
    points: tuple
    skipped: tuple = ()
    direction: np.ndarray = field(default=None, repr=False)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def argmax(self):
        t, v = max(self.points, key=lambda p: p[1].value)
        return t, v.value

    def to_csv(self) -> str:
        lines = ["parameter,tv"] + [f"{float(t):.12g},{v.value:.12g}" for t, v in self.points]
        return "\n".join(lines) + "\n"


def kernel_direction(a, value, component: int, exact_value=None,
                     tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Vector ``k`` in ``Ker(A - lambda I)`` with ``k[component] = 1``.

    With an exact matrix and eigenvalue, ``k`` is the reduced-echelon
    kernel vector whose free variable is ``component`` when there is one.
    Otherwise it is the minimum-norm kernel vector with that component set.
    """
    ex = _exact_view(a, "auto") if exact_value is not None else None
    if ex is not None:
        _, ker = exact_rank_and_kernel(ex.shift(exact_value))
        cols = [np.array([complex(x) for x in ker.column(c)]) for c in range(ker.cols)]
        for k in cols:
            if k[component] == 1 and sum(1 for kk in cols if kk[component] != 0) == 1:
                return k
        basis = np.column_stack(cols) if cols else np.zeros((len(a), 0))
    else:
        dense = as_dense(a)
        _, basis = rank_and_kernel(dense - value * np.eye(dense.shape[0]), tol,
                                   scale=max(np.linalg.norm(dense, 2), 1.0))
    row = basis[component]
    if np.linalg.norm(row) <= tol.span_tol:
        raise NotAChainError(f"component {component} is zero on the whole eigenspace")
    coef = row.conj() / (row @ row.conj())
    return basis @ coef


def _parameter_chain(v, k, component, t):
    out = np.array(v, dtype=complex)
    top = out[:, -1]
    out[:, -1] = top + (t - top[component]) * k
    return out


def tv_profile(d: JordanDecomposition, block, free_component_index: int, grid,
               chain=None, direction=None, tol: ToleranceConfig = DEFAULT_TOL) -> TVProfile:
    """Chain TV as one component of the top generalized vector varies.

    For each ``t`` in ``grid`` the top vector becomes
    ``x + (t - x[c]) k`` with ``k`` in ``Ker(A - lambda I)`` and
    ``k[c] = 1``, which keeps every chain relation intact.  The chain is
    then normalized and passed to :func:`chain_tv`.

    Parameters
    ----------
    block : (i, j)
    free_component_index : int
        0-based component ``c`` of the top vector that is set to ``t``.
    chain : array_like, optional
        Base chain; defaults to the block's chain in ``d``.
    direction : array_like, optional
        Kernel vector ``k``; defaults to :func:`kernel_direction`.
    """
    i, j = block
    c = d.chain(i, j)
    if c.size < 2:
        raise NotAChainError("a TV profile needs a block of size at least 2")
    a = d.matrix
    v = as_dense(chain.to_numpy() if isinstance(chain, ExactMatrix) else chain) if chain is not None else c.vectors
    _check_chain(a, v, c.value, tol)
    if direction is None:
        eig = d.eigenvalues[i] if i < len(d.eigenvalues) else None
        exact_value = getattr(eig, "exact_value", None)
        direction = kernel_direction(a, c.value, free_component_index, exact_value, tol)
    k = np.asarray(direction, dtype=complex)
    points, skipped = [], []
    for t in grid:
        vt = _parameter_chain(v, k, free_component_index, float(t))
        if np.linalg.matrix_rank(vt, tol=tol.rank_tol * max(np.linalg.norm(vt, 2), 1.0)) < vt.shape[1]:
            skipped.append((t, "chain columns are linearly dependent"))
            continue
        try:
            points.append((t, normalized_chain_tv(a, vt, c.value, tol)))
        except NotAChainError as exc:
            skipped.append((t, str(exc)))
    return TVProfile(tuple(points), tuple(skipped), k)


def refine_maximum(d: JordanDecomposition, block, free_component_index: int,
                   profile: TVProfile, chain=None, tol: ToleranceConfig = DEFAULT_TOL):
    """Bounded scalar refinement of the best grid point.

    Returns ``(t, tv)``.
    """
    pts = sorted(profile.points, key=lambda p: float(p[0]))
    if not pts:
        raise ValueError("empty profile")
    best = max(range(len(pts)), key=lambda n: pts[n][1].value)
    lo = float(pts[max(best - 1, 0)][0])
    hi = float(pts[min(best + 1, len(pts) - 1)][0])
    c = d.chain(*block)
    v = as_dense(chain.to_numpy() if isinstance(chain, ExactMatrix) else chain) if chain is not None else c.vectors
    k = profile.direction

    def neg(t):
        vt = _parameter_chain(v, k, free_component_index, t)
        return -normalized_chain_tv(d.matrix, vt, c.value, tol).value

    t0, f0 = float(pts[best][0]), pts[best][1].value
    if hi > lo:
        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if -res.fun >= f0:
            return float(res.x), float(-res.fun)
    return t0, f0


def parse_grid(text: str) -> list:
    """``"a:b:step"`` to an inclusive list of exact rationals."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be 'start:stop:step', got {text!r}")
    start, stop, step = (Fraction(p) for p in parts)
    if step <= 0:
        raise ValueError("grid step must be positive")
    out, t = [], start
    while t <= stop:
        out.append(t)
        t += step
    return out


# ---------------------------------------------------------------------------
# ordering
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderedComponent:
    rank: int
    i: int
    j: int
    value: complex
    size: int
    key: float
    class_tv: TVValue


@dataclass(frozen=True)
class FrequencyOrdering:
    """Spectral components from low to high total variation.

    ``tie_breaks`` lists consecutive rank pairs whose keys were equal and
    were ordered by the secondary criteria.
    """

    components: tuple
    tie_breaks: tuple = ()

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    @property
    def blocks(self) -> list:
        return [(c.i, c.j) for c in self.components]

    @property
    def keys(self) -> list:
        return [c.key for c in self.components]


def ordering_key(value) -> float:
    return tv_bound(value)


def order_components(d: JordanDecomposition, tol: ToleranceConfig = DEFAULT_TOL) -> FrequencyOrdering:
    """Sort blocks by ``|1 - lambda| + 1``.

    Ties go to smaller real part, then smaller imaginary part, then larger
    block, then smaller block index.
    """
    def sort_key(c):
        key = round(ordering_key(c.value), _KEY_DIGITS)
        return (key, round(c.value.real, _KEY_DIGITS), round(c.value.imag, _KEY_DIGITS),
                -c.size, c.j)

    chains = sorted(d.chains, key=sort_key)
    jj = None
    if any(c.size > 1 for c in chains) and not d.is_unicellular():
        jj = _in_jordan_form_class(d, tol)
    comps = []
    ties = []
    for rank, c in enumerate(chains, start=1):
        comps.append(OrderedComponent(rank, c.i, c.j, c.value, c.size, ordering_key(c.value),
                                      class_tv(d, c.i, c.j, tol, _jj=jj)))
        if rank > 1 and sort_key(c)[0] == sort_key(chains[rank - 2])[0]:
            ties.append((rank - 1, rank))
    return FrequencyOrdering(tuple(comps), tuple(ties))
