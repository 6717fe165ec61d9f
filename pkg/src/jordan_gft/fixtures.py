"""Embedded example graphs, stored as exact rationals."""

from __future__ import annotations

from fractions import Fraction as F

import numpy as np

from .jordan import JordanDecomposition, decomposition_from_basis, jordan_decompose
from .matcore import DEFAULT_TOL, ExactMatrix, ToleranceConfig, subspace_sine


def _sparse(n, entries):
    rows = [[F(0)] * n for _ in range(n)]
    for (r, c), v in entries.items():
        rows[r - 1][c - 1] = F(v)
    return ExactMatrix(rows)


#: Ten-node example with Jordan form
#: ``diag(4, cbrt(-6) w, cbrt(-6) w^2, cbrt(-6), J_4(0), J_2(0))`` (1-based entries).
EXAMPLE_A = _sparse(10, {
    (1, 4): -2, (1, 6): -3, (2, 8): 1, (3, 1): 5, (3, 7): 2, (4, 5): 6,
    (5, 8): 1, (6, 9): -2, (7, 10): 3, (8, 8): 4, (9, 2): 1, (10, 3): -1,
})

#: Eigenvector of the size-2 block at zero shared by the chains below.
_V_EIG = (F(-2), F(0), F(0), F(3), F(0), F(-2), F(5), F(0), F(0), F(0))


def example_chain(v6) -> ExactMatrix:
    """Size-2 chain at zero with generalized-vector component ``v6`` free.

    The fourth component follows ``v4 = 1 - 3/2 v6``.  ``v6 = 0``,
    ``1`` and ``59/15`` give the three chains quoted with the example.
    """
    t = F(v6)
    top = (F(0), F(0), F(0), 1 - F(3, 2) * t, F(1, 2), t, F(0), F(0), F(1), F(5, 3))
    return ExactMatrix([[x, y] for x, y in zip(_V_EIG, top)])


EXAMPLE_V1 = example_chain(0)
EXAMPLE_V2 = example_chain(1)
EXAMPLE_V3 = example_chain(F(59, 15))

#: Alternate basis quoted for the size-2 block.  Its eigenvector lies outside
#: the span of ``EXAMPLE_V3``, so its projectors differ from those of V3.
EXAMPLE_V_TILDE = ExactMatrix([[x, y] for x, y in zip(
    (1, 0, 0, 3, 0, 1, 2, 0, 0, 0),
    (0, 0, 0, -1, F(1, 2), 1, 0, 0, 1, F(5, 3)))])

#: Index (0-based) of the free generalized-vector component.
EXAMPLE_FREE_COMPONENT = 5

#: Isomorphic pair that is not Jordan equivalent.
ISO_A = ExactMatrix([[2, 0, -1], [0, 2, -1], [0, 0, 1]])
ISO_B = ExactMatrix([[1, 0, 0], [-1, 2, 0], [-1, 0, 2]])
ISO_VA = ExactMatrix([[1, 1, 0], [1, 0, 1], [1, 0, 0]])
ISO_VB = ExactMatrix([[1, 0, 0], [1, 1, 0], [1, 0, 1]])

#: Unicellular matrix with Jordan form ``J_4(0)`` whose eigenvector is not a
#: canonical vector.
UNICELL_B = ExactMatrix([[F(1, 2), F(-1, 2), F(1, 2), F(1, 2)],
                         [F(1, 2), F(-1, 2), F(-1, 2), F(-1, 2)],
                         [0, 0, F(1, 2), F(-1, 2)],
                         [0, 0, F(1, 2), F(-1, 2)]])

#: Two unicellular 0/1 chain graphs on four nodes with different edge counts.
CHAIN_GRAPH = ExactMatrix([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]])
CHAIN_GRAPH_EXTRA = ExactMatrix([[0, 1, 1, 0], [0, 0, 1, 1], [0, 0, 0, 1], [0, 0, 0, 0]])


def binarize(m: ExactMatrix) -> ExactMatrix:
    """Replace every nonzero entry by one."""
    return ExactMatrix([[F(1) if x != 0 else F(0) for x in row] for row in m.entries])


def example_decomposition(chain=EXAMPLE_V3, tol: ToleranceConfig = DEFAULT_TOL,
                          matrix=None) -> JordanDecomposition:
    """Decomposition of the example with the size-2 block at zero replaced by
    ``chain``.  All other chains come from :func:`jordan_decompose`.

    ``matrix`` overrides the shift (defaults to ``V J V^{-1}`` for the new
    basis when given as ``"reconstruct"``, else the example matrix).
    """
    base = jordan_decompose(EXAMPLE_A, tol)
    target = next(c for c in base.chains if c.size == 2 and abs(c.value) < 1e-12)
    chain = np.asarray(chain.to_numpy() if isinstance(chain, ExactMatrix) else chain, dtype=complex)
    cols, blocks = [], []
    for c in base.chains:
        cols.append(chain if c is target else c.vectors)
        blocks.append((c.value, c.size))
    v = np.hstack(cols)
    if matrix == "reconstruct":
        return decomposition_from_basis(v, blocks, None, tol)
    a = EXAMPLE_A.to_numpy() if matrix is None else matrix
    return decomposition_from_basis(v, blocks, a, tol)


def same_span(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return subspace_sine(a, b) <= tol.span_tol
