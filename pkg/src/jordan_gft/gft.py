"""Oblique spectral projectors and the projector-based graph Fourier transform.

A signal is split into one component per Jordan subspace::

    s = sum_ij shat_ij,    shat_ij = V_ij W_ij^H s

Projectors are formed per block on request; :func:`gft` only ever applies
the two thin factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatchError
from .jordan import JordanDecomposition
from .matcore import DEFAULT_TOL, ToleranceConfig, span_residual


@dataclass(frozen=True)
class SpectralComponent:
    i: int
    j: int
    value: complex
    chain: np.ndarray = field(repr=False)
    dual_rows: np.ndarray = field(repr=False)
    shat: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.chain.shape[1]

    def in_subspace(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        """Least-squares membership of ``shat`` in ``span(chain)``."""
        return span_residual(self.chain, self.shat) <= tol.verify_tol


@dataclass(frozen=True)
class GFTResult:
    components: tuple
    decomposition: JordanDecomposition = field(repr=False, default=None)

    def component(self, i: int, j: int) -> SpectralComponent:
        for c in self.components:
            if c.i == i and c.j == j:
                return c
        raise IndexError(f"no spectral component ({i}, {j})")

    def zeroed(self, *blocks) -> "GFTResult":
        """Copy with the listed ``(i, j)`` components set to zero."""
        drop = set(blocks)
        comps = tuple(replace(c, shat=np.zeros_like(c.shat)) if (c.i, c.j) in drop else c
                      for c in self.components)
        return replace(self, components=comps)


def _signal(d: JordanDecomposition, s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    if s.ndim != 1 or s.shape[0] != d.n:
        raise DimensionMismatchError(f"signal of shape {s.shape} does not match N={d.n}")
    return s


def projector(d: JordanDecomposition, i: int, j: int) -> np.ndarray:
    """``P_ij = V_ij W_ij^H``, the projection onto block ``(i, j)`` along
    the other Jordan subspaces."""
    c = d.chain(i, j)
    return c.vectors @ d.dual_rows(i, j)


def project_component(d: JordanDecomposition, i: int, j: int, s) -> np.ndarray:
    """``P_ij s`` computed as two thin products."""
    s = _signal(d, s)
    return d.chain(i, j).vectors @ (d.dual_rows(i, j) @ s)


def gft(d: JordanDecomposition, s) -> GFTResult:
    """Forward transform: one projected signal per Jordan subspace."""
    s = _signal(d, s)
    coeffs = d.W.conj().T @ s
    comps = []
    for c in d.chains:
        comps.append(SpectralComponent(
            c.i, c.j, c.value, c.vectors, d.dual_rows(c.i, c.j),
            c.vectors @ coeffs[c.start:c.stop]))
    return GFTResult(tuple(comps), d)


def inverse_gft(r: GFTResult) -> np.ndarray:
    """Sum of the components."""
    if not r.components:
        return np.zeros(0, dtype=complex)
    return np.sum([c.shat for c in r.components], axis=0)
