"""Projector-based graph Fourier transform for directed graphs.

Jordan decompositions with explicit chains, oblique spectral projectors,
isomorphic and Jordan equivalence of graphs, and total-variation ordering
of spectral components.
"""

from .equiv import (BlockDiagonalTransform, EquivalenceVerdict, PermutationMap,
                    apply_isomorphism, canonical_representative, classify,
                    dual_basis_graph, find_isomorphism, invariant_subspace_subset_check,
                    is_jordan_equivalent, random_jordan_equivalent,
                    structural_membership_check, transform_decomposition)
from .errors import (DimensionMismatchError, IllConditionedStructureError, JordanGFTError,
                     MatrixParseError, NormalizationUndefinedError, NotAChainError,
                     SingularMatrixError, SizeLimitError)
from .gft import GFTResult, SpectralComponent, gft, inverse_gft, project_component, projector
from .jordan import (Eigenvalue, JordanChain, JordanDecomposition, JordanForm,
                     decomposition_from_basis, distinct_eigenvalues, dual_basis,
                     jordan_chains, jordan_decompose, normalize_chains, weyr_characteristic)
from .matcore import (DEFAULT_TOL, ExactMatrix, GaussianRational, ToleranceConfig,
                      exact_rank_and_kernel, induced_l1_norm, inverse, matmul, rank_and_kernel)
from .textio import format_matrix, parse_matrix, parse_signal
from .tv import (FrequencyOrdering, TVValue, chain_tv, class_tv, normalized_chain_tv,
                 order_components, signal_tv, tv_bound, tv_profile)

__version__ = "0.1.0"
