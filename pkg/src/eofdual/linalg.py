"""Dense complex linear algebra primitives shared by the whole package.

Conventions fixed project-wide:

* row-major storage, ``complex128`` everywhere;
* bipartite systems use the "A-major" index convention,
  global index = i * dimB + j (i on subsystem A, j on subsystem B).
"""

from __future__ import annotations

import numpy as np

#: Largest side allowed for a tensor_product result.
MAX_TENSOR_DIM = 4096

#: Relative eigenvalue below which a spectral component counts as kernel.
DEFAULT_EIG_FLOOR = 1e-12

HERMITICITY_TOL = 1e-9
PSD_SLACK = 1e-9


class DimensionError(ValueError):
    """Shapes or subsystem dimensions do not match."""


class ValidationError(ValueError):
    """An input violates a structural invariant (hermiticity, trace, ...)."""


class PSDViolationError(ValidationError):
    """An eigenvalue fell below the allowed negative slack."""


class UnsupportedSizeError(ValueError):
    """The requested computation exceeds the configured size cap."""


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a C-contiguous complex128 2-D array, rejecting NaN/Inf."""
    a = np.ascontiguousarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got ndim={a.ndim}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-norm distance from m to its own adjoint."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def tensor_product(x, y) -> np.ndarray:
    """Kronecker product with a size cap; Tr(X (x) Y) = Tr(X) Tr(Y)."""
    x = as_complex_matrix(x)
    y = as_complex_matrix(y)
    rows = x.shape[0] * y.shape[0]
    cols = x.shape[1] * y.shape[1]
    if rows > MAX_TENSOR_DIM or cols > MAX_TENSOR_DIM:
        raise DimensionError(
            f"tensor product of shape ({rows}, {cols}) exceeds cap {MAX_TENSOR_DIM}"
        )
    return np.kron(x, y)


def partial_trace(m, dim_a: int, dim_b: int, keep: str = "A") -> np.ndarray:
    """Trace out one subsystem of an operator on a dimA*dimB space.

    ``keep="A"`` returns Tr_B(M) (side dimA); ``keep="B"`` returns Tr_A(M).
    """
    m = as_complex_matrix(m)
    d = dim_a * dim_b
    if m.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} matrix, got {m.shape}")
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.ascontiguousarray(np.einsum("ijkj->ik", t))
    if keep == "B":
        return np.ascontiguousarray(np.einsum("ijil->jl", t))
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_trace_multi(m, dims, keep) -> np.ndarray:
    """Partial trace over a multipartite operator.

    dims is the tuple of factor dimensions in tensor order; keep is the
    tuple of factor indices to retain (their relative order is preserved).
    """
    m = as_complex_matrix(m)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    d = int(np.prod(dims))
    if m.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} matrix, got {m.shape}")
    keep = tuple(int(k) for k in keep)
    traced = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    # contract each traced factor's row index with its column index
    for offset, i in enumerate(traced):
        axis = i - sum(1 for j in traced[:offset] if j < i)
        ncur = t.ndim // 2
        t = np.trace(t, axis1=axis, axis2=axis + ncur)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.ascontiguousarray(t.reshape(dk, dk))


def hermitian_eig(m, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized as (M + M')/2 to absorb upstream round-off;
    a hermiticity defect beyond tol is an error, not something to paper over.
    """
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValidationError(f"matrix is not Hermitian: defect {defect:.3e} > {tol:.1e}")
    sym = (m + m.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    return vals[::-1].copy(), np.ascontiguousarray(vecs[:, ::-1])


def matrix_log2_psd(m, floor: float = DEFAULT_EIG_FLOOR) -> np.ndarray:
    """Base-2 matrix logarithm on the positive support, zero on the kernel.

    Eigenvalues in (floor, -PSD_SLACK] are treated as numerical zeros;
    anything below -PSD_SLACK raises.
    """
    vals, vecs = hermitian_eig(m)
    if vals.size and vals[-1] < -PSD_SLACK:
        raise PSDViolationError(
            f"eigenvalue {vals[-1]:.3e} below the allowed slack -{PSD_SLACK:.1e}"
        )
    mask = vals > floor
    if not np.any(mask):
        return np.zeros_like(np.asarray(m, dtype=np.complex128))
    v = vecs[:, mask]
    logs = np.log2(vals[mask])
    return (v * logs) @ v.conj().T
