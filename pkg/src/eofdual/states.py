"""Data model for states, observables and ensembles, plus random sampling.

All randomness flows through :func:`rng_stream`: independent generators are
derived from (seed, purpose tag, index), so parallel sampling and optimizer
restarts are order-independent and exactly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_EIG_FLOOR,
    PSD_SLACK,
    DimensionError,
    ValidationError,
    as_complex_matrix,
    hermitian_eig,
    hermiticity_defect,
    partial_trace_multi,
)

NORM_TOL = 1e-9
PROB_SUM_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8
ISOMETRY_TOL = 1e-9
WEIGHT_PRUNE = 1e-14

#: Default cap on ensemble cardinality, applied as min(rank**2, ENSEMBLE_CAP).
ENSEMBLE_CAP = 16

# purpose tags for rng_stream
TAG_PURE = 1
TAG_DENSITY = 2
TAG_HERMITIAN = 3
TAG_ISOMETRY = 4
TAG_RESTART = 5


def rng_stream(seed: int, tag: int, index: int = 0) -> np.random.Generator:
    """Deterministic generator for (seed, purpose tag, stream index)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(tag), int(index)]))


@dataclass(frozen=True)
class BipartiteDims:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise DimensionError(f"subsystem dimensions must be >= 1, got {self}")

    @property
    def total(self) -> int:
        return self.a * self.b


@dataclass(frozen=True)
class FourPartyDims:
    """Dimensions of parts 1A, 1B, 2A, 2B.

    The global tensor order is the *cut* order (1A, 2A, 1B, 2B): the A side
    of the entanglement cut is (1A, 2A) and the B side is (1B, 2B), each
    A-major. Subsystem 1 is (1A, 1B); subsystem 2 is (2A, 2B).
    """

    d1a: int
    d1b: int
    d2a: int
    d2b: int

    def __post_init__(self):
        if min(self.d1a, self.d1b, self.d2a, self.d2b) < 1:
            raise DimensionError(f"part dimensions must be >= 1, got {self}")

    @property
    def total(self) -> int:
        return self.d1a * self.d1b * self.d2a * self.d2b

    @property
    def cut(self) -> BipartiteDims:
        return BipartiteDims(self.d1a * self.d2a, self.d1b * self.d2b)

    @property
    def sub1(self) -> BipartiteDims:
        return BipartiteDims(self.d1a, self.d1b)

    @property
    def sub2(self) -> BipartiteDims:
        return BipartiteDims(self.d2a, self.d2b)


@dataclass(frozen=True)
class PureState:
    """Normalized bipartite vector with an A-major dimA x dimB matrix view."""

    dims: BipartiteDims
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.ascontiguousarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amp.size != self.dims.total:
            raise DimensionError(
                f"amplitude length {amp.size} != dimA*dimB = {self.dims.total}"
            )
        if not np.all(np.isfinite(amp.real)) or not np.all(np.isfinite(amp.imag)):
            raise ValidationError("amplitudes contain NaN or Inf")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state norm {norm!r} deviates from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def matrix(self) -> np.ndarray:
        """The dimA x dimB matrix view psi of the amplitude vector."""
        return self.amplitudes.reshape(self.dims.a, self.dims.b)

    @classmethod
    def from_matrix(cls, m, dims: BipartiteDims | None = None) -> "PureState":
        m = as_complex_matrix(m)
        dims = dims or BipartiteDims(m.shape[0], m.shape[1])
        return cls(dims, m.reshape(-1))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def reshape_vector_matrix(state: PureState) -> np.ndarray:
    """A-major matrix view of a pure state (round-trips with from_matrix)."""
    return state.matrix


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix with bipartite or four-party dims."""

    dims: BipartiteDims | FourPartyDims
    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        d = self.dims.total
        if m.shape != (d, d):
            raise DimensionError(f"expected a {d}x{d} matrix, got {m.shape}")
        defect = hermiticity_defect(m)
        if defect > NORM_TOL:
            raise ValidationError(f"hermiticity defect {defect:.3e} > {NORM_TOL}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > NORM_TOL:
            raise ValidationError(f"trace {tr!r} deviates from 1 beyond {NORM_TOL}")
        lam_min = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0)[0])
        if lam_min < -PSD_SLACK:
            raise ValidationError(
                f"PSD violation: minimum eigenvalue {lam_min:.3e} < -{PSD_SLACK}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def bipartite(self) -> BipartiteDims:
        """The bipartite cut this matrix is entangled across."""
        d = self.dims
        return d if isinstance(d, BipartiteDims) else d.cut


def validate_density(matrix, dims: BipartiteDims | FourPartyDims) -> DensityMatrix:
    """Validate and wrap; errors carry the measured residual."""
    return DensityMatrix(dims, matrix)


@dataclass(frozen=True)
class HermitianObservable:
    dims: BipartiteDims
    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        d = self.dims.total
        if m.shape != (d, d):
            raise DimensionError(f"expected a {d}x{d} matrix, got {m.shape}")
        defect = hermiticity_defect(m)
        if defect > NORM_TOL:
            raise ValidationError(f"hermiticity defect {defect:.3e} > {NORM_TOL}")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class Ensemble:
    """Weighted pure states realizing a target density matrix."""

    weights: np.ndarray
    states: tuple
    target: DensityMatrix

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64).reshape(-1)
        if len(self.states) != w.size or w.size == 0:
            raise ValidationError("weights and states must be non-empty and congruent")
        if np.any(w <= 0.0):
            raise ValidationError("all ensemble weights must be strictly positive")
        if abs(w.sum() - 1.0) > PROB_SUM_TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}, not 1")
        avg = sum(p * s.projector() for p, s in zip(w, self.states))
        resid = float(np.max(np.abs(avg - self.target.matrix)))
        if resid > RECONSTRUCTION_TOL:
            raise ValidationError(
                f"ensemble average misses the target by {resid:.3e} > {RECONSTRUCTION_TOL}"
            )
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class IsometryParameter:
    """A k x r matrix with orthonormal columns, mixing an eigendecomposition
    of a rank-r state into a k-member ensemble."""

    entries: np.ndarray

    def __post_init__(self):
        u = as_complex_matrix(self.entries)
        k, r = u.shape
        if k < r:
            raise DimensionError(f"ensemble size {k} smaller than target rank {r}")
        defect = float(np.max(np.abs(u.conj().T @ u - np.eye(r))))
        if defect > ISOMETRY_TOL:
            raise ValidationError(f"columns not orthonormal: defect {defect:.3e}")
        object.__setattr__(self, "entries", u)

    @property
    def ensemble_size(self) -> int:
        return self.entries.shape[0]

    @property
    def target_rank(self) -> int:
        return self.entries.shape[1]


def ensemble_from_isometry(
    rho: DensityMatrix,
    iso: IsometryParameter,
    floor: float = DEFAULT_EIG_FLOOR,
) -> Ensemble:
    """Decomposition of rho selected by an isometry.

    With rho = sum_j lam_j |e_j><e_j| (lam_j > floor) the unnormalized
    members are sqrt(p_i)|psi_i> = sum_j conj(U_ij) sqrt(lam_j) |e_j>.
    Members with weight <= WEIGHT_PRUNE are dropped and weights renormalized.
    """
    vals, vecs = hermitian_eig(rho.matrix)
    mask = vals > floor
    r = int(mask.sum())
    if iso.target_rank != r:
        raise ValidationError(
            f"isometry rank {iso.target_rank} != state rank {r} (floor {floor:g})"
        )
    m = vecs[:, mask] * np.sqrt(vals[mask])  # columns sqrt(lam_j) e_j
    unnorm = iso.entries.conj() @ m.T  # (k, d) rows sqrt(p_i) psi_i
    p = np.einsum("id,id->i", unnorm, unnorm.conj()).real
    keep = p > WEIGHT_PRUNE
    p = p[keep]
    p = p / p.sum()
    dims = rho.bipartite
    states = tuple(
        PureState(dims, row / np.linalg.norm(row)) for row in unnorm[keep]
    )
    target = rho if isinstance(rho.dims, BipartiteDims) else DensityMatrix(dims, rho.matrix)
    return Ensemble(p, states, target)


def random_isometry(k: int, r: int, rng: np.random.Generator) -> IsometryParameter:
    g = rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r))
    q, rr = np.linalg.qr(g)
    ph = np.diag(rr).copy()
    ph = np.where(np.abs(ph) > 0, ph / np.abs(ph), 1.0)
    return IsometryParameter(q * ph.conj())


def sample_haar_pure(dims: BipartiteDims, seed: int, index: int = 0) -> PureState:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    rng = rng_stream(seed, TAG_PURE, index)
    z = rng.standard_normal(dims.total) + 1j * rng.standard_normal(dims.total)
    return PureState(dims, z / np.linalg.norm(z))


def sample_density(
    dims: BipartiteDims | FourPartyDims, rank: int, seed: int, index: int = 0
) -> DensityMatrix:
    """Hilbert-Schmidt-induced random density matrix of the given rank."""
    d = dims.total
    if not 1 <= rank <= d:
        raise DimensionError(f"rank must be in [1, {d}], got {rank}")
    rng = rng_stream(seed, TAG_DENSITY, index)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix(dims, (m + m.conj().T) / 2.0)


def sample_hermitian(dims: BipartiteDims, seed: int, index: int = 0) -> HermitianObservable:
    """GUE-distributed observable, scaled by 1/sqrt(d)."""
    d = dims.total
    rng = rng_stream(seed, TAG_HERMITIAN, index)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return HermitianObservable(dims, (g + g.conj().T) / (2.0 * np.sqrt(d)))


# ---------------------------------------------------------------------------
# four-party reorderings

def reduce_subsystem(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Trace a four-party state down to subsystem 1 or 2."""
    dims = rho.dims
    if not isinstance(dims, FourPartyDims):
        raise DimensionError("reduce_subsystem needs four-party dims")
    axes = (dims.d1a, dims.d2a, dims.d1b, dims.d2b)  # cut order
    if keep == 1:
        red = partial_trace_multi(rho.matrix, axes, keep=(0, 2))
        return DensityMatrix(dims.sub1, red)
    if keep == 2:
        red = partial_trace_multi(rho.matrix, axes, keep=(1, 3))
        return DensityMatrix(dims.sub2, red)
    raise ValueError(f"keep must be 1 or 2, got {keep}")


def subsystem_to_cut(op: np.ndarray, dims: FourPartyDims) -> np.ndarray:
    """Reorder an operator from subsystem order (1A,1B,2A,2B) to cut order."""
    op = as_complex_matrix(op)
    axes = (dims.d1a, dims.d1b, dims.d2a, dims.d2b)
    t = op.reshape(axes + axes)
    perm = (0, 2, 1, 3)
    t = t.transpose(perm + tuple(p + 4 for p in perm))
    d = dims.total
    return np.ascontiguousarray(t.reshape(d, d))


def product_across_cut(rho1: DensityMatrix, rho2: DensityMatrix) -> DensityMatrix:
    """rho1 (x) rho2 as a four-party state in cut order."""
    dims = FourPartyDims(rho1.dims.a, rho1.dims.b, rho2.dims.a, rho2.dims.b)
    prod = np.kron(rho1.matrix, rho2.matrix)  # subsystem order
    return DensityMatrix(dims, subsystem_to_cut(prod, dims))


def product_state_across_cut(
    psi1: PureState, psi2: PureState
) -> PureState:
    """|psi1>|psi2> reordered to the composite cut, as a bipartite state."""
    dims = FourPartyDims(psi1.dims.a, psi1.dims.b, psi2.dims.a, psi2.dims.b)
    vec = np.kron(psi1.amplitudes, psi2.amplitudes)
    t = vec.reshape(dims.d1a, dims.d1b, dims.d2a, dims.d2b).transpose(0, 2, 1, 3)
    return PureState(dims.cut, t.reshape(-1))
