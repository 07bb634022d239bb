"""Entropy, pure-state entanglement, and the convex-roof minimizer.

The entanglement of formation of rho is computed by parameterizing all
size-k decompositions of rho by a k x r isometry U (r = rank) and running
projected gradient descent on the isometry manifold: Euclidean gradient,
tangent projection, QR retraction, Armijo backtracking. The best of several
independent restarts is reported together with convergence diagnostics; the
result is always an upper bound on the true minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import backend
from .linalg import DEFAULT_EIG_FLOOR, DimensionError, hermitian_eig
from .states import (
    ENSEMBLE_CAP,
    TAG_RESTART,
    BipartiteDims,
    DensityMatrix,
    Ensemble,
    IsometryParameter,
    PureState,
    ensemble_from_isometry,
    random_isometry,
    rng_stream,
)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 16
    max_iters: int = 2000
    grad_tol: float = 1e-7
    ensemble_size: int | None = None
    seed: int = 0
    eig_floor: float = DEFAULT_EIG_FLOOR
    use_finite_difference: bool = False  # cross-check mode, much slower


DEFAULT_CONFIG = OptimizerConfig()


@dataclass(frozen=True)
class EoFResult:
    value: float
    ensemble: Ensemble
    restarts: int
    best_restart_index: int
    converged_gradient_norm: float
    seed: int
    converged: bool


def von_neumann_entropy(rho: DensityMatrix, floor: float = DEFAULT_EIG_FLOOR) -> float:
    """S(rho) = -Tr rho log2 rho in bits, support-restricted."""
    vals, _ = hermitian_eig(rho.matrix)
    vals = vals[vals > floor]
    return float(-(vals * np.log2(vals)).sum())


def pure_entanglement(psi: PureState, floor: float = DEFAULT_EIG_FLOOR) -> float:
    """Entropy of either reduced state of a bipartite pure state."""
    value, _ = backend.entropy_and_gradient(psi.matrix[None, :, :], floor)
    return float(value)


def average_entanglement(ens: Ensemble, floor: float = DEFAULT_EIG_FLOOR) -> float:
    """sum_i p_i E(psi_i): the convex-roof objective at this ensemble."""
    return float(
        sum(p * pure_entanglement(s, floor) for p, s in zip(ens.weights, ens.states))
    )


def _herm(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2.0


def _qf(a: np.ndarray) -> np.ndarray:
    """Q factor with positive-diagonal R, the retraction back to the manifold."""
    q, r = np.linalg.qr(a)
    ph = np.diag(r).copy()
    ph = np.where(np.abs(ph) > 0, ph / np.abs(ph), 1.0)
    return q * ph.conj()


class _RoofObjective:
    """sum_i p_i E(psi_i) as a function of the mixing isometry."""

    def __init__(self, rho: DensityMatrix, floor: float):
        vals, vecs = hermitian_eig(rho.matrix)
        mask = vals > floor
        self.rank = int(mask.sum())
        self.mixer = vecs[:, mask] * np.sqrt(vals[mask])  # d x r
        self.dims = rho.bipartite
        self.floor = floor

    def value_and_grad(self, u: np.ndarray):
        k = u.shape[0]
        w = (u.conj() @ self.mixer.T).reshape(k, self.dims.a, self.dims.b)
        value, g = backend.entropy_and_gradient(w, self.floor)
        egrad = g.reshape(k, -1).conj() @ self.mixer
        return value, egrad

    def value(self, u: np.ndarray) -> float:
        return self.value_and_grad(u)[0]

    def fd_grad(self, u: np.ndarray, step: float = 1e-6) -> np.ndarray:
        """Central-difference Euclidean gradient (Wirtinger, w.r.t. conj U)."""
        g = np.zeros_like(u)
        for idx in np.ndindex(*u.shape):
            for unit, sign in ((1.0, 1.0), (1.0j, 1.0j)):
                up = u.copy()
                up[idx] += step * unit
                um = u.copy()
                um[idx] -= step * unit
                deriv = (self.value(up) - self.value(um)) / (2.0 * step)
                g[idx] += 0.5 * sign * deriv
        return g


def _descend_stiefel(obj: _RoofObjective, u0: np.ndarray, cfg: OptimizerConfig):
    """Projected gradient descent with QR retraction and Armijo backtracking."""
    u = u0
    if cfg.use_finite_difference:
        f, d = obj.value(u), obj.fd_grad(u)
    else:
        f, d = obj.value_and_grad(u)
    step = 1.0
    grad_norm = np.inf
    for _ in range(cfg.max_iters):
        xi = d - u @ _herm(u.conj().T @ d)
        grad_norm = float(np.linalg.norm(xi))
        if grad_norm <= cfg.grad_tol:
            return u, f, grad_norm, True
        t = step
        accepted = False
        for _ in range(60):
            u_new = _qf(u - t * xi)
            if cfg.use_finite_difference:
                f_new, d_new = obj.value(u_new), obj.fd_grad(u_new)
            else:
                f_new, d_new = obj.value_and_grad(u_new)
            if f_new <= f - 1e-4 * t * grad_norm * grad_norm:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break  # step underflow at a cusp; report the last gradient norm
        u, f, d = u_new, f_new, d_new
        step = min(t * 2.0, 64.0)
    return u, f, grad_norm, grad_norm <= cfg.grad_tol


def eof_minimize(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> EoFResult:
    """Entanglement of formation by multi-restart convex-roof minimization."""
    cfg = cfg or DEFAULT_CONFIG
    obj = _RoofObjective(rho, cfg.eig_floor)
    r = obj.rank
    k = cfg.ensemble_size or min(r * r, ENSEMBLE_CAP)
    k = max(k, r)

    best = None
    for t in range(cfg.restarts):
        u0 = random_isometry(k, r, rng_stream(cfg.seed, TAG_RESTART, t)).entries
        u, f, gn, conv = _descend_stiefel(obj, u0, cfg)
        if best is None or f < best[1] - 1e-12:
            best = (t, f, u, gn, conv)
    t_best, _, u_best, gn, conv = best

    ensemble = ensemble_from_isometry(rho, IsometryParameter(u_best), cfg.eig_floor)
    value = average_entanglement(ensemble, cfg.eig_floor)
    return EoFResult(
        value=value,
        ensemble=ensemble,
        restarts=cfg.restarts,
        best_restart_index=t_best,
        converged_gradient_norm=gn,
        seed=cfg.seed,
        converged=conv,
    )


# ---------------------------------------------------------------------------
# independent two-qubit oracle (closed form, no optimization involved)

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y)


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence C = max(0, sqrt(l1)-sqrt(l2)-sqrt(l3)-sqrt(l4))."""
    if rho.bipartite != BipartiteDims(2, 2):
        raise DimensionError("concurrence is defined for two-qubit states only")
    r = rho.matrix
    rt = r @ _YY @ r.conj() @ _YY
    lam = np.sort(np.clip(np.linalg.eigvals(rt).real, 0.0, None))[::-1]
    roots = np.sqrt(lam)
    return float(max(0.0, roots[0] - roots[1] - roots[2] - roots[3]))


def wootters_eof(rho: DensityMatrix) -> float:
    """Closed-form two-qubit EoF: h((1 + sqrt(1 - C^2)) / 2)."""
    c = concurrence(rho)
    return binary_entropy((1.0 + np.sqrt(max(0.0, 1.0 - c * c))) / 2.0)


def convexity_gap(components, cfg: OptimizerConfig | None = None, eof_fn=None) -> float:
    """sum_i p_i E_F(rho_i) - E_F(sum_i p_i rho_i), expected >= -optimizer slack.

    ``eof_fn`` substitutes another EoF evaluator (e.g. the Wootters oracle)
    for both sides; the default is eof_minimize.
    """
    probs = np.asarray([p for p, _ in components], dtype=np.float64)
    if np.any(probs <= 0) or abs(probs.sum() - 1.0) > 1e-10:
        raise ValueError("component probabilities must be positive and sum to 1")
    if eof_fn is None:
        eof_fn = lambda rho: eof_minimize(rho, cfg).value
    mats = [rho for _, rho in components]
    mixed = DensityMatrix(
        mats[0].dims, sum(p * rho.matrix for p, rho in components)
    )
    return float(sum(p * eof_fn(rho) for p, rho in components) - eof_fn(mixed))
