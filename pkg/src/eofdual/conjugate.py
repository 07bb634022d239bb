"""The conjugate function E*(H) and its dual machinery.

E*(H) is the maximum over pure states of f(psi) = <psi|H|psi> - E(psi),
computed by multi-restart projected gradient ascent on the unit sphere
(tangent projection g - Re<psi,g> psi, renormalizing retraction). At a
converged maximizer the first-order condition

    H psi = -log2(psi psi') psi + E*(H) psi      (matrix view)

holds up to the reported stationarity residual, and the multiplier
C = <psi, H psi + log2(rho) psi> recovers the value itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .entanglement import OptimizerConfig, eof_minimize, pure_entanglement
from .linalg import DEFAULT_EIG_FLOOR, DimensionError, UnsupportedSizeError
from .states import (
    BipartiteDims,
    DensityMatrix,
    HermitianObservable,
    PureState,
    rng_stream,
)

_TAG_SPHERE = 6

#: biconjugate_eof is a nested optimization; keep it to desk scale.
BICONJUGATE_DIM_CAP = 4


@dataclass(frozen=True)
class DualObjective:
    observable: HermitianObservable

    @property
    def dims(self) -> BipartiteDims:
        return self.observable.dims


@dataclass(frozen=True)
class ConjugateResult:
    value: float
    optimizer: PureState
    stationarity_residual: float
    multiplier: float
    restarts: int
    best_restart_index: int
    seed: int
    converged: bool


def entanglement_gradient(psi: PureState, floor: float = DEFAULT_EIG_FLOOR) -> np.ndarray:
    """Wirtinger gradient of E w.r.t. conj(psi): vec(-log2(psi psi') psi)."""
    _, g = backend.entropy_and_gradient(psi.matrix[None, :, :], floor)
    return g.reshape(-1)


def dual_objective_value(obj: DualObjective, psi: PureState) -> float:
    """f(psi) = <psi|H|psi> - E(psi)."""
    h = obj.observable.matrix
    v = psi.amplitudes
    return float(np.real(v.conj() @ h @ v)) - pure_entanglement(psi)


def _f_and_grad(h: np.ndarray, v: np.ndarray, dims: BipartiteDims, floor: float):
    """f and its gradient w.r.t. conj(psi) at a normalized vector v."""
    e, ge = backend.entropy_and_gradient(v.reshape(1, dims.a, dims.b), floor)
    hv = h @ v
    f = float(np.real(v.conj() @ hv)) - e
    return f, hv - ge.reshape(-1)


def _ascend_sphere(h, v0, dims, cfg: OptimizerConfig):
    v = v0
    f, g = _f_and_grad(h, v, dims, cfg.eig_floor)
    step = 1.0
    grad_norm = np.inf
    for _ in range(cfg.max_iters):
        tang = g - np.real(np.vdot(v, g)) * v
        grad_norm = float(np.linalg.norm(tang))
        if grad_norm <= cfg.grad_tol:
            return v, f, grad_norm, True
        t = step
        accepted = False
        for _ in range(60):
            v_new = v + t * tang
            v_new /= np.linalg.norm(v_new)
            f_new, g_new = _f_and_grad(h, v_new, dims, cfg.eig_floor)
            if f_new >= f + 1e-4 * t * grad_norm * grad_norm:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        v, f, g = v_new, f_new, g_new
        step = min(t * 2.0, 64.0)
    return v, f, grad_norm, grad_norm <= cfg.grad_tol


def conjugate_value(
    h: HermitianObservable, cfg: OptimizerConfig | None = None
) -> ConjugateResult:
    """E*(H) by multi-restart ascent of f over the unit sphere."""
    cfg = cfg or OptimizerConfig()
    dims = h.dims
    d = dims.total
    best = None
    for t in range(cfg.restarts):
        rng = rng_stream(cfg.seed, _TAG_SPHERE, t)
        v0 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v0 /= np.linalg.norm(v0)
        v, f, gn, conv = _ascend_sphere(h.matrix, v0, dims, cfg)
        if best is None or f > best[1] + 1e-12:
            best = (t, f, v, gn, conv)
    t_best, value, v, gn, conv = best

    psi = PureState(dims, v)
    mult = _multiplier(h, psi, cfg.eig_floor)
    resid = stationarity_residual(psi, h, value, cfg.eig_floor)
    return ConjugateResult(
        value=float(value),
        optimizer=psi,
        stationarity_residual=resid,
        multiplier=mult,
        restarts=cfg.restarts,
        best_restart_index=t_best,
        seed=cfg.seed,
        converged=conv,
    )


def _log2_rho_psi(psi: PureState, floor: float) -> np.ndarray:
    """vec(log2(psi psi') psi), support-restricted."""
    return -entanglement_gradient(psi, floor)


def _multiplier(h: HermitianObservable, psi: PureState, floor: float) -> float:
    v = psi.amplitudes
    lhs = h.matrix @ v + _log2_rho_psi(psi, floor)
    return float(np.real(np.vdot(v, lhs)))


def stationarity_residual(
    psi: PureState,
    h: HermitianObservable,
    estar: float,
    floor: float = DEFAULT_EIG_FLOOR,
) -> float:
    """|| H psi + log2(psi psi') psi - estar psi ||_2 in the matrix view."""
    v = psi.amplitudes
    r = h.matrix @ v + _log2_rho_psi(psi, floor) - estar * v
    return float(np.linalg.norm(r))


def pairwise_hermiticity_residual(
    psi_a: PureState, psi_b: PureState, floor: float = DEFAULT_EIG_FLOOR
) -> float:
    """|Tr[psi_a psi_b' (log2(psi_a psi_a') - log2(psi_b psi_b'))]|.

    Vanishes for any pair of maximizers of the same dual objective; measured
    here with support-restricted logs.
    """
    if psi_a.dims != psi_b.dims:
        raise DimensionError("states must share dimensions")
    ma, mb = psi_a.matrix, psi_b.matrix
    la = _log2_rho_psi(psi_a, floor).reshape(ma.shape)  # log2(rho_a) psi_a
    lb = _log2_rho_psi(psi_b, floor).reshape(mb.shape)
    # Tr[psi_a psi_b' log2(rho_a)] = Tr[psi_b' (log2(rho_a) psi_a)]
    term_a = np.trace(mb.conj().T @ la)
    # Tr[psi_a psi_b' log2(rho_b)] = conj(Tr[psi_a' (log2(rho_b) psi_b)])
    term_b = np.conj(np.trace(ma.conj().T @ lb))
    return float(abs(term_a - term_b))


def duality_lower_bound(
    rho: DensityMatrix, h: HermitianObservable, cfg: OptimizerConfig | None = None
) -> float:
    """Tr(rho H) - E*(H): never exceeds E_F(rho) by biconjugation."""
    res = conjugate_value(h, cfg)
    return float(np.real(np.trace(rho.matrix @ h.matrix))) - res.value


def _observable_from_ensemble(rho: DensityMatrix, cfg: OptimizerConfig, gauge: float):
    """Candidate optimal H built from a near-optimal decomposition of rho.

    The first-order condition prescribes H's action on every ensemble member;
    this extends that action Hermitianly to the member span V and puts a
    strong penalty on the complement so maximizers stay inside V.
    """
    ens = eof_minimize(rho, cfg).ensemble
    d = rho.dims.total
    psis = np.stack([s.amplitudes for s in ens.states], axis=1)  # d x k
    # first-order condition: H psi = -log2(psi psi') psi + gauge * psi
    xis = np.stack(
        [
            entanglement_gradient(s, cfg.eig_floor) + gauge * s.amplitudes
            for s in ens.states
        ],
        axis=1,
    )
    u, sv, _ = np.linalg.svd(psis, full_matrices=False)
    q = u[:, sv > 1e-10]  # orthonormal basis of V
    c = q.conj().T @ psis
    y = xis @ np.linalg.pinv(c)
    b = q.conj().T @ y
    b_h = (b + b.conj().T) / 2.0
    y = y - q @ (b - b_h)  # force the V-block Hermitian
    h = y @ q.conj().T + q @ y.conj().T - q @ b_h @ q.conj().T
    proj = q @ q.conj().T
    scale = float(np.linalg.norm(h, 2)) + 8.0
    h = h - scale * (np.eye(d) - proj)
    return HermitianObservable(rho.bipartite, (h + h.conj().T) / 2.0)


def biconjugate_eof(
    rho: DensityMatrix,
    cfg: OptimizerConfig | None = None,
    outer_iters: int = 20,
    dim_cap: int = BICONJUGATE_DIM_CAP,
) -> float:
    """Best lower bound max_H [Tr(rho H) - E*(H)] found by outer ascent.

    The outer variable H is seeded from the first-order condition on a
    near-optimal decomposition, then refined by supergradient steps
    rho - |psi~><psi~| with backtracking; each evaluation runs the inner
    sphere maximization. Approaches E_F(rho) from below.
    """
    cfg = cfg or OptimizerConfig()
    d = rho.dims.total
    if d > dim_cap:
        raise UnsupportedSizeError(
            f"biconjugate_eof caps the product dimension at {dim_cap}, got {d}"
        )
    dims = rho.bipartite

    def evaluate(h: HermitianObservable):
        res = conjugate_value(h, cfg)
        bound = float(np.real(np.trace(rho.matrix @ h.matrix))) - res.value
        return bound, res

    best_h = _observable_from_ensemble(rho, cfg, gauge=0.0)
    best_l, best_res = evaluate(best_h)
    if best_l < 0.0:
        # H = 0 always certifies the trivial bound 0
        zero = HermitianObservable(dims, np.zeros((d, d)))
        l0, r0 = evaluate(zero)
        if l0 > best_l:
            best_h, best_l, best_res = zero, l0, r0

    step = 0.5
    for _ in range(outer_iters):
        g = rho.matrix - best_res.optimizer.projector()
        improved = False
        t = step
        for _ in range(12):
            cand = HermitianObservable(dims, best_h.matrix + t * (g + g.conj().T) / 2.0)
            l, r = evaluate(cand)
            if l > best_l + 1e-12:
                best_h, best_l, best_res = cand, l, r
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        step = min(t * 2.0, 4.0)
    return float(best_l)
