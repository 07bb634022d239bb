"""Gap computations for the additivity-type statements and the theorem replay.

The central piece is :func:`theorem_pipeline`, which takes a four-party state
and numerically walks the chain: optimal decompositions of the reductions,
additivity premise, per-member optimality of product states, support
containment, the locally-constructed dual observable, the trace identity,
and finally the strong-superadditivity gap. Conjectured equalities are
reported as data; only the proved inequality directions are ever asserted.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .conjugate import entanglement_gradient
from .entanglement import OptimizerConfig, eof_minimize, pure_entanglement
from .linalg import DimensionError, UnsupportedSizeError, hermiticity_defect
from .states import (
    DensityMatrix,
    Ensemble,
    FourPartyDims,
    HermitianObservable,
    product_across_cut,
    product_state_across_cut,
    reduce_subsystem,
    subsystem_to_cut,
)

#: Largest composite dimension the gap computations accept by default.
COMPOSITE_DIM_CAP = 16

SUPPORT_RANK_CUT = 1e-10


def _ref(m: np.ndarray) -> dict:
    a = np.ascontiguousarray(m)
    return {
        "shape": list(a.shape),
        "sha256": hashlib.sha256(a.tobytes()).hexdigest(),
    }


@dataclass(frozen=True)
class GapReport:
    kind: str
    lhs: float
    rhs: float
    inputs: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class SupportSubspaces:
    basis1: np.ndarray  # d1 x r1, orthonormal columns spanning V1
    basis2: np.ndarray


@dataclass(frozen=True)
class LocalObservables:
    h1: HermitianObservable
    h2: HermitianObservable
    hermiticity_residual1: float
    hermiticity_residual2: float


@dataclass(frozen=True)
class TheoremReport:
    eof_composite: float
    eof_rho1: float
    eof_rho2: float
    product_eof: float
    premise_gap: float
    ssa_gap: float
    product_value_deviation: float
    support_leakage: float
    trace_identity_residual: float
    local_form_residual: float
    split_constant: float
    estar: float
    verdicts: dict
    tolerances: dict
    conclusion: str
    diagnostics: dict


def _check_cap(total: int, cap: int):
    if total > cap:
        raise UnsupportedSizeError(f"composite dimension {total} exceeds cap {cap}")


def additivity_gap(
    rho1: DensityMatrix,
    rho2: DensityMatrix,
    cfg: OptimizerConfig | None = None,
    cap: int = COMPOSITE_DIM_CAP,
) -> GapReport:
    """rhs - lhs with lhs = E_F(rho1 (x) rho2), rhs = E_F(rho1) + E_F(rho2).

    Subadditivity guarantees gap >= -optimizer slack; gap = 0 is the
    additivity conjecture and is reported, never asserted.
    """
    comp = product_across_cut(rho1, rho2)
    _check_cap(comp.dims.total, cap)
    r1 = eof_minimize(rho1, cfg)
    r2 = eof_minimize(rho2, cfg)
    rc = eof_minimize(comp, cfg)
    return GapReport(
        kind="additivity",
        lhs=rc.value,
        rhs=r1.value + r2.value,
        inputs={"rho1": _ref(rho1.matrix), "rho2": _ref(rho2.matrix)},
        diagnostics={
            "eof_rho1": r1.value,
            "eof_rho2": r2.value,
            "eof_product": rc.value,
            "converged": r1.converged and r2.converged and rc.converged,
        },
    )


def strong_superadditivity_gap(
    rho: DensityMatrix,
    cfg: OptimizerConfig | None = None,
    cap: int = COMPOSITE_DIM_CAP,
) -> GapReport:
    """rhs - lhs with lhs = E_F(Tr2 rho) + E_F(Tr1 rho), rhs = E_F(rho)."""
    if not isinstance(rho.dims, FourPartyDims):
        raise DimensionError("strong_superadditivity_gap needs four-party dims")
    _check_cap(rho.dims.total, cap)
    r1 = eof_minimize(reduce_subsystem(rho, 1), cfg)
    r2 = eof_minimize(reduce_subsystem(rho, 2), cfg)
    rc = eof_minimize(rho, cfg)
    return GapReport(
        kind="strong-superadditivity",
        lhs=r1.value + r2.value,
        rhs=rc.value,
        inputs={"rho": _ref(rho.matrix)},
        diagnostics={
            "eof_rho1": r1.value,
            "eof_rho2": r2.value,
            "eof_composite": rc.value,
            "converged": r1.converged and r2.converged and rc.converged,
        },
    )


def pure_reduction_check(
    rho: DensityMatrix,
    cfg: OptimizerConfig | None = None,
    cap: int = COMPOSITE_DIM_CAP,
) -> GapReport:
    """Replay the reduction of strong superadditivity to pure states.

    With a near-optimal ensemble {p_i, psi_i} of rho, records the two links

        sum p_i E(psi_i)  >=?  sum p_i [E_F(Tr2 psi_i) + E_F(Tr1 psi_i)]
                          >=   E_F(Tr2 rho) + E_F(Tr1 rho)   (convexity)

    The first link is the conjectured pure-state statement and is only
    recorded; the second is guaranteed up to optimizer slack.
    """
    dims = rho.dims
    if not isinstance(dims, FourPartyDims):
        raise DimensionError("pure_reduction_check needs four-party dims")
    _check_cap(dims.total, cap)
    rc = eof_minimize(rho, cfg)
    top = rc.value

    mid = 0.0
    for p, psi in zip(rc.ensemble.weights, rc.ensemble.states):
        proj = DensityMatrix(dims, psi.projector())
        e1 = eof_minimize(reduce_subsystem(proj, 1), cfg).value
        e2 = eof_minimize(reduce_subsystem(proj, 2), cfg).value
        mid += p * (e1 + e2)

    r1 = eof_minimize(reduce_subsystem(rho, 1), cfg)
    r2 = eof_minimize(reduce_subsystem(rho, 2), cfg)
    bottom = r1.value + r2.value
    return GapReport(
        kind="pure-reduction",
        lhs=bottom,
        rhs=top,
        inputs={"rho": _ref(rho.matrix)},
        diagnostics={
            "pure_link_slack": top - mid,  # conjectured >= 0, recorded
            "convexity_link_slack": mid - bottom,  # >= -optimizer slack
            "member_average": mid,
        },
    )


def composite_observable(
    h1: HermitianObservable, h2: HermitianObservable
) -> HermitianObservable:
    """H1 (x) 1 + 1 (x) H2 on the composite cut (1A,2A)|(1B,2B)."""
    dims = FourPartyDims(h1.dims.a, h1.dims.b, h2.dims.a, h2.dims.b)
    d1, d2 = h1.dims.total, h2.dims.total
    sub = np.kron(h1.matrix, np.eye(d2)) + np.kron(np.eye(d1), h2.matrix)
    return HermitianObservable(dims.cut, subsystem_to_cut(sub, dims))


def conjugate_additivity_gap(
    h1: HermitianObservable,
    h2: HermitianObservable,
    cfg: OptimizerConfig | None = None,
    cap: int = COMPOSITE_DIM_CAP,
) -> GapReport:
    """rhs - lhs with lhs = E*(H1) + E*(H2), rhs = E*(H1 (x) 1 + 1 (x) H2).

    The trial-product bound guarantees gap >= -optimizer slack; equality is
    the restated strong-superadditivity conjecture.
    """
    from .conjugate import conjugate_value

    hc = composite_observable(h1, h2)
    _check_cap(hc.dims.total, cap)
    c1 = conjugate_value(h1, cfg)
    c2 = conjugate_value(h2, cfg)
    cc = conjugate_value(hc, cfg)
    return GapReport(
        kind="conjugate-additivity",
        lhs=c1.value + c2.value,
        rhs=cc.value,
        inputs={"h1": _ref(h1.matrix), "h2": _ref(h2.matrix)},
        diagnostics={
            "estar_h1": c1.value,
            "estar_h2": c2.value,
            "estar_composite": cc.value,
            "converged": c1.converged and c2.converged and cc.converged,
        },
    )


def support_subspaces(ens1: Ensemble, ens2: Ensemble) -> SupportSubspaces:
    """Orthonormal bases of the spans of the two ensembles' states."""

    def basis(ens: Ensemble) -> np.ndarray:
        cols = np.stack([s.amplitudes for s in ens.states], axis=1)
        u, sv, _ = np.linalg.svd(cols, full_matrices=False)
        return np.ascontiguousarray(u[:, sv > SUPPORT_RANK_CUT])

    return SupportSubspaces(basis(ens1), basis(ens2))


def support_leakage(rho: DensityMatrix, sub: SupportSubspaces) -> float:
    """Trace-norm weight of rho outside V1 (x) V2; exactly 0 in theory."""
    dims = rho.dims
    if not isinstance(dims, FourPartyDims):
        raise DimensionError("support_leakage needs four-party dims")
    p1 = sub.basis1 @ sub.basis1.conj().T
    p2 = sub.basis2 @ sub.basis2.conj().T
    if p1.shape[0] != dims.sub1.total or p2.shape[0] != dims.sub2.total:
        raise DimensionError("subspace bases do not match the state's parts")
    p = subsystem_to_cut(np.kron(p1, p2), dims)
    q = np.eye(dims.total) - p
    leaked = q @ rho.matrix @ q
    vals = np.linalg.eigvalsh((leaked + leaked.conj().T) / 2.0)
    return float(np.abs(vals).sum())


def _gram_restricted_observable(ens: Ensemble, elements: np.ndarray):
    """Hermitian operator on span(ens) whose matrix elements between the
    (non-orthogonal) ensemble states equal ``elements``; returns the operator
    on the full space (zero outside the span) and the hermitization residual.
    """
    cols = np.stack([s.amplitudes for s in ens.states], axis=1)
    u, sv, _ = np.linalg.svd(cols, full_matrices=False)
    q = u[:, sv > SUPPORT_RANK_CUT]
    c = q.conj().T @ cols  # r x k coefficients
    c_pinv = np.linalg.pinv(c)
    b = c_pinv.conj().T @ elements @ c_pinv
    resid = hermiticity_defect(b)
    b = (b + b.conj().T) / 2.0
    return q @ b @ q.conj().T, resid


def local_observable_from_ensembles(
    ens1: Ensemble,
    ens2: Ensemble,
    estar: float,
    split: float,
) -> LocalObservables:
    """Local dual observables H1, H2 on the ensemble spans.

    Matrix elements between ensemble members follow the first-order
    condition: <psi_m|H1|psi_s> = -Tr[psi_s psi_m' log2(psi_s psi_s')]
    + split <psi_m|psi_s>, and analogously for H2 with constant
    estar - split. The hermitization residual of each block vanishes in
    exact arithmetic for truly optimal ensembles.
    """

    def elements(ens: Ensemble, const: float) -> np.ndarray:
        states = ens.states
        k = len(states)
        a = np.zeros((k, k), dtype=np.complex128)
        # logs[s] = log2(psi_s psi_s') psi_s, support-restricted
        logs = [-entanglement_gradient(s).reshape(s.matrix.shape) for s in states]
        for s in range(k):
            for m in range(k):
                ov = np.vdot(states[m].amplitudes, states[s].amplitudes)
                a[m, s] = -np.trace(states[m].matrix.conj().T @ logs[s]) + const * ov
        return a

    a1 = elements(ens1, split)
    a2 = elements(ens2, estar - split)
    h1, r1 = _gram_restricted_observable(ens1, a1)
    h2, r2 = _gram_restricted_observable(ens2, a2)
    return LocalObservables(
        h1=HermitianObservable(ens1.target.dims, (h1 + h1.conj().T) / 2.0),
        h2=HermitianObservable(ens2.target.dims, (h2 + h2.conj().T) / 2.0),
        hermiticity_residual1=r1,
        hermiticity_residual2=r2,
    )


def theorem_pipeline(
    rho: DensityMatrix,
    cfg: OptimizerConfig | None = None,
    premise_tol: float = 1e-4,
    leakage_tol: float = 1e-8,
    product_tol: float = 1e-5,
    trace_tol: float = 1e-6,
    conclusion_tol: float = 1e-3,
    split: float | None = None,
    estar: float | None = None,
    cap: int = COMPOSITE_DIM_CAP,
) -> TheoremReport:
    """Numerically replay the additivity => strong superadditivity argument.

    Steps: reductions and their optimal ensembles; additivity premise;
    product-state optimality; support containment; locally constructed
    observable and the trace identity; final inequality chain. A failed
    premise does not error: the conclusion is marked "not implied".
    """
    dims = rho.dims
    if not isinstance(dims, FourPartyDims):
        raise DimensionError("theorem_pipeline needs four-party dims")
    _check_cap(dims.total, cap)
    cfg = cfg or OptimizerConfig()

    # (a) reductions and near-optimal decompositions
    rho1 = reduce_subsystem(rho, 1)
    rho2 = reduce_subsystem(rho, 2)
    r1 = eof_minimize(rho1, cfg)
    r2 = eof_minimize(rho2, cfg)

    # (b) additivity premise on the reductions
    comp = product_across_cut(rho1, rho2)
    rc = eof_minimize(comp, cfg)
    premise_gap = (r1.value + r2.value) - rc.value
    premise_ok = abs(premise_gap) <= premise_tol

    # (c) local observable from the decompositions; product-state optimality
    if estar is None:
        estar = r1.value + r2.value  # gauge choice, cancels in every identity
    if split is None:
        split = estar / 2.0
    local = local_observable_from_ensembles(r1.ensemble, r2.ensemble, estar, split)
    deviations = []
    for m, psi_m in enumerate(r1.ensemble.states):
        em = float(
            np.real(np.vdot(psi_m.amplitudes, local.h1.matrix @ psi_m.amplitudes))
        )
        for n, psi_n in enumerate(r2.ensemble.states):
            en = float(
                np.real(np.vdot(psi_n.amplitudes, local.h2.matrix @ psi_n.amplitudes))
            )
            prod = product_state_across_cut(psi_m, psi_n)
            deviations.append(abs(em + en - pure_entanglement(prod) - estar))
    product_dev = float(max(deviations))

    # (d) support containment of rho in V1 (x) V2
    sub = support_subspaces(r1.ensemble, r2.ensemble)
    leakage = support_leakage(rho, sub)

    # (e) trace identity Tr[(rho1 (x) rho2) H] = Tr(H rho)
    d1, d2 = dims.sub1.total, dims.sub2.total
    h_sub = np.kron(local.h1.matrix, np.eye(d2)) + np.kron(np.eye(d1), local.h2.matrix)
    lhs_tr = float(np.real(np.trace(np.kron(rho1.matrix, rho2.matrix) @ h_sub)))
    rhs_tr = float(np.real(np.trace(subsystem_to_cut(h_sub, dims) @ rho.matrix)))
    trace_residual = abs(lhs_tr - rhs_tr)

    # (f) final chain: E_F(rho) vs E_F(rho1) + E_F(rho2)
    rfull = eof_minimize(rho, cfg)
    ssa_gap = rfull.value - (r1.value + r2.value)
    local_form_residual = max(
        local.hermiticity_residual1, local.hermiticity_residual2
    )

    verdicts = {
        "premise_ok": premise_ok,
        "support_leakage_ok": leakage <= leakage_tol,
        "product_optimality_ok": product_dev <= product_tol,
        "trace_identity_ok": trace_residual <= trace_tol,
        "conclusion_gap_ok": ssa_gap >= -conclusion_tol,
    }
    conclusion = "implied" if premise_ok else "not implied"
    tolerances = {
        "premise": premise_tol,
        "leakage": leakage_tol,
        "product_optimality": product_tol,
        "trace_identity": trace_tol,
        "conclusion": conclusion_tol,
    }
    return TheoremReport(
        eof_composite=rfull.value,
        eof_rho1=r1.value,
        eof_rho2=r2.value,
        product_eof=rc.value,
        premise_gap=premise_gap,
        ssa_gap=ssa_gap,
        product_value_deviation=product_dev,
        support_leakage=leakage,
        trace_identity_residual=trace_residual,
        local_form_residual=local_form_residual,
        split_constant=split,
        estar=estar,
        verdicts=verdicts,
        tolerances=tolerances,
        conclusion=conclusion,
        diagnostics={
            "inputs": {"rho": _ref(rho.matrix)},
            "trace_identity_lhs": lhs_tr,
            "trace_identity_rhs": rhs_tr,
            "converged": r1.converged and r2.converged and rc.converged and rfull.converged,
        },
    )
