"""Maximally correlated side-information states and their exact identities.

An MCS on A'C is sum_ij sigma_ij |ii><jj| for a density-matrix kernel
sigma.  Every pure-state decomposition {(p_i, psi_i)} of a bipartite
source induces one through the correlated-copy purification

    |Psi> = sum_i sqrt(p_i) |psi_i>_AB |ii>_A'C,

whose A'C marginal has sigma_ij = sqrt(p_i p_j) <psi_i|psi_j>.  At such a
splitting the cost pair collapses: I(A:B|C)/2 equals the ensemble's
average marginal entropy exactly, and the ebit balance E vanishes because
the state is symmetric under swapping A' with C.
"""

from __future__ import annotations

import numpy as np

from .errors import MCSError
from .measures import (
    Decomposition,
    MeasureReport,
    _decomposition_search,
    decomposition_from_pointer,
)
from .optim import OptimizerConfig
from .redistribution import CostPair, FourPartyState, SplittingIsometry, cost_pair
from .states import DensityOperator, PureState, SystemLayout

KERNEL_TOL = 1e-10


def mcs_state(sigma) -> DensityOperator:
    """Maximally correlated state sum_ij sigma_ij |ii><jj| on A' x C."""
    s = np.asarray(sigma, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise MCSError(f"kernel must be square, got shape {s.shape}")
    if np.abs(s - s.conj().T).max() > KERNEL_TOL:
        raise MCSError("kernel is not Hermitian within 1e-10")
    if abs(s.trace() - 1.0) > KERNEL_TOL:
        raise MCSError(f"kernel trace is {s.trace():.12g}, not 1")
    if np.linalg.eigvalsh(s)[0] < -KERNEL_TOL:
        raise MCSError("kernel has a negative eigenvalue below -1e-10")
    k = s.shape[0]
    m = np.zeros((k * k, k * k), dtype=complex)
    for i in range(k):
        for j in range(k):
            m[i * k + i, j * k + j] = s[i, j]
    return DensityOperator(m, SystemLayout([("A'", k), ("C", k)]))


def _compact(dec: Decomposition, cutoff: float = 1e-12) -> Decomposition:
    """Drop zero-probability entries (below `cutoff`) and renormalize."""
    kept = [(p, psi) for p, psi in dec if p > cutoff]
    total = sum(p for p, _ in kept)
    return Decomposition([(p / total, psi) for p, psi in kept])


def mcs_from_decomposition(dec: Decomposition):
    """Correlated-copy purification of an ensemble and its MCS kernel.

    Returns (sigma, state) where sigma_ij = sqrt(p_i p_j) <psi_i|psi_j>
    and `state` is the four-party pure state whose A'C marginal equals
    mcs_state(sigma).
    """
    dec = _compact(dec)
    k = len(dec)
    d_a, d_b = dec.entries[0][1].layout.dims
    probs = dec.probabilities
    vectors = np.stack([psi.vector for _, psi in dec])  # (k, dA*dB)
    overlaps = vectors.conj() @ vectors.T  # <psi_i|psi_j>
    sigma = np.sqrt(np.outer(probs, probs)) * overlaps.T
    sigma = 0.5 * (sigma + sigma.conj().T)  # symmetrize roundoff

    tensor = np.zeros((d_a * d_b, k, k), dtype=complex)
    for i, (p, psi) in enumerate(dec):
        tensor[:, i, i] = np.sqrt(p) * psi.vector
    layout = SystemLayout([("A", d_a), ("B", d_b), ("A'", k), ("C", k)])
    state = FourPartyState(PureState(tensor.reshape(-1), layout))
    return sigma, state


def pointer_splitting(w) -> SplittingIsometry:
    """Splitting isometry V|e>_E = sum_i W_ie |ii>_A'C of a pointer isometry."""
    w = np.asarray(w, dtype=complex)
    k, d_e = w.shape
    v = np.zeros((k, k, d_e), dtype=complex)
    for i in range(k):
        v[i, i, :] = w[i, :]
    return SplittingIsometry(v.reshape(k * k, d_e), (k, k))


def mcs_splitting(dec: Decomposition) -> SplittingIsometry:
    """Splitting of the ensemble's own mixture realizing its MCS extension.

    Applied to the eigendecomposition purification of dec.mixture(), the
    returned isometry reproduces the correlated-copy four-party state, so
    MCS optima can seed unrestricted splitting searches.
    """
    dec = _compact(dec)
    rho = dec.mixture()
    _, state = mcs_from_decomposition(dec)
    k = len(dec)
    chi = state.pure.vector.reshape(rho.dim, k * k)
    evals, evecs = np.linalg.eigh(rho.matrix)
    mask = evals > 1e-12
    v = (chi.T @ evecs[:, mask].conj()) / np.sqrt(evals[mask])[None, :]
    return SplittingIsometry(v, (k, k))


def mcs_cmi_identity(dec: Decomposition) -> tuple[float, float]:
    """Both sides of the exact identity I(A:B|C)/2 = sum_i p_i S(Tr_B psi_i).

    The left side is evaluated from marginals of the correlated-copy
    four-party state, the right side directly from the ensemble; they
    agree for every decomposition, optimization plays no role.
    """
    dec = _compact(dec)
    _, state = mcs_from_decomposition(dec)
    lhs = cost_pair(state).q
    rhs = dec.average_marginal_entropy()
    return float(lhs), float(rhs)


def mcs_cost_pair(dec: Decomposition) -> CostPair:
    """Cost pair at the ensemble's MCS splitting; E vanishes by symmetry."""
    _, state = mcs_from_decomposition(dec)
    return cost_pair(state)


def eof_via_mcs(
    rho_ab: DensityOperator, k: int | None = None, cfg: OptimizerConfig | None = None
) -> MeasureReport:
    """Entanglement of formation as an infimum over MCS side-information.

    Minimizes I(A:B|C)/2 over splittings that produce maximally
    correlated A'C states, which by the correlated-copy identity is the
    same search as over decompositions; the reported value is evaluated
    from the realized four-party state's marginals, independently of the
    formation route.
    """
    cfg = cfg or OptimizerConfig()
    mode = cfg.resolved_mode("minimize")
    report = _decomposition_search(rho_ab, k, cfg, mode, "eof_via_mcs", "upper")
    dec = report.certificate
    _, state = mcs_from_decomposition(dec)
    pair = cost_pair(state)
    report.value = float(pair.q)
    report.entanglement_at_optimum = float(pair.e)
    report.certificate = pointer_splitting(report.details["pointer"])
    report.details["decomposition"] = dec
    return report
