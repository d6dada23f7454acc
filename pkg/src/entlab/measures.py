"""Correlation measures from extremized redistribution cost pairs.

Minimizing the qubit rate Q = I(A:B|C)/2 over splittings of the purifying
system upper-bounds the squashed entanglement; maximizing it lower-bounds
the dual ("puffed") quantity, whose closed form is min{S(A), S(B)}.
Optimizing the average marginal entropy over pure-state decompositions
gives the entanglement of formation (minimum) and the single-copy
entanglement of assistance (maximum).

Reported values are always re-evaluated from the certificate with the
definitional formulas, so a report stands on its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DecompositionError, LayoutError, ShapeError
from .optim import OptimizerConfig, optimize_isometry
from .random import child_seed
from .redistribution import (
    SplittingIsometry,
    cost_pair,
    embed_splitting,
    entanglement_balance,
    split_purification,
    trivial_splitting,
)
from .states import (
    DensityOperator,
    PureState,
    partial_trace,
    purify,
    von_neumann_entropy,
)

LOG_FLOOR = 1e-18
WEIGHT_CUTOFF = 1e-12


# ---------------------------------------------------------------------------
# reports and decompositions
# ---------------------------------------------------------------------------


@dataclass
class MeasureReport:
    """A measure value with its bound direction and achieving certificate.

    `bound` is "upper" for minimized infimum quantities, "lower" for
    maximized supremum quantities, "exact" for closed forms.
    `entanglement_at_optimum` is S(A|C) - Q at the certified splitting
    (negative values mean entanglement is gained).
    """

    measure: str
    value: float
    bound: str
    certificate: object = None
    entanglement_at_optimum: float | None = None
    converged: bool = True
    restarts_within_tolerance: int = 1
    tolerance: float = 0.0
    seed: int | None = None
    candidate_values: list[float] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def degenerate(self) -> bool:
        """True when several restarts tie with the optimum within 10x tolerance."""
        return self.restarts_within_tolerance >= 2


class Decomposition:
    """Pure-state ensemble {(p_i, |psi_i>)} realizing a bipartite state."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        entries = tuple((float(p), psi) for p, psi in entries)
        if not entries:
            raise DecompositionError("decomposition must have at least one entry")
        layouts = {psi.layout.dims for _, psi in entries}
        if len(layouts) != 1:
            raise DecompositionError("all ensemble states must share one layout")
        probs = np.array([p for p, _ in entries])
        if probs.min() < -1e-12:
            raise DecompositionError(f"negative weight {probs.min():.3e}")
        if abs(probs.sum() - 1.0) > 1e-10:
            raise DecompositionError(f"weights sum to {probs.sum():.12g}, not 1")
        self.entries = entries

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.entries])

    def mixture(self) -> DensityOperator:
        first = self.entries[0][1]
        m = np.zeros((first.layout.dim, first.layout.dim), dtype=complex)
        for p, psi in self.entries:
            m += p * np.outer(psi.vector, psi.vector.conj())
        return DensityOperator(m, first.layout)

    def average_marginal_entropy(self) -> float:
        """sum_i p_i S(Tr_B |psi_i><psi_i|), the formation/assistance objective."""
        label_a = self.entries[0][1].layout.labels[0]
        return float(
            sum(p * psi.subsystem_entropy([label_a]) for p, psi in self.entries)
        )


# ---------------------------------------------------------------------------
# objectives (exact values; Wirtinger gradients with eigenvalue-floored logs)
# ---------------------------------------------------------------------------


def _shannon_clipped(p: np.ndarray) -> float:
    p = np.clip(p, 0.0, None)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) if nz.size else 0.0


def _bipartite(rho: DensityOperator) -> tuple[int, int]:
    if len(rho.layout.dims) != 2:
        raise LayoutError("measures operate on bipartite states (two subsystems)")
    return rho.layout.dims


def _purification_matrix(rho: DensityOperator) -> np.ndarray:
    """Eigendecomposition purification as a (dA*dB, dE) matrix, dE = rank."""
    psi = purify(rho, env_label="@env")
    return psi.vector.reshape(rho.dim, psi.layout.dims[-1])


class _SplittingObjective:
    """Q(V) = I(A:B|C)/2 for phi = (1_AB x V) psi, with gradient.

    Uses S(ABC) = S(A') from global purity; entropies come from singular
    values of unfoldings of phi, logs in the gradient are floored at
    LOG_FLOOR to keep it bounded near rank deficiency.
    """

    def __init__(self, rho: DensityOperator, d_ap: int, d_c: int):
        self.d_a, self.d_b = _bipartite(rho)
        self.psi_m = _purification_matrix(rho)
        self.d_env = self.psi_m.shape[1]
        self.d_ap, self.d_c = d_ap, d_c
        self.shape = (d_ap * d_c, self.d_env)
        self.dims = (self.d_a, self.d_b, d_ap, d_c)
        # marginal -> axes kept in front, with +1/2 / -1/2 weights
        self.terms = [((0, 3), 0.5), ((1, 3), 0.5), ((2,), -0.5), ((3,), -0.5)]

    def _phi(self, v: np.ndarray) -> np.ndarray:
        return (self.psi_m @ v.T).reshape(self.dims)

    @staticmethod
    def _unfold(tensor, axes):
        n = tensor.ndim
        rest = [i for i in range(n) if i not in axes]
        perm = list(axes) + rest
        mat = np.transpose(tensor, perm)
        d = int(np.prod([tensor.shape[i] for i in axes], dtype=np.int64))
        return mat.reshape(d, -1), perm

    def value(self, v: np.ndarray) -> float:
        phi = self._phi(v)
        total = 0.0
        for axes, w in self.terms:
            mat, _ = self._unfold(phi, axes)
            s = np.linalg.svd(mat, compute_uv=False)
            total += w * _shannon_clipped(s * s)
        return total

    def grad(self, v: np.ndarray) -> np.ndarray:
        phi = self._phi(v)
        g = np.zeros_like(phi)
        for axes, w in self.terms:
            mat, perm = self._unfold(phi, axes)
            u, s, _ = np.linalg.svd(mat, full_matrices=False)
            logs = np.log2(np.maximum(s * s, LOG_FLOOR))
            lmat = u @ (logs[:, None] * (u.conj().T @ mat))
            shaped = lmat.reshape([phi.shape[i] for i in perm])
            g += -w * np.transpose(shaped, np.argsort(perm))
        g_mat = g.reshape(self.d_a * self.d_b, -1)
        return g_mat.T @ self.psi_m.conj()


class _DecompositionObjective:
    """sum_i p_i S(Tr_B psi_i) over pointer isometries W : E -> k, with gradient.

    A k-row isometry applied to the purifying system induces the ensemble
    phi_i = (1 x <i| W) |psi>; every decomposition of the source arises
    this way.  By the correlated-copy identity this objective also equals
    I(A:B|C)/2 of the side-information state built from the ensemble.
    """

    def __init__(self, rho: DensityOperator, k: int):
        self.d_a, self.d_b = _bipartite(rho)
        self.psi_m = _purification_matrix(rho)
        self.d_env = self.psi_m.shape[1]
        if k < self.d_env:
            raise ShapeError(f"k = {k} below the state rank {self.d_env}")
        self.k = k
        self.shape = (k, self.d_env)

    def _branches(self, w: np.ndarray) -> np.ndarray:
        return (self.psi_m @ w.T).T.reshape(self.k, self.d_a, self.d_b)

    def value(self, w: np.ndarray) -> float:
        f = self._branches(w)
        s = np.linalg.svd(f, compute_uv=False)
        lam = s * s  # (k, min(dA,dB)) unnormalized branch spectra
        p = lam.sum(axis=1)
        total = _shannon_clipped(lam.reshape(-1)) - _shannon_clipped(p)
        return float(total)

    def grad(self, w: np.ndarray) -> np.ndarray:
        f = self._branches(w)
        u, s, vh = np.linalg.svd(f, full_matrices=False)
        lam = s * s
        p = lam.sum(axis=1)
        logs = np.log2(np.maximum(lam, LOG_FLOOR))
        logp = np.log2(np.maximum(p, LOG_FLOOR))
        # -(log tau_i) phi_i + log(p_i) phi_i, assembled from the SVD of each branch
        core = (logs - logp[:, None]) * s
        g = -np.einsum("kij,kj,kjl->kil", u, core, vh)
        g_mat = g.reshape(self.k, self.d_a * self.d_b)
        return g_mat @ self.psi_m.conj()


def _identity_pointer(k: int, d_env: int) -> np.ndarray:
    w = np.zeros((k, d_env), dtype=complex)
    w[:d_env, :] = np.eye(d_env)
    return w


def decomposition_from_pointer(rho: DensityOperator, w: np.ndarray) -> Decomposition:
    """Ensemble induced by a pointer isometry on the purifying system.

    Entries with weight below 1e-12 are dropped and the rest renormalized.
    """
    psi_m = _purification_matrix(rho)
    branches = psi_m @ np.asarray(w, dtype=complex).T  # (dAB, k)
    weights = (np.abs(branches) ** 2).sum(axis=0)
    keep = np.flatnonzero(weights > WEIGHT_CUTOFF)
    total = weights[keep].sum()
    entries = []
    for i in keep:
        vec = branches[:, i] / np.sqrt(weights[i])
        entries.append((weights[i] / total, PureState(vec, rho.layout)))
    return Decomposition(entries)


# ---------------------------------------------------------------------------
# splitting-search measures
# ---------------------------------------------------------------------------


def _definitional_q(rho: DensityOperator, splitting: SplittingIsometry) -> float:
    return cost_pair(split_purification(rho, splitting)).q


def _place_seed(splitting, d_ap, d_c, seeds, external):
    """Embed a candidate splitting into the search manifold if it fits."""
    if splitting.dims[0] <= d_ap and splitting.dims[1] <= d_c:
        seeds.append(embed_splitting(splitting, d_ap, d_c))
    else:
        external.append(splitting)


def _splitting_search(rho, d_ap, d_c, cfg, mode, extra_seeds, measure, bound):
    obj = _SplittingObjective(rho, d_ap, d_c)
    seeds: list[SplittingIsometry] = []
    external: list[SplittingIsometry] = []
    _place_seed(trivial_splitting(obj.d_env, "C"), d_ap, d_c, seeds, external)
    for s in extra_seeds:
        _place_seed(s, d_ap, d_c, seeds, external)

    outcomes = optimize_isometry(
        obj.value, obj.grad, obj.shape, cfg, mode, seed_points=[s.matrix for s in seeds]
    )
    pool: list[tuple[float, SplittingIsometry, bool]] = [
        (o.value, SplittingIsometry(o.point, (d_ap, d_c)), o.converged) for o in outcomes
    ]
    for s in external:
        pool.append((_definitional_q(rho, s), s, True))

    better = (lambda a, b: a < b) if mode == "minimize" else (lambda a, b: a > b)
    best = 0
    for i in range(1, len(pool)):
        if better(pool[i][0], pool[best][0]):
            best = i
    _, best_split, best_conv = pool[best]

    state = split_purification(rho, best_split)
    value = cost_pair(state).q
    e_at = entanglement_balance(state)
    window = 10.0 * cfg.tolerance
    if mode == "minimize":
        n_within = sum(1 for v, _, _ in pool if v <= pool[best][0] + window)
    else:
        n_within = sum(1 for v, _, _ in pool if v >= pool[best][0] - window)
    return MeasureReport(
        measure=measure,
        value=float(value),
        bound=bound,
        certificate=best_split,
        entanglement_at_optimum=float(e_at),
        converged=best_conv,
        restarts_within_tolerance=n_within,
        tolerance=cfg.tolerance,
        seed=cfg.seed,
        candidate_values=[v for v, _, _ in pool],
    )


def _resolve_split_dims(rho, d_a_prime, d_c):
    rank = rho.rank()
    d_ap = rank if d_a_prime is None else int(d_a_prime)
    d_c = rank if d_c is None else int(d_c)
    if d_ap < 1 or d_c < 1:
        raise ShapeError(f"splitting dims must be >= 1, got ({d_ap}, {d_c})")
    if d_ap * d_c < rank:
        raise ShapeError(f"dA'*dC = {d_ap * d_c} cannot carry an environment of rank {rank}")
    return d_ap, d_c


def squashed_upper(
    rho_ab: DensityOperator,
    d_a_prime: int | None = None,
    d_c: int | None = None,
    cfg: OptimizerConfig | None = None,
    extra_seeds=(),
) -> MeasureReport:
    """Upper bound on the squashed entanglement by minimizing Q over splittings.

    Searches isometries E -> A' x C at the given side-information
    dimensions (default: both equal to rank(rho)).  The candidate pool
    always contains the all-at-C splitting and the side-information
    splitting of the best formation ensemble, so the result never exceeds
    the entanglement of formation; `extra_seeds` admits caller-provided
    splittings (e.g. from a separable flag extension).  The infimum runs
    over unbounded extensions, so any finite search only certifies an
    upper bound.

    Parameters
    ----------
    rho_ab : DensityOperator on two subsystems
    d_a_prime, d_c : int, optional
        Side-information dimensions; dA'*dC must cover rank(rho_ab).
    cfg : OptimizerConfig
    extra_seeds : iterable of SplittingIsometry
    """
    cfg = cfg or OptimizerConfig()
    mode = cfg.resolved_mode("minimize")
    d_ap, d_c = _resolve_split_dims(rho_ab, d_a_prime, d_c)

    from . import mcs as _mcs

    sub = replace(cfg, seed=child_seed(cfg.seed, 9001), mode=None)
    mcs_report = _mcs.eof_via_mcs(rho_ab, cfg=sub)
    seeds = list(extra_seeds) + [mcs_report.certificate]
    report = _splitting_search(rho_ab, d_ap, d_c, cfg, mode, seeds, "squashed_upper", "upper")
    report.details["formation_seed_value"] = mcs_report.value
    return report


def puffed_lower(
    rho_ab: DensityOperator,
    d_a_prime: int | None = None,
    d_c: int | None = None,
    cfg: OptimizerConfig | None = None,
    extra_seeds=(),
) -> MeasureReport:
    """Lower bound on the puffed entanglement by maximizing Q over splittings.

    The supremum over all extensions equals min{S(A), S(B)} (with free
    entanglement); a single-copy splitting search only certifies a lower
    bound, and every candidate obeys Q <= min{S(A), S(B)}.  The pool is
    seeded with the all-at-C splitting and the side-information splitting
    of the best assistance ensemble.
    """
    cfg = cfg or OptimizerConfig()
    mode = cfg.resolved_mode("maximize")
    d_ap, d_c = _resolve_split_dims(rho_ab, d_a_prime, d_c)

    sub = replace(cfg, seed=child_seed(cfg.seed, 9002), mode=None)
    assist = eoa_single(rho_ab, cfg=sub)
    seeds = list(extra_seeds) + [assist.details["splitting"]]
    report = _splitting_search(rho_ab, d_ap, d_c, cfg, mode, seeds, "puffed_lower", "lower")
    report.details["closed_form"] = eoa_asymptotic(rho_ab)
    return report


# ---------------------------------------------------------------------------
# decomposition-search measures
# ---------------------------------------------------------------------------


def _decomposition_search(rho, k, cfg, mode, measure, bound):
    rank = rho.rank()
    k = rank * rank if k is None else int(k)
    if k < rank:
        raise ShapeError(f"ensemble size k = {k} below rank {rank}")
    obj = _DecompositionObjective(rho, k)
    seeds = [_identity_pointer(k, obj.d_env)]
    outcomes = optimize_isometry(obj.value, obj.grad, obj.shape, cfg, mode, seed_points=seeds)

    better = (lambda a, b: a < b) if mode == "minimize" else (lambda a, b: a > b)
    best = 0
    for i in range(1, len(outcomes)):
        if better(outcomes[i].value, outcomes[best].value):
            best = i
    w = outcomes[best].point
    dec = decomposition_from_pointer(rho, w)
    value = dec.average_marginal_entropy()

    from . import mcs as _mcs

    window = 10.0 * cfg.tolerance
    if mode == "minimize":
        n_within = sum(1 for o in outcomes if o.value <= outcomes[best].value + window)
    else:
        n_within = sum(1 for o in outcomes if o.value >= outcomes[best].value - window)
    return MeasureReport(
        measure=measure,
        value=float(value),
        bound=bound,
        certificate=dec,
        entanglement_at_optimum=float(_mcs.mcs_cost_pair(dec).e),
        converged=outcomes[best].converged,
        restarts_within_tolerance=n_within,
        tolerance=cfg.tolerance,
        seed=cfg.seed,
        candidate_values=[o.value for o in outcomes],
        details={"splitting": _mcs.pointer_splitting(w), "pointer": w},
    )


def eof(rho_ab: DensityOperator, k: int | None = None, cfg: OptimizerConfig | None = None) -> MeasureReport:
    """Entanglement of formation: min average marginal entropy over ensembles.

    Decompositions are parametrized by isometries from the purifying
    system into a k-dimensional pointer (default k = rank^2, sufficient
    for the optimum); the reported value upper-bounds the true infimum.
    """
    cfg = cfg or OptimizerConfig()
    mode = cfg.resolved_mode("minimize")
    return _decomposition_search(rho_ab, k, cfg, mode, "eof", "upper")


def eoa_single(rho_ab: DensityOperator, k: int | None = None, cfg: OptimizerConfig | None = None) -> MeasureReport:
    """Single-copy entanglement of assistance: max of the same objective.

    The asymptotic quantity is a supremum the single copy need not
    attain, so the result is reported as a lower bound.
    """
    cfg = cfg or OptimizerConfig()
    mode = cfg.resolved_mode("maximize")
    return _decomposition_search(rho_ab, k, cfg, mode, "eoa_single", "lower")


def eoa_asymptotic(rho_ab: DensityOperator) -> float:
    """Asymptotic entanglement of assistance, min{S(A), S(B)}."""
    _bipartite(rho_ab)
    la, lb = rho_ab.layout.labels[0], rho_ab.layout.labels[1]
    return float(
        min(
            von_neumann_entropy(partial_trace(rho_ab, [la])),
            von_neumann_entropy(partial_trace(rho_ab, [lb])),
        )
    )


# ---------------------------------------------------------------------------
# closed-form two-qubit oracle
# ---------------------------------------------------------------------------

_SY_SY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho_ab: DensityOperator) -> float:
    """Two-qubit concurrence max{0, l1 - l2 - l3 - l4}."""
    if rho_ab.layout.dims != (2, 2):
        raise ShapeError(f"concurrence needs a two-qubit state, got dims {rho_ab.layout.dims}")
    m = rho_ab.matrix
    tilde = _SY_SY @ m.conj() @ _SY_SY
    evals = np.linalg.eigvals(m @ tilde)
    lams = np.sqrt(np.clip(evals.real, 0.0, None))
    lams = np.sort(lams)[::-1]
    return float(max(0.0, lams[0] - lams[1] - lams[2] - lams[3]))


def wootters_eof(rho_ab: DensityOperator) -> float:
    """Closed-form two-qubit entanglement of formation via the concurrence."""
    c = concurrence(rho_ab)
    x = 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c)))
    return _shannon_clipped(np.array([x, 1.0 - x]))


# ---------------------------------------------------------------------------
# separable flag extensions and superadditivity arithmetic
# ---------------------------------------------------------------------------


def flag_extension(rho_ab: DensityOperator, separable_parts, flag_label: str = "F") -> DensityOperator:
    """Extension sum_i p_i rho_A^i x rho_B^i x |i><i| of a separable state.

    `separable_parts` is a list of (p_i, rho_A_i, rho_B_i); the mixture
    must reconstruct rho_ab within 1e-9.  Conditioned on the flag the
    state is product, so I(A:B|flag) vanishes.
    """
    d_a, d_b = _bipartite(rho_ab)
    parts = []
    for p, ra, rb in separable_parts:
        ma = ra.matrix if isinstance(ra, DensityOperator) else np.asarray(ra, dtype=complex)
        mb = rb.matrix if isinstance(rb, DensityOperator) else np.asarray(rb, dtype=complex)
        if ma.shape != (d_a, d_a) or mb.shape != (d_b, d_b):
            raise ShapeError("part dimensions do not match the state")
        parts.append((float(p), ma, mb))
    recon = sum(p * np.kron(ma, mb) for p, ma, mb in parts)
    if np.abs(recon - rho_ab.matrix).max() > 1e-9:
        raise DecompositionError("parts do not reconstruct the state within 1e-9")
    n = len(parts)
    dim = d_a * d_b * n
    out = np.zeros((dim, dim), dtype=complex)
    for i, (p, ma, mb) in enumerate(parts):
        flag = np.zeros((n, n))
        flag[i, i] = 1.0
        out += p * np.kron(np.kron(ma, mb), flag)
    return DensityOperator(out, rho_ab.layout.extend(flag_label, n))


def puffed_superadditivity_gap(rho1: DensityOperator, rho2: DensityOperator) -> float:
    """Closed-form excess of the joint puffed entanglement over the sum.

    min{S(A1)+S(A2), S(B1)+S(B2)} - min{S(A1),S(B1)} - min{S(A2),S(B2)};
    positive exactly when the marginal-entropy minima sit on opposite
    sides.
    """
    s = []
    for rho in (rho1, rho2):
        _bipartite(rho)
        la, lb = rho.layout.labels
        s.append(
            (
                von_neumann_entropy(partial_trace(rho, [la])),
                von_neumann_entropy(partial_trace(rho, [lb])),
            )
        )
    (sa1, sb1), (sa2, sb2) = s
    return float(min(sa1 + sa2, sb1 + sb2) - min(sa1, sb1) - min(sa2, sb2))


def puffed_superadditivity_witness(rho1: DensityOperator, rho2: DensityOperator) -> bool:
    """True when the closed form is strictly superadditive for this pair."""
    return puffed_superadditivity_gap(rho1, rho2) > 1e-9
