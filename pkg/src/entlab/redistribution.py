"""Splittings of the purifying system and redistribution cost pairs.

A bipartite source rho_AB is purified into |psi>_ABE; an isometry
V : E -> A' x C distributes the purifying system between sender
side-information A' and receiver side-information C.  The qubit rate and
ebit balance of redistributing A to the receiver at that splitting are

    Q = I(A:B|C) / 2
    E = I(A:A') / 2 - I(A:C) / 2

with negative E meaning entanglement is gained.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, LayoutError, ShapeError, ValidationError
from .states import (
    DensityOperator,
    PureState,
    SystemLayout,
    conditional_mutual_information,
    mutual_information,
    partial_trace,
    purify,
    subsystem_entropy,
    von_neumann_entropy,
)

ISOMETRY_TOL = 1e-10


class SplittingIsometry:
    """Inner-product-preserving map from the purifying system E into A' x C.

    The matrix has shape (dA' * dC, dE) with the A' index major, and
    satisfies V^dag V = I within 1e-10.
    """

    __slots__ = ("matrix", "dims")

    def __init__(self, matrix, dims: tuple[int, int]):
        d_ap, d_c = int(dims[0]), int(dims[1])
        if d_ap < 1 or d_c < 1:
            raise ShapeError(f"splitting dims must be >= 1, got {dims}")
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != d_ap * d_c:
            raise ShapeError(f"matrix shape {m.shape} incompatible with dims {dims}")
        if m.shape[0] < m.shape[1]:
            raise ShapeError(f"dA'*dC = {m.shape[0]} < dE = {m.shape[1]}")
        gram = m.conj().T @ m
        if np.abs(gram - np.eye(m.shape[1])).max() > ISOMETRY_TOL:
            raise ValidationError("isometry", "V^dag V deviates from identity beyond 1e-10")
        m = m.copy()
        m.flags.writeable = False
        self.matrix = m
        self.dims = (d_ap, d_c)

    @property
    def d_env(self) -> int:
        return self.matrix.shape[1]

    def compose_local(self, u_ap=None, u_c=None) -> "SplittingIsometry":
        """(U_A' x U_C) V — local unitary rotation of the side-information."""
        d_ap, d_c = self.dims
        u_ap = np.eye(d_ap) if u_ap is None else np.asarray(u_ap, dtype=complex)
        u_c = np.eye(d_c) if u_c is None else np.asarray(u_c, dtype=complex)
        if u_ap.shape != (d_ap, d_ap) or u_c.shape != (d_c, d_c):
            raise ShapeError("local unitary dimensions do not match the splitting")
        return SplittingIsometry(np.kron(u_ap, u_c) @ self.matrix, self.dims)

    def __repr__(self):
        return f"SplittingIsometry(dA'={self.dims[0]}, dC={self.dims[1]}, dE={self.d_env})"


def trivial_splitting(d_env: int, side: str = "C") -> SplittingIsometry:
    """Route all of E to one side; the other side is a trivial dim-1 system."""
    v = np.eye(d_env, dtype=complex)
    if side == "C":
        return SplittingIsometry(v, (1, d_env))
    if side == "A'":
        return SplittingIsometry(v, (d_env, 1))
    raise ShapeError(f"side must be \"C\" or \"A'\", got {side!r}")


@dataclass(frozen=True)
class CostPair:
    """Redistribution rates: qubits sent per copy and ebits consumed per copy."""

    q: float
    e: float


class FourPartyState:
    """Pure state on the canonical layout A, B, A', C."""

    __slots__ = ("pure",)

    def __init__(self, pure: PureState):
        if pure.layout.labels != ("A", "B", "A'", "C"):
            raise LayoutError(f"expected labels (A, B, A', C), got {pure.layout.labels}")
        self.pure = pure

    @property
    def dims(self) -> tuple[int, ...]:
        return self.pure.layout.dims

    def marginal(self, labels) -> DensityOperator:
        return self.pure.marginal(labels)

    def source(self) -> DensityOperator:
        return self.pure.marginal(["A", "B"])

    def __repr__(self):
        d = self.dims
        return f"FourPartyState(dA={d[0]}, dB={d[1]}, dA'={d[2]}, dC={d[3]})"


def split_purification(rho_ab: DensityOperator, splitting: SplittingIsometry) -> FourPartyState:
    """Apply (1_AB x V) to the eigendecomposition purification of rho_AB.

    Requires rho_AB on exactly two subsystems and V acting on an
    environment of dimension rank(rho_AB); subsystem labels of the result
    are canonicalized to A, B, A', C.
    """
    if len(rho_ab.layout.dims) != 2:
        raise LayoutError("split_purification expects a bipartite source state")
    psi = purify(rho_ab, env_label="@env")
    d_e = psi.layout.dims[-1]
    if splitting.d_env != d_e:
        raise ShapeError(f"splitting acts on dE={splitting.d_env}, purification has rank {d_e}")
    d_a, d_b = rho_ab.layout.dims
    d_ap, d_c = splitting.dims
    mat = psi.vector.reshape(d_a * d_b, d_e) @ splitting.matrix.T
    layout = SystemLayout([("A", d_a), ("B", d_b), ("A'", d_ap), ("C", d_c)])
    return FourPartyState(PureState(mat.reshape(-1), layout))


def cost_pair(state: FourPartyState) -> CostPair:
    """Optimal cost pair (Q, E) at the given splitting.

    Q = I(A:B|C)/2 and E = I(A:A')/2 - I(A:C)/2, both evaluated from
    marginals of the four-party pure state.
    """
    rho_abc = state.marginal(["A", "B", "C"])
    q = 0.5 * conditional_mutual_information(rho_abc, ["A"], ["B"], ["C"])
    rho_aap = state.marginal(["A", "A'"])
    rho_ac = state.marginal(["A", "C"])
    e = 0.5 * mutual_information(rho_aap, ["A"], ["A'"]) - 0.5 * mutual_information(
        rho_ac, ["A"], ["C"]
    )
    src = state.source()
    q_cap = min(
        von_neumann_entropy(partial_trace(src, ["A"])),
        von_neumann_entropy(partial_trace(src, ["B"])),
    )
    if q < -1e-9 or q > q_cap + 1e-9:
        raise ValidationError("cost", f"Q = {q:.12g} outside [0, min(S(A), S(B))]")
    return CostPair(q=float(q), e=float(e))


def entanglement_balance(state: FourPartyState) -> float:
    """S(A|C) - Q; equals the cost pair's E by purity of the global state."""
    rho_ac = state.marginal(["A", "C"])
    s_ac = von_neumann_entropy(rho_ac)
    s_c = subsystem_entropy(state.pure, ["C"])
    q = cost_pair(state).q
    return float(s_ac - s_c - q)


def swap_sides(state: FourPartyState) -> FourPartyState:
    """Exchange the roles of A' and C (relabeling, canonical order kept)."""
    d_a, d_b, d_ap, d_c = state.dims
    tensor = state.pure.vector.reshape(d_a, d_b, d_ap, d_c)
    swapped = np.transpose(tensor, (0, 1, 3, 2)).reshape(-1)
    layout = SystemLayout([("A", d_a), ("B", d_b), ("A'", d_c), ("C", d_ap)])
    return FourPartyState(PureState(swapped, layout))


def embed_splitting(splitting: SplittingIsometry, d_ap: int, d_c: int) -> SplittingIsometry:
    """Embed a splitting into larger side-information spaces by zero padding."""
    s_ap, s_c = splitting.dims
    if d_ap < s_ap or d_c < s_c:
        raise ShapeError(f"cannot embed dims {splitting.dims} into ({d_ap}, {d_c})")
    old = splitting.matrix.reshape(s_ap, s_c, splitting.d_env)
    new = np.zeros((d_ap, d_c, splitting.d_env), dtype=complex)
    new[:s_ap, :s_c, :] = old
    return SplittingIsometry(new.reshape(d_ap * d_c, splitting.d_env), (d_ap, d_c))


def splitting_from_extension(
    rho_ab: DensityOperator, extension: DensityOperator
) -> SplittingIsometry:
    """Splitting isometry realizing a given extension of rho_AB.

    `extension` lives on rho_AB's subsystems followed by extra ones; the
    extras become the receiver side C (flattened, layout order) and the
    extension's purifying system becomes A'.  The returned V satisfies
    (1_AB x V)|psi>_ABE = |chi>_AB,A'C with Tr_A' chi = extension.
    """
    ab_labels = rho_ab.layout.labels
    ext_labels = extension.layout.labels
    if ext_labels[: len(ab_labels)] != ab_labels:
        raise LayoutError("extension must start with the source subsystems")
    extra = [lab for lab in ext_labels[len(ab_labels):]]
    if not extra:
        raise LayoutError("extension has no side-information subsystems")
    if not partial_trace(extension, ab_labels).allclose(rho_ab, atol=1e-9):
        raise DecompositionError("extension does not reduce to the source state within 1e-9")

    env = next(lab for lab in "DEFGHKLMN" if lab not in ext_labels)
    chi = purify(extension, env_label=env)
    dims = chi.layout.dims
    d_ab = rho_ab.dim
    d_c = int(np.prod([dims[i] for i in chi.layout.positions(extra)], dtype=np.int64))
    d_ap = dims[-1]

    # unfold |chi> as (AB) x (A'=env, C=extras)
    n = len(dims)
    ab_pos = chi.layout.positions(ab_labels)
    extra_pos = chi.layout.positions(extra)
    order = ab_pos + [n - 1] + extra_pos
    mat = np.transpose(chi.vector.reshape(dims), order).reshape(d_ab, d_ap * d_c)

    evals, evecs = np.linalg.eigh(rho_ab.matrix)
    mask = evals > 1e-12
    lams, vecs = evals[mask], evecs[:, mask]
    v = (mat.T @ vecs.conj()) / np.sqrt(lams)[None, :]
    return SplittingIsometry(v, (d_ap, d_c))
