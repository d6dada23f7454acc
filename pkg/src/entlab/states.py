"""Dense complex linear algebra over labeled multipartite systems.

States live on a :class:`SystemLayout`, an ordered list of labeled
subsystems.  All entropies and information quantities are in bits
(log base 2); redistribution rates elsewhere in the package are qubits
and ebits per source copy.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import LayoutError, PositivityError, ValidationError

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-10
RANK_CUTOFF = 1e-12


class SystemLayout:
    """Ordered collection of (label, dimension) subsystems."""

    __slots__ = ("subsystems",)

    def __init__(self, subsystems: Iterable[tuple[str, int]]):
        subs = tuple((str(lab), int(dim)) for lab, dim in subsystems)
        labels = [lab for lab, _ in subs]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate subsystem labels in {labels}")
        for lab, dim in subs:
            if dim < 1:
                raise LayoutError(f"subsystem {lab!r} has dimension {dim} < 1")
        self.subsystems = subs

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def dim(self) -> int:
        out = 1
        for _, d in self.subsystems:
            out *= d
        return out

    def positions(self, labels: Iterable[str]) -> list[int]:
        """Axis positions of `labels`, in layout order."""
        wanted = set(labels)
        unknown = wanted - set(self.labels)
        if unknown:
            raise LayoutError(f"unknown labels {sorted(unknown)}; layout has {self.labels}")
        return [i for i, lab in enumerate(self.labels) if lab in wanted]

    def restrict(self, labels: Iterable[str]) -> "SystemLayout":
        keep = set(labels)
        return SystemLayout([s for s in self.subsystems if s[0] in keep])

    def extend(self, label: str, dim: int) -> "SystemLayout":
        return SystemLayout(self.subsystems + ((label, dim),))

    def concat(self, other: "SystemLayout") -> "SystemLayout":
        overlap = set(self.labels) & set(other.labels)
        if overlap:
            raise LayoutError(f"label collision on {sorted(overlap)}")
        return SystemLayout(self.subsystems + other.subsystems)

    def __eq__(self, other):
        return isinstance(other, SystemLayout) and self.subsystems == other.subsystems

    def __hash__(self):
        return hash(self.subsystems)

    def __repr__(self):
        inner = ", ".join(f"{lab}:{dim}" for lab, dim in self.subsystems)
        return f"SystemLayout({inner})"


def _check_density_matrix(matrix: np.ndarray, dim: int) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("shape", f"density matrix must be square, got {m.shape}")
    if m.shape[0] != dim:
        raise ValidationError("shape", f"matrix dimension {m.shape[0]} != layout dimension {dim}")
    if np.abs(m - m.conj().T).max() > HERMITICITY_TOL:
        raise ValidationError("hermiticity", "matrix is not Hermitian within 1e-10")
    if abs(m.trace() - 1.0) > TRACE_TOL:
        raise ValidationError("trace", f"trace is {m.trace().real:.12g}, not 1 within 1e-10")
    smallest = np.linalg.eigvalsh(m)[0]
    if smallest < -PSD_TOL:
        raise ValidationError("positivity", f"smallest eigenvalue {smallest:.3e} < -1e-10")
    return m


class DensityOperator:
    """Positive unit-trace operator on a labeled tensor product.

    Construction validates Hermiticity, unit trace and positivity to 1e-10;
    the stored matrix is immutable.
    """

    __slots__ = ("matrix", "layout")

    def __init__(self, matrix, layout: SystemLayout):
        m = _check_density_matrix(matrix, layout.dim)
        m = m.copy()
        m.flags.writeable = False
        self.matrix = m
        self.layout = layout

    @property
    def dim(self) -> int:
        return self.layout.dim

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def rank(self, cutoff: float = RANK_CUTOFF) -> int:
        """Numerical rank (eigenvalues above `cutoff`)."""
        return int((self.eigenvalues() > cutoff).sum())

    def allclose(self, other: "DensityOperator", atol: float = 1e-10) -> bool:
        return self.layout.dims == other.layout.dims and bool(
            np.abs(self.matrix - other.matrix).max() <= atol
        )

    def __repr__(self):
        return f"DensityOperator({self.layout!r})"


class PureState:
    """Unit vector on a labeled tensor product; carrier of purifications."""

    __slots__ = ("vector", "layout")

    def __init__(self, vector, layout: SystemLayout):
        v = np.asarray(vector, dtype=complex).reshape(-1)
        if v.size != layout.dim:
            raise ValidationError("shape", f"vector length {v.size} != layout dimension {layout.dim}")
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise ValidationError("norm", "state vector is not normalized within 1e-10")
        v = v.copy()
        v.flags.writeable = False
        self.vector = v
        self.layout = layout

    def density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.vector, self.vector.conj()), self.layout)

    def _unfold(self, labels: Iterable[str]) -> np.ndarray:
        """Matrix unfolding with `labels` (layout order) as rows, the rest as columns."""
        keep = self.layout.positions(labels)
        n = len(self.layout.dims)
        rest = [i for i in range(n) if i not in keep]
        tensor = self.vector.reshape(self.layout.dims)
        tensor = np.transpose(tensor, keep + rest)
        d_keep = int(np.prod([self.layout.dims[i] for i in keep], dtype=np.int64))
        return tensor.reshape(d_keep, -1)

    def marginal(self, labels: Iterable[str]) -> DensityOperator:
        """Reduced density operator on `labels` (order as in the layout)."""
        mat = self._unfold(labels)
        return DensityOperator(mat @ mat.conj().T, self.layout.restrict(labels))

    def subsystem_entropy(self, labels: Iterable[str]) -> float:
        """Entropy of the marginal on `labels`, via singular values of the unfolding."""
        s = np.linalg.svd(self._unfold(labels), compute_uv=False)
        return _shannon(s * s)

    def __repr__(self):
        return f"PureState({self.layout!r})"


def _shannon(p: np.ndarray) -> float:
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    nz = p[p > 0]
    if nz.size == 0:
        return 0.0
    return float(-(nz * np.log2(nz)).sum())


def tensor_product(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Kronecker composite of two states; a's subsystems precede b's."""
    layout = a.layout.concat(b.layout)
    return DensityOperator(np.kron(a.matrix, b.matrix), layout)


def partial_trace(rho: DensityOperator, keep: Iterable[str]) -> DensityOperator:
    """Trace out everything except `keep`, preserving subsystem order.

    Parameters
    ----------
    rho : DensityOperator
    keep : iterable of str
        Nonempty subset of the layout's labels.

    Returns
    -------
    DensityOperator on the kept subsystems, in their original order.
    """
    keep = list(keep)
    if not keep:
        raise LayoutError("must keep at least one subsystem")
    keep_pos = rho.layout.positions(keep)
    dims = list(rho.layout.dims)
    n = len(dims)
    drop = [i for i in range(n) if i not in keep_pos]
    tensor = rho.matrix.reshape(dims + dims)
    for pos in sorted(drop, reverse=True):
        tensor = np.trace(tensor, axis1=pos, axis2=pos + len(dims))
        dims.pop(pos)
    d = int(np.prod(dims, dtype=np.int64))
    return DensityOperator(tensor.reshape(d, d), rho.layout.restrict(keep))


def purify(rho: DensityOperator, env_label: str = "E") -> PureState:
    """Eigendecomposition purification sum_k sqrt(lambda_k) |k><k|_E.

    The purifying subsystem `env_label` is appended to the layout with
    dimension equal to the numerical rank of `rho` (eigenvalues above
    1e-12), so tracing it out recovers `rho`.
    """
    if env_label in rho.layout.labels:
        raise LayoutError(f"environment label {env_label!r} already in layout")
    evals, evecs = np.linalg.eigh(rho.matrix)
    mask = evals > RANK_CUTOFF
    lams = evals[mask]
    vecs = evecs[:, mask]
    vec = (vecs * np.sqrt(lams)[None, :]).reshape(-1)
    return PureState(vec, rho.layout.extend(env_label, int(lams.size)))


def von_neumann_entropy(rho) -> float:
    """-sum lambda log2 lambda over the spectrum, in bits.

    Eigenvalues in [-1e-10, 0) are clipped to zero (roundoff); anything
    below -1e-10 raises PositivityError.  Accepts a DensityOperator or a
    raw Hermitian matrix.
    """
    matrix = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    evals = np.linalg.eigvalsh(matrix)
    if evals[0] < -PSD_TOL:
        raise PositivityError(f"eigenvalue {evals[0]:.3e} below -1e-10")
    return _shannon(evals)


def subsystem_entropy(state, labels: Iterable[str]) -> float:
    """Entropy in bits of the marginal of `state` on `labels`."""
    if isinstance(state, PureState):
        return state.subsystem_entropy(labels)
    return von_neumann_entropy(partial_trace(state, labels))


def _check_partition(layout: SystemLayout, parts: list[Iterable[str]], allow_empty_last=False):
    sets = [set(p) for p in parts]
    for i, s in enumerate(sets):
        if not s and not (allow_empty_last and i == len(sets) - 1):
            raise LayoutError("partition blocks must be nonempty")
    union: set[str] = set()
    total = 0
    for s in sets:
        union |= s
        total += len(s)
    if total != len(union):
        raise LayoutError("partition blocks overlap")
    if union != set(layout.labels):
        raise LayoutError(f"partition {sets} does not cover layout {layout.labels}")


def mutual_information(rho: DensityOperator, part_a: Iterable[str], part_b: Iterable[str]) -> float:
    """I(A:B) = S(A) + S(B) - S(AB) in bits; the two parts must cover the layout."""
    part_a, part_b = list(part_a), list(part_b)
    _check_partition(rho.layout, [part_a, part_b])
    return (
        subsystem_entropy(rho, part_a)
        + subsystem_entropy(rho, part_b)
        - von_neumann_entropy(rho)
    )


def conditional_mutual_information(
    rho: DensityOperator,
    part_a: Iterable[str],
    part_b: Iterable[str],
    part_c: Iterable[str],
) -> float:
    """I(A:B|C) = S(AC) + S(BC) - S(ABC) - S(C) in bits.

    The three disjoint label sets must cover the layout; an empty
    conditioning set degrades gracefully to I(A:B).
    """
    part_a, part_b, part_c = list(part_a), list(part_b), list(part_c)
    _check_partition(rho.layout, [part_a, part_b, part_c], allow_empty_last=True)
    s_abc = von_neumann_entropy(rho)
    if not part_c:
        return (
            subsystem_entropy(rho, part_a) + subsystem_entropy(rho, part_b) - s_abc
        )
    return (
        subsystem_entropy(rho, part_a + part_c)
        + subsystem_entropy(rho, part_b + part_c)
        - s_abc
        - subsystem_entropy(rho, part_c)
    )
