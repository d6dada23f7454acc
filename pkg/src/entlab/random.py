"""Seeded sampling of isometries and states.

Every sampler takes an explicit seed (an int, or a sequence of ints for
derived streams) and is deterministic given that seed.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .states import DensityOperator, PureState, SystemLayout


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def child_seed(seed: int, tag: int) -> int:
    """Deterministic derived seed for independent substreams."""
    return int(np.random.SeedSequence([int(seed), int(tag)]).generate_state(1)[0])


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_isometry(rows: int, cols: int, seed) -> np.ndarray:
    """Haar-distributed isometry V (rows x cols), V^dag V = I.

    Obtained by QR-orthonormalizing a seeded complex Gaussian matrix with
    the R-diagonal phase fix, which makes the distribution properly
    Haar-uniform and the output deterministic in the seed.
    """
    if rows < cols or cols < 1:
        raise ShapeError(f"need rows >= cols >= 1, got ({rows}, {cols})")
    z = _complex_gaussian(_rng(seed), (rows, cols))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * phase.conj()[None, :]


def _layout_for(dims, labels=None) -> SystemLayout:
    if isinstance(dims, int):
        dims = (dims,)
    dims = tuple(int(d) for d in dims)
    if labels is None:
        labels = ("A", "B", "C", "D", "F", "G")[: len(dims)]
        if len(labels) < len(dims):
            raise ShapeError("provide explicit labels for layouts with more than 6 subsystems")
    return SystemLayout(zip(labels, dims))


def random_pure_state(dims, seed, labels=None) -> PureState:
    """Haar-random pure state on the given subsystem dimensions."""
    layout = _layout_for(dims, labels)
    v = haar_isometry(layout.dim, 1, seed)[:, 0]
    return PureState(v, layout)


def random_density(dims, rank: int, seed, labels=None) -> DensityOperator:
    """Random rank-`rank` density operator, deterministic in `seed`.

    Built as G G^dag / tr for a seeded complex Gaussian G with `rank`
    columns; `dims` is an int (single subsystem) or a tuple of subsystem
    dimensions.
    """
    layout = _layout_for(dims, labels)
    if not 1 <= rank <= layout.dim:
        raise ShapeError(f"rank must be in [1, {layout.dim}], got {rank}")
    g = _complex_gaussian(_rng(seed), (layout.dim, rank))
    m = g @ g.conj().T
    return DensityOperator(m / m.trace().real, layout)


def random_separable(d_a: int, d_b: int, n_parts: int, seed):
    """Random separable mixture with a known product decomposition.

    Returns (rho, parts) where parts is a list of (p_i, rho_A_i, rho_B_i)
    with pure product factors and rho = sum_i p_i rho_A_i x rho_B_i.
    """
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(n_parts))
    parts = []
    mat = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    for i, p in enumerate(weights):
        va = haar_isometry(d_a, 1, [*_as_list(seed), 2 * i])[:, 0]
        vb = haar_isometry(d_b, 1, [*_as_list(seed), 2 * i + 1])[:, 0]
        rho_a = DensityOperator(np.outer(va, va.conj()), SystemLayout([("A", d_a)]))
        rho_b = DensityOperator(np.outer(vb, vb.conj()), SystemLayout([("B", d_b)]))
        parts.append((float(p), rho_a, rho_b))
        mat += p * np.kron(rho_a.matrix, rho_b.matrix)
    layout = SystemLayout([("A", d_a), ("B", d_b)])
    return DensityOperator(mat, layout), parts


def _as_list(seed):
    if isinstance(seed, (list, tuple)):
        return list(seed)
    return [int(seed)]
