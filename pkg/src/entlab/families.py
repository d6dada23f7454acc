"""Named two-party state families used as the test corpus."""

from __future__ import annotations

import numpy as np

from .errors import ParamError
from .random import random_density
from .states import DensityOperator, SystemLayout


def _two_qubit_layout() -> SystemLayout:
    return SystemLayout([("A", 2), ("B", 2)])


def bell_state() -> DensityOperator:
    """|Phi+><Phi+| with |Phi+> = (|00> + |11>)/sqrt(2)."""
    v = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return DensityOperator(np.outer(v, v.conj()), _two_qubit_layout())


def classically_correlated(d: int = 2) -> DensityOperator:
    """sum_i |ii><ii| / d on two d-level systems."""
    if d < 1:
        raise ParamError(f"d must be >= 1, got {d}")
    m = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        m[i * d + i, i * d + i] = 1.0 / d
    return DensityOperator(m, SystemLayout([("A", d), ("B", d)]))


def werner(p: float) -> DensityOperator:
    """p |psi-><psi-| + (1-p) I/4, with |psi-> = (|01> - |10>)/sqrt(2)."""
    if not 0.0 <= p <= 1.0:
        raise ParamError(f"werner parameter p must be in [0, 1], got {p}")
    singlet = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    m = p * np.outer(singlet, singlet.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityOperator(m, _two_qubit_layout())


def isotropic(p: float, d: int = 2) -> DensityOperator:
    """p |Phi_d><Phi_d| + (1-p) I/d^2, with |Phi_d> = sum_i |ii>/sqrt(d)."""
    if not 0.0 <= p <= 1.0:
        raise ParamError(f"isotropic parameter p must be in [0, 1], got {p}")
    if d < 2:
        raise ParamError(f"d must be >= 2, got {d}")
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[i * d + i] = 1.0 / np.sqrt(d)
    m = p * np.outer(v, v.conj()) + (1.0 - p) * np.eye(d * d) / (d * d)
    return DensityOperator(m, SystemLayout([("A", d), ("B", d)]))


FAMILY_NAMES = ("bell", "classically_correlated", "werner", "isotropic", "random")


def state_family(name: str, **params) -> DensityOperator:
    """Construct a named family member.

    Supported names and parameters:
      bell                     (no parameters)
      classically_correlated   d=2
      werner                   p
      isotropic                p, d=2
      random                   dims (int or tuple), rank, seed
    """
    try:
        if name == "bell":
            return bell_state()
        if name == "classically_correlated":
            return classically_correlated(int(params.get("d", 2)))
        if name == "werner":
            return werner(float(params["p"]))
        if name == "isotropic":
            return isotropic(float(params["p"]), int(params.get("d", 2)))
        if name == "random":
            return random_density(params["dims"], int(params["rank"]), params["seed"])
    except KeyError as exc:
        raise ParamError(f"family {name!r} missing parameter {exc}") from exc
    raise ParamError(f"unknown state family {name!r}; known: {FAMILY_NAMES}")
