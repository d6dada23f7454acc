"""Local search over isometry manifolds {V : V^dag V = I}.

Steepest descent in the manifold tangent space with Armijo backtracking;
steps are retracted by QR orthonormalization.  Objectives supply the
Euclidean Wirtinger gradient G = df/dV* (so df = 2 Re <G, dV>), which is
projected onto the tangent space at V.  All randomness flows from the
config seed and candidates are compared in a fixed order, so runs are
deterministic and adding restarts can only improve the best value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParamError
from .random import child_seed, haar_isometry

ARMIJO_C = 1e-4
STEP_MIN = 1e-14
GRAD_TOL = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    """Multi-restart local-search settings; deterministic given `seed`."""

    restarts: int = 4
    max_iterations: int = 1500
    tolerance: float = 1e-7
    seed: int = 0
    mode: str | None = None  # "minimize" | "maximize"; None lets the measure decide
    stagnation_window: int = 30

    def __post_init__(self):
        if self.restarts < 1:
            raise ParamError(f"restarts must be >= 1, got {self.restarts}")
        if self.tolerance <= 0:
            raise ParamError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ParamError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.stagnation_window < 2:
            raise ParamError(f"stagnation_window must be >= 2, got {self.stagnation_window}")
        if self.mode not in (None, "minimize", "maximize"):
            raise ParamError(f"mode must be minimize or maximize, got {self.mode!r}")

    def resolved_mode(self, required: str) -> str:
        if self.mode is not None and self.mode != required:
            raise ParamError(f"this measure optimizes in {required!r} mode, got {self.mode!r}")
        return required


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def retract(x: np.ndarray) -> np.ndarray:
    """Nearest-isometry retraction: QR with the R diagonal made real positive."""
    q, r = np.linalg.qr(x)
    d = np.diagonal(r)
    safe = np.where(np.abs(d) > 1e-300, np.abs(d), 1.0)
    phase = np.where(np.abs(d) > 1e-300, d / safe, 1.0)
    return q * phase.conj()[None, :]


def tangent_project(v: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Project a Euclidean gradient onto the tangent space at isometry `v`."""
    return grad - v @ _herm(v.conj().T @ grad)


@dataclass
class SearchOutcome:
    """One candidate: its (mode-oriented) objective value and end point."""

    value: float
    point: np.ndarray
    converged: bool
    iterations: int = 0


def _descend(value_fn, grad_fn, v0: np.ndarray, cfg: OptimizerConfig) -> SearchOutcome:
    """Armijo-backtracked Riemannian descent from one starting isometry.

    Steps are initialized with the Barzilai-Borwein quotient from the
    previous accepted move, then backtracked until sufficient decrease.
    """
    v = v0
    f = value_fn(v)
    step = 0.5
    prev_v = prev_g = None
    history = [f]
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        g = tangent_project(v, grad_fn(v))
        gnorm2 = float(np.vdot(g, g).real)
        if gnorm2 < GRAD_TOL**2:
            converged = True
            break
        if prev_v is not None:
            s = v - prev_v
            y = g - prev_g
            yy = float(np.vdot(y, y).real)
            step = abs(float(np.vdot(s, y).real)) / yy if yy > 0 else step * 2.0
        else:
            step = step * 2.0
        step = min(max(step, 1e-12), 1e3)
        prev_v, prev_g = v, g
        accepted = False
        while step > STEP_MIN:
            v_try = retract(v - step * g)
            f_try = value_fn(v_try)
            if f_try <= f - ARMIJO_C * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True  # stationary within resolvable step sizes
            break
        v, f = v_try, f_try
        history.append(f)
        if len(history) > cfg.stagnation_window:
            if history[-cfg.stagnation_window - 1] - f < cfg.tolerance:
                converged = True
                break
    return SearchOutcome(value=float(f), point=v, converged=converged, iterations=it)


def optimize_isometry(
    value_fn,
    grad_fn,
    shape: tuple[int, int],
    cfg: OptimizerConfig,
    mode: str,
    seed_points=(),
) -> list[SearchOutcome]:
    """Run local searches from `seed_points` then cfg.restarts Haar starts.

    Returns one outcome per start, in that fixed order, with values
    oriented to the requested mode (raw objective scale).  Restart i uses
    the derived seed (cfg.seed, i), so the candidate list only grows with
    `restarts` and the best value is monotone in it.
    """
    sign = 1.0 if mode == "minimize" else -1.0
    f = value_fn if sign > 0 else (lambda v: -value_fn(v))
    g = grad_fn if sign > 0 else (lambda v: -grad_fn(v))

    outcomes: list[SearchOutcome] = []
    for v0 in seed_points:
        outcomes.append(_descend(f, g, np.asarray(v0, dtype=complex), cfg))
    for i in range(cfg.restarts):
        v0 = haar_isometry(shape[0], shape[1], child_seed(cfg.seed, i))
        outcomes.append(_descend(f, g, v0, cfg))
    for out in outcomes:
        out.value = float(sign * out.value)
    return outcomes
