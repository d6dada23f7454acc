"""Machine checks of the exact entropic identities on seeded random cases.

Each case draws a random bipartite state, a random splitting of its
purifying system, and a random pure-state decomposition, then measures
deviations from identities that hold exactly:

  * correlated-copy identity  I(A:B|C)/2 = sum p_i S(Tr_B psi_i)
  * E = 0 at MCS splittings
  * Q invariance under swapping A' with C
  * E = S(A|C) - Q (purity-based equivalence of the two E formulas)
  * Q <= min{S(A), S(B)}
  * strong subadditivity  I(A:B|C) >= 0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mcs as _mcs
from .random import child_seed, haar_isometry, random_density
from .redistribution import (
    SplittingIsometry,
    cost_pair,
    entanglement_balance,
    split_purification,
    swap_sides,
)
from .states import partial_trace, von_neumann_entropy

DEFAULT_THRESHOLD = 1e-8

CHECK_NAMES = (
    "mcs_cmi_identity",
    "mcs_zero_entanglement",
    "swap_invariance",
    "balance_equivalence",
    "cmi_entropy_bound",
    "strong_subadditivity",
)


@dataclass
class CheckResult:
    name: str
    cases: int
    max_deviation: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.threshold


def _case_geometry(rng, max_total_dim):
    d_a, d_b = [(2, 2), (2, 3), (3, 2), (3, 3)][rng.integers(0, 4)]
    budget = max_total_dim // (d_a * d_b)
    k_cap = int(np.sqrt(max_total_dim // (d_a * d_b)))
    rank = int(rng.integers(1, min(4, budget, k_cap * k_cap, d_a * d_b) + 1))
    options = [
        (a, c)
        for a in range(1, 5)
        for c in range(1, 5)
        if rank <= a * c <= budget
    ]
    d_ap, d_c = options[rng.integers(0, len(options))]
    k = int(rng.integers(rank, k_cap + 1)) if k_cap >= rank else rank
    return d_a, d_b, rank, d_ap, d_c, k


def identity_suite(n_states: int = 100, seed: int = 0, max_total_dim: int = 36,
                   threshold: float = DEFAULT_THRESHOLD) -> list[CheckResult]:
    """Run every identity check on `n_states` seeded random cases."""
    devs = {name: 0.0 for name in CHECK_NAMES}
    for i in range(n_states):
        case_seed = child_seed(seed, i)
        rng = np.random.default_rng(case_seed)
        d_a, d_b, rank, d_ap, d_c, k = _case_geometry(rng, max_total_dim)
        rho = random_density((d_a, d_b), rank, child_seed(case_seed, 1))

        v = haar_isometry(d_ap * d_c, rank, child_seed(case_seed, 2))
        state = split_purification(rho, SplittingIsometry(v, (d_ap, d_c)))
        pair = cost_pair(state)
        balance = entanglement_balance(state)
        swapped = cost_pair(swap_sides(state))

        s_a = von_neumann_entropy(partial_trace(rho, ["A"]))
        s_b = von_neumann_entropy(partial_trace(rho, ["B"]))
        devs["balance_equivalence"] = max(devs["balance_equivalence"], abs(pair.e - balance))
        devs["swap_invariance"] = max(devs["swap_invariance"], abs(swapped.q - pair.q))
        devs["cmi_entropy_bound"] = max(devs["cmi_entropy_bound"], pair.q - min(s_a, s_b))
        devs["strong_subadditivity"] = max(devs["strong_subadditivity"], -2.0 * pair.q)

        w = haar_isometry(k, rank, child_seed(case_seed, 3))
        from .measures import decomposition_from_pointer

        dec = decomposition_from_pointer(rho, w)
        lhs, rhs = _mcs.mcs_cmi_identity(dec)
        devs["mcs_cmi_identity"] = max(devs["mcs_cmi_identity"], abs(lhs - rhs))
        devs["mcs_zero_entanglement"] = max(
            devs["mcs_zero_entanglement"], abs(_mcs.mcs_cost_pair(dec).e)
        )

    return [
        CheckResult(name=name, cases=n_states, max_deviation=float(devs[name]), threshold=threshold)
        for name in CHECK_NAMES
    ]
