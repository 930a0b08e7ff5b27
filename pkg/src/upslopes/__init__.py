"""Exact Hecke traces, characteristic polynomials, and p-adic slope data
for cusp forms on Gamma0(N) with trivial character.

The package computes Hecke operator traces via an exact trace formula,
characteristic polynomials via modular symbols, converts them to slope
multisets of U_p, and emits reproducible certificates for two families of
slope-discrepancy counterexamples.
"""

from ._version import ENGINE_VERSION

__version__ = ENGINE_VERSION

from .ntheory import (  # noqa: E402,F401
    EngineInfeasibleError,
    dim_cusp_forms,
    genus_gamma0,
    psi_index,
)
from .traceformula import charpoly_prefix, trace_tn, trace_tn_mod  # noqa: E402,F401
from .modsym import hecke_charpoly, hecke_matrix, hecke_trace  # noqa: E402,F401
from .slopes import (  # noqa: E402,F401
    d_value,
    gm_predicts_equal,
    newton_slopes,
    theorem1_certificate,
    theorem2_certificate,
    up_slope_multiset,
    verify_certificate,
)

__all__ = [
    "ENGINE_VERSION",
    "EngineInfeasibleError",
    "charpoly_prefix",
    "d_value",
    "dim_cusp_forms",
    "genus_gamma0",
    "gm_predicts_equal",
    "hecke_charpoly",
    "hecke_matrix",
    "hecke_trace",
    "newton_slopes",
    "psi_index",
    "theorem1_certificate",
    "theorem2_certificate",
    "trace_tn",
    "trace_tn_mod",
    "up_slope_multiset",
    "verify_certificate",
]
