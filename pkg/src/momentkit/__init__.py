"""momentkit: finite-field character sums and local moment weights.

The package has three layers: exact finite-field arithmetic with character
sums (field, characters, hypergeom, charsum), local weight functions at a
finite place with an independent numerical integrator (padic, oracle,
series), and global bookkeeping plus the command line (assembly, cli).
"""

__version__ = "0.1.0"

from .assembly import (ArchPlace, D3Status, FinitePlace, GlobalSpec, Wt4Local,
                       arch_m3, conductors, d3_status, d4_toy, default_case,
                       wt4_local)
from .characters import (AddChar, MultChar, canonical_psi, enumerate_chars,
                         gauss_sum, jacobi_sum, quadratic_char, trivial_char)
from .charsum import (SCAN_FLAG_THRESHOLD, CharSumInstance, S_eval, S_theta,
                      scan)
from .field import (FieldCtx, QuadExtCtx, make_field, odd_prime_powers,
                    quad_ext)
from .hypergeom import (HyperSpec, classify_exceptional, hyper_all_t,
                        hyper_sum, hyper_sum_fast_22)
from .kernels import BACKEND
from .oracle import TruncatedPadic, oracle_m4, whittaker_indicators
from .padic import (Case1, Case2NS, Case2SC, Case3, LocalCharParam,
                    LocalFieldModel, gauss_integral, m3_value, m4_closed,
                    trivial_local_char)
from .series import (LaurentSeries, LocalWeightExpr, expand_at,
                     residue_and_order, zeta_eval)

__all__ = [
    "__version__", "BACKEND",
    "FieldCtx", "QuadExtCtx", "make_field", "quad_ext", "odd_prime_powers",
    "MultChar", "AddChar", "trivial_char", "quadratic_char", "canonical_psi",
    "gauss_sum", "jacobi_sum", "enumerate_chars",
    "HyperSpec", "hyper_sum", "hyper_sum_fast_22", "hyper_all_t",
    "classify_exceptional",
    "CharSumInstance", "S_eval", "S_theta", "scan", "SCAN_FLAG_THRESHOLD",
    "LocalFieldModel", "LocalCharParam", "trivial_local_char",
    "Case1", "Case2NS", "Case2SC", "Case3",
    "m3_value", "m4_closed", "gauss_integral",
    "TruncatedPadic", "oracle_m4", "whittaker_indicators",
    "LocalWeightExpr", "LaurentSeries", "expand_at", "residue_and_order",
    "zeta_eval",
    "GlobalSpec", "ArchPlace", "FinitePlace", "D3Status", "Wt4Local",
    "conductors", "d3_status", "arch_m3", "wt4_local", "d4_toy",
    "default_case",
]
