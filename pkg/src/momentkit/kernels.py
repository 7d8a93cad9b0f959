"""Backend selector for the hot inner loops.

Prefers the compiled extension (_kernels, built from Cython) and falls back
to the numpy implementations in _kernels_py.  The active backend name is
exposed as BACKEND for diagnostics and benchmarks.
"""

try:
    from . import _kernels as _impl  # type: ignore[attr-defined]
    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    from . import _kernels_py as _impl
    BACKEND = "python"

conv_psi_table = _impl.conv_psi_table
s_direct = _impl.s_direct
