"""Hot-kernel backend selection.

The numba backend is the default. Set ``COOKTWIN_NUMBA=0`` in the
environment (before import) to force the pure-numpy fallback; the
fallback is also used automatically when numba is unavailable. Both
backends implement the same contracts and agree to rounding accuracy;
``benchmarks/bench_kernels.py`` compares their speed.
"""

import os
import warnings


def _want_numba():
    flag = os.environ.get("COOKTWIN_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


if _want_numba():
    try:
        from . import numba_impl as _impl
    except ImportError:
        warnings.warn("numba unavailable, falling back to numpy kernels")
        from . import numpy_impl as _impl
else:
    from . import numpy_impl as _impl

BACKEND = _impl.BACKEND_NAME

cell_gradient = _impl.cell_gradient
face_normal_velocity = _impl.face_normal_velocity
assemble_system = _impl.assemble_system
stencil_matvec = _impl.stencil_matvec
scaled_residual_parts = _impl.scaled_residual_parts
narx_rollout = _impl.narx_rollout
narx_step = _impl.narx_step
