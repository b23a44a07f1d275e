"""Backend selection for the arithmetic kernels.

Imports the compiled Cython kernels when available, otherwise the
pure-Python twin.  Set DT4VERTEX_PURE=1 to force the pure backend.
"""

import os

if os.environ.get("DT4VERTEX_PURE") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND

laurent_add = _impl.laurent_add
laurent_sub = _impl.laurent_sub
laurent_neg = _impl.laurent_neg
laurent_scale = _impl.laurent_scale
laurent_mul = _impl.laurent_mul
laurent_shift = _impl.laurent_shift
laurent_bar = _impl.laurent_bar
laurent_subst = _impl.laurent_subst
poly_add = _impl.poly_add
poly_sub = _impl.poly_sub
poly_neg = _impl.poly_neg
poly_scale = _impl.poly_scale
poly_mul = _impl.poly_mul
poly_linear_mul = _impl.poly_linear_mul
