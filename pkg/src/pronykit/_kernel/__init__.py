"""Kernel backend selection.

The compiled extension is preferred when present; the pure-Python fallback
keeps the package importable from a source tree with no compiler. Set
``PRONY_KERNEL=python`` or ``PRONY_KERNEL=compiled`` to force a backend
(the latter raises if the extension is missing).
"""

import os

_requested = os.environ.get("PRONY_KERNEL", "").strip().lower()

if _requested == "python":
    from . import _fallback as impl
    BACKEND = "python"
elif _requested == "compiled":
    from . import _core as impl  # type: ignore[no-redef]
    BACKEND = "compiled"
elif _requested == "":
    try:
        from . import _core as impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as impl
        BACKEND = "python"
else:
    raise RuntimeError(
        f"PRONY_KERNEL={_requested!r} not understood; use 'python' or 'compiled'"
    )

jacobi_svd = impl.jacobi_svd
aberth_roots = impl.aberth_roots
expm_taylor = impl.expm_taylor
