"""Hot kernels with a compiled core and a pure-Python fallback.

The compiled extension is optional: if it failed to build, or if
``SPECBOUND_PURE_PYTHON=1`` is set, the NumPy fallback is used instead.
Both expose the same four functions with identical semantics.
"""

import os

from . import _fallback

if os.environ.get("SPECBOUND_PURE_PYTHON") == "1":
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _fallback

jacobi_eigh = _impl.jacobi_eigh
sign_vertex_max = _impl.sign_vertex_max
hopcroft_karp = _impl.hopcroft_karp
dinic_maxflow = _impl.dinic_maxflow


def backend_name():
    """'compiled' when the extension module is active, else 'fallback'."""
    return "fallback" if _impl is _fallback else "compiled"


__all__ = [
    "backend_name",
    "dinic_maxflow",
    "hopcroft_karp",
    "jacobi_eigh",
    "sign_vertex_max",
]
