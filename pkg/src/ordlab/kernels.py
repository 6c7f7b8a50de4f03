"""Kernel dispatch: the compiled extension when it is built, the numpy twin otherwise.

Set ``ORDLAB_PURE=1`` to force the pure implementation.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("ORDLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "compiled"

max_matching = _impl.max_matching
online_layers = _impl.online_layers
id_bounded_heights = _impl.id_bounded_heights
monotone_runs = _impl.monotone_runs

__all__ = ["BACKEND", "max_matching", "online_layers", "id_bounded_heights", "monotone_runs"]
