"""Kernel backend selection.

The compiled ``_speedups`` extension is used when it imports; otherwise the
numpy implementations in ``_pykernels`` are used. Set ``LSESTOP_PURE_PYTHON=1``
to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("LSESTOP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _speedups as _impl  # noqa: F811
        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels

tri_probs = _impl.tri_probs
count_eps_accurate = _impl.count_eps_accurate
path_fscores = _impl.path_fscores

LABEL_UPPER, LABEL_LOWER, LABEL_UNDETERMINED = _pykernels.H, _pykernels.L, _pykernels.U
