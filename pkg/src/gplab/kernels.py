"""Hot-loop kernel selection.

The compiled module ``gplab._ckernels`` is used when it imports; otherwise
the pure-Python implementations from ``gplab._pykernels`` are used.  Setting
``GPLAB_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("GPLAB_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

hull2d = _impl.hull2d
polygon_measures = _impl.polygon_measures
batch_hull2d_area = _impl.batch_hull2d_area

__all__ = ["BACKEND", "hull2d", "polygon_measures", "batch_hull2d_area"]
