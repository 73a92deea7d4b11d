"""Kernel backend selection.

The compiled ``_ckernels`` module is used when it was built; otherwise the
numpy implementation in ``_pykernels`` is used. Setting ``SFCALC_BACKEND``
to ``python`` forces the fallback at import time.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = None


def available():
    return sorted(_BACKENDS)


def use(name):
    """Switch the active backend (``"cython"`` or ``"python"``)."""
    global _active, BACKEND
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {available()}") from None
    BACKEND = name


def impl():
    return _active


use("python" if os.environ.get("SFCALC_BACKEND") == "python" or _ckernels is None else "cython")


def geometric_product(a, b, idx, sign):
    return _active.geometric_product(a, b, idx, sign)


def geometric_product_batch(a, b, idx, sign):
    return _active.geometric_product_batch(a, b, idx, sign)


def left_matrix(a, idx, sign):
    return _active.left_matrix(a, idx, sign)


def right_matrix(a, idx, sign):
    return _active.right_matrix(a, idx, sign)
