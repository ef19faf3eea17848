"""DP kernels with a compiled core and a numpy fallback.

The compiled extension is used when it imports; otherwise the numpy versions
are. Both produce bitwise-identical output. ``use_backend`` switches
explicitly (tests and the benchmark compare the two).
"""

from contextlib import contextmanager

from . import _pykernels

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return sorted(_BACKENDS)


def backend():
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def set_backend(name):
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}") from None


@contextmanager
def use_backend(name):
    prev = backend()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def weighted_dp(xs, ys, n, w_count, w_area):
    return _active.weighted_dp(xs, ys, float(n), float(w_count), float(w_area))


def exact_area_dp(xs, ys, n, depth):
    return _active.exact_area_dp(xs, ys, float(n), depth)
