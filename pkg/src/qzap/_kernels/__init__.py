"""Hot-kernel backend selection.

The compiled extension (``_core``, built from Cython) is preferred when
importable; otherwise the pure-numpy fallback is used.  The environment
variable ``QZAP_KERNELS`` forces a lane: ``pure`` always works,
``compiled`` raises at import if the extension is missing.

Every kernel is also reachable explicitly through ``get_backend`` so the
two lanes can be compared (see benchmarks/bench_kernels.py).
"""

import os

from . import _pure

try:
    from . import _core
except ImportError:
    _core = None

_forced = os.environ.get("QZAP_KERNELS", "").strip().lower()
if _forced == "pure":
    _active = _pure
elif _forced in ("compiled", "core"):
    if _core is None:
        raise ImportError(
            "QZAP_KERNELS=compiled but the qzap._kernels._core extension "
            "is not built; install with the Cython toolchain or unset the variable"
        )
    _active = _core
elif _forced:
    raise ImportError(f"unknown QZAP_KERNELS value {_forced!r}")
else:
    _active = _core if _core is not None else _pure

ACTIVE = _active.NAME
HAVE_COMPILED = _core is not None


def available_backends():
    names = ["pure"]
    if _core is not None:
        names.append("compiled")
    return names


def get_backend(name):
    """Return the kernel module for an explicit lane name."""
    if name == "pure":
        return _pure
    if name == "compiled":
        if _core is None:
            raise ImportError("compiled kernel extension is not built")
        return _core
    raise ValueError(f"unknown backend {name!r}")


def translation_sup(values, window_len, base_row, shift_row0, weights, out):
    """Shape-validated dispatch (the compiled lane skips bounds checks)."""
    n_shifts = weights.shape[0]
    if out.shape[0] != n_shifts:
        raise ValueError("out and weights length mismatch")
    needed = max(base_row + window_len,
                 shift_row0 + n_shifts - 1 + window_len)
    if base_row < 0 or shift_row0 < 0 or values.shape[0] < needed:
        raise ValueError(
            f"values has {values.shape[0]} rows, kernel needs {needed}"
        )
    _active.translation_sup(values, window_len, base_row, shift_row0,
                            weights, out)
    return out


def trunc_conv(decay, g, tail, out):
    """Shape-validated dispatch (the compiled lane skips bounds checks)."""
    if tail < 0:
        raise ValueError("tail must be nonnegative")
    if tail > 0:
        needed = out.shape[0] + tail - 1
        if decay.shape[0] < needed or g.shape[0] < needed:
            raise ValueError(
                f"decay/g need at least {needed} entries for {out.shape[0]} "
                f"outputs at tail {tail}"
            )
    _active.trunc_conv(decay, g, tail, out)
    return out
