"""Pure-numpy implementations of the two hot kernels.

These are the fallback used when the compiled extension is unavailable.
Both kernels are deterministic; sums inside ``trunc_conv`` use numpy's
pairwise reduction, so results can differ from the compiled lane in the
last few ulp (the products themselves are bitwise identical).
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

NAME = "pure"


def translation_sup(values, window_len, base_row, shift_row0, weights, out):
    """Per-shift supremum of |w*f(n+tau) - f(n)| over a window.

    ``values``    (M, d): samples on one contiguous index range covering
                  both the window and every shifted window.
    ``window_len``: number of window indices W.
    ``base_row``  : row of the first unshifted window index.
    ``shift_row0``: row of the first window index under the smallest shift;
                  shift k starts at row shift_row0 + k.
    ``weights``   (K,): multiplier per shift (all ones for the unweighted
                  test, q**tau for the weighted one).
    ``out``       (K,): supremum per shift, max over vector components.
    """
    base = values[base_row:base_row + window_len]
    for k in range(weights.shape[0]):
        shifted = values[shift_row0 + k:shift_row0 + k + window_len]
        out[k] = np.max(np.abs(weights[k] * shifted - base))


def trunc_conv(decay, g, tail, out):
    """Truncated decaying convolution.

    out[k] = sum over d = 1..tail of (prod over j = 1..d-1 of
    decay[tail+k-j]) * g[tail+k-d].  ``decay`` and ``g`` cover the source
    index range [n0 - tail, n1 - 1] for outputs at n = n0..n1 (length
    len(out) + tail - 1).
    """
    n = out.shape[0]
    if tail == 0:
        out[:] = 0.0
        return
    # g rows, newest first: positions [k .. tail+k-1] reversed.
    g_rows = sliding_window_view(g, tail)[:n, ::-1]
    if tail == 1:
        out[:] = g_rows[:, 0]
        return
    # weight rows: cumulative products of decay positions tail+k-1 .. k+1.
    d_rows = sliding_window_view(decay, tail - 1)[1:n + 1, ::-1]
    weights = np.empty((n, tail))
    weights[:, 0] = 1.0
    np.cumprod(d_rows, axis=1, out=weights[:, 1:])
    np.einsum("ij,ij->i", weights, g_rows, out=out)
