"""Richardson-extrapolated central differences for sampled curves."""
from __future__ import annotations

import numpy as np

DEFAULT_STEP = 1e-3


def _wrap(d):
    return (d + np.pi) % (2.0 * np.pi) - np.pi


def jet(fn, s, h: float = DEFAULT_STEP, angle_index=None):
    """Value, first and second derivative of ``fn`` at the parameters ``s``.

    ``fn`` maps an array of parameters of shape (n,) to an array (n, d).
    Differences in the column ``angle_index`` are wrapped to (-pi, pi] so that
    principal-value angles can be differentiated across the branch cut.
    Truncation error is O(h^4); the default step keeps round-off in the second
    derivative near 1e-10 for O(1) data.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    f0 = np.asarray(fn(s), dtype=float)

    def diffs(step):
        fp = np.asarray(fn(s + step), dtype=float) - f0
        fm = np.asarray(fn(s - step), dtype=float) - f0
        if angle_index is not None:
            fp[:, angle_index] = _wrap(fp[:, angle_index])
            fm[:, angle_index] = _wrap(fm[:, angle_index])
        return (fp - fm) / (2.0 * step), (fp + fm) / step ** 2

    d1a, d2a = diffs(h)
    d1b, d2b = diffs(h / 2.0)
    return f0, (4.0 * d1b - d1a) / 3.0, (4.0 * d2b - d2a) / 3.0


def derivative(fn, s, h: float = DEFAULT_STEP):
    """First derivative only (same stencil as :func:`jet`)."""
    return jet(fn, s, h)[1]
