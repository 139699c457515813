"""Bracketed 1-D minimization helper."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar


def grid_golden(f_vec, f_scalar, lo, hi, n_grid=64, tol=1e-12):
    """Minimize on [lo, hi]: seed with an ``n_grid`` point grid, refine with bounded Brent.

    ``f_vec`` evaluates an array of abscissae at once; ``f_scalar`` a single
    float. Returns (x, f(x)); the grid minimum is kept if refinement does
    not improve on it.
    """
    xs = np.linspace(lo, hi, n_grid)
    vals = np.asarray(f_vec(xs), dtype=float)
    vals = np.where(np.isnan(vals), np.inf, vals)
    i = int(np.argmin(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, n_grid - 1)]
    res = minimize_scalar(f_scalar, bounds=(a, b), method="bounded",
                          options={"xatol": tol * (1.0 + abs(a) + abs(b)), "maxiter": 500})
    if res.fun <= vals[i]:
        return float(res.x), float(res.fun)
    return float(xs[i]), float(vals[i])
