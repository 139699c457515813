"""Capacity continuity bound versus channel distance.

Two channels out of a one-mode oscillator that are eps-close in the
energy-constrained diamond norm have capacities within V(eps). The bound
is minimized over an internal dimension m; this prints V and the optimal
m for a range of eps at E = 3 hbar omega.
"""

import numpy as np

from ecdim import SpectrumModel
from ecdim.contbounds import v_theorem3

osc = SpectrumModel.oscillator(1.0)
print(f"{'eps':>8} " + " ".join(f"{k:>18}" for k in ("chi", "c", "q", "p")))
for eps in np.logspace(-10, -2, 9):
    cols = []
    for kind in ("chi", "c", "q", "p"):
        res = v_theorem3(kind, osc, 3.0, eps)
        cols.append(f"{res.value:8.4f} (m={res.witnesses['m']:<7d})")
    print(f"{eps:8.0e} " + " ".join(cols))
