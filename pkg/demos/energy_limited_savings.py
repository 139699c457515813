"""How much an energy limit on the channel shrinks the required dimension.

For a one-mode oscillator at mean energy E, compare the dimension needed
for a general channel with the one needed when the channel obeys an
energy limit with parameters (alpha, Ec). Both are for eps = 0.1 F(E).
"""

import numpy as np

from ecdim import EnergyLimitParams, SpectrumModel
from ecdim.dimbounds import m_theorem1, m_theorem2

osc = SpectrumModel.oscillator(1.0)
energies = np.array([3.0, 10.0, 30.0, 100.0])
limits = [EnergyLimitParams(1.0, 0.0), EnergyLimitParams(1e3, 1e3), EnergyLimitParams(1e6, 1e6)]

print(f"{'E':>6} {'kind':>4} {'general':>10}" + "".join(f"  a={p.alpha:<4g}" for p in limits))
for E in energies:
    for kind in ("chi", "c", "q"):
        m1 = m_theorem1(kind, osc, E, eps_fraction=0.1).witnesses["m"]
        row = [m_theorem2(kind, osc, None, p, E, eps_fraction=0.1).witnesses["m"] for p in limits]
        print(f"{E:6g} {kind:>4} {m1:10.2e}" + "".join(f"  {m:8.2e}" for m in row))
