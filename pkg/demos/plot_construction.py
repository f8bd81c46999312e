"""
Bit-channel parameters and pruning thresholds
=============================================

The Gaussian approximation gives each bit channel an LLR mean. From it we
get the cutoff rate (the metric bias), the capacity and the varentropy, and
from the varentropy a pruning threshold for a target probability P_th.
"""

import numpy as np

from pacstack import build_tables, ebn0_to_sigma

sigma = ebn0_to_sigma(2.0, 99 / 128)
tables = build_tables(sigma, 7, p_th=1e-3)

order = np.argsort(tables.I_vec)
print(" idx   capacity   cutoff    varentropy  threshold")
for i in order[::16]:
    print(f"{i:4d}   {tables.I_vec[i]:.4f}    {tables.E0[i]:.4f}    "
          f"{tables.Var_vec[i]:.4f}      {tables.gamma_T[i]:4d}")

###############################################################################
# Most channels are nearly perfect or nearly useless, so their varentropy is
# small and their threshold sits at the Chernoff arm. Only the middle
# channels get the deep Chebyshev thresholds.

for p_th in (1e-1, 1e-2, 1e-3):
    for combine in ("min", "max"):
        g = build_tables(sigma, 7, p_th, combine).gamma_T
        print(f"P_th={p_th:g} {combine}: thresholds from {g.min()} to {g.max()}")
