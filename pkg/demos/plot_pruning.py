"""
What pruning saves
==================

Decode the same noisy PAC(128,64) frames with the conventional bit-by-bit
stack decoder and with its variance-pruned version, then compare how many
paths each inserts and how many are left at the end.
"""

import numpy as np

from pacstack import DecodeOptions, PacCodeSpec, awgn_transmit, build_tables, ebn0_to_sigma
from pacstack import pac_encode
from pacstack import engine

spec = PacCodeSpec.reed_muller(7, 64)
ebn0 = 1.0
sigma = ebn0_to_sigma(ebn0, spec.rate)
tables = build_tables(sigma, spec.n, p_th=0.02, combine="max")

plain = DecodeOptions(64, 1024)
pruned = DecodeOptions(64, 1024, thresholds=tables.gamma_T)

rows = []
for k in range(500):
    rng = np.random.default_rng([7, k])
    d = rng.integers(0, 2, spec.K, dtype=np.uint8)
    llrs = awgn_transmit(pac_encode(d, spec), sigma, rng)
    a = engine.decode(spec, tables, llrs, plain, bitwise=True)
    b = engine.decode(spec, tables, llrs, pruned, bitwise=True)
    rows.append([a.total_insertions, b.total_insertions, a.stack_used, b.stack_used,
                 not a.decoded or np.any(a.d_hat != d), not b.decoded or np.any(b.d_hat != d)])

rows = np.array(rows, dtype=float)
print(f"insertions per frame: {rows[:, 0].mean():.1f} -> {rows[:, 1].mean():.1f}")
print(f"paths left per frame: {rows[:, 2].mean():.1f} -> {rows[:, 3].mean():.1f}")
print(f"frame errors:         {int(rows[:, 4].sum())} -> {int(rows[:, 5].sum())} of {len(rows)}")

###############################################################################
# The pruned decoder still pops about as many paths as the plain one, and
# each pop inserts at least one child, so the insertion count drops far less
# than the final stack occupancy.
