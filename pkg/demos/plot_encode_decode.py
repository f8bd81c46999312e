"""
Encoding and decoding one PAC frame
===================================

A PAC(64,57) code puts 57 data bits on the Reed-Muller rate profile, runs
them through the rate-1 convolutional precoder and then through the polar
transform. We send the codeword over BPSK/AWGN and decode it with the fast
stack decoder.
"""

import numpy as np

from pacstack import PacCodeSpec, build_tables, calculate_s_values, chunk_segmentation
from pacstack import DecodeOptions, awgn_transmit, ebn0_to_sigma, fast_stack_decode, pac_encode

spec = PacCodeSpec.reed_muller(6, 57)
print("rate profile:", "".join(map(str, spec.rate_profile)))

###############################################################################
# The fast decoder walks the tree in chunks. For this profile the offline
# segmentation has 15 chunks, so a clean frame takes 15 cycles.

chunks = chunk_segmentation(calculate_s_values(spec.rate_profile))
for start, size, kind in chunks:
    print(f"  bits {start:2d}..{start + size - 1:2d}  {kind.name}")

###############################################################################
# Transmit at 4 dB and decode with pruning thresholds built for that point.

rng = np.random.default_rng(2024)
ebn0 = 4.0
sigma = ebn0_to_sigma(ebn0, spec.rate)
tables = build_tables(sigma, spec.n, p_th=5e-3, combine="max")

d = rng.integers(0, 2, spec.K, dtype=np.uint8)
llrs = awgn_transmit(pac_encode(d, spec), sigma, rng)
res = fast_stack_decode(spec, tables, llrs, DecodeOptions(8, 32, tables.gamma_T))

print("status:", res.status.value, "| data recovered:", np.array_equal(res.d_hat, d))
print(f"cycles {res.cycles}, f/g ops {res.fg_ops}, paths left {res.stack_used}")
