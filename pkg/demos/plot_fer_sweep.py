"""
A small FER sweep
=================

``run_fer`` simulates frames until enough errors are seen at each Eb/N0
point. Every frame draws from its own seeded generator, so the numbers do
not depend on the worker count.
"""

import sys

from pacstack import DecodeOptions, PacCodeSpec, SweepConfig, run_fer
from pacstack.simulate import write_csv

spec = PacCodeSpec.reed_muller(6, 57)
config = SweepConfig(spec, ebn0_db=[2.0, 3.0, 4.0], variant="fast",
                     options=DecodeOptions(8, 32), p_th=[5e-2, 1e-2, 5e-3],
                     threshold_combine="max", min_errors=50, max_frames=20_000, seed=1)
write_csv(run_fer(config), sys.stdout)

###############################################################################
# The same sweep from the shell:
#
#   python -m pacstack simulate --n 6 --k 57 --ebn0-start 2 --ebn0-stop 4 \
#       --ebn0-step 1 --pth 0.05 --pth 0.01 --pth 0.005 --threshold-combine max \
#       --stack-size 8 --max-cycles 32 --min-errors 50 --max-frames 20000 --seed 1
