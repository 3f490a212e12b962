"""Low-discrepancy colorings and epsilon-samples for kernel range spaces."""

import os

# The system TBB is too old for numba; pick a layer that needs no extra library.
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

__version__ = "0.1.0"
