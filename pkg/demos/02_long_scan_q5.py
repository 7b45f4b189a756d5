"""Zeros of L(s, chi_5) up to height 200 and their normalized gaps.

Observational only: both small (< 1) and large (> 1) normalized gaps show
up, as expected from the pair-correlation picture.
Run with `python demos/02_long_scan_q5.py`.
"""
# %%
import math

import numpy as np

from dirgaps import characters as ch
from dirgaps import zeros as zr

chi = next(c for c in ch.even_primitive_characters(5))
print(chi.label(), "conductor", chi.conductor, "order", chi.order)

# %%
z = zr.scan_zeros(chi, 0, 200)
print(f"{len(z)} zeros in (0, 200), refined to {z.tolerance:g}")
print("first five:", np.round(z.ordinates[:5], 6))
print(f"expected about {zr.predicted_count(5, 200) / 2:.1f} from the counting formula")

# %% [markdown]
# Normalizing by the mean spacing 2 pi / log q.  At this height the local
# density is log(qt/2pi)/2pi, larger than log q/2pi, so the normalized gaps
# drift below 1 on average; the extremes are what matter here.

# %%
g = zr.gap_report(z, 5)
print(f"min normalized gap {g.min_normalized:.4f}, max {g.max_normalized:.4f}")
local = np.diff(z.ordinates) * np.log(5 * np.array(z.ordinates[1:]) / (2 * math.pi)) / (2 * math.pi)
print(f"with the local density instead: min {local.min():.4f}, max {local.max():.4f}")
print("small gap below 1:", g.min_normalized < 1, "  large gap above 1:", g.max_normalized > 1)
