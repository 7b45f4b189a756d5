"""From the kappa-coefficients to the 3.54 gap multiplier.

Run with `python demos/01_kappa_pipeline.py`.
"""
# %%
import math
from fractions import Fraction

import mpmath

from dirgaps import kappacoeffs as kc
from dirgaps import shiftframe as sf

# %% [markdown]
# Each coefficient C_i(kappa) is a trig-Laurent expression with a pole of
# order up to 11 at kappa = 0.  Subtracting the principal part leaves an
# entire function, and its value at 0 is an exact rational.

# %%
for i in (0, 1, 2, 4, 6):
    e = kc.c_closed(i)
    print(f"C{i}: value at 0 = {e.at_zero}   (x 10! = {e.at_zero * math.factorial(10)})")
assert kc.c_closed(0).at_zero == Fraction(42, math.factorial(9))

# %% [markdown]
# The same numbers come out of a completely different computation: sum the
# twenty shifted main terms as Laurent series in the shift size and read off
# the constant coefficient.  The negative powers cancel to working precision.

# %%
for k in (0.5, 2.0, 7.42):
    res = sf.r_sum_series(k)
    closed = kc.macl_eval(kc.c_closed(0), k)
    print(f"kappa={k:5}:  oracle {mpmath.nstr(sf.r_sum_eps0(k), 20)}"
          f"  closed {mpmath.nstr(closed, 20)}  principal residual {mpmath.nstr(res.principal_residual, 3)}")

# %% [markdown]
# The gap argument is contradicted as long as C0 exceeds (kappa/pi)^2 times
# the derivative combination.  The first kappa where this fails is the root.

# %%
for k in (1, 3, 5, 7, 7.4, 7.45, 8):
    print(f"kappa={k:5}:  h = C0 - rhs = {mpmath.nstr(kc.h_margin(k), 8)}")

s = kc.solve_kappa(1e-12)
print(f"\nkappa*       = {mpmath.nstr(s.kappa_star, 15)}")
print(f"kappa*/2pi   = {mpmath.nstr(s.ratio_to_2pi, 15)}")
print(f"3 kappa*/2pi = {mpmath.nstr(s.gap_multiplier, 15)}  (gap length in units of the mean spacing)")
