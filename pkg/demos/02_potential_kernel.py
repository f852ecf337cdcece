# coding: utf-8

# # Potential kernel of the planar walk
#
# The table is built once by a convergent series near the origin and the
# asymptotic expansion further out.  It is harmonic off the origin.

# In[1]:

import math
from lamplighter import build_kernel_table, series_potential_kernel, KAPPA

t = build_kernel_table(40)
for z in [(1, 0), (1, 1), (2, 0), (5, 3)]:
    print(z, t(z), series_potential_kernel(z)[0])


# Far from the origin the kernel is (2/pi) ln|z| + kappa.

# In[2]:

for z in [(20, 0), (30, 30), (40, 7)]:
    print(z, t(z) - (2 / math.pi * math.log(math.hypot(*z)) + KAPPA))

print("harmonicity residual", t.harmonicity_residual())
