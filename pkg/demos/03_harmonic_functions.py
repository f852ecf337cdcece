# coding: utf-8

# # Harmonic functions on C2 wr Z2
#
# The lamp at the origin times the potential kernel is harmonic for the
# move-or-switch walk.  Residuals are at rounding level.

# In[1]:

import math
from lamplighter import build_kernel_table, LampSignTimesKernel, residual_scan, growth_profile

h = LampSignTimesKernel(build_kernel_table(61, normalization="paper"))
print("max residual", residual_scan(h, 30))


# Its maximum over balls grows like (2/pi) ln r plus a constant, so the ratio to
# ln r approaches 2/pi only slowly.  The slope in ln r is already close.

# In[2]:

pts = {p.r: p.lower for p in growth_profile(h, [10, 30, 60])}
for r, m in pts.items():
    print(r, m, m / math.log(r))
print("slope", (pts[60] - pts[10]) / math.log(6), "vs", 2 / math.pi)
