# coding: utf-8

# # Entropy growth on iterated lamplighters
#
# The lower bound sums lamp entropies over the sites where the lighter
# stood.  On the line it grows like sqrt(n), on the plane like n / ln n.

# In[1]:

import math
import numpy as np
from lamplighter import conditional_entropy_lower_bound, iterated_growth_experiment

ns = [2 ** j for j in range(8, 13)]
line = conditional_entropy_lower_bound("C2", "Z", ns, 100, seed=0)
print("line exponent", np.polyfit(np.log(ns), np.log([e for e, _ in line]), 1)[0])

grid = conditional_entropy_lower_bound("C2", "Z2", ns, 100, seed=0)
print("n/ln n shape", [round(e * math.log(n) / n, 3) for n, (e, _) in zip(ns, grid)])


# One level deeper, against n / ln ln n.

# In[2]:

for row in iterated_growth_experiment(2, ns, 100, seed=0):
    print(row)
