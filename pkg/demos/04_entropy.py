# coding: utf-8

# # Exact entropy of the walk
#
# The law of X_n on C2 wr Z is enumerated exactly, so H(X_n) needs no sampling.

# In[1]:

import numpy as np
from lamplighter import entropy_sequence, check_inequality_suite

seq = entropy_sequence("C2 wr Z", None, 10)
print(np.round(seq.H, 6))
print("increments", np.round(seq.increments, 6))
print(seq.monotone_increments(), seq.n_delta_bound())


# Random audits of the information inequalities used along the way.

# In[2]:

for rep in check_inequality_suite({"trials": 2000, "seed": 1}):
    print(rep)
