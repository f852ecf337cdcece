# coding: utf-8

# # Finite differences of binomial laws and lazy operators

# In[1]:

from lamplighter import verify_derivative_bound, FiniteMarkovOperator, lazy_power_expansion_check

rep = verify_derivative_bound(range(1, 60), range(1, 6), [0.2, 0.5, 0.8])
print(rep["violations"], "violations,", "tightest ratio", rep["max_ratio"])


# The lazy power expands in powers of (P - I) with binomial weights.

# In[2]:

P = FiniteMarkovOperator.cycle(32)
print(lazy_power_expansion_check(P, 0.5, 12, 2))
