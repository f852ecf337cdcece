# coding: utf-8

# # Coupling, escape and returns
#
# Two walkers glued on the lamp at the origin separate before leaving the
# interval of radius r with probability 1/(r+1).

# In[1]:

from lamplighter import coupled_gluing_experiment, coupling_escape_exact

for r in (1, 4, 16):
    est = coupled_gluing_experiment(r, 20000, seed=r)
    print(r, est.mean, est.stderr, coupling_escape_exact(r))


# The lamp at the origin seen at the k-th return.  Without conditioning it
# follows the lazy lamp walk; conditioning on returning before exit shifts it.

# In[2]:

from lamplighter import lamp_law_at_return

rep = lamp_law_at_return("C2 wr Z", 1, 10, 20000, seed=3)
print("unconditional p", rep.unconditional_pvalue)
print("conditional p", rep.chi2_pvalue)


# Swapping two excursions leaves the law of the path unchanged.

# In[3]:

from lamplighter import excursion_swap_check

print(excursion_swap_check(2, 6, mode="exhaustive").tv)
