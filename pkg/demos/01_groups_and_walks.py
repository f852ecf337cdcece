# coding: utf-8

# # Lamplighter groups and their walks
#
# An element of `C2 wr Z` is a finite set of lit lamps on the integers together
# with the position of the lighter.  Group specs are written as text.

# In[1]:

import numpy as np
from lamplighter import (C2, Z, parse_group_spec, ball, word_length, move_or_switch,
                         uniform_measure, sample_trajectory)

G = parse_group_spec("C2 wr Z")
print(G, G.identity())


# Multiplication acts on the lamps by translation.  Word length has an exact
# formula on the line; the ball of radius 8 found by breadth-first search agrees.

# In[2]:

B = ball(G, 8)
print(len(B), "elements in the radius-8 ball")
print(all(word_length(G, x, mode="exact-line") == d for x, d in B.items()))


# A move-or-switch trajectory.  The seed fixes the whole path.

# In[3]:

mu = move_or_switch(uniform_measure(C2), uniform_measure(Z))
traj = sample_trajectory(G, mu, G.identity(), 20, seed=7)
for t in (0, 5, 10, 20):
    print(t, traj.states[t])
