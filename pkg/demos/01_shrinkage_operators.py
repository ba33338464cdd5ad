# coding: utf-8

# # Shrinkage operators
#
# Every solver step is a proximal map. This walk-through compares the
# convex shrinkages (soft threshold, column-group shrink, nuclear SVT) with
# their log-penalty counterparts, and checks the closed form against a
# brute-force scalar search.

# In[1]:

import numpy as np

from llsrpca.operators import (
    group_shrink_l21,
    l2log_shrink,
    log_penalty_scale,
    logdet_svt,
    nuclear_svt,
    scalar_prox_oracle,
)


# ## The scalar map
#
# For a magnitude `a` and weight `tau`, the log penalty keeps large values
# almost untouched while the convex penalty always subtracts `tau`.

# In[2]:

tau = 1.0
for a in (0.5, 1.0, 2.0, 4.0, 8.0):
    print(f"a={a:4.1f}  soft={max(a - tau, 0):6.3f}  log={log_penalty_scale(a, tau):6.3f}")


# Brute force agrees with the closed form.

# In[3]:

rng = np.random.default_rng(0)
gaps = []
for a, t in zip(rng.uniform(0, 10, 50), rng.uniform(0, 5, 50)):
    gaps.append(abs(log_penalty_scale(a, t) - scalar_prox_oracle(a, t)))
print("largest gap:", max(gaps))


# ## Column shrinkage
#
# Small columns vanish under both operators; the big one loses far less
# energy under the log penalty.

# In[4]:

Y = np.zeros((4, 3))
Y[:, 0] = 0.2
Y[:, 1] = 1.0
Y[:, 2] = 5.0
print("input norms  ", np.linalg.norm(Y, axis=0))
print("l21 shrink   ", np.linalg.norm(group_shrink_l21(Y, 1.0), axis=0).round(3))
print("l2,log shrink", np.linalg.norm(l2log_shrink(Y, 1.0), axis=0).round(3))


# ## Singular value shrinkage
#
# Same story on the spectrum of a rank-3 matrix.

# In[5]:

U, _ = np.linalg.qr(rng.normal(size=(20, 3)))
V, _ = np.linalg.qr(rng.normal(size=(15, 3)))
D = U @ np.diag([10.0, 3.0, 0.5]) @ V.T
for name, op in (("nuclear", nuclear_svt), ("log-det", logdet_svt)):
    s = np.linalg.svd(op(D, 1.0), compute_uv=False)[:3]
    print(f"{name:8s}", s.round(3))
