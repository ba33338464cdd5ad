# coding: utf-8

# # Denoising a small hyperspectral cube
#
# Build a smooth low-rank cube, corrupt it with dense Gaussian noise plus
# column stripes, then restore it with each solver variant.

# In[1]:

import numpy as np

from llsrpca.hsi import denoise_cube
from llsrpca.metrics import evaluate, format_table
from llsrpca.noise import apply_spec, protocol_one, protocol_two
from llsrpca.solvers import SolverConfig
from llsrpca.synthetic import low_rank_cube

clean = low_rank_cube(rows=32, cols=32, bands=16, terms=4, seed=0)
print(clean.shape, clean.min(), clean.max())


# ## Gaussian noise plus stripes

# In[2]:

spec = protocol_one(seed=1, bands=(12, 15), cols=(3, 6))
print(spec.to_dict())
noisy = apply_spec(clean, spec)
print(format_table(evaluate(clean, noisy)))


# ## Whole-image restoration
#
# With no patch size the whole cube becomes one (rows*cols) x bands matrix.

# In[3]:

for variant in ("lls_rpca", "rpca_l1", "rpca_l21"):
    restored, diags = denoise_cube(noisy, SolverConfig(variant=variant))
    rep = evaluate(clean, restored)
    print(f"{variant:9s} MPSNR {rep.mpsnr:6.2f}  MSSIM {rep.mssim:.3f}  "
          f"ERGAS {rep.ergas:8.2f}  iterations {diags[0]['iterations']}")


# ## Patch mode
#
# Overlapping 16x16 patches, averaged back together. Each patch matrix has
# 256 rows, so the default weight 1/sqrt(256) is small and the dense noise
# swamps L. A larger weight fixes that.

# In[4]:

for lam in (None, 0.2, 0.4):
    restored, diags = denoise_cube(noisy, SolverConfig(lam=lam), q=16, stride=8)
    print(f"lam={lam}  {len(diags)} patch solves  MPSNR {evaluate(clean, restored).mpsnr:.2f}")


# ## Mild Gaussian noise plus impulses

# In[5]:

noisy2 = apply_spec(clean, protocol_two(seed=2))
print(f"noisy MPSNR {evaluate(clean, noisy2).mpsnr:.2f}")
for variant in ("lls_rpca", "rpca_l1"):
    restored, _ = denoise_cube(noisy2, SolverConfig(variant=variant))
    print(f"{variant:9s} MPSNR {evaluate(clean, restored).mpsnr:.2f}")
