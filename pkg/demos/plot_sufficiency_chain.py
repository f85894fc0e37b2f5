"""
From Riesz domination back to BMO, one inequality at a time
===========================================================

If a positive g satisfies ``|R_j g| <= c g``, then log g is in BMO.  The
argument runs through a handful of inequalities.  Each one has a numerical
check here, and the closing round trip ties them to the factorization.
"""

# %%
import numpy as np

from rieszbmo import build_factorization, generate_field, make_grid
from rieszbmo.grid import DyadicCube, ScalarField, box_center
from rieszbmo.verification import (
    check_key_inequality,
    check_majorization,
    check_subharmonicity,
    check_sufficiency,
    phi_tail_norm,
    roundtrip,
)

spec = make_grid(2, 128, 1.0)
f = generate_field(spec, "ball_indicator", {"center": box_center(spec), "radius": 0.25, "floor": 0.1})

# %%
# |F|^eps is subharmonic once eps > (n-1)/n.  The discrete Laplacian on a
# slab of heights stays nonnegative.
rep = check_subharmonicity(f, 0.55, 0.1 + 0.005 * np.arange(-2, 3))
print("subharmonicity:", rep.passed, "min Laplacian", round(rep.constants["min_laplacian"], 4))

# %%
# The maximum principle: |F|^eps at height t0 + t sits below the Poisson
# extension of its own trace at t0, with constant exactly 1.
rep = check_majorization(f, eps=0.6)
print("majorization:", rep.passed, "worst signed residual", f"{rep.constants['max_residual']:.2e}")

# %%
# The Poisson-averaged reverse inequality P_t[f1^q] <= C1 (P_t f1)^q, measured
# on g2 from a factorization.  C1 should not depend on t.
g2 = build_factorization(generate_field(make_grid(1, 128, 1.0), "random_bmo", {"amplitude": 1.0}, seed=0)).g2
rep = check_key_inequality(g2, 2.0, [1 / 16, 1 / 8, 1 / 4])
print("key inequality: C1 =", round(rep.constants["C1"], 4), "per height", {k: round(v, 4) for k, v in rep.profiles["C1_per_height"].items()})

# %%
# The Poisson tail outside an expanded cube falls off like 1/expansion.
cube = DyadicCube(6, (1, 1))
for e in (4, 8, 16, 32):
    print(f"  tail at expansion {e:2d}: {phi_tail_norm(make_grid(2, 256, 1.0), cube, e):.5f}")

# %%
# Reverse Hölder per dyadic level, the step that lands in A_infinity.
rep = check_sufficiency(g2)
print("sufficiency on g2:", rep.passed, "c =", round(rep.constants["c"], 3))
print("  RHI per level:", {k: round(v, 3) for k, v in rep.profiles["rhi_per_level"].items()})

# %%
# A single-cell spike has no uniform reverse Hölder bound.
spike = np.ones(128)
spike[37] = np.exp(20)
rep = check_sufficiency(ScalarField(make_grid(1, 128, 1.0), spike))
print("spike:", rep.passed, rep.notes)

# %%
# The round trip: factorize, certify, re-check both factors, and confirm the
# BMO triangle bound for log f = alpha (log g1 - log g2).
rep = roundtrip(generate_field(spec, "power_weight", {"exponent": 0.5, "r0": 2 / 128}))
for stage in rep.stages:
    print(f"  {stage.check}: {'pass' if stage.passed else 'FAIL'}")
