"""
Riesz, Hilbert and Poisson operators on a periodic grid
=======================================================

Every singular integral in the package is a Fourier multiplier applied
with a real FFT.  This walk-through applies them to a few fields and checks
the identities that pin them down.
"""

# %%
# A grid is just (dimension, points per side, period).
import math

import numpy as np

from rieszbmo import generate_field, make_grid
from rieszbmo.grid import ScalarField
from rieszbmo.transforms import conjugate_system, hilbert_circle, poisson_extend, riesz

circle = make_grid(1, 64, 2 * math.pi)
x = circle.axis()

# %%
# The Hilbert transform turns cos(kx) into sin(kx) and kills constants.
for k in (1, 3, 7):
    f = generate_field(circle, "single_mode", {"k": (k,)})
    err = np.max(np.abs(hilbert_circle(f).values - np.sin(k * x)))
    print(f"H cos({k}x) vs sin({k}x): max error {err:.1e}")

# %%
# In two dimensions the Riesz transforms square and sum to minus the
# identity on mean-zero fields, up to one detail.  The multiplier -i k_j/|k|
# is odd, and on the Nyquist row k_j = N/2 it cannot be represented by a
# real field, so it is set to zero there.  A generic field keeps a small
# residual from that row; once the row is removed the identity is exact.
plane = make_grid(2, 64, 1.0)
f = generate_field(plane, "random_bmo", {"amplitude": 1.0}, seed=0)


def sum_of_squares_residual(field):
    total = riesz(riesz(field, 1), 1).values + riesz(riesz(field, 2), 2).values
    return np.max(np.abs(total + field.values - field.mean()))


X = np.fft.fft2(f.values)
X[32, :] = 0
X[:, 32] = 0
trimmed = ScalarField(plane, np.fft.ifft2(X).real)
print("sum R_j^2 f + (f - mean), generic field:   ", sum_of_squares_residual(f))
print("sum R_j^2 f + (f - mean), no Nyquist modes:", sum_of_squares_residual(trimmed))

# %%
# Poisson extension damps mode k by exp(-t|k|) and forms a semigroup.
g = generate_field(circle, "single_mode", {"k": (2,)})
print("P_0.3 cos(2x) / cos(2x) at x=0:", poisson_extend(g, 0.3).values[0], "expected", math.exp(-0.6))
a = poisson_extend(poisson_extend(f, 0.02), 0.05).values
b = poisson_extend(f, 0.07).values
print("P_0.02 P_0.05 vs P_0.07:", np.max(np.abs(a - b)))

# %%
# The conjugate harmonic system stacks the Poisson extensions of f and of
# its Riesz transforms.  Its modulus at a height t is what the
# subharmonicity and majorization checks raise to a power.
system = conjugate_system(f, 0.05)
modulus = np.sqrt(sum(c.values**2 for c in system.components))
print(f"|F| at t=0.05: min {modulus.min():.3f}, max {modulus.max():.3f}")
