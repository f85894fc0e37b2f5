"""Fourier multipliers on the periodic grid.

Convention: ``f(x) = sum_k c_k exp(i <xi_k, x>)`` with ``xi_k = 2 pi k / L``.
The Riesz transforms have multipliers ``-i xi_j / |xi|`` and the circle
Hilbert transform ``-i sgn(k)``; both vanish at ``k = 0``.  Odd multipliers
are also set to zero on Nyquist rows (``|k_j| = N/2``), where the sign of
``xi_j`` is ambiguous.  The identities ``sum_j R_j^2 = -(I - mean)`` and
``H^2 = -(I - mean)`` therefore hold exactly on trigonometric polynomials
below the Nyquist limit.

The Poisson extension to height ``t`` is the multiplier ``exp(-t |xi|)``,
i.e. convolution with the unit-mass periodized Poisson kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import GridSpec, ScalarField, _blocks

__all__ = [
    "SpectralField",
    "ConjugateSystem",
    "analyze",
    "synthesize",
    "riesz",
    "hilbert_circle",
    "poisson_extend",
    "conjugate_system",
    "system_magnitude_power",
    "maximal_dyadic",
    "laplacian",
]


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients in FFT storage order, shape ``(N,) * n``."""

    spec: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != self.spec.shape:
            raise ValueError(f"coefficient array has shape {c.shape}, expected {self.spec.shape}")
        object.__setattr__(self, "coefficients", c)

    def wavevectors(self) -> list[np.ndarray]:
        """Integer wavevector components in ``(-N/2, N/2]``, broadcastable."""
        k = np.fft.fftfreq(self.spec.N, 1.0 / self.spec.N).astype(int)
        k[k == -self.spec.N // 2] = self.spec.N // 2
        return _broadcast_axes(k, self.spec.n)

    def __getitem__(self, k) -> complex:
        k = np.atleast_1d(k)
        return complex(self.coefficients[tuple(int(kd) % self.spec.N for kd in k)])

    def norm(self) -> float:
        """L2 norm of the synthesized field, computed from the coefficients."""
        return float(np.sqrt(self.spec.volume * np.sum(np.abs(self.coefficients) ** 2)))


def _broadcast_axes(a, n):
    out = []
    for d in range(n):
        s = [1] * n
        s[d] = a.size
        out.append(a.reshape(s))
    return out


def analyze(f: ScalarField) -> SpectralField:
    return SpectralField(f.spec, np.fft.fftn(f.values) / f.spec.size)


def synthesize(sf: SpectralField) -> ScalarField:
    v = np.fft.ifftn(sf.coefficients * sf.spec.size)
    return ScalarField(sf.spec, v.real)


# -- multipliers, in rfftn layout ---------------------------------------------


@lru_cache(maxsize=64)
def _rwave(spec: GridSpec):
    """Integer wavevectors and |xi| for the rfftn half-spectrum."""
    full = np.fft.fftfreq(spec.N, 1.0 / spec.N)
    half = np.fft.rfftfreq(spec.N, 1.0 / spec.N)
    ks = []
    for d in range(spec.n):
        a = half if d == spec.n - 1 else full
        s = [1] * spec.n
        s[d] = a.size
        ks.append(a.reshape(s))
    xi2 = sum((2 * np.pi / spec.L * k) ** 2 for k in ks)
    return ks, np.sqrt(xi2)


@lru_cache(maxsize=64)
def _riesz_multiplier(spec: GridSpec, j: int) -> np.ndarray:
    ks, xi = _rwave(spec)
    xij = 2 * np.pi / spec.L * ks[j]
    with np.errstate(divide="ignore", invalid="ignore"):
        m = -1j * np.where(xi > 0, xij / xi, 0.0)
    m = m * (np.abs(ks[j]) != spec.N // 2)
    m.flags.writeable = False
    return m


@lru_cache(maxsize=64)
def _poisson_multiplier(spec: GridSpec, t: float) -> np.ndarray:
    _, xi = _rwave(spec)
    m = np.exp(-t * xi)
    m.flags.writeable = False
    return m


def _apply(values: np.ndarray, multiplier: np.ndarray) -> np.ndarray:
    n = values.ndim
    return np.fft.irfftn(np.fft.rfftn(values) * multiplier, s=values.shape, axes=tuple(range(n)))


def _riesz_values(values: np.ndarray, spec: GridSpec, j: int) -> np.ndarray:
    return _apply(values, _riesz_multiplier(spec, j))


def riesz(f: ScalarField, j: int) -> ScalarField:
    """j-th Riesz transform, ``1 <= j <= n``."""
    if not 1 <= j <= f.spec.n:
        raise ValueError(f"Riesz index {j} out of range 1..{f.spec.n}")
    return ScalarField(f.spec, _riesz_values(f.values, f.spec, j - 1))


def riesz_all(values: np.ndarray, spec: GridSpec) -> list[np.ndarray]:
    """All n Riesz transforms of a raw array, sharing one forward FFT."""
    n = spec.n
    F = np.fft.rfftn(values)
    return [np.fft.irfftn(F * _riesz_multiplier(spec, j), s=spec.shape, axes=tuple(range(n))) for j in range(n)]


def hilbert_circle(f: ScalarField) -> ScalarField:
    """Conjugate function on the circle, multiplier ``-i sgn(k)``."""
    if f.spec.n != 1:
        raise ValueError("hilbert_circle needs a one-dimensional grid")
    # in 1-D the Riesz multiplier -i xi/|xi| is exactly -i sgn(k)
    return ScalarField(f.spec, _riesz_values(f.values, f.spec, 0))


def poisson_extend(f: ScalarField, t: float) -> ScalarField:
    """Harmonic extension of ``f`` to height ``t``."""
    if not t > 0:
        raise ValueError(f"height must be positive, got {t}")
    return ScalarField(f.spec, _apply(f.values, _poisson_multiplier(f.spec, float(t))))


def laplacian(values: np.ndarray, spec: GridSpec) -> np.ndarray:
    """Spectral Laplacian in x of a raw array."""
    _, xi = _rwave(spec)
    return _apply(values, -(xi**2))


# -- conjugate harmonic system ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConjugateSystem:
    """``(U_f, U_{R_1 f}, ..., U_{R_n f})`` at height ``t``."""

    t: float
    components: tuple[ScalarField, ...]

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("height must be positive")
        specs = {c.spec for c in self.components}
        if len(specs) != 1:
            raise ValueError("components must share one grid")

    @property
    def spec(self) -> GridSpec:
        return self.components[0].spec

    def magnitude_squared(self) -> np.ndarray:
        return sum(c.values**2 for c in self.components)


def _system_arrays(values: np.ndarray, spec: GridSpec, t: float) -> list[np.ndarray]:
    n = spec.n
    F = np.fft.rfftn(values) * _poisson_multiplier(spec, float(t))
    axes = tuple(range(n))
    out = [np.fft.irfftn(F, s=spec.shape, axes=axes)]
    out += [np.fft.irfftn(F * _riesz_multiplier(spec, j), s=spec.shape, axes=axes) for j in range(n)]
    return out


def conjugate_system(f: ScalarField, t: float) -> ConjugateSystem:
    if not t > 0:
        raise ValueError(f"height must be positive, got {t}")
    f.require_positive("f")
    comps = _system_arrays(f.values, f.spec, t)
    return ConjugateSystem(float(t), tuple(ScalarField(f.spec, c) for c in comps))


def system_magnitude_power(system: ConjugateSystem, eps: float) -> ScalarField:
    """Pointwise ``|F|^eps``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    m2 = system.magnitude_squared()
    vals = m2 if eps == 2 else m2 ** (eps / 2)
    return ScalarField(system.spec, vals)


def magnitude_power_at(f: ScalarField, t: float, eps: float) -> np.ndarray:
    """``|F|^eps`` at height ``t`` as a raw array (no positivity check)."""
    m2 = sum(c**2 for c in _system_arrays(f.values, f.spec, t))
    return m2 ** (eps / 2)


# -- dyadic maximal function --------------------------------------------------------


def maximal_dyadic(f: ScalarField) -> ScalarField:
    """Sup over the dyadic cubes containing each point of the mean of ``|f|``."""
    a = np.abs(f.values)
    out = a.copy()
    for level in range(f.spec.max_level):
        means = _blocks(a, level)[0].mean(axis=tuple(range(1, 2 * f.spec.n, 2)))
        m = f.spec.N >> level
        up = means
        for d in range(f.spec.n):
            up = np.repeat(up, m, axis=d)
        np.maximum(out, up, out=out)
    return ScalarField(f.spec, out)
