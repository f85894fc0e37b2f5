"""Periodic grids, sampled scalar fields and the dyadic cube system.

Everything in this package lives on the torus ``[0, L)^n`` sampled at
``N`` points per axis, ``x = (L / N) * k``.  ``N`` is a power of two so that
the dyadic cubes of every level ``0 <= level <= log2(N)`` are unions of grid
cells.  Cubes are half-open, so each grid point belongs to exactly one cube
per level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "GridSpec",
    "ScalarField",
    "DyadicCube",
    "NormSpec",
    "make_grid",
    "box_center",
    "periodic_distance",
    "generate_field",
    "dyadic_cubes",
    "cube_average",
    "level_means",
    "norm",
    "field_compose",
]

FIELD_KINDS = ("constant", "single_mode", "ball_indicator", "power_weight", "random_bmo")


def _is_power_of_two(N) -> bool:
    return isinstance(N, (int, np.integer)) and N > 0 and (N & (N - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    n: int
    N: int
    L: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise TypeError(f"dimension must be an integer, got {self.n!r}")
        if not 1 <= self.n <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.n}")
        if not _is_power_of_two(self.N) or self.N < 8:
            raise ValueError(f"points per axis must be a power of two >= 8, got {self.N}")
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"period must be positive, got {self.L}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self) -> float:
        """Grid spacing."""
        return self.L / self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @property
    def volume(self) -> float:
        return self.L**self.n

    @property
    def max_level(self) -> int:
        return self.N.bit_length() - 1

    def axis(self) -> np.ndarray:
        return self.h * np.arange(self.N)

    def coords(self) -> list[np.ndarray]:
        """Open-mesh coordinate arrays, one per axis, broadcastable to ``shape``."""
        x = self.axis()
        out = []
        for d in range(self.n):
            s = [1] * self.n
            s[d] = self.N
            out.append(x.reshape(s))
        return out


def make_grid(n: int, N: int, L: float) -> GridSpec:
    return GridSpec(n, N, L)


def box_center(spec: GridSpec) -> np.ndarray:
    """Midpoint of the sample points, ``(L - h) / 2`` on every axis.

    This sits halfway between two grid points, so reflections through it
    never fix a grid point.
    """
    return np.full(spec.n, 0.5 * (spec.L - spec.h))


def periodic_distance(spec: GridSpec, center) -> np.ndarray:
    """Distance on the torus from ``center`` to every grid point."""
    center = np.broadcast_to(np.asarray(center, dtype=float), (spec.n,))
    r2 = np.zeros(spec.shape)
    for x, c in zip(spec.coords(), center):
        d = np.mod(x - c + 0.5 * spec.L, spec.L) - 0.5 * spec.L
        r2 = r2 + d * d
    return np.sqrt(r2)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Samples of a real function on the grid of ``spec`` (read-only)."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.size != self.spec.size:
            raise ValueError(f"expected {self.spec.size} values, got {v.size}")
        v = v.reshape(self.spec.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def flat(self) -> np.ndarray:
        """Values in row-major order."""
        return self.values.ravel()

    def is_positive(self) -> bool:
        return bool(np.all(self.values > 0))

    def require_positive(self, name: str = "field") -> "ScalarField":
        if not self.is_positive():
            raise ValueError(f"{name} must be strictly positive, min = {self.values.min():g}")
        return self

    def mean(self) -> float:
        return float(self.values.mean())

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.spec, values)


@dataclass(frozen=True)
class DyadicCube:
    level: int
    index: tuple[int, ...]

    def side(self, spec: GridSpec) -> float:
        return spec.L / 2**self.level

    def center(self, spec: GridSpec) -> np.ndarray:
        return (np.asarray(self.index) + 0.5) * self.side(spec)

    def cells_per_side(self, spec: GridSpec) -> int:
        return spec.N >> self.level

    def slices(self, spec: GridSpec) -> tuple[slice, ...]:
        m = self.cells_per_side(spec)
        return tuple(slice(k * m, (k + 1) * m) for k in self.index)

    def to_dict(self) -> dict:
        return {"level": self.level, "index": list(self.index)}


@dataclass(frozen=True)
class NormSpec:
    p: float = 2.0
    weight: ScalarField | None = None

    def __call__(self, f: ScalarField) -> float:
        return norm(f, self.p, self.weight)


def _check_level(spec: GridSpec, level: int):
    if level < 0 or 2**level > spec.N:
        raise ValueError(f"level {level} out of range for N = {spec.N}")


def dyadic_cubes(spec: GridSpec, min_level: int = 0, max_level: int | None = None) -> list[DyadicCube]:
    """All dyadic cubes of levels ``min_level..max_level``, lexicographic per level."""
    if max_level is None:
        max_level = spec.max_level
    if min_level < 0 or min_level > max_level:
        raise ValueError(f"bad level range {min_level}..{max_level}")
    _check_level(spec, max_level)
    return list(_iter_cubes(spec.n, min_level, max_level))


def _iter_cubes(n, min_level, max_level) -> Iterator[DyadicCube]:
    for level in range(min_level, max_level + 1):
        for idx in itertools.product(range(2**level), repeat=n):
            yield DyadicCube(level, idx)


def cube_average(f: ScalarField, cube: DyadicCube) -> float:
    _check_level(f.spec, cube.level)
    if len(cube.index) != f.spec.n or not all(0 <= k < 2**cube.level for k in cube.index):
        raise ValueError(f"cube {cube} incompatible with {f.spec}")
    return float(f.values[cube.slices(f.spec)].mean())


def _blocks(values: np.ndarray, level: int) -> tuple[np.ndarray, tuple[int, ...]]:
    # interleaved (B, m, B, m, ...) view; the odd axes run inside one cube
    n = values.ndim
    N = values.shape[0]
    B = 2**level
    if level < 0 or B > N:
        raise ValueError(f"level {level} out of range for N = {N}")
    m = N // B
    v = values.reshape(sum(((B, m) for _ in range(n)), ()))
    return v, tuple(range(1, 2 * n, 2))


def level_means(values: np.ndarray, level: int) -> np.ndarray:
    """Averages over every dyadic cube of one level, shape ``(2**level,) * n``."""
    v, inner = _blocks(np.asarray(values), level)
    return v.mean(axis=inner)


def norm(f: ScalarField, p: float = 2.0, weight: ScalarField | None = None) -> float:
    """Riemann-sum ``L^p`` norm, optionally against a positive weight."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(f.values) ** p
    if weight is not None:
        if weight.spec != f.spec:
            raise ValueError("weight lives on a different grid")
        weight.require_positive("weight")
        a = a * weight.values
    return float((a.sum() * f.spec.cell_volume) ** (1.0 / p))


# -- field generation -------------------------------------------------------


def generate_field(spec: GridSpec, kind: str, params: dict | None = None, seed: int | None = None) -> ScalarField:
    """Build one of the corpus fields.

    Parameters by kind:

    * ``constant``: ``value``
    * ``single_mode``: ``k`` (integer wavevector), ``amplitude``, ``phase``;
      values ``amplitude * cos(2 pi <k, x> / L + phase)``
    * ``ball_indicator``: ``center``, ``radius``, ``floor``; values
      ``1{|x - center| < radius} + floor`` (periodic distance)
    * ``power_weight``: ``center``, ``exponent``, ``r0 > 0``; values
      ``max(|x - center|, r0) ** exponent``
    * ``random_bmo``: ``amplitude``, ``smoothing > 0``, ``block_level``; the
      exponential of a random ``+-amplitude`` pattern on dyadic blocks,
      smoothed by a Gaussian of width ``smoothing``
    """
    params = dict(params or {})
    if kind == "constant":
        vals = np.full(spec.shape, float(params.get("value", 1.0)))
    elif kind == "single_mode":
        k = np.broadcast_to(np.asarray(params.get("k", (1,) + (0,) * (spec.n - 1)), dtype=float), (spec.n,))
        phase = float(params.get("phase", 0.0))
        arg = sum(2 * np.pi * kd / spec.L * x for kd, x in zip(k, spec.coords()))
        vals = float(params.get("amplitude", 1.0)) * np.cos(arg + phase)
    elif kind == "ball_indicator":
        center = params.get("center", box_center(spec))
        radius = float(params.get("radius", spec.L / 4))
        floor = float(params.get("floor", 0.0))
        if radius <= 0 or floor < 0:
            raise ValueError("ball_indicator needs radius > 0 and floor >= 0")
        vals = (periodic_distance(spec, center) < radius).astype(float) + floor
    elif kind == "power_weight":
        r0 = float(params.get("r0", 0.0))
        if r0 <= 0:
            raise ValueError("power_weight needs a regularization radius r0 > 0")
        center = params.get("center", box_center(spec))
        a = float(params.get("exponent", 0.5))
        vals = np.maximum(periodic_distance(spec, center), r0) ** a
    elif kind == "random_bmo":
        vals = np.exp(_random_block_pattern(spec, params, seed))
    else:
        raise ValueError(f"unknown field kind {kind!r}; expected one of {FIELD_KINDS}")
    return ScalarField(spec, vals)


def _random_block_pattern(spec: GridSpec, params: dict, seed) -> np.ndarray:
    amplitude = float(params.get("amplitude", 1.0))
    smoothing = float(params.get("smoothing", spec.L / 32))
    block_level = int(params.get("block_level", 3))
    if smoothing <= 0:
        raise ValueError("random_bmo needs a positive smoothing scale")
    if block_level < 0 or 2**block_level > spec.N:
        raise ValueError(f"block_level {block_level} out of range for N = {spec.N}")
    B = 2**block_level
    rng = np.random.default_rng(seed)
    signs = rng.choice([-1.0, 1.0], size=(B,) * spec.n)

    # exact Fourier coefficients of the block pattern so that the sampled
    # function does not depend on N (up to the Gaussian-damped tail)
    k = np.fft.fftfreq(spec.N, d=1.0 / spec.N)
    xi = 2 * np.pi * k / spec.L
    w = spec.L / B
    starts = w * np.arange(B)
    with np.errstate(divide="ignore", invalid="ignore"):
        E = np.exp(-1j * np.outer(xi, starts)) * ((1 - np.exp(-1j * xi * w)) / (1j * xi * spec.L))[:, None]
    E[k == 0, :] = w / spec.L
    E[np.abs(k) == spec.N // 2, :] = 0.0
    coef = signs.astype(complex)
    for d in range(spec.n):
        coef = np.moveaxis(np.tensordot(E, coef, axes=([1], [d])), 0, d)

    gauss = np.ones(spec.shape)
    for x in _axes_broadcast(xi, spec.n):
        gauss = gauss * np.exp(-0.5 * (x * smoothing) ** 2)
    pattern = np.fft.ifftn(coef * gauss).real * spec.size
    return amplitude * pattern


def _axes_broadcast(a: np.ndarray, n: int) -> list[np.ndarray]:
    out = []
    for d in range(n):
        s = [1] * n
        s[d] = a.size
        out.append(a.reshape(s))
    return out


# -- pointwise algebra ------------------------------------------------------

_UNARY = {"abs", "exp", "log", "pow", "scale", "max_with"}
_BINARY = {"add", "sub", "mul", "div"}


def field_compose(fields: ScalarField | Sequence[ScalarField], expression: str, arg: float | None = None) -> ScalarField:
    """Pointwise algebra on fields sharing one grid.

    ``expression`` is one of ``add``, ``sub``, ``mul``, ``div`` (two operands)
    or ``pow``, ``abs``, ``exp``, ``log``, ``scale``, ``max_with`` (one
    operand, ``arg`` carrying the exponent / factor / floor).
    """
    if isinstance(fields, ScalarField):
        fields = [fields]
    fields = list(fields)
    if not fields:
        raise ValueError("no operands")
    spec = fields[0].spec
    if any(f.spec != spec for f in fields):
        raise ValueError("operands live on different grids")

    if expression in _BINARY:
        if len(fields) != 2:
            raise ValueError(f"{expression} takes two fields")
        a, b = fields[0].values, fields[1].values
        if expression == "add":
            out = a + b
        elif expression == "sub":
            out = a - b
        elif expression == "mul":
            out = a * b
        else:
            if np.any(b == 0):
                raise ZeroDivisionError("divisor field has zero values")
            out = a / b
        return ScalarField(spec, out)

    if expression not in _UNARY:
        raise ValueError(f"unknown expression {expression!r}")
    if len(fields) != 1:
        raise ValueError(f"{expression} takes one field")
    a = fields[0].values
    if expression == "abs":
        out = np.abs(a)
    elif expression == "exp":
        out = np.exp(a)
    elif expression == "log":
        if np.any(a <= 0):
            raise ValueError("log of a non-positive value")
        out = np.log(a)
    elif expression == "pow":
        if arg is None:
            raise ValueError("pow needs an exponent")
        if float(arg) != int(arg) and np.any(a <= 0):
            raise ValueError("fractional power of a non-positive value")
        if arg < 0 and np.any(a == 0):
            raise ZeroDivisionError("negative power of a zero value")
        out = a if arg == 1 else a**arg
    elif expression == "scale":
        out = float(arg) * a
    else:
        out = np.maximum(a, float(arg))
    return ScalarField(spec, out)
