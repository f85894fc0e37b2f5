"""Dyadic BMO, Muckenhoupt A_p and reverse Hölder constants.

Every quantity here is a supremum over the dyadic cubes of the grid.  Each
level is reduced with numpy block means, and the result keeps the per-level
maxima and the cube that attains the overall maximum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import DyadicCube, GridSpec, ScalarField, _blocks

__all__ = [
    "CubeSupremumReport",
    "AlphaDecomposition",
    "AlphaSearchError",
    "bmo_norm",
    "ap_characteristic",
    "reverse_holder_constant",
    "a2_memberships",
    "find_alpha",
]


@dataclass(frozen=True)
class CubeSupremumReport:
    value: float
    worst_cube: DyadicCube
    per_level: dict[int, float]
    levels: tuple[int, ...]

    def spread(self, levels=None) -> float:
        """max / min of the per-level values over ``levels`` (default: all)."""
        vals = [self.per_level[k] for k in (levels if levels is not None else self.levels)]
        lo = min(vals)
        return float(max(vals) / lo) if lo > 0 else float("inf")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "worst_cube": self.worst_cube.to_dict(),
            "per_level": {str(k): v for k, v in self.per_level.items()},
        }


def _level_range(spec: GridSpec, min_level, max_level):
    if max_level is None:
        max_level = spec.max_level
    if not 0 <= min_level <= max_level or 2**max_level > spec.N:
        raise ValueError(f"bad level range {min_level}..{max_level} for N = {spec.N}")
    return range(min_level, max_level + 1)


def _scan(spec: GridSpec, per_cube, min_level, max_level) -> CubeSupremumReport:
    """Reduce ``per_cube(level) -> array (2**level,)*n`` to a supremum report."""
    per_level = {}
    best = None
    for level in _level_range(spec, min_level, max_level):
        vals = per_cube(level)
        i = int(np.argmax(vals))
        v = float(vals.flat[i])
        per_level[level] = v
        # strict > keeps the coarsest, lexicographically first maximizer
        if best is None or v > best[0]:
            best = (v, DyadicCube(level, tuple(int(k) for k in np.unravel_index(i, vals.shape))))
    return CubeSupremumReport(best[0], best[1], per_level, tuple(per_level))


def _means(values, level, keepdims=False):
    v, inner = _blocks(values, level)
    return v.mean(axis=inner, keepdims=keepdims), v, inner


def bmo_norm(u: ScalarField, min_level: int = 0, max_level: int | None = None) -> CubeSupremumReport:
    """Dyadic BMO seminorm: sup over cubes of the mean of ``|u - <u>_Q|``."""

    def osc(level):
        m, v, inner = _means(u.values, level, keepdims=True)
        return np.abs(v - m).mean(axis=inner)

    return _scan(u.spec, osc, min_level, max_level)


def ap_characteristic(w: ScalarField, p: float = 2.0, min_level: int = 0, max_level: int | None = None) -> CubeSupremumReport:
    """Dyadic ``[w]_{A_p} = sup_Q <w>_Q <w^{-1/(p-1)}>_Q^{p-1}``."""
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    w.require_positive("weight")
    dual = w.values ** (-1.0 / (p - 1))

    def char(level):
        with np.errstate(over="ignore"):
            return _means(w.values, level)[0] * _means(dual, level)[0] ** (p - 1)

    return _scan(w.spec, char, min_level, max_level)


def reverse_holder_constant(f1: ScalarField, q: float, min_level: int = 0, max_level: int | None = None) -> CubeSupremumReport:
    """``sup_Q <f1^q>_Q / <f1>_Q^q``; always >= 1 by Jensen."""
    if not q > 1:
        raise ValueError(f"q must exceed 1, got {q}")
    f1.require_positive("f1")
    fq = f1.values**q

    def ratio(level):
        return _means(fq, level)[0] / _means(f1.values, level)[0] ** q

    return _scan(f1.spec, ratio, min_level, max_level)


# -- the exponent search ------------------------------------------------------


class AlphaSearchError(ValueError):
    def __init__(self, message, a2_value):
        super().__init__(message)
        self.a2_value = a2_value


@dataclass(frozen=True)
class AlphaDecomposition:
    """``f = v**alpha`` with ``[v^2]_{A_2} <= tau``."""

    alpha: float
    v: ScalarField
    a2_of_v_squared: float
    tau: float
    memberships: dict[str, float] = field(default_factory=dict)


def a2_memberships(v: ScalarField) -> dict[str, float]:
    """Dyadic A_2 characteristics of ``v``, ``1/v``, ``v^2`` and ``1/v^2``."""
    vals = v.values
    out = {}
    for name, arr in (("v", vals), ("1/v", 1 / vals), ("v^2", vals**2), ("1/v^2", vals**-2.0)):
        out[name] = ap_characteristic(ScalarField(v.spec, arr), 2).value
    return out


def find_alpha(f: ScalarField, tau: float = 4.0, max_doublings: int = 16) -> AlphaDecomposition:
    """Smallest ``alpha`` in ``1, 2, 4, ..., 2**max_doublings`` with ``[f^(2/alpha)]_{A_2} <= tau``.

    Raises
    ------
    AlphaSearchError
        If no candidate passes; carries the last measured A_2 value.
    """
    if not tau > 1:
        raise ValueError(f"threshold must exceed 1, got {tau}")
    f.require_positive("f")
    logf = np.log(f.values)
    a2 = float("inf")
    for e in range(max_doublings + 1):
        alpha = float(2**e)
        v = f.values if e == 0 else np.exp(logf / alpha)
        with np.errstate(over="ignore"):
            # an overflowing v^2 just means this alpha is too small
            v2 = v * v
        if not np.all(np.isfinite(v2)) or not np.all(v2 > 0):
            continue
        a2 = ap_characteristic(ScalarField(f.spec, v2), 2).value
        if a2 <= tau:
            vf = f if e == 0 else ScalarField(f.spec, v)
            return AlphaDecomposition(alpha, vf, a2, tau, a2_memberships(vf))
    raise AlphaSearchError(
        f"no alpha <= 2**{max_doublings} brings [v^2]_A2 below {tau}; last value {a2:.6g}", a2
    )
