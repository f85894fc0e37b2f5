"""Numerical checks for the Riesz-transform characterization of log f in BMO.

The sufficiency direction is checked step by step.  First, ``|F|^eps`` is
subharmonic for the conjugate harmonic system ``F``.  Second, it is
majorized by the Poisson extension of its own trace, with constant 1.
Third, the Poisson-averaged inequality ``P_t[f1^q] <= C1 (P_t f1)^q`` holds.
Fourth, the Poisson tail outside an expanded cube decays like
``1 / expansion``.  Last comes the reverse Hölder / BMO conclusion.
``roundtrip`` chains the factorization and the sufficiency checks.

Constants that are only known to exist are measured.  A check passes when
they are finite and stable across heights, levels or resolutions.
"""

from __future__ import annotations

import logging

import numpy as np

from .construction import ConstructionConfig, build_factorization, certify_factorization
from .grid import DyadicCube, GridSpec, ScalarField
from .reports import VerificationReport
from .transforms import _apply, _poisson_multiplier, laplacian, magnitude_power_at, riesz_all
from .weights import bmo_norm, reverse_holder_constant

log = logging.getLogger(__name__)

__all__ = [
    "default_epsilon",
    "check_majorization",
    "check_subharmonicity",
    "check_key_inequality",
    "phi_tail_norm",
    "check_sufficiency",
    "roundtrip",
]


def default_epsilon(n: int) -> float:
    """Exponent just above the subharmonicity threshold ``(n-1)/n``."""
    return (n - 1) / n + 0.1


def _check_eps(n, eps):
    if eps is None:
        return default_epsilon(n)
    if not eps > (n - 1) / n:
        raise ValueError(f"eps = {eps} must exceed (n-1)/n = {(n - 1) / n:g}")
    return float(eps)


def _poisson(values, spec, t):
    return _apply(values, _poisson_multiplier(spec, float(t)))


def check_majorization(f: ScalarField, eps: float | None = None, t0: float | None = None,
                       t_list=None, tol: float = 1e-6) -> VerificationReport:
    """``|F|^eps(x, t0 + t) <= P_t[|F|^eps(., t0)](x)`` with constant exactly 1."""
    spec = f.spec
    f.require_positive("f")
    eps = _check_eps(spec.n, eps)
    t0 = 0.05 * spec.L if t0 is None else float(t0)
    t_list = [0.05 * spec.L, 0.1 * spec.L] if t_list is None else [float(t) for t in t_list]
    if t0 <= 0 or any(t <= 0 for t in t_list):
        raise ValueError("heights must be positive")

    G = magnitude_power_at(f, t0, eps)
    residuals = {}
    worst = {"t": None, "point": None, "residual": -np.inf}
    for t in t_list:
        lhs = magnitude_power_at(f, t0 + t, eps)
        rhs = _poisson(G, spec, t)
        d = (lhs - rhs) / np.max(np.abs(rhs))
        i = int(np.argmax(d))
        residuals[t] = float(d.flat[i])
        if residuals[t] > worst["residual"]:
            worst = {"t": t, "point": [int(k) for k in np.unravel_index(i, d.shape)], "residual": residuals[t]}
    r = max(residuals.values())
    ok = r <= tol
    notes = [] if ok else [f"FAIL: majorization residual {r:.3e} > {tol:g}"]
    notes.append("decay at infinity is not applicable on the torus")
    return VerificationReport(
        "majorization", ok,
        {"max_residual": r, "max_positive_residual": max(r, 0.0), "eps": eps, "t0": t0,
         **{f"residual[t={t!r}]": v for t, v in residuals.items()}},
        worst, {"residual": tol}, notes, profiles={"per_height": residuals},
    )


def check_subharmonicity(f: ScalarField, eps: float, heights, h: float | None = None,
                         tol: float = 1e-5) -> VerificationReport:
    """Discrete Laplacian of ``|F|^eps`` on the slab grid x heights.

    ``heights`` must be equally spaced with step ``h``; the Laplacian is
    spectral in x and the 3-point difference in t, evaluated at the interior
    heights.
    """
    spec = f.spec
    f.require_positive("f")
    if not eps > 0:
        raise ValueError("eps must be positive")
    heights = np.asarray(heights, dtype=float)
    if heights.ndim != 1 or heights.size < 3:
        raise ValueError("need at least 3 heights")
    if np.any(heights <= 0):
        raise ValueError("heights must be positive")
    steps = np.diff(heights)
    h = float(steps[0]) if h is None else float(h)
    if h <= 0 or not np.allclose(steps, h, rtol=1e-9, atol=0):
        raise ValueError("heights must be equally spaced with step h")

    u = [magnitude_power_at(f, t, eps) for t in heights]
    scale = max(float(np.max(np.abs(a))) for a in u) / h**2
    mins = {}
    worst = {"t": None, "point": None}
    lap_min = np.inf
    for i in range(1, len(u) - 1):
        lap = laplacian(u[i], spec) + (u[i + 1] - 2 * u[i] + u[i - 1]) / h**2
        k = int(np.argmin(lap))
        mins[float(heights[i])] = float(lap.flat[k])
        if lap.flat[k] < lap_min:
            lap_min = float(lap.flat[k])
            worst = {"t": float(heights[i]), "point": [int(j) for j in np.unravel_index(k, lap.shape)]}
    violation = max(0.0, -lap_min)
    ok = lap_min >= -tol * scale
    notes = [] if ok else [f"FAIL: Laplacian {lap_min:.3e} below -{tol:g} * scale ({scale:.3e})"]
    return VerificationReport(
        "subharmonicity", ok,
        {"min_laplacian": lap_min, "violation": violation, "scale": scale, "relative_min": lap_min / scale,
         "eps": float(eps), "h": h},
        worst, {"relative": tol}, notes, profiles={"min_laplacian_per_height": mins},
    )


def check_key_inequality(f: ScalarField, q: float, t_list, stability: float = 1.5) -> VerificationReport:
    """Empirical ``C1 = sup P_t[f1^q] / (P_t f1)^q`` with ``f1 = f^(1/q)``."""
    spec = f.spec
    f.require_positive("f")
    if not q > 1:
        raise ValueError(f"q must exceed 1, got {q}")
    t_list = [float(t) for t in t_list]
    if not t_list or any(t <= 0 for t in t_list):
        raise ValueError("need positive heights")
    f1 = f.values ** (1.0 / q)
    per_t, min_ratio = {}, np.inf
    worst = {"t": None, "point": None}
    for t in t_list:
        ratio = _poisson(f1**q, spec, t) / _poisson(f1, spec, t) ** q
        i = int(np.argmax(ratio))
        per_t[t] = float(ratio.flat[i])
        min_ratio = min(min_ratio, float(ratio.min()))
        if per_t[t] >= max(per_t.values()):
            worst = {"t": t, "point": [int(k) for k in np.unravel_index(i, ratio.shape)]}
    C1 = max(per_t.values())
    spread = C1 / min(per_t.values())
    ok = bool(np.isfinite(C1) and spread < stability)
    notes = [] if ok else [f"FAIL: per-height maxima spread {spread:.3g} (limit {stability:g})"]
    return VerificationReport(
        "key_inequality", ok,
        {"C1": C1, "spread": spread, "min_ratio": min_ratio, "q": float(q)},
        worst, {"spread": stability}, notes, profiles={"C1_per_height": per_t},
    )


def phi_tail_norm(spec: GridSpec, cube: DyadicCube, expansion: float) -> float:
    """L1 norm of ``l / (l^2 + |x - y|^2)^((n+1)/2)`` off the expanded cube.

    ``x`` is the cube center and ``l`` its side; the expanded cube has side
    ``expansion * l`` about the same center.  Distances are periodic.
    Returns 0 when the expanded cube covers the whole box.
    """
    if expansion < 2:
        raise ValueError("expansion factor must be >= 2")
    if len(cube.index) != spec.n or 2**cube.level > spec.N:
        raise ValueError(f"cube {cube} incompatible with {spec}")
    if expansion * cube.side(spec) >= spec.L:
        log.info("expanded cube covers the box; complement is empty")
        return 0.0
    m = spec.N >> cube.level
    l = m * spec.h
    r2 = np.zeros(spec.shape)
    inside = np.ones(spec.shape, dtype=bool)
    half = 0.5 * expansion * m
    for d, k in enumerate(cube.index):
        # displacement from the center in cell units (half-integers: exact)
        c = k * m + 0.5 * m
        j = np.arange(spec.N, dtype=float)
        disp = np.mod(j - c + 0.5 * spec.N, spec.N) - 0.5 * spec.N
        s = [1] * spec.n
        s[d] = spec.N
        disp = disp.reshape(s)
        inside = inside & (disp >= -half) & (disp < half)
        r2 = r2 + (disp * spec.h) ** 2
    kern = l / (l * l + r2) ** ((spec.n + 1) / 2)
    return float(np.sum(kern[~inside]) * spec.cell_volume)


def check_sufficiency(f: ScalarField, rho: float = 1.0, eps: float | None = None,
                      max_level: int | None = None, spread_limit: float = 2.0,
                      name: str = "sufficiency") -> VerificationReport:
    """Measure ``c = max |R_j f^rho| / f^rho``, reverse Hölder and BMO of ``log f^rho``.

    Levels run from 0 to ``max_level``, by default the finest level whose
    cubes are still 4 cells wide.
    """
    spec = f.spec
    f.require_positive("f")
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    eps = _check_eps(spec.n, eps)
    q0 = 1 / eps
    if max_level is None:
        # single cells give RHI = 1 identically; keep cubes at least 4 cells wide
        max_level = max(spec.max_level - 2, 0)
    fr = f.values if rho == 1 else f.values**rho
    c = max(float(np.max(np.abs(r) / fr)) for r in riesz_all(fr, spec))
    rhi = reverse_holder_constant(ScalarField(spec, fr**eps), q0, 0, max_level)
    bmo = bmo_norm(ScalarField(spec, rho * np.log(f.values)), 0, max_level)
    spread = rhi.spread()
    notes = []
    ok = True
    if not np.isfinite(c):
        ok = False
        notes.append("FAIL: Riesz domination constant is not finite")
    if not spread <= spread_limit:
        ok = False
        notes.append(f"FAIL: reverse Hölder constant varies {spread:.3g}x across levels (limit {spread_limit:g})")
    if not np.isfinite(bmo.value):
        ok = False
        notes.append("FAIL: BMO norm not finite")
    return VerificationReport(
        name, ok,
        {"c": c, "rhi": rhi.value, "rhi_spread": spread, "bmo_log": bmo.value, "eps": eps, "q": q0, "rho": rho},
        {"rhi_cube": rhi.worst_cube.to_dict(), "bmo_cube": bmo.worst_cube.to_dict()},
        {"rhi_spread": spread_limit}, notes,
        profiles={"rhi_per_level": rhi.per_level, "bmo_per_level": bmo.per_level},
    )


def roundtrip(f: ScalarField, config: ConstructionConfig | None = None, tol: float = 1e-6,
              **overrides) -> VerificationReport:
    """Factorize ``f``, certify, check sufficiency on ``g1, g2`` and the BMO triangle bound."""
    spec = f.spec
    f.require_positive("f")
    result = build_factorization(f, config, **overrides)
    cert = certify_factorization(f, result, tol)
    s1 = check_sufficiency(result.g1, name="sufficiency_g1")
    s2 = check_sufficiency(result.g2, name="sufficiency_g2")

    b_f = bmo_norm(ScalarField(spec, np.log(f.values)))
    b1 = s1.constants["bmo_log"]
    b2 = s2.constants["bmo_log"]
    bound = abs(result.alpha) * (b1 + b2) * (1 + 1e-9)
    tri_ok = b_f.value <= bound
    tri = VerificationReport(
        "bmo_triangle", tri_ok,
        {"bmo_log_f": b_f.value, "bmo_log_g1": b1, "bmo_log_g2": b2, "alpha": result.alpha, "bound": bound},
        {"bmo_cube": b_f.worst_cube.to_dict()}, {"relative": 1e-9},
        [] if tri_ok else [f"FAIL: BMO(log f) = {b_f.value:.6g} > alpha (BMO g1 + BMO g2) = {bound:.6g}"],
        profiles={"bmo_log_f_per_level": b_f.per_level},
    )
    stages = [cert, s1, s2, tri]
    ok = all(s.passed for s in stages)
    return VerificationReport(
        "roundtrip", ok,
        {"alpha": result.alpha, "beta": result.beta, "K": result.K, "bmo_log_f": b_f.value,
         "c_g1": s1.constants["c"], "c_g2": s2.constants["c"]},
        {}, {"certificate_rel": tol},
        [f"{s.check}: {'pass' if s.passed else 'FAIL'}" for s in stages],
        stages=stages,
    )
