"""Factorization ``f = (g1 / g2) ** alpha`` with Riesz-dominated ``g1, g2``.

Given ``f = v ** alpha`` with ``v^2`` in A_2, the operator

    S(g) = sum_j |R_j g| + sum_j |R_j(g v)| / v

is bounded on L^2, L^2(v) and L^2(v^2).  Starting from a ball indicator
``f_0`` and iterating ``f_k = S f_{k-1}``, the series ``g2 = sum beta^k f_k``
converges for small ``beta`` and satisfies ``|R_j g2| <= g2 / beta``
pointwise; ``g1 = v g2`` satisfies the same bound.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .grid import ScalarField, box_center, generate_field, norm
from .reports import VerificationReport
from .rfld import read_rfld, write_rfld
from .transforms import riesz_all
from .weights import find_alpha

log = logging.getLogger(__name__)

__all__ = [
    "ConstructionConfig",
    "OperatorNormEstimates",
    "ConstructionResult",
    "FactorizationError",
    "SeriesDivergenceError",
    "apply_S",
    "estimate_operator_norms",
    "initial_term",
    "build_factorization",
    "certify_factorization",
    "write_manifest",
    "read_manifest",
]


class FactorizationError(RuntimeError):
    pass


class SeriesDivergenceError(FactorizationError):
    pass


def _S_values(g: np.ndarray, v: np.ndarray, spec) -> np.ndarray:
    out = np.zeros_like(g)
    for r in riesz_all(g, spec):
        out += np.abs(r)
    acc = np.zeros_like(g)
    for r in riesz_all(g * v, spec):
        acc += np.abs(r)
    return out + acc / v


def apply_S(g: ScalarField, v: ScalarField) -> ScalarField:
    if g.spec != v.spec:
        raise ValueError("g and v live on different grids")
    if np.any(v.values == 0):
        raise ZeroDivisionError("v has zero values")
    v.require_positive("v")
    return ScalarField(g.spec, _S_values(g.values, v.values, g.spec))


@dataclass(frozen=True)
class OperatorNormEstimates:
    c0: float  # L^2 -> L^2
    c1: float  # L^2(v^2) -> L^2(v^2)
    cv: float  # L^2(v) -> L^2(v)
    probes: int
    iterations: int
    sigma: float
    observed: dict[str, float] = field(default_factory=dict)

    @property
    def beta_max(self) -> float:
        return min(1 / (2 * self.c0), 1 / (2 * self.c1), 1 / (2 * self.cv))


def initial_term(spec) -> ScalarField:
    """Indicator of the ball of radius L/4 around the box center."""
    return generate_field(spec, "ball_indicator", {"center": box_center(spec), "radius": spec.L / 4, "floor": 0.0})


def estimate_operator_norms(v: ScalarField, probe_count: int = 8, iterations: int = 4, sigma: float = 2.0,
                            seed: int | None = 0, extra_probes=()) -> OperatorNormEstimates:
    """Empirical bounds for S on the three weighted L^2 spaces.

    Each probe (``probe_count`` Gaussian white-noise fields, the ball
    indicator, and any ``extra_probes``) is pushed through S ``iterations``
    times; the largest ratio ``||S g|| / ||g||`` seen in each space is then
    multiplied by ``sigma``.
    """
    if probe_count < 4 or iterations < 2 or sigma < 1:
        raise ValueError("need probe_count >= 4, iterations >= 2, sigma >= 1")
    spec = v.spec
    v.require_positive("v")
    rng = np.random.default_rng(seed)
    probes = [rng.standard_normal(spec.shape) for _ in range(probe_count)]
    probes.append(initial_term(spec).values)
    probes += [np.asarray(p.values if isinstance(p, ScalarField) else p, dtype=float) for p in extra_probes]

    weights = {"c0": None, "c1": ScalarField(spec, v.values**2), "cv": v}
    observed = {}
    for name, w in weights.items():
        worst = 0.0
        for p in probes:
            g = ScalarField(spec, p)
            ng = norm(g, 2, w)
            if ng == 0:
                raise ValueError("probe with zero norm")
            for _ in range(iterations):
                s = apply_S(g, v)
                ns = norm(s, 2, w)
                worst = max(worst, ns / ng)
                if ns == 0:
                    break
                g, ng = s.with_values(s.values / ns), 1.0
        observed[name] = worst
    return OperatorNormEstimates(
        sigma * observed["c0"], sigma * observed["c1"], sigma * observed["cv"],
        len(probes), iterations, sigma, observed,
    )


@dataclass(frozen=True)
class ConstructionConfig:
    tau: float = 4.0
    sigma: float = 2.0
    probe_count: int = 8
    iterations: int = 4
    seed: int | None = 0
    tail_tol: float = 1e-10
    k_max: int = 64


@dataclass(frozen=True, eq=False)
class ConstructionResult:
    g1: ScalarField
    g2: ScalarField
    v: ScalarField
    alpha: float
    beta: float
    norms: OperatorNormEstimates
    K: int
    tail_bound: float
    converged: bool
    certificate: dict[str, float]
    terms: tuple[ScalarField, ...] = field(repr=False, default=())
    a2_of_v_squared: float = float("nan")

    @property
    def f0(self) -> ScalarField:
        return self.terms[0]

    def recovered(self) -> np.ndarray:
        """``(g1 / g2) ** alpha``."""
        return (self.g1.values / self.g2.values) ** self.alpha


def _certificate(g1: ScalarField, g2: ScalarField) -> dict[str, float]:
    cert = {}
    for i, g in ((1, g1), (2, g2)):
        for j, r in enumerate(riesz_all(g.values, g.spec), start=1):
            cert[f"g{i},R{j}"] = float(np.max(np.abs(r) / g.values))
    return cert


def build_factorization(f: ScalarField, config: ConstructionConfig | None = None, **overrides) -> ConstructionResult:
    cfg = replace(config or ConstructionConfig(), **overrides)
    spec = f.spec
    f.require_positive("f")
    dec = find_alpha(f, cfg.tau)
    v = dec.v
    norms = estimate_operator_norms(v, cfg.probe_count, cfg.iterations, cfg.sigma, cfg.seed)
    beta = norms.beta_max

    f0 = initial_term(spec)
    terms = [f0.values]
    g2 = f0.values.copy()
    n0 = norm(f0)
    prev_norm = n0
    growth_streak = 0
    converged = False
    k = 0
    while k < cfg.k_max:
        nxt = _S_values(terms[-1], v.values, spec)
        k += 1
        terms.append(nxt)
        g2 += beta**k * nxt
        nk = float(np.sqrt(np.sum(nxt**2) * spec.cell_volume))
        # f_{k+1} / f_k exceeding 1/beta means the norm estimates were too small
        growth_streak = growth_streak + 1 if nk > prev_norm / beta else 0
        if growth_streak >= 3:
            raise SeriesDivergenceError(
                f"||f_k|| grows faster than 1/beta = {1 / beta:.4g} (k = {k}); rerun with a larger sigma")
        prev_norm = nk
        rel = beta**k * nk / float(np.sqrt(np.sum(g2**2) * spec.cell_volume))
        if rel < cfg.tail_tol:
            converged = True
            break
    if not converged:
        log.warning("series stopped at k_max = %d before reaching tail_tol", cfg.k_max)
    K = k
    terms.append(_S_values(terms[-1], v.values, spec))
    # anything at roundoff level relative to the peak is a numerical zero
    if not np.all(g2 > 1e-12 * g2.max()):
        idx = np.unravel_index(int(np.argmin(g2)), g2.shape)
        raise FactorizationError(f"g2 vanishes at grid point {tuple(int(i) for i in idx)}")

    q = beta * norms.c0
    tail = beta ** (K + 1) * float(np.sqrt(np.sum(terms[-1] ** 2) * spec.cell_volume))
    tail_bound = tail / (1 - q) if q < 1 else float("inf")

    g2f = ScalarField(spec, g2)
    g1f = ScalarField(spec, v.values * g2)
    return ConstructionResult(
        g1=g1f, g2=g2f, v=v, alpha=dec.alpha, beta=beta, norms=norms, K=K,
        tail_bound=tail_bound, converged=converged, certificate=_certificate(g1f, g2f),
        terms=tuple(ScalarField(spec, t) for t in terms), a2_of_v_squared=dec.a2_of_v_squared,
    )


def certify_factorization(f: ScalarField, result: ConstructionResult, tol: float = 1e-6,
                          recovery_tol: float = 1e-12) -> VerificationReport:
    """Re-check ``f = (g1/g2)^alpha``, ``|R_j g_i| <= g_i / beta``, ``g_i > 0``."""
    g1, g2 = result.g1, result.g2
    notes = []
    ok = True
    if g1.spec != f.spec or g2.spec != f.spec:
        return VerificationReport("certify_factorization", False, notes=["FAIL: grids differ"])

    with np.errstate(divide="ignore", invalid="ignore"):
        rec = (g1.values / g2.values) ** result.alpha
    err_arr = np.abs(f.values - rec)
    recovery = float(np.max(err_arr) / np.max(np.abs(f.values)))
    if not recovery <= recovery_tol:
        ok = False
        notes.append(f"FAIL: f recovery error {recovery:.3e} > {recovery_tol:g}")

    bound = 1 / result.beta
    cert = _certificate(g1, g2) if np.all(g1.values > 0) and np.all(g2.values > 0) else {}
    worst_ratio = max(cert.values(), default=float("inf"))
    if not worst_ratio <= bound * (1 + tol):
        ok = False
        notes.append(f"FAIL: max |R_j g_i| / g_i = {worst_ratio:.6g} exceeds 1/beta = {bound:.6g}")

    mins = {"min_g1": float(g1.values.min()), "min_g2": float(g2.values.min())}
    if not (mins["min_g1"] > 0 and mins["min_g2"] > 0):
        ok = False
        notes.append("FAIL: g1 or g2 not strictly positive")
    n1, n2 = norm(g1), norm(g2)
    if not (np.isfinite(n1) and np.isfinite(n2)):
        ok = False
        notes.append("FAIL: non-finite L2 norm")

    constants = {
        "recovery_error": recovery,
        "alpha": result.alpha,
        "beta": result.beta,
        "inv_beta": bound,
        "max_ratio": worst_ratio,
        **{f"ratio[{k}]": v for k, v in cert.items()},
        **mins,
        "norm_g1": n1,
        "norm_g2": n2,
        "K": result.K,
        "tail_bound": result.tail_bound,
    }
    worst_pt = np.unravel_index(int(np.argmax(err_arr)), err_arr.shape)
    return VerificationReport(
        "certify_factorization", ok, constants,
        worst={"recovery_point": [int(i) for i in worst_pt]},
        tolerances={"recovery": recovery_tol, "certificate_rel": tol},
        notes=notes,
    )


# -- manifest ------------------------------------------------------------------


def write_manifest(result: ConstructionResult, path, stem: str | None = None) -> Path:
    """JSON manifest plus ``<stem>.g1.rfld``, ``.g2.rfld``, ``.v.rfld`` beside it."""
    path = Path(path)
    stem = stem or path.stem
    files = {}
    for name in ("g1", "g2", "v"):
        fp = path.with_name(f"{stem}.{name}.rfld")
        write_rfld(fp, getattr(result, name))
        files[name] = fp.name
    nm = result.norms
    manifest = {
        "files": files,
        "alpha": result.alpha,
        "beta": result.beta,
        "K": result.K,
        "tail_bound": result.tail_bound,
        "converged": result.converged,
        "a2_of_v_squared": result.a2_of_v_squared,
        "norms": {k: v for k, v in asdict(nm).items()},
        "certificate": result.certificate,
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def read_manifest(path) -> ConstructionResult:
    path = Path(path)
    m = json.loads(path.read_text())
    fields = {k: read_rfld(path.with_name(v)) for k, v in m["files"].items()}
    nm = m["norms"]
    norms = OperatorNormEstimates(nm["c0"], nm["c1"], nm["cv"], nm["probes"], nm["iterations"], nm["sigma"],
                                  dict(nm.get("observed", {})))
    return ConstructionResult(
        g1=fields["g1"], g2=fields["g2"], v=fields["v"], alpha=m["alpha"], beta=m["beta"], norms=norms,
        K=m["K"], tail_bound=m["tail_bound"], converged=m["converged"], certificate=m["certificate"],
        a2_of_v_squared=m.get("a2_of_v_squared", float("nan")),
    )
