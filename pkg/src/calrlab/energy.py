"""Dissipated energy, loss sweeps, and blow-up classification.

The dissipation is (eta/2) * int_D |grad u|^2 with u the transmission
solution normalized to the source's interior potential coefficients
beta_k^l.  Each mode is summed with the exact annulus energies, so no
asymptotic constant enters; for whole-space loss the core, the matrix
annulus up to the source shell, and the decaying field beyond it are
all included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import ModeSingularityError, PreconditionError
from .model import LayeredConfig, LossRegion, Materials, SourceKind, SourceSpectrum
from .modes import solve_mode_closed_form
from .radial import mode_shell_energy
from .scaled import ScaledComplex

__all__ = [
    "SelectionRule",
    "KSelection",
    "select_k_of_eta",
    "EnergyBreakdown",
    "dissipated_energy",
    "Adaptive",
    "FixedK",
    "GrowthFit",
    "Verdict",
    "EnergySweep",
    "eta_sweep",
    "SourceClass",
    "SourceClassification",
    "classify_source",
]


class SelectionRule(Enum):
    """Which geometric band family picks the working degree k(eta)."""

    SHELL = "shell"            # rho^k bands (shell-loss runs)
    WHOLE_SPACE = "whole_space"  # r_e^{-k} bands (whole-space runs)

    def base(self, cfg: LayeredConfig) -> float:
        return cfg.rho if self is SelectionRule.SHELL else 1.0 / cfg.r_e


@dataclass(frozen=True)
class KSelection:
    k: int
    clamped: bool = False


def select_k_of_eta(eta: float, cfg: LayeredConfig, rule: SelectionRule) -> KSelection:
    """Degree k with base^k < eta <= base^(k-1), base = rho or 1/r_e.

    Exact band boundaries (eta == base^m to machine precision) resolve
    to the smaller degree m.  Loss values above the k=1 band clamp to
    k=1 with a flag.
    """
    if eta <= 0.0:
        raise PreconditionError(f"k(eta) selection needs eta > 0, got {eta}")
    base = rule.base(cfg)
    if not 0.0 < base < 1.0:
        raise PreconditionError(f"selection base must be in (0,1), got {base}")
    if eta > 1.0:
        return KSelection(1, clamped=True)
    t = math.log(eta) / math.log(base)
    nearest = round(t)
    if abs(t - nearest) < 1e-12:
        k = max(int(nearest), 1)
    else:
        k = int(math.floor(t)) + 1
    return KSelection(max(k, 1), clamped=False)


@dataclass(frozen=True)
class EnergyBreakdown:
    """One dissipation evaluation: total, per-degree split, tail estimate."""

    eta: float
    k_eta: int | None
    total: ScaledComplex
    per_mode: dict[int, float]
    tail_bound: float
    status: str = "ok"

    @property
    def total_float(self) -> float:
        return self.total.to_float()


def _tail_bound(per_degree: dict[int, float]) -> float:
    """Geometric extrapolation of the trailing per-degree contributions.

    The trailing ratio is widened by ((K+1)/K)^7 to absorb the
    polynomial prefactors of the coefficient envelopes (degree at most
    five for the patterns used here), so the result upper-bounds the
    contribution of every degree beyond the stored truncation for
    geometrically decaying sources.  A trailing ratio at or above one
    yields an honest +inf.
    """
    ks = sorted(k for k, v in per_degree.items() if v > 0.0)
    if len(ks) < 3 or ks[-1] - ks[-2] != 1 or ks[-2] - ks[-3] != 1:
        return 0.0
    window = [k for k in ks[-7:] if k - 1 in per_degree and per_degree[k - 1] > 0.0]
    ratios = [per_degree[k] / per_degree[k - 1] for k in window]
    if not ratios:
        return 0.0
    top = ks[-1]
    x = max(ratios) * ((top + 1) / top) ** 7
    if x >= 1.0:
        return math.inf
    return per_degree[top] * x / (1.0 - x)


def dissipated_energy(cfg: LayeredConfig, src: SourceSpectrum) -> EnergyBreakdown:
    """Exact spectral dissipation (eta/2) * int_D |grad u|^2.

    Raises
    ------
    PreconditionError
        If the source shell does not lie outside the device.
    ModeSingularityError
        Propagated from the mode solver with the offending degree.
    """
    if src.q <= cfg.r_e:
        raise PreconditionError(
            f"source must lie outside the device: q={src.q} <= r_e={cfg.r_e}"
        )
    whole = cfg.loss_region is LossRegion.WHOLE_SPACE
    total = ScaledComplex(0.0)
    per_degree: dict[int, float] = {}
    q_pow = {}
    for m in src.modes():
        beta = src.multipole_coefficient(m)
        if beta == 0:
            continue
        mode = solve_mode_closed_form(cfg, m.k)
        k = m.k
        contrib = mode_shell_energy(k, mode.b, mode.c, cfg.r_i, cfg.r_e)
        if whole:
            contrib = contrib + mode_shell_energy(k, mode.a, 0.0, 0.0, cfg.r_i)
            contrib = contrib + mode_shell_energy(k, 1.0, mode.d, cfg.r_e, src.q)
            if k not in q_pow:
                q_pow[k] = ScaledComplex.from_pow(src.q, 2 * k + 1)
            exterior = q_pow[k] + mode.d
            contrib = contrib + mode_shell_energy(k, 0.0, exterior, src.q, math.inf)
        weighted = contrib * (abs(beta) ** 2 * cfg.eta / 2.0)
        total = total + weighted
        per_degree[k] = per_degree.get(k, 0.0) + weighted.to_float()
    return EnergyBreakdown(
        eta=cfg.eta,
        k_eta=None,
        total=total,
        per_mode=per_degree,
        tail_bound=_tail_bound(per_degree),
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Adaptive:
    """Re-pick k(eta) and rebuild the k-linked materials at every point."""

    rule: SelectionRule
    materials: Materials = Materials.PLASMONIC
    core: complex = 1.0


@dataclass(frozen=True)
class FixedK:
    """Build the k-linked materials once from a fixed degree."""

    k0: int
    materials: Materials = Materials.PLASMONIC
    core: complex = 1.0


class Verdict(Enum):
    BLOWUP = "blowup"
    BOUNDED = "bounded"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares line through log E against the sweep abscissa."""

    slope: float
    intercept: float
    residual: float
    abscissa: str  # "k_eta" or "log_inv_eta"


@dataclass(frozen=True)
class EnergySweep:
    points: tuple[EnergyBreakdown, ...]
    growth_fit: GrowthFit
    verdict: Verdict


def _fit_line(xs, ys) -> tuple[float, float, float]:
    n = len(xs)
    xbar = sum(xs) / n
    ybar = sum(ys) / n
    sxx = sum((x - xbar) ** 2 for x in xs)
    if sxx == 0.0:
        return 0.0, ybar, 0.0
    slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / sxx
    intercept = ybar - slope * xbar
    rms = math.sqrt(sum((y - slope * x - intercept) ** 2 for x, y in zip(xs, ys)) / n)
    return slope, intercept, rms


def _classify_sweep(points) -> tuple[GrowthFit, Verdict]:
    ok = [p for p in points if p.status == "ok"]
    positive = [p for p in ok if not p.total.is_zero and p.total_float != math.inf]
    if not positive:
        return GrowthFit(0.0, 0.0, 0.0, "log_inv_eta"), (
            Verdict.BOUNDED if ok else Verdict.INCONCLUSIVE
        )
    adaptive = all(p.k_eta is not None for p in positive)
    if adaptive:
        xs = [float(p.k_eta) for p in positive]
        abscissa = "k_eta"
    else:
        xs = [math.log(1.0 / p.eta) for p in positive]
        abscissa = "log_inv_eta"
    ys = [p.total.log_abs() for p in positive]
    slope, intercept, rms = _fit_line(xs, ys)
    fit = GrowthFit(slope, intercept, rms, abscissa)

    if len(positive) < 3:
        return fit, Verdict.INCONCLUSIVE
    start = len(positive) // 3
    monotone = all(
        ys[i + 1] > ys[i] for i in range(start, len(positive) - 1)
    )
    if monotone and slope > 0.0 and rms < 0.2:
        return fit, Verdict.BLOWUP
    tail = ys[-5:]
    if slope <= 0.0 or (max(tail) - min(tail)) <= math.log(3.0):
        return fit, Verdict.BOUNDED
    return fit, Verdict.INCONCLUSIVE


def sweep_configs(
    template: LayeredConfig,
    etas,
    coupling: Adaptive | FixedK | None,
) -> list[tuple[float, int | None, LayeredConfig]]:
    """Materialize (eta, k_eta, config) for every point of a loss grid."""
    etas = list(etas)
    if any(e2 >= e1 for e1, e2 in zip(etas, etas[1:])):
        raise PreconditionError("loss grid must be strictly decreasing")
    if isinstance(coupling, Adaptive):
        if any(e <= 0.0 for e in etas):
            raise PreconditionError("adaptive sweeps need strictly positive loss values")
    elif any(e < 0.0 for e in etas):
        raise PreconditionError("loss values must be nonnegative")

    if isinstance(coupling, FixedK):
        eps = coupling.materials.resolve(coupling.k0, template.loss_region, coupling.core)
        template = replace(template, eps_c=eps[0], eps_s=eps[1], eps_m=eps[2])

    out = []
    for eta in etas:
        k_eta = None
        cfg = template.with_eta(eta)
        if isinstance(coupling, Adaptive):
            k_eta = select_k_of_eta(eta, template, coupling.rule).k
            eps = coupling.materials.resolve(k_eta, template.loss_region, coupling.core)
            cfg = replace(cfg, eps_c=eps[0], eps_s=eps[1], eps_m=eps[2])
        out.append((eta, k_eta, cfg))
    return out


def eta_sweep(
    template: LayeredConfig,
    src: SourceSpectrum,
    etas,
    coupling: Adaptive | FixedK | None,
    pool_map=map,
) -> EnergySweep:
    """Drive dissipated_energy over a decreasing loss grid.

    With Adaptive coupling the degree k(eta) is re-selected per point
    and the k-linked materials rebuilt; with FixedK the materials are
    built once (points then carry k_eta = None).  Mode singularities
    annotate the point and the sweep continues.  pool_map may be an
    executor map; results are reduced in grid order either way.
    """

    def run_point(item):
        eta, k_eta, cfg = item
        try:
            bd = dissipated_energy(cfg, src)
            return replace(bd, k_eta=k_eta)
        except ModeSingularityError as exc:
            return EnergyBreakdown(eta, k_eta, ScaledComplex(0.0), {}, 0.0, status=str(exc))

    points = list(pool_map(run_point, sweep_configs(template, etas, coupling)))
    fit, verdict = _classify_sweep(points)
    return EnergySweep(tuple(points), fit, verdict)


# ---------------------------------------------------------------------------
# Source classification
# ---------------------------------------------------------------------------


class SourceClass(Enum):
    INSIDE_CRITICAL = "inside_critical"
    OUTSIDE_CRITICAL = "outside_critical"
    GROWTH_OK = "growth_ok"
    GROWTH_FAILS = "growth_fails"


@dataclass(frozen=True)
class SourceClassification:
    verdict: SourceClass
    limsup_rate: float | None = None
    growth_slope: float | None = None


def classify_source(src: SourceSpectrum, cfg: LayeredConfig) -> SourceClassification:
    """Blow-up relevance of a source spectrum.

    Multipole data is tested against the critical radius: the trailing
    root rate of sum_l |beta_k^l| is compared with 1/r*.  Surface data
    is tested for the growth condition k^{-1}|alpha_k|^2 (r_e^3/q^2)^k
    -> infinity by a monotone trend fit.
    """
    degrees = [k for k in src.degrees()
               if any(src.coeffs.get(m, 0) for m in src.modes() if m.k == k)]
    if len(degrees) < 6:
        raise PreconditionError(
            f"classification needs at least 6 nonzero degrees, got {len(degrees)}"
        )
    if src.kind is SourceKind.MULTIPOLE:
        rates = []
        for k in degrees:
            s = sum(abs(src.multipole_coefficient(m)) for m in src.modes() if m.k == k)
            if s > 0.0:
                rates.append(s ** (1.0 / k))
        tail = rates[len(rates) // 2:]
        limsup = max(tail)
        inside = limsup > 1.0 / cfg.critical_radius
        return SourceClassification(
            SourceClass.INSIDE_CRITICAL if inside else SourceClass.OUTSIDE_CRITICAL,
            limsup_rate=limsup,
        )

    ratio = cfg.r_e**3 / src.q**2
    xs, ys = [], []
    for k in degrees:
        a2 = sum(abs(src.surface_coefficient(m)) ** 2 for m in src.modes() if m.k == k)
        if a2 > 0.0:
            xs.append(float(k))
            ys.append(math.log(a2 / k) + k * math.log(ratio))
    slope, _, _ = _fit_line(xs, ys)
    half = len(ys) // 2
    trending = slope > 0.0 and all(ys[i + 1] > ys[i] for i in range(half, len(ys) - 1))
    return SourceClassification(
        SourceClass.GROWTH_OK if trending else SourceClass.GROWTH_FAILS,
        growth_slope=slope,
    )
