"""Primal upper bounds and dual lower bounds on the dissipated energy.

The primal functional is I(v, w) = (eta/2)||grad v||^2 + (1/(2 eta))||grad w||^2
over pairs satisfying div(eps grad v) - lap w = f; any admissible pair
bounds the dissipation from above.  The dual functional
J(v, psi) = <f, psi> - (eta/2)||grad v||^2 - (eta/2)||grad psi||^2 over
pairs with div(eps grad psi) + eta lap v = 0 bounds it from below.

All families here are explicit per-mode constructions, evaluated with
exact annulus energies and spectral pairings (Parseval on the source
sphere); no quadrature and no fitted constant enters the values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .energy import SelectionRule, select_k_of_eta
from .errors import ModeSingularityError, PreconditionError
from .model import LayeredConfig, LossRegion, ModeIndex, SourceSpectrum
from .radial import PiecewiseRadialMode, RadialSegment

__all__ = [
    "FamilyKind",
    "TestFamily",
    "BoundReport",
    "psi_hat_profile",
    "psi_hat_energy",
    "vhat_nr1_profile",
    "vhat_nr1_lambda",
    "vhat_nr1_flux_jump",
    "vhat_crc_profile",
    "vhat_crc_lambda",
    "CrcMode",
    "primal_bound_nr1",
    "dual_bound_r1",
    "dual_bound_r2",
    "primal_bound_crc",
]

_TOL = 1e-12


class FamilyKind(Enum):
    PSI_HAT = "psi_hat"
    VHAT_NR1 = "vhat_nr1"
    VHAT_CRC = "vhat_crc"
    VTILDE = "vtilde"


@dataclass(frozen=True)
class TestFamily:
    kind: FamilyKind
    k: int
    lam: complex

    def describe(self) -> str:
        lam = complex(self.lam)
        if lam.imag == 0.0:
            lam_txt = f"{lam.real:.17g}"
        else:
            lam_txt = f"{lam.real:.17g}{lam.imag:+.17g}j"
        return f"{self.kind.value}[k={self.k},lambda={lam_txt}]"


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: primal value = sum(parts), dual value =
    source pairing minus the energy parts."""

    eta: float
    value: float
    parts: dict[str, float]
    family: TestFamily
    kind: str  # "primal" or "dual"
    constraint_residual: float
    optimal_lambda: float | None = None
    optimal_value: float | None = None
    envelope: float | None = None

    def describe(self) -> str:
        return self.family.describe()


def _angular_weight(l: int, part: str) -> float:
    """L2 norm^2 of Re Y (or Im Y) relative to the complex harmonic."""
    if l == 0:
        return 1.0 if part == "re" else 0.0
    return 0.5


# ---------------------------------------------------------------------------
# Explicit families
# ---------------------------------------------------------------------------


def psi_hat_profile(k: int, r_e: float) -> PiecewiseRadialMode:
    """Kernel mode of the coefficient -1-1/k ball: r^k inside,
    r_e^{2k+1} r^{-k-1} outside; continuous with continuous A-flux."""
    return PiecewiseRadialMode(k, (
        RadialSegment(0.0, r_e, grow=1.0),
        RadialSegment(r_e, math.inf, decay=r_e ** (2 * k + 1)),
    ))


def psi_hat_energy(k: int, r_e: float) -> float:
    """Exact Dirichlet energy of the kernel mode: (2k+1) r_e^{2k+1}.

    Interior part k r_e^{2k+1} plus exterior part (k+1) r_e^{2k+1},
    with unit-norm angular factor.
    """
    if k < 1 or r_e <= 0.0:
        raise PreconditionError(f"need k >= 1 and r_e > 0, got k={k}, r_e={r_e}")
    return (2 * k + 1) * r_e ** (2 * k + 1)


def vhat_nr1_profile(k: int, r_e: float, q: float) -> PiecewiseRadialMode:
    """Admissible mode for the standard structure (eps = 1, -1, 1 with
    unit core radius): harmonic off the source sphere, where its flux
    jumps."""
    c2 = 2 * k / (2 * k + 1)
    a3 = (4 * k + 4 * k * k + r_e ** (2 * k + 1)) / (r_e ** (2 * k + 1) * (2 * k + 1) ** 2)
    c3 = 2 * k * (r_e ** (2 * k + 1) - 1.0) / (2 * k + 1) ** 2
    g4 = (
        q ** (2 * k + 1) * (1.0 + 4 * k * (k + 1) * r_e ** (-1 - 2 * k))
        + 2 * k * (r_e ** (2 * k + 1) - 1.0)
    ) / (2 * k + 1) ** 2
    return PiecewiseRadialMode(k, (
        RadialSegment(0.0, 1.0, grow=1.0),
        RadialSegment(1.0, r_e, grow=1.0 / (2 * k + 1), decay=c2),
        RadialSegment(r_e, q, grow=a3, decay=c3),
        RadialSegment(q, math.inf, decay=g4),
    ))


def vhat_nr1_flux_jump(k: int, r_e: float, q: float) -> float:
    """Radial-derivative jump of the profile across the source sphere."""
    return -(4 * k * (k + 1) + r_e ** (2 * k + 1)) * q ** (k - 1) / (
        r_e ** (2 * k + 1) * (2 * k + 1)
    )


def vhat_nr1_lambda(alpha: complex, k: int, r_e: float, q: float) -> complex:
    """Weight making the scaled profile solve the constraint with
    source density alpha."""
    return (
        -alpha
        * (2 * k + 1) * q * r_e / (4 * k * (k + 1) + r_e ** (2 * k + 1))
        * q ** (-k) * r_e ** (2 * k)
    )


def vhat_crc_profile(k: int, m: int, r_e: float, q: float) -> PiecewiseRadialMode:
    """Admissible mode for the unit-core structure with shell value
    -1-1/m; reduces to the standard-structure profile as m -> inf."""
    denom2 = (1 + 2 * k) * (1 + m)
    b2 = (1 + k + m) / denom2
    c2 = (k + 2 * k * m) / denom2
    denom34 = (2 * k + 1) ** 2 * m * (m + 1)
    re_p = r_e ** (2 * k + 1)
    b3 = ((m * m + m - k * (k + 1)) * re_p + k * (k + 1) * (2 * m + 1) ** 2) / (re_p * denom34)
    c3 = k * (2 * m + 1) * (k + m + 1) * (re_p - 1.0) / denom34
    g4 = (
        -(k + m + 1) * re_p * ((k - m) * q ** (2 * k + 1) + 2 * k * m + k)
        + k * (k + 1) * (2 * m + 1) ** 2 * q ** (2 * k + 1)
        + k * (2 * m + 1) * (k + m + 1) * re_p**2
    ) / (re_p * denom34)
    return PiecewiseRadialMode(k, (
        RadialSegment(0.0, 1.0, grow=1.0),
        RadialSegment(1.0, r_e, grow=b2, decay=c2),
        RadialSegment(r_e, q, grow=b3, decay=c3),
        RadialSegment(q, math.inf, decay=g4),
    ))


def vhat_crc_lambda(alpha: complex, k: int, m: int, r_e: float, q: float) -> complex:
    den = q ** (k - 1) * r_e ** (-2 * k - 1) * (
        (k - m) * (k + m + 1) * r_e ** (2 * k + 1) - k * (k + 1) * (2 * m + 1) ** 2
    )
    if den == 0.0:
        raise ModeSingularityError(k, "resonant weight denominator vanished")
    return alpha * (2 * k + 1) * m * (m + 1) / den


def vtilde_profile(m: int, q: float) -> PiecewiseRadialMode:
    """Source potential mode: r^m inside the source sphere, matched
    decay outside."""
    return PiecewiseRadialMode(m, (
        RadialSegment(0.0, q, grow=1.0),
        RadialSegment(q, math.inf, decay=q ** (2 * m + 1)),
    ))


def _single_layer(k: int, density: complex, a: float) -> list[tuple[float, complex, complex]]:
    """(radius, grow-inside, decay-outside) of w solving -lap w = density*Y on |x|=a."""
    amp = density * a ** (1 - k) / (2 * k + 1)
    return [(a, amp, amp * a ** (2 * k + 1))]


def _layered_profile(k: int, layers, radii) -> PiecewiseRadialMode:
    """Superpose single layers at the given radii into one piecewise mode."""
    cuts = sorted(set(radii))
    segs = []
    bounds = [0.0] + cuts + [math.inf]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        grow = 0j
        decay = 0j
        for a, g_in, c_out in layers:
            if hi <= a:
                grow += g_in
            else:
                decay += c_out
        segs.append(RadialSegment(lo, hi, grow=grow, decay=decay))
    return PiecewiseRadialMode(k, tuple(segs))


# ---------------------------------------------------------------------------
# Theorem-level evaluators
# ---------------------------------------------------------------------------


def _require(cond: bool, msg: str):
    if not cond:
        raise PreconditionError(msg)


def _close(x: complex, y: complex) -> bool:
    return abs(complex(x) - complex(y)) <= _TOL * max(1.0, abs(complex(y)))


def primal_bound_nr1(cfg: LayeredConfig, src: SourceSpectrum, eta: float) -> BoundReport:
    """Upper bound for the standard structure (unit core, shell -1),
    whole-space loss: I(v, 0) with the admissible family, exactly
    (eta/2) sum |lambda_k|^2 ||grad vhat_k||^2.
    """
    _require(cfg.loss_region is LossRegion.WHOLE_SPACE,
             "standard-structure bound needs whole-space loss")
    _require(abs(cfg.r_i - 1.0) <= _TOL, f"normalized core radius 1 required, got r_i={cfg.r_i}")
    _require(_close(cfg.eps_c, 1.0) and _close(cfg.eps_s, -1.0) and _close(cfg.eps_m, 1.0),
             "standard structure needs eps = (1, -1, 1)")
    _require(src.q > cfg.r_e, f"source radius q={src.q} must exceed r_e={cfg.r_e}")

    r_e, q = cfg.r_e, src.q
    total = 0.0
    residual = 0.0
    dominant = TestFamily(FamilyKind.VHAT_NR1, 1, 0.0)
    dominant_term = -1.0
    for m in src.modes():
        alpha = src.surface_coefficient(m)
        if alpha == 0:
            continue
        k = m.k
        lam = vhat_nr1_lambda(alpha, k, r_e, q)
        profile = vhat_nr1_profile(k, r_e, q)
        term = abs(lam) ** 2 * profile.energy()
        total += term
        inner = PiecewiseRadialMode(k, profile.segments[:3])
        residual = max(residual, inner.interface_residual([1.0, -1.0, 1.0]))
        jump = profile.flux_jump(q)
        residual = max(residual, abs(lam * jump - alpha) / max(abs(alpha), 1e-300))
        if term > dominant_term:
            dominant_term = term
            dominant = TestFamily(FamilyKind.VHAT_NR1, k, lam)
    value = 0.5 * eta * total
    return BoundReport(
        eta=eta,
        value=value,
        parts={"source_pairing": 0.0, "v_energy": value, "w_energy": 0.0},
        family=dominant,
        kind="primal",
        constraint_residual=residual,
    )


def _dual_mode_terms(src: SourceSpectrum, k: int, r_e: float) -> tuple[float, float]:
    """(pairing P, energy weight W) per unit lambda for the degree-k
    kernel family, picking the better of the real/imaginary parts for
    every order present."""
    q = src.q
    pair_const = q ** (1 - k) * r_e ** (2 * k + 1)
    energy_const = psi_hat_energy(k, r_e)
    P = 0.0
    W = 0.0
    found = False
    for m in src.modes():
        if m.k != k:
            continue
        alpha = src.surface_coefficient(m)
        if alpha == 0:
            continue
        candidates = []
        for part, comp in (("re", alpha.real), ("im", alpha.imag)):
            w = _angular_weight(m.l, part)
            if w > 0.0 and comp != 0.0:
                candidates.append((comp * comp / w, abs(comp), w))
        if not candidates:
            continue
        _, p_best, w_best = max(candidates)
        P += p_best * pair_const
        W += w_best * energy_const
        found = True
    if not found:
        raise PreconditionError(
            f"no usable degree-{k} component: both the real- and the "
            "imaginary-part families pair to zero"
        )
    return P, W


def dual_bound_r1(cfg: LayeredConfig, src: SourceSpectrum, k0: int,
                  lam: float | None = None) -> BoundReport:
    """Lower bound for the coreless ball with eps_s = -1 - 1/k0: the
    kernel mode costs only O(eta) energy while its source pairing is
    eta-independent, so the optimized bound grows like 1/eta.
    """
    _require(cfg.loss_region is LossRegion.WHOLE_SPACE, "coreless bound needs whole-space loss")
    eps_target = -1.0 - 1.0 / k0
    _require(_close(cfg.eps_c, cfg.eps_s), "coreless structure means core and shell coincide")
    _require(_close(cfg.eps_s, eps_target),
             f"coreless bound at degree {k0} needs eps_s = {eps_target}")
    _require(_close(cfg.eps_m, 1.0), "matrix permittivity must be 1")
    _require(src.q > cfg.r_e, f"source radius q={src.q} must exceed r_e={cfg.r_e}")

    eta = cfg.eta
    _require(eta > 0.0, "dual bound needs a positive loss")
    P, W = _dual_mode_terms(src, k0, cfg.r_e)
    lam_star = P / (eta * W) if P > 0 else 0.0
    j_star = P * P / (2.0 * eta * W) if P > 0 else 0.0
    if lam is None:
        lam = lam_star
    pairing = lam * P
    psi_energy = 0.5 * eta * lam * lam * W
    return BoundReport(
        eta=eta,
        value=pairing - psi_energy,
        parts={"source_pairing": pairing, "v_energy": 0.0, "w_energy": psi_energy},
        family=TestFamily(FamilyKind.PSI_HAT, k0, lam),
        kind="dual",
        constraint_residual=psi_hat_profile(k0, cfg.r_e).interface_residual(
            [eps_target, 1.0]
        ),
        optimal_lambda=lam_star,
        optimal_value=j_star,
    )


def dual_bound_r2(cfg: LayeredConfig, src: SourceSpectrum, eta: float,
                  lam: float | None = None) -> BoundReport:
    """Lower bound for the unit spherical core with isotropic eps_c and
    loss-linked shell -1 - 1/k(eta).

    The kernel mode is no longer eps-admissible across the core
    boundary; its defect is two spherical surface densities, and the
    compensating v is solved exactly per mode as single-layer
    potentials with cost ~ lambda^2 k/eta.
    """
    _require(cfg.loss_region is LossRegion.WHOLE_SPACE, "core bound needs whole-space loss")
    _require(abs(cfg.r_i - 1.0) <= _TOL, f"normalized core radius 1 required, got r_i={cfg.r_i}")
    _require(_close(cfg.eps_m, 1.0), "matrix permittivity must be 1")
    eps_c = complex(cfg.eps_c)
    _require(abs(eps_c.imag) <= _TOL and eps_c.real > 0.0,
             "core permittivity must be isotropic positive")
    _require(src.q < cfg.r_e ** 1.5,
             f"theorem hypothesis q < r_e^(3/2): q={src.q}, r_e^1.5={cfg.r_e**1.5:.6g}")
    _require(eta > 0.0, "dual bound needs a positive loss")

    k = select_k_of_eta(eta, cfg, SelectionRule.WHOLE_SPACE).k
    eps_s = -1.0 - 1.0 / k
    r_e = cfg.r_e
    P, W = _dual_mode_terms(src, k, r_e)

    # defect densities of div(eps grad psi_hat) at the material interfaces
    psi = psi_hat_profile(k, r_e)
    sigma_core = (eps_s - eps_c.real) * psi.radial_slope(1.0).real
    slope_in = eps_s * psi._one_sided(r_e, -1)[1].real
    slope_out = 1.0 * psi._one_sided(r_e, +1)[1].real
    sigma_edge = slope_out - slope_in

    # eta lap v = -sigma delta  <=>  -lap v = (sigma/eta) delta
    layers = _single_layer(k, sigma_core / eta, 1.0) + _single_layer(k, sigma_edge / eta, r_e)
    v_profile = _layered_profile(k, layers, [1.0, r_e])
    # same angular factor as psi, so it carries the same weight ratio
    w_ratio = W / psi_hat_energy(k, r_e)
    Ev = v_profile.energy() * w_ratio

    Q = 0.5 * eta * (W + Ev)
    lam_star = P / (2.0 * Q) if P > 0 else 0.0
    j_star = P * P / (4.0 * Q) if P > 0 else 0.0
    if lam is None:
        lam = lam_star
    pairing = lam * P
    psi_energy = 0.5 * eta * lam * lam * W
    v_energy = 0.5 * eta * lam * lam * Ev
    # residual of div(eps grad psi) + eta lap v = 0: the layer solve is
    # closed-form, so only the density bookkeeping can drift
    res = 0.0
    for a, sigma in ((1.0, sigma_core), (r_e, sigma_edge)):
        got = -eta * v_profile.flux_jump(a)
        want = sigma
        res = max(res, abs(got - want) / max(abs(want), abs(got), 1e-300))
    return BoundReport(
        eta=eta,
        value=pairing - psi_energy - v_energy,
        parts={"source_pairing": pairing, "v_energy": v_energy, "w_energy": psi_energy},
        family=TestFamily(FamilyKind.PSI_HAT, k, lam),
        kind="dual",
        constraint_residual=res,
        optimal_lambda=lam_star,
        optimal_value=j_star,
    )


class CrcMode(Enum):
    FIXED_K0 = "fixed_k0"
    ADAPTIVE_K = "adaptive_k"


def primal_bound_crc(cfg: LayeredConfig, src: SourceSpectrum, eta: float,
                     mode: CrcMode, k0: int | None = None) -> BoundReport:
    """Upper bound for the unit-core structure with shell -1 - 1/k_ref.

    With a fixed reference degree every mode uses the admissible family
    and w = 0.  With the loss-linked degree k(eta), the resonant mode
    is replaced by the source-potential mode and its interface defects
    are absorbed by w, solved exactly as two single layers.
    """
    _require(cfg.loss_region is LossRegion.WHOLE_SPACE, "crc bound needs whole-space loss")
    _require(abs(cfg.r_i - 1.0) <= _TOL, f"normalized core radius 1 required, got r_i={cfg.r_i}")
    _require(_close(cfg.eps_c, 1.0) and _close(cfg.eps_m, 1.0),
             "crc structure needs unit core and matrix permittivities")
    _require(src.q > cfg.r_e, f"source radius q={src.q} must exceed r_e={cfg.r_e}")
    _require(eta > 0.0, "bound needs a positive loss")
    r_e, q = cfg.r_e, src.q

    if mode is CrcMode.FIXED_K0:
        _require(k0 is not None and k0 >= 1, "fixed mode needs a reference degree k0")
        m_ref = int(k0)
    else:
        _require(q > cfg.critical_radius,
                 f"adaptive boundedness needs q > r* = {cfg.critical_radius:.6g}, got q={src.q}")
        m_ref = select_k_of_eta(eta, cfg, SelectionRule.WHOLE_SPACE).k
    eps_s = -1.0 - 1.0 / m_ref

    v_total = 0.0
    w_total = 0.0
    residual = 0.0
    dominant = TestFamily(FamilyKind.VHAT_CRC, m_ref, 0.0)
    dominant_term = -1.0
    for mi in src.modes():
        alpha = src.surface_coefficient(mi)
        if alpha == 0:
            continue
        k = mi.k
        if mode is CrcMode.ADAPTIVE_K and k == m_ref:
            lam = -alpha * q ** (1 - k) / (2 * k + 1)
            vt = vtilde_profile(k, q)
            term = abs(lam) ** 2 * vt.energy()
            v_total += term
            # defect densities of the source-potential mode at the interfaces
            s_core = -lam * (eps_s - 1.0) * vt.radial_slope(1.0)
            s_edge = -lam * (1.0 - eps_s) * vt.radial_slope(r_e)
            layers = _single_layer(k, s_core, 1.0) + _single_layer(k, s_edge, r_e)
            w_profile = _layered_profile(k, layers, [1.0, r_e])
            w_total += w_profile.energy()
            # -lap w reproduces the defect densities
            for a, s in ((1.0, s_core), (r_e, s_edge)):
                got = -w_profile.flux_jump(a)
                residual = max(residual, abs(got - s) / max(abs(s), abs(got), 1e-300))
            if term > dominant_term:
                dominant_term = term
                dominant = TestFamily(FamilyKind.VTILDE, k, lam)
            continue
        lam = vhat_crc_lambda(alpha, k, m_ref, r_e, q)
        profile = vhat_crc_profile(k, m_ref, r_e, q)
        term = abs(lam) ** 2 * profile.energy()
        v_total += term
        inner = PiecewiseRadialMode(k, profile.segments[:3])
        residual = max(residual, inner.interface_residual([1.0, eps_s, 1.0]))
        jump = profile.flux_jump(q)
        residual = max(residual, abs(lam * jump - alpha) / max(abs(alpha), 1e-300))
        if term > dominant_term:
            dominant_term = term
            dominant = TestFamily(FamilyKind.VHAT_CRC, k, lam)
    v_energy = 0.5 * eta * v_total
    w_energy = 0.5 / eta * w_total
    return BoundReport(
        eta=eta,
        value=v_energy + w_energy,
        parts={"source_pairing": 0.0, "v_energy": v_energy, "w_energy": w_energy},
        family=dominant,
        kind="primal",
        constraint_residual=residual,
    )
