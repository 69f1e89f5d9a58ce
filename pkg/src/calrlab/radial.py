"""Exact Dirichlet energies and piecewise radial potentials for one mode.

A degree-k mode is u = (b r^k + c r^{-k-1}) Y_k^l with orthonormal Y.
Its Dirichlet integral over a spherical annulus has the closed form

    int_{r0<|x|<r1} |grad u|^2
        = |b|^2 k (r1^{2k+1} - r0^{2k+1})
        + |c|^2 (k+1) (r0^{-2k-1} - r1^{-2k-1});

the grow/decay cross terms cancel identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scaled import ScaledComplex

__all__ = ["mode_shell_energy", "mode_shell_energy_float", "RadialSegment", "PiecewiseRadialMode"]


def _as_scaled(z) -> ScaledComplex:
    return z if isinstance(z, ScaledComplex) else ScaledComplex(z)


def mode_shell_energy(k: int, b, c, r0: float, r1: float) -> ScaledComplex:
    """Exact Dirichlet integral of (b r^k + c r^{-k-1}) Y over r0 < |x| < r1.

    Parameters
    ----------
    k : int
        Degree, k >= 0.
    b, c : complex or ScaledComplex
        Growing and decaying radial coefficients.
    r0, r1 : float
        Annulus radii, 0 <= r0 < r1; r0 = 0 requires c = 0 and
        r1 = math.inf requires b = 0.

    Returns
    -------
    ScaledComplex
        Real-valued energy.
    """
    if k < 0:
        raise ValueError(f"degree must be nonnegative, got {k}")
    if not 0.0 <= r0 < r1:
        raise ValueError(f"need 0 <= r0 < r1, got r0={r0}, r1={r1}")
    b = _as_scaled(b)
    c = _as_scaled(c)
    if r0 == 0.0 and not c.is_zero:
        raise ValueError("decaying part r^{-k-1} has a singular integrand at r0 = 0")
    if math.isinf(r1) and not b.is_zero:
        raise ValueError("growing part r^k has infinite energy out to r1 = inf")

    total = ScaledComplex(0.0)
    if not b.is_zero:
        p1 = ScaledComplex.from_pow(r1, 2 * k + 1)
        p0 = ScaledComplex.from_pow(r0, 2 * k + 1) if r0 > 0 else ScaledComplex(0.0)
        total = total + b.abs2() * k * (p1 - p0)
    if not c.is_zero:
        q0 = ScaledComplex.from_pow(r0, -(2 * k + 1))
        q1 = ScaledComplex.from_pow(r1, -(2 * k + 1)) if not math.isinf(r1) else ScaledComplex(0.0)
        total = total + c.abs2() * (k + 1) * (q0 - q1)
    return total


def mode_shell_energy_float(k: int, b: complex, c: complex, r0: float, r1: float) -> float:
    """Float convenience wrapper around mode_shell_energy."""
    return mode_shell_energy(k, b, c, r0, r1).to_float()


@dataclass(frozen=True)
class RadialSegment:
    """One annulus r_lo < r <= r_hi carrying R(r) = grow*r^k + decay*r^{-k-1}."""

    r_lo: float
    r_hi: float
    grow: complex = 0.0
    decay: complex = 0.0


@dataclass(frozen=True)
class PiecewiseRadialMode:
    """Degree-k potential assembled from contiguous radial segments.

    Used for the explicit variational test functions and for interface
    residual checks; coefficients are native complex (adequate for the
    desk-scale degrees these families are evaluated at).
    """

    k: int
    segments: tuple[RadialSegment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("need at least one segment")
        for lo, hi in zip(self.segments, self.segments[1:]):
            if not math.isclose(lo.r_hi, hi.r_lo, rel_tol=1e-12):
                raise ValueError("segments must be contiguous")

    def segment_at(self, r: float) -> RadialSegment:
        for seg in self.segments:
            if seg.r_lo < r <= seg.r_hi or (seg.r_lo == 0.0 and r == 0.0):
                return seg
        if r > self.segments[-1].r_hi:
            return self.segments[-1]
        return self.segments[0]

    def radial_value(self, r: float) -> complex:
        seg = self.segment_at(r)
        k = self.k
        val = seg.grow * r**k if seg.grow else 0j
        if seg.decay:
            val += seg.decay * r ** (-k - 1)
        return val

    def radial_slope(self, r: float) -> complex:
        seg = self.segment_at(r)
        k = self.k
        val = seg.grow * k * r ** (k - 1) if seg.grow else 0j
        if seg.decay:
            val -= seg.decay * (k + 1) * r ** (-k - 2)
        return val

    def _one_sided(self, r: float, side: int) -> tuple[complex, complex]:
        """(value, slope) evaluated with the segment on the given side of r."""
        idx = None
        for i, seg in enumerate(self.segments):
            if math.isclose(seg.r_hi, r, rel_tol=1e-12):
                idx = i if side < 0 else min(i + 1, len(self.segments) - 1)
                break
        if idx is None:
            idx = self.segments.index(self.segment_at(r))
        seg = self.segments[idx]
        k = self.k
        val = (seg.grow * r**k if seg.grow else 0j) + (
            seg.decay * r ** (-k - 1) if seg.decay else 0j
        )
        slope = (seg.grow * k * r ** (k - 1) if seg.grow else 0j) - (
            seg.decay * (k + 1) * r ** (-k - 2) if seg.decay else 0j
        )
        return val, slope

    def energy(self) -> float:
        """Total Dirichlet integral over all segments (orthonormal Y)."""
        total = ScaledComplex(0.0)
        for seg in self.segments:
            total = total + mode_shell_energy(self.k, seg.grow, seg.decay, seg.r_lo, seg.r_hi)
        return total.to_float()

    def interface_residual(self, eps_by_segment) -> float:
        """Max relative mismatch of value and flux across interior interfaces.

        eps_by_segment gives the permittivity of each segment; the flux is
        eps * dR/dr.  Radii where a flux jump is intended (a source shell)
        should not be interior interfaces of admissibility checks, so the
        caller slices the segment list accordingly.
        """
        worst = 0.0
        for i in range(len(self.segments) - 1):
            r = self.segments[i].r_hi
            v_in, s_in = self._one_sided(r, -1)
            v_out, s_out = self._one_sided(r, +1)
            f_in = eps_by_segment[i] * s_in
            f_out = eps_by_segment[i + 1] * s_out
            v_scale = max(abs(v_in), abs(v_out), 1e-300)
            f_scale = max(abs(f_in), abs(f_out), 1e-300)
            worst = max(worst, abs(v_in - v_out) / v_scale, abs(f_in - f_out) / f_scale)
        return worst

    def flux_jump(self, r: float) -> complex:
        """Jump [dR/dr] across r (outside minus inside), no permittivity."""
        _, s_in = self._one_sided(r, -1)
        _, s_out = self._one_sided(r, +1)
        return s_out - s_in
