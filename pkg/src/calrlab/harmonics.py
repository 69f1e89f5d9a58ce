"""Orthonormal complex spherical harmonics on the unit sphere.

Normalization is unit L2 norm over the sphere with the Condon-Shortley
phase, so conj-symmetry reads Y(k,-l) = (-1)**l * conj(Y(k,l)) and
sum_l |Y(k,l)|^2 = (2k+1)/(4 pi).
"""

from __future__ import annotations

import math

from scipy.special import sph_harm_y

__all__ = ["eval_harmonic", "harmonic_sum_rule"]


def eval_harmonic(k: int, l: int, theta: float, phi: float) -> complex:
    """Evaluate Y_k^l at polar angle theta in [0, pi], azimuth phi.

    Parameters
    ----------
    k : int
        Degree, k >= 0.
    l : int
        Order, |l| <= k.
    theta, phi : float
        Polar and azimuthal angles in radians.

    Returns
    -------
    complex
        Orthonormalized Y_k^l(theta, phi).
    """
    if k < 0:
        raise ValueError(f"degree must be nonnegative, got k={k}")
    if abs(l) > k:
        raise ValueError(f"order out of range: |l|={abs(l)} > k={k}")
    if not 0.0 <= theta <= math.pi + 1e-12:
        raise ValueError(f"polar angle must lie in [0, pi], got {theta}")
    return complex(sph_harm_y(k, l, theta, phi))


def harmonic_sum_rule(k: int) -> float:
    """Value of sum_l |Y_k^l|^2, which is direction-independent."""
    return (2 * k + 1) / (4.0 * math.pi)
