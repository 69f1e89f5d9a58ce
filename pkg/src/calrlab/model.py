"""Domain types: layered geometry, materials, loss placement, sources.

The structure is a concentric three-layer sphere: core |x| <= r_i,
plasmonic shell r_i < |x| <= r_e, and matrix outside.  A small loss
i*eta is added either on the shell only or on the whole space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

__all__ = [
    "LossRegion",
    "LayeredConfig",
    "ModeIndex",
    "SourceKind",
    "SourceSpectrum",
    "Materials",
    "critical_radius",
    "DEFAULT_K_MAX",
]

DEFAULT_K_MAX = 64


class LossRegion(Enum):
    SHELL = "shell"
    WHOLE_SPACE = "whole_space"


@dataclass(frozen=True)
class LayeredConfig:
    """Geometry, permittivities and loss placement of the layered sphere.

    Attributes
    ----------
    r_i, r_e : float
        Inner and outer radii, 0 < r_i < r_e.
    eps_c, eps_s, eps_m : complex
        Core, shell (before loss) and matrix permittivities.
    eta : float
        Nonnegative loss parameter.
    loss_region : LossRegion
        Where the +i*eta loss is applied.
    """

    r_i: float
    r_e: float
    eps_c: complex = 1.0
    eps_s: complex = 1.0
    eps_m: complex = 1.0
    eta: float = 0.0
    loss_region: LossRegion = LossRegion.SHELL

    def __post_init__(self):
        if not 0.0 < self.r_i < self.r_e:
            raise ValueError(f"need 0 < r_i < r_e, got r_i={self.r_i}, r_e={self.r_e}")
        if self.eta < 0.0:
            raise ValueError(f"loss parameter must be nonnegative, got {self.eta}")

    @property
    def rho(self) -> float:
        return self.r_i / self.r_e

    @property
    def critical_radius(self) -> float:
        return math.sqrt(self.r_e**3 / self.r_i)

    @property
    def eps_core_eff(self) -> complex:
        if self.loss_region is LossRegion.WHOLE_SPACE:
            return complex(self.eps_c) + 1j * self.eta
        return complex(self.eps_c)

    @property
    def eps_shell_eff(self) -> complex:
        return complex(self.eps_s) + 1j * self.eta

    @property
    def eps_matrix_eff(self) -> complex:
        if self.loss_region is LossRegion.WHOLE_SPACE:
            return complex(self.eps_m) + 1j * self.eta
        return complex(self.eps_m)

    def eps_eff(self, r: float) -> complex:
        """Effective (lossy) permittivity at radius r."""
        if r <= self.r_i:
            return self.eps_core_eff
        if r <= self.r_e:
            return self.eps_shell_eff
        return self.eps_matrix_eff

    def with_eta(self, eta: float) -> "LayeredConfig":
        return replace(self, eta=eta)

    @property
    def is_homogeneous(self) -> bool:
        return self.eps_core_eff == self.eps_shell_eff == self.eps_matrix_eff


def critical_radius(cfg: LayeredConfig) -> float:
    """Critical source radius sqrt(r_e^3 / r_i)."""
    return cfg.critical_radius


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Spherical-harmonic index (degree k, order l)."""

    k: int
    l: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"degree must be nonnegative, got {self.k}")
        if abs(self.l) > self.k:
            raise ValueError(f"|l| <= k violated: k={self.k}, l={self.l}")


class SourceKind(Enum):
    #: coefficients are the surface-density expansion alpha_k^l on |x| = q
    DELTA_SHELL = "delta_shell"
    #: coefficients are the interior expansion beta_k^l of the source potential
    MULTIPOLE = "multipole"


def _alpha_to_beta(alpha: complex, k: int, q: float) -> complex:
    # single layer alpha*Y on |x|=q has potential -alpha*q^(1-k)/(2k+1) * r^k Y inside
    return -alpha * q ** (1 - k) / (2 * k + 1)


def _beta_to_alpha(beta: complex, k: int, q: float) -> complex:
    return -beta * (2 * k + 1) * q ** (k - 1)


@dataclass(frozen=True)
class SourceSpectrum:
    """Zero-mean source supported on the sphere |x| = q.

    Coefficients are stored per (k, l) with 1 <= k <= k_max; the mean
    (k = 0) component is excluded by construction.  The two views are
    related mode-wise by beta = -alpha * q^(1-k) / (2k+1).
    """

    q: float
    kind: SourceKind
    coeffs: dict[ModeIndex, complex] = field(default_factory=dict)
    k_max: int = DEFAULT_K_MAX

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError(f"support radius must be positive, got {self.q}")
        if self.k_max < 1:
            raise ValueError(f"k_max must be at least 1, got {self.k_max}")
        for m in self.coeffs:
            if m.k == 0:
                raise ValueError("zero-mean source cannot carry a k=0 component")
            if m.k > self.k_max:
                raise ValueError(f"stored degree {m.k} exceeds k_max={self.k_max}")

    # ---- constructors ---------------------------------------------------

    @classmethod
    def single(cls, q: float, k: int, l: int = 0, value: complex = 1.0,
               kind: SourceKind = SourceKind.MULTIPOLE,
               k_max: int | None = None) -> "SourceSpectrum":
        return cls(q, kind, {ModeIndex(k, l): complex(value)}, k_max or max(k, 1))

    @classmethod
    def geometric(cls, q: float, base: float, k_max: int = DEFAULT_K_MAX,
                  l: int = 0, kind: SourceKind = SourceKind.MULTIPOLE) -> "SourceSpectrum":
        """Coefficients base**(-k) at order l for every degree up to k_max."""
        coeffs = {ModeIndex(k, l): complex(base) ** (-k) for k in range(max(1, abs(l)), k_max + 1)}
        return cls(q, kind, coeffs, k_max)

    @classmethod
    def constant(cls, q: float, value: complex = 1.0, k_max: int = DEFAULT_K_MAX,
                 l: int = 0, kind: SourceKind = SourceKind.DELTA_SHELL) -> "SourceSpectrum":
        coeffs = {ModeIndex(k, l): complex(value) for k in range(max(1, abs(l)), k_max + 1)}
        return cls(q, kind, coeffs, k_max)

    # ---- views ----------------------------------------------------------

    def multipole_coefficient(self, m: ModeIndex) -> complex:
        """beta_k^l: interior expansion coefficient of the source potential."""
        c = self.coeffs.get(m, 0j)
        if self.kind is SourceKind.MULTIPOLE:
            return c
        return _alpha_to_beta(c, m.k, self.q)

    def surface_coefficient(self, m: ModeIndex) -> complex:
        """alpha_k^l: surface-density expansion coefficient on |x| = q."""
        c = self.coeffs.get(m, 0j)
        if self.kind is SourceKind.DELTA_SHELL:
            return c
        return _beta_to_alpha(c, m.k, self.q)

    def modes(self) -> list[ModeIndex]:
        return sorted(self.coeffs)

    def degrees(self) -> list[int]:
        return sorted({m.k for m in self.coeffs})

    def scaled(self, s: complex) -> "SourceSpectrum":
        return SourceSpectrum(self.q, self.kind,
                              {m: s * c for m, c in self.coeffs.items()}, self.k_max)

    def truncated(self, k_max: int) -> "SourceSpectrum":
        coeffs = {m: c for m, c in self.coeffs.items() if m.k <= k_max}
        return SourceSpectrum(self.q, self.kind, coeffs, k_max)


class Materials(Enum):
    """Named material patterns used by sweeps and bundled scenarios."""

    HOMOGENEOUS = "homogeneous"
    #: eps_c = 1, eps_s = -1 (the standard structure; no resonance in 3D)
    STANDARD = "standard"
    #: no core: eps_c = eps_s = -1 - 1/k0
    CORELESS = "coreless"
    #: k-linked pair: shell-loss runs use eps_c = (1+1/k)^2, eps_s = -1-1/k;
    #: whole-space runs keep the template core and set eps_s = -1-1/k
    PLASMONIC = "plasmonic"

    def resolve(self, k0: int | None, loss_region: LossRegion,
                core: complex = 1.0) -> tuple[complex, complex, complex]:
        """Return (eps_c, eps_s, eps_m) for degree parameter k0."""
        if self is Materials.HOMOGENEOUS:
            return 1.0, 1.0, 1.0
        if self is Materials.STANDARD:
            return 1.0, -1.0, 1.0
        if k0 is None or k0 < 1:
            raise ValueError(f"materials pattern {self.value!r} needs a degree k0 >= 1")
        eps_s = -1.0 - 1.0 / k0
        if self is Materials.CORELESS:
            return eps_s, eps_s, 1.0
        if loss_region is LossRegion.SHELL:
            return (1.0 + 1.0 / k0) ** 2, eps_s, 1.0
        return core, eps_s, 1.0
