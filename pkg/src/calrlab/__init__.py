"""Desk-scale laboratory for anomalous localized resonance in
three-dimensional concentric-sphere plasmonic structures.

Exact spherical-harmonic mode solutions, energy-dissipation sweeps with
loss-linked material rules, primal/dual variational bounds on explicit
test families, and a scenario-driven CLI.
"""

from .energy import (
    Adaptive,
    EnergyBreakdown,
    EnergySweep,
    FixedK,
    GrowthFit,
    KSelection,
    SelectionRule,
    SourceClass,
    SourceClassification,
    Verdict,
    classify_source,
    dissipated_energy,
    eta_sweep,
    select_k_of_eta,
)
from .errors import (
    CalrLabError,
    ModeSingularityError,
    OracleConvergenceError,
    PreconditionError,
)
from .field import DiagnosticPoint, FieldSample, calr_diagnostic, eval_field
from .harmonics import eval_harmonic
from .model import (
    LayeredConfig,
    LossRegion,
    Materials,
    ModeIndex,
    SourceKind,
    SourceSpectrum,
    critical_radius,
)
from .modes import (
    ModeCoefficients,
    ModeDiagnostics,
    denominator_magnitude,
    radial_oracle,
    solve_mode_closed_form,
    solve_mode_general,
)
from .radial import PiecewiseRadialMode, RadialSegment, mode_shell_energy
from .scaled import ScaledComplex
from .scenarios import Scenario, bundled_scenarios, get_scenario, parse_scenario
from .variational import (
    BoundReport,
    CrcMode,
    FamilyKind,
    TestFamily,
    dual_bound_r1,
    dual_bound_r2,
    primal_bound_crc,
    primal_bound_nr1,
    psi_hat_energy,
    psi_hat_profile,
)

__version__ = "0.1.0"
