"""Declarative scenario files and the bundled catalogue.

A scenario is a JSON document pinning geometry, a material pattern, the
loss placement and grid, a spectral source, and the requested outputs.
Bundled scenarios reproduce the occurrence/nonoccurrence results at
desk scale; each carries the statement tag it demonstrates and the
verdict the theory predicts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .energy import Adaptive, FixedK, SelectionRule
from .errors import PreconditionError
from .model import LayeredConfig, LossRegion, Materials, SourceKind, SourceSpectrum

__all__ = ["ScenarioError", "Scenario", "parse_scenario", "bundled_scenarios", "get_scenario"]


class ScenarioError(ValueError):
    """Malformed scenario document; carries the offending field name."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"field {field_name!r}: {message}")


_OUTPUTS = ("energy-sweep", "bounds", "field-profile", "calr-diagnostic")
_BOUND_FAMILIES = (
    "primal_nr1", "dual_r1", "dual_r2", "primal_crc_fixed", "primal_crc_adaptive",
)


@dataclass(frozen=True)
class Scenario:
    name: str
    theorem: str
    expected_verdict: str
    r_i: float
    r_e: float
    materials: Materials
    k0: int | None
    loss_region: LossRegion
    coupling_kind: str  # "adaptive" | "fixed" | "none"
    source_kind: SourceKind
    q: float
    source_rule: dict
    k_max: int
    etas: tuple[float, ...]
    outputs: tuple[str, ...]
    probe_radius: float | None = None
    bounds_family: str | None = None
    core: complex = 1.0

    # ---- materialization -------------------------------------------------

    def template(self) -> LayeredConfig:
        # adaptive runs overwrite the permittivities per point, so any
        # placeholder degree serves for the template
        k_ref = self.k0 if self.k0 is not None else 1
        eps = self.materials.resolve(k_ref, self.loss_region, self.core)
        return LayeredConfig(self.r_i, self.r_e, eps[0], eps[1], eps[2],
                             eta=0.0, loss_region=self.loss_region)

    def coupling(self) -> Adaptive | FixedK | None:
        if self.coupling_kind == "adaptive":
            rule = (SelectionRule.SHELL if self.loss_region is LossRegion.SHELL
                    else SelectionRule.WHOLE_SPACE)
            return Adaptive(rule, self.materials, self.core)
        if self.coupling_kind == "fixed":
            return FixedK(self.k0, self.materials, self.core)
        return None

    def source(self) -> SourceSpectrum:
        rule = self.source_rule
        kind = self.source_kind
        if rule["type"] == "geometric":
            return SourceSpectrum.geometric(self.q, rule["base"], self.k_max,
                                            rule.get("l", 0), kind)
        if rule["type"] == "constant":
            return SourceSpectrum.constant(self.q, rule.get("value", 1.0), self.k_max,
                                           rule.get("l", 0), kind)
        if rule["type"] == "single":
            return SourceSpectrum.single(self.q, rule["k"], rule.get("l", 0),
                                         rule.get("value", 1.0), kind, self.k_max)
        raise ScenarioError("source.rule.type", f"unknown rule {rule['type']!r}")

    def resolved_bounds_family(self) -> str:
        if self.bounds_family is not None:
            return self.bounds_family
        if self.materials is Materials.STANDARD:
            return "primal_nr1"
        if self.materials is Materials.CORELESS:
            return "dual_r1"
        if self.materials is Materials.PLASMONIC and self.loss_region is LossRegion.WHOLE_SPACE:
            if self.coupling_kind == "fixed":
                return "primal_crc_fixed"
            r_star = math.sqrt(self.r_e**3 / self.r_i)
            return "primal_crc_adaptive" if self.q > r_star else "dual_r2"
        raise PreconditionError(
            f"no variational family applies to scenario {self.name!r} "
            f"(materials={self.materials.value}, loss={self.loss_region.value})"
        )

    def validate(self):
        """Re-check the referenced statement's hypotheses."""
        if not self.etas:
            raise ScenarioError("eta_grid", "empty grid")
        if self.q <= self.r_e and self.materials is not Materials.HOMOGENEOUS:
            raise PreconditionError(
                f"source radius q={self.q} must lie outside the device r_e={self.r_e}"
            )
        if self.coupling_kind == "fixed" and (self.k0 is None or self.k0 < 1):
            raise ScenarioError("materials.k0", "fixed coupling needs k0 >= 1")
        if self.coupling_kind == "adaptive" and any(e <= 0 for e in self.etas):
            raise PreconditionError("adaptive coupling needs strictly positive loss values")
        if "bounds" in self.outputs:
            family = self.resolved_bounds_family()
            if self.loss_region is not LossRegion.WHOLE_SPACE:
                raise PreconditionError(
                    "variational bounds are defined for whole-space loss only"
                )
            if family == "dual_r2" and self.q >= self.r_e**1.5:
                raise PreconditionError(
                    f"approximate-resonance bound needs q < r_e^1.5 = {self.r_e**1.5:.6g}"
                )
            if family == "primal_crc_adaptive" and self.q <= math.sqrt(self.r_e**3 / self.r_i):
                raise PreconditionError(
                    "adaptive boundedness needs the source outside the critical radius"
                )
        if "calr-diagnostic" in self.outputs or "field-profile" in self.outputs:
            probe = self.probe_radius
            if probe is not None and probe <= self.r_e:
                raise PreconditionError(
                    f"probe radius {probe} must lie outside the device r_e={self.r_e}"
                )

    # ---- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "name": self.name,
            "theorem": self.theorem,
            "expected_verdict": self.expected_verdict,
            "geometry": {"r_i": self.r_i, "r_e": self.r_e},
            "materials": {"pattern": self.materials.value},
            "loss_region": self.loss_region.value,
            "coupling": self.coupling_kind,
            "source": {
                "kind": self.source_kind.value,
                "q": self.q,
                "rule": dict(self.source_rule),
                "k_max": self.k_max,
            },
            "eta_grid": {"rule": "list", "values": list(self.etas)},
            "outputs": list(self.outputs),
        }
        if self.k0 is not None:
            doc["materials"]["k0"] = self.k0
        if self.core != 1.0:
            doc["materials"]["core"] = self.core.real
        if self.probe_radius is not None:
            doc["probe_radius"] = self.probe_radius
        if self.bounds_family is not None:
            doc["bounds_family"] = self.bounds_family
        return doc


def _expect(doc: dict, key: str, types, where: str):
    if key not in doc:
        raise ScenarioError(f"{where}{key}", "missing")
    val = doc[key]
    if not isinstance(val, types):
        raise ScenarioError(f"{where}{key}", f"expected {types}, got {type(val).__name__}")
    return val


def _eta_values(doc: dict) -> tuple[float, ...]:
    rule = _expect(doc, "rule", str, "eta_grid.")
    if rule == "list":
        values = _expect(doc, "values", list, "eta_grid.")
        etas = [float(v) for v in values]
    elif rule in ("geometric", "decades"):
        start = float(_expect(doc, "start", (int, float), "eta_grid."))
        stop = float(_expect(doc, "stop", (int, float), "eta_grid."))
        if start <= stop:
            raise ScenarioError("eta_grid.start",
                                f"grid must decrease: start={start} <= stop={stop}")
        if rule == "decades":
            n = int(round(math.log10(start / stop))) + 1
            etas = [start * 10.0**-i for i in range(n)]
        else:
            n = int(_expect(doc, "points", int, "eta_grid."))
            if n < 2:
                raise ScenarioError("eta_grid.points", "need at least 2 points")
            ratio = (stop / start) ** (1.0 / (n - 1))
            etas = [start * ratio**i for i in range(n)]
    else:
        raise ScenarioError("eta_grid.rule", f"unknown rule {rule!r}")
    if any(e2 >= e1 for e1, e2 in zip(etas, etas[1:])):
        raise ScenarioError("eta_grid.values", "values must be strictly decreasing")
    if any(e < 0 for e in etas):
        raise ScenarioError("eta_grid.values", "values must be nonnegative")
    return tuple(etas)


def parse_scenario(doc: dict | str) -> Scenario:
    """Parse and validate one scenario document (dict or JSON text)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ScenarioError("<document>", f"invalid JSON at line {exc.lineno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise ScenarioError("<document>", "top level must be an object")

    name = _expect(doc, "name", str, "")
    geometry = _expect(doc, "geometry", dict, "")
    r_i = float(_expect(geometry, "r_i", (int, float), "geometry."))
    r_e = float(_expect(geometry, "r_e", (int, float), "geometry."))
    if not 0 < r_i < r_e:
        raise ScenarioError("geometry", f"need 0 < r_i < r_e, got {r_i}, {r_e}")

    mat_doc = _expect(doc, "materials", dict, "")
    pattern = _expect(mat_doc, "pattern", str, "materials.")
    try:
        materials = Materials(pattern)
    except ValueError:
        raise ScenarioError("materials.pattern", f"unknown pattern {pattern!r}")
    k0 = mat_doc.get("k0")
    if k0 is not None and (not isinstance(k0, int) or k0 < 1):
        raise ScenarioError("materials.k0", f"need a positive integer, got {k0!r}")
    core = complex(mat_doc.get("core", 1.0))

    loss_raw = _expect(doc, "loss_region", str, "")
    try:
        loss_region = LossRegion(loss_raw)
    except ValueError:
        raise ScenarioError("loss_region", f"unknown region {loss_raw!r}")

    coupling = doc.get("coupling", "none")
    if coupling not in ("adaptive", "fixed", "none"):
        raise ScenarioError("coupling", f"unknown coupling {coupling!r}")

    src_doc = _expect(doc, "source", dict, "")
    kind_raw = _expect(src_doc, "kind", str, "source.")
    try:
        source_kind = SourceKind(kind_raw)
    except ValueError:
        raise ScenarioError("source.kind", f"unknown kind {kind_raw!r}")
    q = float(_expect(src_doc, "q", (int, float), "source."))
    rule = _expect(src_doc, "rule", dict, "source.")
    if "type" not in rule:
        raise ScenarioError("source.rule.type", "missing")
    k_max = _expect(src_doc, "k_max", int, "source.")
    if k_max < 1:
        raise ScenarioError("source.k_max", f"need k_max >= 1, got {k_max}")

    etas = _eta_values(_expect(doc, "eta_grid", dict, ""))

    outputs = _expect(doc, "outputs", list, "")
    for out in outputs:
        if out not in _OUTPUTS:
            raise ScenarioError("outputs", f"unknown output {out!r}; known: {_OUTPUTS}")

    bounds_family = doc.get("bounds_family")
    if bounds_family is not None and bounds_family not in _BOUND_FAMILIES:
        raise ScenarioError("bounds_family", f"unknown family {bounds_family!r}")

    probe = doc.get("probe_radius")
    scenario = Scenario(
        name=name,
        theorem=str(doc.get("theorem", "")),
        expected_verdict=str(doc.get("expected_verdict", "")),
        r_i=r_i,
        r_e=r_e,
        materials=materials,
        k0=k0,
        loss_region=loss_region,
        coupling_kind=coupling,
        source_kind=source_kind,
        q=q,
        source_rule=dict(rule),
        k_max=k_max,
        etas=etas,
        outputs=tuple(outputs),
        probe_radius=float(probe) if probe is not None else None,
        bounds_family=bounds_family,
        core=core,
    )
    try:
        scenario.source()
    except KeyError as exc:
        raise ScenarioError(f"source.rule.{exc.args[0]}", "missing")
    return scenario


# ---------------------------------------------------------------------------
# Bundled catalogue
# ---------------------------------------------------------------------------


def _rho_band_grid(rho: float, j_start: int, j_stop: int, per_band: int = 1):
    """Geometric grid hitting each degree band between the boundaries."""
    n = (j_stop - j_start) * per_band + 1
    return tuple(rho ** (j_start - 0.5 + i / per_band) for i in range(n))


def bundled_scenarios() -> list[Scenario]:
    std_geo = dict(r_i=1.0, r_e=2.0)
    decades = lambda a, b: tuple(10.0**-t for t in range(a, b + 1))
    rho = 0.5
    inv_re = 0.5

    return [
        Scenario(
            name="homogeneous_null", theorem="baseline", expected_verdict="bounded",
            **std_geo, materials=Materials.HOMOGENEOUS, k0=None,
            loss_region=LossRegion.SHELL, coupling_kind="none",
            source_kind=SourceKind.MULTIPOLE, q=2.5,
            source_rule={"type": "geometric", "base": 2.5}, k_max=16,
            etas=(0.0,), outputs=("energy-sweep",),
        ),
        Scenario(
            name="thm22_standard_no_alr", theorem="2.2", expected_verdict="bounded",
            **std_geo, materials=Materials.STANDARD, k0=None,
            loss_region=LossRegion.WHOLE_SPACE, coupling_kind="none",
            source_kind=SourceKind.DELTA_SHELL, q=3.0,
            source_rule={"type": "constant", "value": 1.0}, k_max=40,
            etas=decades(2, 8), outputs=("energy-sweep", "bounds"),
        ),
        Scenario(
            name="thm23_coreless_alr", theorem="2.3", expected_verdict="blowup",
            **std_geo, materials=Materials.CORELESS, k0=3,
            loss_region=LossRegion.WHOLE_SPACE, coupling_kind="none",
            source_kind=SourceKind.DELTA_SHELL, q=3.0,
            source_rule={"type": "single", "k": 3, "value": 1.0}, k_max=8,
            etas=decades(2, 8), outputs=("energy-sweep", "bounds"),
        ),
        Scenario(
            name="thm24_approx_alr", theorem="2.4", expected_verdict="blowup",
            **std_geo, materials=Materials.PLASMONIC, k0=None,
            loss_region=LossRegion.WHOLE_SPACE, coupling_kind="adaptive",
            source_kind=SourceKind.DELTA_SHELL, q=2.5,
            source_rule={"type": "constant", "value": 1.0}, k_max=30,
            etas=_rho_band_grid(inv_re, 4, 26), outputs=("energy-sweep", "bounds"),
        ),
        Scenario(
            name="thm26_fixed_shell_no_alr", theorem="2.6", expected_verdict="bounded",
            **std_geo, materials=Materials.PLASMONIC, k0=4,
            loss_region=LossRegion.WHOLE_SPACE, coupling_kind="fixed",
            source_kind=SourceKind.DELTA_SHELL, q=3.0,
            source_rule={"type": "constant", "value": 1.0}, k_max=40,
            etas=decades(1, 8), outputs=("energy-sweep", "bounds"),
        ),
        Scenario(
            name="thm27_outside_critical", theorem="2.7", expected_verdict="bounded",
            **std_geo, materials=Materials.PLASMONIC, k0=None,
            loss_region=LossRegion.WHOLE_SPACE, coupling_kind="adaptive",
            source_kind=SourceKind.DELTA_SHELL, q=3.2,
            source_rule={"type": "constant", "value": 1.0}, k_max=40,
            etas=_rho_band_grid(inv_re, 5, 20, per_band=4),
            outputs=("energy-sweep", "bounds"),
        ),
        Scenario(
            name="thm31_blowup", theorem="3.1", expected_verdict="blowup",
            **std_geo, materials=Materials.PLASMONIC, k0=None,
            loss_region=LossRegion.SHELL, coupling_kind="adaptive",
            source_kind=SourceKind.MULTIPOLE, q=2.5,
            source_rule={"type": "geometric", "base": 2.5}, k_max=64,
            etas=_rho_band_grid(rho, 5, 20),
            outputs=("energy-sweep", "calr-diagnostic", "field-profile"),
            probe_radius=3.0,
        ),
        Scenario(
            name="thm32_fixed_k_sensitivity", theorem="3.2", expected_verdict="bounded",
            **std_geo, materials=Materials.PLASMONIC, k0=5,
            loss_region=LossRegion.SHELL, coupling_kind="fixed",
            source_kind=SourceKind.MULTIPOLE, q=2.5,
            source_rule={"type": "geometric", "base": 2.5}, k_max=64,
            etas=decades(1, 8), outputs=("energy-sweep",),
        ),
        Scenario(
            name="thm33_outside_critical", theorem="3.3", expected_verdict="bounded",
            **std_geo, materials=Materials.PLASMONIC, k0=None,
            loss_region=LossRegion.SHELL, coupling_kind="adaptive",
            source_kind=SourceKind.MULTIPOLE, q=3.5,
            source_rule={"type": "geometric", "base": 3.5}, k_max=64,
            etas=_rho_band_grid(rho, 5, 20, per_band=4),
            outputs=("energy-sweep", "calr-diagnostic"),
            probe_radius=3.7,
        ),
    ]


def get_scenario(name: str) -> Scenario:
    for sc in bundled_scenarios():
        if sc.name == name:
            return sc
    known = ", ".join(sc.name for sc in bundled_scenarios())
    raise KeyError(f"no bundled scenario {name!r}; known: {known}")
