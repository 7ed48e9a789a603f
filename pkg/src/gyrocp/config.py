"""Scenario configuration in a flat ``section.key = value`` text format.

One setting per line, ``#`` starts a comment, blank lines are ignored::

    material.omega_c    = 0.4          # omega_c / omega_p
    material.gamma_coll = 0.015        # Gamma / omega_p
    material.omega_p_si = 3.0788e13    # rad/s, optional (needed for SI output)
    atom.dipole         = z            # x, y, z, circ_xz, circ_xy or "gx, gy, gz" (complex allowed)
    atom.omega0         = 0.65
    atom.rho_ee0        = 1
    atom.dipole_si_debye = 7900        # optional
    geometry.d          = 0.01         # or geometry.d_si in metres
    numerics.rel_tol    = 1e-9
    numerics.casimir_rel_tol = 1e-7
    sweep.variable      = omega0       # omega0, omega_c, gamma_coll, d or rho_ee0
    sweep.start = 0.55
    sweep.stop = 0.9
    sweep.points = 30
    sweep.scale = linear               # or log

The ``spp`` and ``fieldmap`` sections configure the corresponding
subcommands (see :class:`ScenarioConfig` for the keys).  Unknown keys
are rejected.  Whatever is not given keeps its default.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigError, DomainError, MissingSIFields
from .force import AtomState
from .greens import HalfSpaceGeometry
from .material import PlasmaMaterial
from .quadrature import QuadSpec
from .units import debye_to_cm, dipole_to_normalized, length_unit

DIPOLE_PRESETS = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
    "circ_xz": (1 / np.sqrt(2), 0.0, 1j / np.sqrt(2)),
    "circ_xy": (1 / np.sqrt(2), 1j / np.sqrt(2), 0.0),
}

# default magnitude of the normalized dipole when no SI value is given;
# forces in F0 units do not depend on it
DEFAULT_DIPOLE_SCALE = 1e-3

SWEEP_VARIABLES = ("omega0", "omega_c", "gamma_coll", "d", "rho_ee0")


def _float(s):
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"expected a number, got {s!r}") from None


def _int(s):
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"expected an integer, got {s!r}") from None


def _floats(s):
    return tuple(_float(p) for p in s.replace(";", ",").split(",") if p.strip())


def _dipole(s):
    key = s.strip().lower()
    if key in DIPOLE_PRESETS:
        return tuple(complex(v) for v in DIPOLE_PRESETS[key])
    parts = [p.strip().replace(" ", "") for p in s.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"dipole needs a preset name or three components, got {s!r}")
    try:
        return tuple(complex(p) for p in parts)
    except ValueError:
        raise ConfigError(f"cannot parse dipole components {s!r}") from None


def _choice(*options):
    def parse(s):
        v = s.strip()
        if v not in options:
            raise ConfigError(f"{v!r} is not one of {', '.join(options)}")
        return v
    return parse


@dataclass
class ScenarioConfig:
    """All inputs of one CLI run, in normalized units unless the name ends in _si."""

    omega_c: float = 0.4
    gamma_coll: float = 0.015
    omega_p_si: float | None = None
    dipole: tuple = (0j, 0j, 1 + 0j)
    omega0: float = 0.65
    rho_ee0: float = 1.0
    dipole_si_debye: float | None = None
    d: float | None = None
    d_si: float | None = None
    rel_tol: float = 1e-9
    casimir_rel_tol: float = 1e-7
    sweep_variable: str | None = None
    sweep_start: float | None = None
    sweep_stop: float | None = None
    sweep_points: int = 1
    sweep_scale: str = "linear"
    spp_thetas: tuple = (0.0,)
    spp_k_min: float = 0.8
    spp_k_max: float = 50.0
    spp_k_points: int = 40
    spp_k_scale: str = "log"
    fieldmap_omega: float = 0.7
    fieldmap_x_min: float = -0.3
    fieldmap_x_max: float = 0.3
    fieldmap_nx: int = 41
    fieldmap_z_min: float = 0.01
    fieldmap_z_max: float = 0.3
    fieldmap_nz: int = 30
    fieldmap_part: str = "scattered"
    source: str = field(default="<defaults>", compare=False)

    # ------------------------------------------------------------ derived
    def geometry_d(self) -> float:
        if self.d is not None:
            return self.d
        if self.d_si is not None:
            if self.omega_p_si is None:
                raise MissingSIFields("geometry.d_si needs material.omega_p_si")
            return self.d_si / length_unit(self.omega_p_si)
        return 0.01

    def material(self) -> PlasmaMaterial:
        try:
            return PlasmaMaterial(1.0, self.omega_c, self.gamma_coll)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def gamma_vec(self) -> np.ndarray:
        g = np.asarray(self.dipole, dtype=complex)
        n = np.linalg.norm(g)
        if n == 0:
            raise ConfigError("atom.dipole must be non-zero")
        if self.dipole_si_debye is not None and self.omega_p_si is not None:
            scale = dipole_to_normalized(debye_to_cm(self.dipole_si_debye), self.omega_p_si)
        else:
            scale = DEFAULT_DIPOLE_SCALE
        return g / n * scale

    def atom(self) -> AtomState:
        try:
            return AtomState(self.gamma_vec(), self.omega0, self.rho_ee0)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def geometry(self) -> HalfSpaceGeometry:
        try:
            return HalfSpaceGeometry(self.geometry_d())
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def quad_spec(self) -> QuadSpec:
        return QuadSpec(rel_tol=self.rel_tol, max_subdivisions=4000)

    def casimir_spec(self) -> QuadSpec:
        return QuadSpec(rel_tol=self.casimir_rel_tol, max_subdivisions=400)

    def sweep_values(self) -> np.ndarray:
        """Values of the sweep variable; a single point when no sweep is set."""
        if self.sweep_variable is None:
            return np.array([np.nan])
        if self.sweep_start is None or self.sweep_stop is None:
            raise ConfigError("sweep.start and sweep.stop are required with sweep.variable")
        if self.sweep_points < 1:
            raise ConfigError("sweep.points must be positive")
        if self.sweep_scale == "log":
            if self.sweep_start <= 0 or self.sweep_stop <= 0:
                raise ConfigError("a log sweep needs positive limits")
            return np.geomspace(self.sweep_start, self.sweep_stop, self.sweep_points)
        return np.linspace(self.sweep_start, self.sweep_stop, self.sweep_points)

    def at(self, value) -> "ScenarioConfig":
        """Copy with the sweep variable set to ``value`` (no-op for NaN)."""
        if self.sweep_variable is None or np.isnan(value):
            return self
        name = self.sweep_variable
        changes = {name: float(value)}
        if name == "d":
            changes["d_si"] = None
        return dataclasses.replace(self, **changes)

    def spp_k_grid(self) -> np.ndarray:
        if self.spp_k_scale == "log":
            return np.geomspace(self.spp_k_min, self.spp_k_max, self.spp_k_points)
        return np.linspace(self.spp_k_min, self.spp_k_max, self.spp_k_points)

    def has_si(self) -> bool:
        return self.omega_p_si is not None and self.dipole_si_debye is not None

    def validate(self):
        self.material()
        self.atom()
        self.geometry()
        self.sweep_values()
        if not 0 < self.rel_tol < 1 or not 0 < self.casimir_rel_tol < 1:
            raise ConfigError("tolerances must lie in (0, 1)")
        if self.sweep_variable is not None:
            # fail early if any sweep point is invalid
            for v in self.sweep_values():
                c = self.at(v)
                c.material()
                c.atom()
                c.geometry()
        return self


_KEYS = {
    "material.omega_c": ("omega_c", _float),
    "material.gamma_coll": ("gamma_coll", _float),
    "material.omega_p_si": ("omega_p_si", _float),
    "atom.dipole": ("dipole", _dipole),
    "atom.omega0": ("omega0", _float),
    "atom.rho_ee0": ("rho_ee0", _float),
    "atom.dipole_si_debye": ("dipole_si_debye", _float),
    "geometry.d": ("d", _float),
    "geometry.d_si": ("d_si", _float),
    "numerics.rel_tol": ("rel_tol", _float),
    "numerics.casimir_rel_tol": ("casimir_rel_tol", _float),
    "sweep.variable": ("sweep_variable", _choice(*SWEEP_VARIABLES)),
    "sweep.start": ("sweep_start", _float),
    "sweep.stop": ("sweep_stop", _float),
    "sweep.points": ("sweep_points", _int),
    "sweep.scale": ("sweep_scale", _choice("linear", "log")),
    "spp.theta": ("spp_thetas", _floats),
    "spp.k_min": ("spp_k_min", _float),
    "spp.k_max": ("spp_k_max", _float),
    "spp.k_points": ("spp_k_points", _int),
    "spp.k_scale": ("spp_k_scale", _choice("linear", "log")),
    "fieldmap.omega": ("fieldmap_omega", _float),
    "fieldmap.x_min": ("fieldmap_x_min", _float),
    "fieldmap.x_max": ("fieldmap_x_max", _float),
    "fieldmap.nx": ("fieldmap_nx", _int),
    "fieldmap.z_min": ("fieldmap_z_min", _float),
    "fieldmap.z_max": ("fieldmap_z_max", _float),
    "fieldmap.nz": ("fieldmap_nz", _int),
    "fieldmap.part": ("fieldmap_part", _choice("scattered", "total")),
}


def parse_lines(lines, base: ScenarioConfig | None = None, source="<text>") -> ScenarioConfig:
    """Apply ``key = value`` lines on top of ``base`` (defaults when None)."""
    values, seen = {}, set()
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value', got {raw.strip()!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{source}:{n}: duplicate key {key!r}")
        seen.add(key)
        attr, conv = _KEYS[key]
        try:
            values[attr] = conv(val)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{n}: {key}: {exc}") from None
    cfg = dataclasses.replace(base or ScenarioConfig(), **values)
    cfg.source = source
    return cfg


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_lines(text.splitlines(), source=str(path))


def preset_names():
    files = resources.files("gyrocp").joinpath("presets").iterdir()
    return sorted(p.name[:-4] for p in files if p.name.endswith(".cfg"))


def load_preset(name) -> ScenarioConfig:
    res = resources.files("gyrocp").joinpath("presets", f"{name}.cfg")
    if not res.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_lines(res.read_text(encoding="utf-8").splitlines(), source=f"preset:{name}")


def dump_config(cfg: ScenarioConfig) -> list:
    """Config as ``key = value`` lines (round-trips through parse_lines)."""
    out = []
    for key, (attr, _) in _KEYS.items():
        v = getattr(cfg, attr)
        if v is None:
            continue
        if attr == "dipole":
            v = ", ".join(repr(complex(c)).strip("()") for c in v)
        elif isinstance(v, tuple):
            v = ", ".join(repr(x) for x in v)
        elif isinstance(v, float):
            v = repr(v)
        out.append(f"{key} = {v}")
    return out
