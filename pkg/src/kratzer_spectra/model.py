"""Coupling classification, extension angles and the diatomic-molecule mapping."""

import math
from dataclasses import dataclass
from importlib import resources

from .errors import DomainError, InvalidCoupling

HBAR = 1.054571817e-34  # J s

RANGES = ("R1", "R2", "R3", "R4", "R5")

# symbol used for the extension angle of each range
ANGLE_NAMES = {"R1": None, "R2": "nu", "R3": "vartheta", "R4": "theta", "R5": "epsilon"}

ANGLE_INTERVALS = {
    "R1": None,
    "R2": (-math.pi / 2, math.pi / 2),
    "R3": (-math.pi / 2, math.pi / 2),
    "R4": (0.0, math.pi),
    "R5": (-math.pi / 2, math.pi / 2),
}

ENDPOINT_TOL = 1e-12


@dataclass(frozen=True)
class CouplingParams:
    """Couplings of V(x) = g1/x + g2/x^2 (units 2m/hbar^2 = 1) and the scale k0."""

    g1: float
    g2: float
    k0: float = 1.0

    def __post_init__(self):
        for name in ("g1", "g2", "k0"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidCoupling(f"{name} must be a finite real number")
            object.__setattr__(self, name, float(value))
        if self.g1 == 0.0:
            raise InvalidCoupling("g1 must be nonzero")
        if self.k0 <= 0.0:
            raise InvalidCoupling("k0 must be positive")


@dataclass(frozen=True)
class MuValue:
    """mu = sqrt(g2 + 1/4), stored as a kind and a non-negative magnitude."""

    kind: str
    magnitude: float

    @property
    def value(self):
        if self.kind == "real":
            return complex(self.magnitude, 0.0)
        return complex(0.0, self.magnitude)

    @property
    def squared(self):
        """Signed mu^2, equal to g2 + 1/4."""
        if self.kind == "real":
            return self.magnitude ** 2
        return -self.magnitude ** 2


@dataclass(frozen=True)
class RangeClass:
    range_id: str
    mu: MuValue
    deficiency: tuple


@dataclass(frozen=True)
class ExtensionParam:
    """Self-adjoint extension label: no angle in R1, a canonical angle otherwise."""

    range_id: str
    angle: float = None

    def __post_init__(self):
        if self.range_id not in RANGES:
            raise InvalidCoupling(f"unknown range {self.range_id!r}")
        if self.range_id == "R1":
            if self.angle is not None:
                raise InvalidCoupling("R1 has a unique extension; no angle allowed")
            return
        if self.angle is None or not math.isfinite(self.angle):
            raise InvalidCoupling(f"{self.range_id} needs a finite extension angle")
        object.__setattr__(self, "angle", canonical_angle(self.range_id, self.angle))

    @property
    def is_endpoint(self):
        """True at the identified endpoints nu, vartheta, epsilon = +-pi/2."""
        if self.range_id in ("R2", "R3", "R5"):
            return abs(self.angle - math.pi / 2) < ENDPOINT_TOL
        return False


def canonical_angle(range_id, angle):
    """Map an angle onto the circle representative used for its range.

    nu, vartheta and epsilon live in (-pi/2, pi/2]; theta lives in [0, pi).
    """
    angle = float(angle)
    if range_id == "R4":
        out = math.fmod(angle, math.pi)
        if out < 0.0:
            out += math.pi
        if out >= math.pi - ENDPOINT_TOL * 1e-3:
            out = 0.0
        return out
    if range_id in ("R2", "R3", "R5"):
        out = math.pi / 2 - math.fmod(math.pi / 2 - angle, math.pi)
        if out > math.pi / 2:
            out -= math.pi
        if out <= -math.pi / 2 + ENDPOINT_TOL:
            out = math.pi / 2
        return out
    raise InvalidCoupling(f"range {range_id} has no extension angle")


def mu_value(g2):
    if g2 >= -0.25:
        return MuValue("real", math.sqrt(g2 + 0.25))
    return MuValue("imaginary", math.sqrt(-g2 - 0.25))


def classify(p):
    """Assign the coupling range, mu and deficiency indices."""
    if not isinstance(p, CouplingParams):
        raise InvalidCoupling("classify expects CouplingParams")
    g2 = p.g2
    if g2 >= 0.75:
        rid = "R1"
    elif g2 == 0.0:
        rid = "R5"
    elif g2 == -0.25:
        rid = "R3"
    elif g2 < -0.25:
        rid = "R4"
    else:
        rid = "R2"
    deficiency = (0, 0) if rid == "R1" else (1, 1)
    return RangeClass(rid, mu_value(g2), deficiency)


def extension(p, angle=None):
    """Build the ExtensionParam for the range of ``p``."""
    rid = classify(p).range_id
    if rid == "R1":
        return ExtensionParam("R1")
    return ExtensionParam(rid, angle)


def potential_profile(p, x_grid):
    """V(x) = g1/x + g2/x^2 on a grid of positive points."""
    out = []
    for x in x_grid:
        x = float(x)
        if not x > 0.0:
            raise DomainError(f"potential needs x > 0, got {x}")
        out.append(p.g1 / x + p.g2 / (x * x))
    return out


# ---------------------------------------------------------------------------
# diatomic molecules


@dataclass(frozen=True)
class MoleculeInput:
    """Physical inputs for V = -2 De a/r + De a^2/r^2 with reduced mass m."""

    mass: float
    dissociation_energy: float
    equilibrium_separation: float
    l: int = 0
    hbar: float = HBAR

    def __post_init__(self):
        for name in ("mass", "equilibrium_separation", "hbar"):
            if not getattr(self, name) > 0:
                raise InvalidCoupling(f"{name} must be positive")
        if not self.dissociation_energy >= 0:
            raise InvalidCoupling("dissociation_energy must be non-negative")
        if int(self.l) != self.l or self.l < 0:
            raise InvalidCoupling("l must be a non-negative integer")


def molecule_couplings(m, k0=1.0):
    """g1 = -(4m/hbar^2) De a and g2 = (2m/hbar^2) De a^2 + l(l+1), in SI lengths."""
    scale = 2.0 * m.mass / m.hbar ** 2
    g1 = -2.0 * scale * m.dissociation_energy * m.equilibrium_separation
    g2 = scale * m.dissociation_energy * m.equilibrium_separation ** 2 + m.l * (m.l + 1)
    return CouplingParams(g1, g2, k0)


@dataclass(frozen=True)
class MoleculeRecord:
    name: str
    mass: float
    dissociation_energy: float
    equilibrium_separation: float


def parse_molecule_table(text):
    """Parse ``name mass De a`` records; '#' starts a comment, blank lines are skipped."""
    records = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields, got {len(fields)}")
        name = fields[0]
        try:
            mass, de, a = (float(f) for f in fields[1:])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if name in records:
            raise ValueError(f"line {lineno}: duplicate species {name!r}")
        records[name] = MoleculeRecord(name, mass, de, a)
    return records


def load_molecules(path=None):
    """Read a molecular constants table; the bundled one when ``path`` is None."""
    if path is None:
        text = resources.files("kratzer_spectra").joinpath("data/molecules.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_molecule_table(text)


def molecule_input(name, l=0, path=None):
    rec = load_molecules(path)[name]
    return MoleculeInput(rec.mass, rec.dissociation_energy, rec.equilibrium_separation, l)
