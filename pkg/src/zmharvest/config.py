"""Configuration types and validation.

Units are natural (c = hbar = 1).  Couplings are stored in the dimensionless
form ``lambda_tilde``; the dimensionful coupling entering the interaction is
``lambda_tilde * omega**((3 - n) / 2)`` with ``omega`` the detector frequency.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Optional

from .errors import ConfigError

# relative mismatch allowed between the two detectors' frequencies and widths
SYMMETRY_RTOL = 1e-10


class DetectorKind(str, Enum):
    QUBIT = "qubit"
    OSCILLATOR = "oscillator"


class Coupling(str, Enum):
    AMPLITUDE = "amplitude"
    DERIVATIVE = "derivative"


class SeparationMode(str, Enum):
    FRACTION = "fraction"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class DetectorParams:
    """A pointlike static detector with Gaussian switching of width ``width``."""

    gap: float = 1.0
    coupling: float = 1.0
    width: float = 1.0
    position: float = 0.0
    kind: DetectorKind = DetectorKind.QUBIT
    ho_frequency: Optional[float] = None

    @property
    def frequency(self) -> float:
        """Frequency entering the phases: the gap for a qubit, omega for an oscillator."""
        if self.kind is DetectorKind.OSCILLATOR and self.ho_frequency is not None:
            return float(self.ho_frequency)
        return float(self.gap)

    def coupling_strength(self, n_dim: int = 1) -> float:
        """Dimensionful coupling constant."""
        return self.coupling * self.frequency ** ((3 - n_dim) / 2)


@dataclass(frozen=True)
class ZeroModeState:
    """Gaussian zero-mode state.

    ``q2``, ``p2`` and ``qp_sym`` are <Q^2>, <P^2> and <{Q,P}>; by default they
    take the minimum-uncertainty values 1/(2 gamma), gamma/2 and 0.
    """

    gamma: float = 1.0
    q_mean: float = 0.0
    p_mean: float = 0.0
    qp_sym: float = 0.0
    q2: Optional[float] = None
    p2: Optional[float] = None

    def __post_init__(self):
        if self.q2 is None:
            object.__setattr__(self, "q2", 0.5 / self.gamma if self.gamma else math.inf)
        if self.p2 is None:
            object.__setattr__(self, "p2", 0.5 * self.gamma)

    @classmethod
    def from_gamma(cls, gamma: float) -> "ZeroModeState":
        return cls(gamma=gamma)

    def is_saturated(self, rtol: float = 1e-12) -> bool:
        if self.q_mean or self.p_mean or self.qp_sym:
            return False
        if not (math.isclose(self.q2, 0.5 / self.gamma, rel_tol=rtol)
                and math.isclose(self.p2, 0.5 * self.gamma, rel_tol=rtol)):
            return False
        return math.isclose(self.q2 * self.p2, 0.25, rel_tol=rtol)


@dataclass(frozen=True)
class FieldConfig:
    """Cavity and numerics.  ``n_max=None`` selects the cutoff automatically."""

    length: float = 10.0
    n_dim: int = 1
    coupling: Coupling = Coupling.AMPLITUDE
    include_zero_mode: bool = True
    n_max: Optional[int] = None
    epsilon: float = 1e-3
    quad_tol: float = 1e-10

    @property
    def effective_mass(self) -> float:
        return self.length ** self.n_dim


@dataclass(frozen=True)
class Separation:
    value: float
    mode: SeparationMode = SeparationMode.ABSOLUTE

    @classmethod
    def fraction(cls, f: float) -> "Separation":
        return cls(float(f), SeparationMode.FRACTION)

    @classmethod
    def absolute(cls, dx: float) -> "Separation":
        return cls(float(dx), SeparationMode.ABSOLUTE)

    def resolve(self, length: float) -> float:
        if self.mode is SeparationMode.FRACTION:
            return self.value * length
        return self.value


@dataclass(frozen=True)
class HarvestConfig:
    detector_a: DetectorParams = dc_field(default_factory=DetectorParams)
    detector_b: DetectorParams = dc_field(default_factory=DetectorParams)
    zero_mode: ZeroModeState = dc_field(default_factory=ZeroModeState)
    field: FieldConfig = dc_field(default_factory=FieldConfig)
    separation: Optional[Separation] = None

    @property
    def distance(self) -> float:
        """Absolute separation x_B - x_A (not reduced modulo L)."""
        if self.separation is not None:
            return self.separation.resolve(self.field.length)
        return self.detector_b.position - self.detector_a.position


def symmetric_config(length=10.0, gamma=1.0, width=1.0, omega=1.0, lambda_tilde=1.0,
                     separation_fraction: Optional[float] = 0.5, separation_abs=None,
                     kind=DetectorKind.QUBIT, coupling=Coupling.AMPLITUDE,
                     include_zero_mode=True, n_dim=1, n_max=None, epsilon=1e-3,
                     quad_tol=1e-10) -> HarvestConfig:
    """Identical detectors at x_A = 0, the setting used for the harvesting sweeps."""
    kind = DetectorKind(kind)
    det = DetectorParams(gap=omega, coupling=lambda_tilde, width=width, position=0.0, kind=kind,
                         ho_frequency=omega if kind is DetectorKind.OSCILLATOR else None)
    if separation_abs is not None:
        sep = Separation.absolute(separation_abs)
    else:
        sep = Separation.fraction(separation_fraction)
    fld = FieldConfig(length=length, n_dim=n_dim, coupling=Coupling(coupling),
                      include_zero_mode=include_zero_mode, n_max=n_max, epsilon=epsilon,
                      quad_tol=quad_tol)
    return HarvestConfig(det, det, ZeroModeState.from_gamma(gamma), fld, sep)


def _finite(*xs):
    return all(isinstance(x, (int, float)) and math.isfinite(x) for x in xs)


def check(config: HarvestConfig) -> list:
    """Return every violated invariant as ``(code, message)`` pairs."""
    issues = []
    fld, zm = config.field, config.zero_mode
    if not _finite(fld.length) or fld.length <= 0:
        issues.append(("NonPositiveLength", f"L = {fld.length}"))
    if not isinstance(fld.n_dim, int) or fld.n_dim < 1:
        issues.append(("InvalidDimension", f"n_dim = {fld.n_dim}"))
    elif fld.n_dim > 1:
        issues.append(("UnsupportedDimension",
                       "oscillator modes are implemented for one spatial dimension only"))
    if fld.n_max is not None and (int(fld.n_max) != fld.n_max or fld.n_max < 1):
        issues.append(("CutoffTooSmall", f"n_max = {fld.n_max}"))
    if not _finite(fld.epsilon) or fld.epsilon <= 0:
        issues.append(("NonPositiveEpsilon", f"epsilon = {fld.epsilon}"))
    if not _finite(fld.quad_tol) or fld.quad_tol <= 0:
        issues.append(("NonPositiveTolerance", f"quad_tol = {fld.quad_tol}"))
    if not _finite(zm.gamma) or zm.gamma <= 0:
        issues.append(("NonPositiveGamma", f"gamma = {zm.gamma}"))

    for name, det in (("A", config.detector_a), ("B", config.detector_b)):
        if not _finite(det.width) or det.width <= 0:
            issues.append(("NonPositiveWidth", f"T_{name} = {det.width}"))
        if not _finite(det.frequency) or det.frequency <= 0:
            issues.append(("NonPositiveGap", f"frequency_{name} = {det.frequency}"))
        if not _finite(det.coupling) or det.coupling < 0:
            issues.append(("NegativeCoupling", f"lambda_{name} = {det.coupling}"))
        if not _finite(det.position):
            issues.append(("NonFinitePosition", f"x_{name} = {det.position}"))

    a, b = config.detector_a, config.detector_b
    if a.kind != b.kind:
        issues.append(("MixedDetectorKinds", f"{a.kind.value} / {b.kind.value}"))
    if _finite(a.frequency, b.frequency, a.width, b.width):
        if not (math.isclose(a.frequency, b.frequency, rel_tol=SYMMETRY_RTOL)
                and math.isclose(a.width, b.width, rel_tol=SYMMETRY_RTOL)):
            issues.append(("AsymmetricDetectors", "detectors must share frequency and width"))

    sep = config.separation
    if sep is not None:
        if not _finite(sep.value):
            issues.append(("InvalidSeparation", f"separation = {sep.value}"))
        elif sep.mode is SeparationMode.FRACTION and not 0.0 < sep.value <= 1.0:
            issues.append(("InvalidSeparation", f"fraction {sep.value} outside (0, 1]"))
    return issues


def _reduce(x, length):
    r = math.fmod(x, length) % length
    # a tiny negative x rounds up to exactly L
    return 0.0 if r >= length else r


def validate(config: HarvestConfig) -> HarvestConfig:
    """Normalize a configuration or raise :class:`ConfigError` listing all problems.

    Positions are reduced modulo L, x_B is placed at x_A + dx and the
    separation is stored as an absolute distance.  Idempotent.
    """
    issues = check(config)
    if issues:
        raise ConfigError(issues)
    length = config.field.length
    dx = config.distance
    xa = _reduce(config.detector_a.position, length)
    xb = _reduce(xa + dx, length)
    det_a = dataclasses.replace(config.detector_a, position=xa)
    det_b = dataclasses.replace(config.detector_b, position=xb)
    return dataclasses.replace(config, detector_a=det_a, detector_b=det_b,
                               separation=Separation.absolute(dx))
