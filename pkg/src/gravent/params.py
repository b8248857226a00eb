"""Experimental inputs -> Hamiltonian coefficients -> squeezed frame.

The system is a two-level test particle (TP) held in a double well at
separation d0, gravitating with a levitated mediator sphere a distance d
away, plus a qubit coupled to the same mediator through a magnetic-field
gradient.  A charged tip at distance r0 drives the mediator at twice its
trap frequency, which is equivalent to a static two-phonon term of
strength F after moving to the rotating frame.

Expanding gravity to first order in d0/d and the Coulomb interaction to
second order in the mediator displacement gives a lab-frame Hamiltonian
fixed by seven rates::

    H/hbar = omega_a sigma_a^z + omega_b sigma_b^z
             + (omega_tilde - 2 F) a^dag a - F (a^2 + a^dag^2)
             + epsilon (a + a^dag)
             + (g_a sigma_a^z + g_b sigma_b^z)(a + a^dag)

with sigma_a^z = |L><L| - |R><R| and sigma_b^z = |1><1| - |0><0|.

A Bogoliubov transformation a = cosh(s) a_s + sinh(s) a_s^dag removes the
two-phonon term.  The mediator softens to omega_s = sqrt(omega_tilde *
(omega_tilde - 4F)) while both spin couplings are boosted by e^s with
s = (1/4) ln[omega_tilde / (omega_tilde - 4F)]; the closer the drive gets
to the instability at 4F = omega_tilde, the larger the boost.

All frequencies are angular (rad/s in SI mode).  Dimensionless mode sets
omega_tilde = 1 and measures every other rate in the same unit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .constants import G, HBAR, K_E
from .errors import NegativeSquaredFrequency, UnstableFrame

# Relative mismatch allowed between an explicit chi and gamma_e * B_grad
# when both are supplied.
CHI_CONSISTENCY_RTOL = 1e-9

# Default minimum surface separation below which Casimir forces would
# rival gravity for the masses of interest.
CASIMIR_THRESHOLD = 157e-6  # m


@dataclass(frozen=True)
class PhysicalSetup:
    """Raw experimental inputs, SI units.

    Parameters
    ----------
    m_a, m_c:
        TP and mediator masses (kg).
    d:
        Center separation between the TP double well and the mediator (m).
    d0:
        Distance between the two TP wells (m). Must satisfy d0 << d for
        the linearized gravitational coupling to hold.
    omega_c:
        Bare mediator trap frequency (rad/s).
    omega_b:
        Qubit splitting (rad/s). Local, never affects entanglement.
    omega_a0:
        Bare TP splitting (rad/s); the gravitational well asymmetry adds
        to it.
    Q1, Q2:
        Mediator charge (>= 0) and driving-tip charge (<= 0), C. Zero
        either one to switch the two-phonon drive off.
    r0:
        Mediator-tip distance (m). Required whenever both charges are set.
    chi:
        Qubit-mediator force gradient (rad s^-1 m^-1), given directly ...
    B_grad, gamma_e:
        ... or as a magnetic gradient (T/m) times a gyromagnetic ratio
        (rad s^-1 T^-1). Supplying both forms cross-checks them.
    radius_a, radius_c:
        Physical radii used only for the surface-separation check (m).
    """

    m_a: float
    m_c: float
    d: float
    d0: float
    omega_c: float
    omega_b: float
    omega_a0: float = 0.0
    Q1: float = 0.0
    Q2: float = 0.0
    r0: float | None = None
    chi: float | None = None
    B_grad: float | None = None
    gamma_e: float | None = None
    radius_a: float = 0.0
    radius_c: float = 0.0

    def __post_init__(self):
        for name in ("m_a", "m_c", "d", "d0", "omega_c", "omega_b"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.omega_a0 < 0:
            raise ValueError("omega_a0 must be non-negative")
        if self.d0 >= self.d:
            raise ValueError("d0 must be smaller than d: the linearized "
                             "gravitational coupling breaks down")
        if self.d0 / self.d >= 0.1:
            warnings.warn(
                f"d0/d = {self.d0 / self.d:.3g} >= 0.1; first-order "
                "expansion of the gravitational potential is marginal",
                stacklevel=2)
        if self.Q1 < 0:
            raise ValueError("Q1 must be non-negative (mediator charge)")
        if self.Q2 > 0:
            raise ValueError("Q2 must be non-positive (tip charge)")
        if self.coulomb_active and (self.r0 is None or self.r0 <= 0):
            raise ValueError("r0 required (and positive) when both charges "
                             "are nonzero")
        if self.chi is None and (self.B_grad is None or self.gamma_e is None):
            raise ValueError("qubit coupling underdetermined: give chi or "
                             "both B_grad and gamma_e")
        if (self.chi is not None and self.B_grad is not None
                and self.gamma_e is not None):
            alt = self.gamma_e * self.B_grad
            if abs(self.chi - alt) > CHI_CONSISTENCY_RTOL * abs(self.chi):
                raise ValueError(
                    f"chi = {self.chi!r} inconsistent with gamma_e * B_grad "
                    f"= {alt!r} beyond {CHI_CONSISTENCY_RTOL:g} relative")

    @property
    def coulomb_active(self) -> bool:
        return self.Q1 > 0 and self.Q2 < 0

    @property
    def chi_value(self) -> float:
        if self.chi is not None:
            return self.chi
        return self.gamma_e * self.B_grad


@dataclass(frozen=True)
class ModelParams:
    """Lab-frame Hamiltonian coefficients (angular frequencies)."""

    omega_a: float
    omega_b: float
    omega_tilde: float
    F: float
    epsilon: float
    g_a: float
    g_b: float

    def __post_init__(self):
        if self.omega_tilde <= 0:
            raise ValueError("omega_tilde must be positive")
        if self.F < 0:
            raise ValueError("F must be non-negative")
        if self.delta <= 0:
            raise UnstableFrame(
                f"omega_tilde - 4F = {self.delta:.6g} <= 0: the driven "
                "potential is inverted and no stable squeezed frame exists")

    @property
    def delta(self) -> float:
        """Gap to the instability, omega_tilde - 4F."""
        return self.omega_tilde - 4.0 * self.F

    @classmethod
    def dimensionless(cls, g_a: float, g_b: float, *, F: float | None = None,
                      delta: float | None = None, omega_a: float = 0.0,
                      omega_b: float = 0.0,
                      epsilon: float = 0.0) -> "ModelParams":
        """Constructor with omega_tilde = 1; supply exactly one of F, delta."""
        if (F is None) == (delta is None):
            raise ValueError("give exactly one of F, delta")
        if F is None:
            F = (1.0 - delta) / 4.0
        return cls(omega_a=omega_a, omega_b=omega_b, omega_tilde=1.0, F=F,
                   epsilon=epsilon, g_a=g_a, g_b=g_b)


@dataclass(frozen=True)
class SqueezedFrame:
    """Frame with the two-phonon drive absorbed into the mode."""

    s: float          # squeezing parameter of the transformation
    omega_s: float    # softened mediator frequency
    g_a_s: float      # boosted TP coupling, g_a * e^s (signed)
    g_b_s: float      # boosted qubit coupling, g_b * e^s
    g_eff: float      # 2 g_a_s g_b_s / omega_s, conditional-phase rate
    t_period: float   # 2 pi / omega_s, first decoupling time
    omega_tilde: float

    def decoupling_time(self, n: int = 1) -> float:
        """n-th time at which the mediator returns to its initial orbit."""
        return 2.0 * math.pi * n / self.omega_s


def derive_model_params(setup: PhysicalSetup,
                        F_override: float | None = None) -> ModelParams:
    """Hamiltonian coefficients from raw experimental inputs.

    F_override keeps an exact requested drive strength instead of the one
    recomputed from the (rounded) back-solved tip distance; it matters
    when the target detuning is many orders below omega_tilde.

    Raises NegativeSquaredFrequency if gravitational softening overwhelms
    the trap, UnstableFrame if the Coulomb drive exceeds the inversion
    threshold omega_tilde / 4.
    """
    wt2 = setup.omega_c ** 2 - 2.0 * G * setup.m_a / setup.d ** 3
    if wt2 <= 0:
        raise NegativeSquaredFrequency(
            f"omega_c^2 - 2 G m_a / d^3 = {wt2:.6g} <= 0")
    omega_tilde = math.sqrt(wt2)

    omega_a = setup.omega_a0 + G * setup.m_a * setup.m_c * setup.d0 / (
        2.0 * HBAR * setup.d ** 2)

    coulomb = K_E * abs(setup.Q1 * setup.Q2) if setup.coulomb_active else 0.0
    F = 0.0
    eps_coulomb = 0.0
    if setup.coulomb_active:
        F = coulomb / (2.0 * setup.m_c * setup.omega_c * setup.r0 ** 3)
        eps_coulomb = coulomb / setup.r0 ** 2
    if F_override is not None:
        F = F_override
    epsilon = (G * setup.m_a * setup.m_c / setup.d ** 2 + eps_coulomb) \
        * math.sqrt(1.0 / (2.0 * HBAR * setup.m_c * setup.omega_c))

    g_a = -(G * setup.m_a * setup.d0 / setup.d ** 3) \
        * math.sqrt(setup.m_c / (2.0 * omega_tilde * HBAR))
    g_b = setup.chi_value * math.sqrt(HBAR / (2.0 * setup.m_c * setup.omega_c))

    return ModelParams(omega_a=omega_a, omega_b=setup.omega_b,
                       omega_tilde=omega_tilde, F=F, epsilon=epsilon,
                       g_a=g_a, g_b=g_b)


def coulomb_distance_for_drive(setup_mass: float, omega_c: float, Q1: float,
                               Q2: float, F: float) -> float:
    """Tip distance r0 that realizes a requested two-phonon strength F."""
    if F <= 0:
        raise ValueError("F must be positive to solve for r0")
    if Q1 <= 0 or Q2 >= 0:
        raise ValueError("charges must be active (Q1 > 0, Q2 < 0)")
    return (K_E * abs(Q1 * Q2) / (2.0 * setup_mass * omega_c * F)) ** (1.0 / 3.0)


def derive_squeezed_frame(params: ModelParams) -> SqueezedFrame:
    """Bogoliubov frame of the driven mediator.

    s grows logarithmically as the drive approaches the instability;
    omega_s = (omega_tilde - 4F) e^{2s} shrinks like e^{-2s}.
    """
    delta = params.delta
    if delta <= 0:
        raise UnstableFrame(
            f"omega_tilde - 4F = {delta:.6g} <= 0; no squeezed frame")
    if params.F == 0.0:
        # identity transformation, kept exact
        s, boost, omega_s = 0.0, 1.0, params.omega_tilde
    else:
        s = 0.25 * math.log(params.omega_tilde / delta)
        boost = math.exp(s)
        omega_s = math.sqrt(params.omega_tilde * delta)
    g_a_s = params.g_a * boost
    g_b_s = params.g_b * boost
    return SqueezedFrame(s=s, omega_s=omega_s, g_a_s=g_a_s, g_b_s=g_b_s,
                         g_eff=2.0 * g_a_s * g_b_s / omega_s,
                         t_period=2.0 * math.pi / omega_s,
                         omega_tilde=params.omega_tilde)


@dataclass(frozen=True)
class RegimeCheck:
    name: str
    passed: bool
    value: float
    limit: float
    margin: float   # limit/value for upper bounds, value/limit for lower
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "limit": self.limit, "margin": self.margin,
                "detail": self.detail}


@dataclass(frozen=True)
class RegimeReport:
    """Validity checks for the expansions behind the model."""

    delta_x: float
    checks: tuple[RegimeCheck, ...] = field(default_factory=tuple)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"delta_x_m": self.delta_x, "all_pass": self.all_pass,
                "checks": [c.as_dict() for c in self.checks]}


def regime_report(setup: PhysicalSetup, frame: SqueezedFrame,
                  casimir_threshold: float = CASIMIR_THRESHOLD,
                  coulomb_ratio_limit: float = 0.01,
                  gravity_ratio_limit: float = 0.05) -> RegimeReport:
    """Check that the squeezed mediator stays inside every expansion.

    The squeezing enlarges the mediator position spread to
    delta_x = sqrt(hbar / (m_c omega_tilde)) e^s, which must stay small
    against the Coulomb distance r0 and, together with the well offset
    d0/2, against the gravitational distance d.  The surface separation
    must clear the Casimir threshold, and the frame itself must be stable.
    """
    delta_x = math.sqrt(HBAR / (setup.m_c * frame.omega_tilde)) \
        * math.exp(frame.s)
    checks: list[RegimeCheck] = []

    if setup.coulomb_active:
        ratio = delta_x / setup.r0
        checks.append(RegimeCheck(
            name="coulomb_expansion", passed=ratio <= coulomb_ratio_limit,
            value=ratio, limit=coulomb_ratio_limit,
            margin=coulomb_ratio_limit / ratio if ratio > 0 else float("inf"),
            detail="delta_x / r0 (second-order Coulomb expansion)"))

    ratio_g = (setup.d0 / 2.0 + delta_x) / setup.d
    checks.append(RegimeCheck(
        name="gravity_expansion", passed=ratio_g <= gravity_ratio_limit,
        value=ratio_g, limit=gravity_ratio_limit,
        margin=gravity_ratio_limit / ratio_g,
        detail="(d0/2 + delta_x) / d (linearized gravity)"))

    separation = setup.d - setup.d0 / 2.0 - setup.radius_a - setup.radius_c
    checks.append(RegimeCheck(
        name="casimir_separation", passed=separation >= casimir_threshold,
        value=separation, limit=casimir_threshold,
        margin=separation / casimir_threshold,
        detail="minimum surface separation against the Casimir floor"))

    delta = frame.omega_s ** 2 / frame.omega_tilde  # = omega_tilde - 4F
    checks.append(RegimeCheck(
        name="stable_frame", passed=delta > 0,
        value=delta, limit=0.0, margin=delta / frame.omega_tilde,
        detail="gap omega_tilde - 4F to the inverted-potential threshold"))

    return RegimeReport(delta_x=delta_x, checks=tuple(checks))


__all__ = [
    "PhysicalSetup", "ModelParams", "SqueezedFrame", "RegimeCheck",
    "RegimeReport", "derive_model_params", "derive_squeezed_frame",
    "regime_report", "coulomb_distance_for_drive", "CASIMIR_THRESHOLD",
]
