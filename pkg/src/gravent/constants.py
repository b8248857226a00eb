"""Physical constants, CODATA 2018, SI units.

Single source of truth for every dimensional computation in the package.
The dimensionless pipeline (all rates in units of the modified mediator
frequency) never touches these.
"""

from __future__ import annotations

G = 6.67430e-11        # Newtonian constant of gravitation, m^3 kg^-1 s^-2
HBAR = 1.054571817e-34  # reduced Planck constant, J s
K_E = 8.9875517923e9    # Coulomb constant 1/(4 pi eps0), N m^2 C^-2

__all__ = ["G", "HBAR", "K_E"]
