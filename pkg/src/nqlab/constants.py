"""Physical constants (CODATA 2018) used throughout the package.

Values are pinned rather than imported from scipy.constants so that every
numeric result is reproducible bit for bit regardless of the installed
scipy version.
"""

import math

# elementary charge [C] (exact)
E_CHARGE = 1.602176634e-19

# Planck constant [J s] (exact)
PLANCK_H = 6.62607015e-34

# Boltzmann constant [J/K] (exact)
BOLTZMANN_K = 1.380649e-23

# vacuum permittivity [F/m]
EPSILON_0 = 8.8541878128e-12

# reduced Planck constant [J s]
HBAR = PLANCK_H / (2.0 * math.pi)
