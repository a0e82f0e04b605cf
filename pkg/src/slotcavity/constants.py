"""Physical constants (CODATA, via scipy) and reference refractive indices."""

from scipy import constants as _c

HBAR = _c.hbar
EPS0 = _c.epsilon_0
MU0 = _c.mu_0
C0 = _c.c
Z0 = (MU0 / EPS0) ** 0.5

N_AIR = 1.0
N_DIAMOND = 2.4
N_GAP = 3.3
N_SILICA = 1.45

NM = 1e-9
