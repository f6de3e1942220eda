"""
Dressed states of one manifold
==============================

Compare the first-order dressed amplitudes and energies with exact
diagonalization of the 3x3 block, and watch the error shrink like the
square of detuning/Omega.
"""

import numpy as np

from eitkerr import fock_oracle as fo
from eitkerr.dressed import BRANCHES, ManifoldIndex, coefficients_perturbative
from eitkerr.pipelines import eigen_sweep

# a manifold with Omega1 = 1, Omega2 = 2 (rad/s) and a small detuning
omega1, omega2 = 1.0, 2.0
det = 0.01 * np.hypot(omega1, omega2)
block = fo.ManifoldBlock(ManifoldIndex(1, 0), fo.block_matrix(omega1 / 2, omega2 / 2, 1, 0, det))
exact = fo.exact_eigensystem(block)

for branch in BRANCHES:
    sol = coefficients_perturbative(omega1, omega2, det, branch)
    print(f"{branch:>5}: E_pert={sol.energy:+.8f}  E_exact={exact.energy(branch):+.8f}  "
          f"|2> weight {sol.upper_population:.2e}")

# the dark branch carries a small |2> admixture proportional to the detuning;
# that admixture is what gives the medium its dispersion

ratios, e_err, v_err, _ = eigen_sweep(omega1, omega2)
print("\ndetuning/Omega   energy error   vector error")
for r, e, v in zip(ratios, e_err, v_err):
    print(f"{r:14.3e} {e:14.3e} {v:14.3e}")
print("log-log slope (energy):", np.polyfit(np.log(ratios), np.log(e_err), 1)[0])
