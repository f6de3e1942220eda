"""
Where the large-n approximation comes from
==========================================

The optical coherence <2|rho|1> is a Poisson-weighted sum over all
manifolds. Replacing that sum by its value at the mean photon numbers is
accurate to O(1/nbar); this script shows the error falling with nbar.
"""

from eitkerr import fock_oracle as fo
from eitkerr.presets import config_from_couplings

print("   nbar   exact rho21        a0*b0              rel. error")
for nbar in (1e1, 1e2, 1e3, 1e4):
    cfg = config_from_couplings(1.0, 2.0, nbar, nbar)
    cfg = cfg.with_updates(atom={"probe_detuning": 1e-6 * cfg.rabi_total})
    res = fo.exact_coherence(fo.ensemble_from_dressed(cfg, "exact"))
    print(f"{nbar:7.0f}   {res.exact.real:.10e}   {res.large_n:.10e}   {res.relative_error:.3e}")
