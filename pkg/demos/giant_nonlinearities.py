"""
Slow light and giant nonlinearities
===================================

Rebuild the sodium slow-light conditions (589 nm, 1.3e6 rad/s detuning,
40 mW/cm^2 coupling, 17 m/s group velocity) and print the refractive-index
change and the nonlinear coefficients in SI and practical units.
"""

import numpy as np

from eitkerr import response as rs
from eitkerr.pipelines import SweepSpec, run_sweep
from eitkerr.presets import slow_light_config

cfg = slow_light_config()
vg, vg0 = rs.group_velocity(cfg)
print(f"v_g0 = {vg0:.4g} m/s, v_g = {vg:.6g} m/s, delta_n = {rs.delta_n(cfg):.4g}")

c = rs.refractive_coeffs(cfg)
for name, si, pr, unit in (("n2", c.n2, c.n2_practical, "cm2/W"),
                           ("n4", c.n4, c.n4_practical, "cm4/W2"),
                           ("n6", c.n6, c.n6_practical, "cm6/W3")):
    print(f"{name} = {si:+.4g} (SI)  = {pr:+.4g} {unit}")
print(f"|n2/n4| = {abs(c.r24_practical):.3g} W/cm2, |n4/n6| = {abs(c.r46_practical):.3g} W/cm2")

# the series in the probe field and the closed form agree while Omega1 < Omega2
print("contour Taylor coefficients:", rs.taylor_coefficients_numeric(cfg))
print("closed-form coefficients:   ", np.array(rs.chi_series(cfg)))

# a weaker coupling beam slows light further and strengthens the Kerr effect
cols = run_sweep(cfg, SweepSpec("coupling_intensity", 100.0, 800.0, 8, "linear",
                                ("group_velocity_lowest_order", "n2_practical")))
for i2, v, n2 in zip(*cols.values()):
    print(f"I2 = {i2:6.1f} W/m2: v_g0 = {v:6.2f} m/s, n2 = {n2:+.4f} cm2/W")
