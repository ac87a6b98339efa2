"""
Pipeline gallery: four certified constructions in one run
=========================================================

The headline pipelines each produce a complete metric with a certified
scalar curvature floor plus one extra guarantee: a prescribed diameter,
a prescribed topology, a prescribed volume, or a volume excess bound.
This script runs small instances of all four and prints a one-line
summary per certificate.
"""

import numpy as np

from neckforge import (
    attach_hemisphere,
    attach_product_ingredient,
    hemisphere_standin,
    round_sphere_ingredient,
    sphere_chain_certificate,
    unit_sphere_volume,
    verify_volume_budget,
)


def summarize(label: str, res) -> None:
    passes = sum(1 for c in res.certificate["claims"] if c["status"] == "PASS")
    total = len(res.certificate["claims"])
    print(f"  {label:<24} {res.status:<6} {passes}/{total} claims,"
          f"  min scalar = {res.quantity('global_min_scalar'):9.6f},"
          f"  volume = {res.quantity('volume_total'):10.4f}")


print("running four pipelines (dimension 3, curvature floor near 6)")

# 1. large diameter: a small round sphere grown to diameter 10 by a
#    long tunnel into a hemisphere, boundary left untouched
res_d = attach_hemisphere(round_sphere_ingredient(3, 0.5),
                          diameter_target=10.0)
summarize("long neck to hemisphere", res_d)

# 2. prescribed topology: a product of two round spheres, rescaled
#    until its floor clears the target, then tunneled to the hemisphere
res_t = attach_product_ingredient(2, 2)
summarize("product ingredient", res_t)

# 3. large volume: a chain of unit spheres joined by short tunnels
#    until the total volume passes 6 pi^2
res_v = sphere_chain_certificate(6.0 * np.pi ** 2, 3)
count = int(res_v.quantity("sphere_count"))
summarize(f"sphere chain ({count} links)", res_v)

# 4. volume excess budget: glue a small ball onto the hemisphere and
#    certify the total volume against an explicit excess bound
half = hemisphere_standin(3, declared_volume=0.5 * unit_sphere_volume(3))
res_b = verify_volume_budget(half, 0.05)
summarize("volume excess budget", res_b)

print()
print("details of the diameter build")
print(f"  diameter lower bound = {res_d.quantity('diameter_lower'):.4f}"
      f"  (target {res_d.quantity('diameter_target'):g})")
print(f"  interface gap        = {res_d.quantity('max_interface_gap'):.2e}")
print(f"  boundary jet gap     = {res_d.quantity('boundary_jet_gap'):.2e}")

print()
print("details of the volume excess budget")
print(f"  reference volume     = {res_b.quantity('vol_reference'):.6f}")
print(f"  achieved total       = {res_b.quantity('volume_total'):.6f}")
print(f"  certified bound      = {res_b.quantity('bound_final'):.6f}")
