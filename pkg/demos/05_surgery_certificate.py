"""
Surgery on a product model with curvature and volume control
============================================================

Replacing a tubular neighborhood of a low-dimensional sphere inside a
product model with a capped neck changes the topology but, when the
codimension is at least 3, can keep the scalar curvature close to the
ambient value and the volume inside a stated band.  This script runs
the construction and prints the certified bounds.
"""

from neckforge import surgery_certificate

# surgered sphere dimension 1, fiber sphere dimension 3 (codimension 4
# inside the 5-dimensional product), tube radius 0.05
res = surgery_certificate(1, 3, 0.05)

print(f"surgery certificate: overall status {res.status}")
for claim in res.certificate["claims"]:
    print(f"  {claim['name']:<22} {claim['lhs_value']:14.9f} {claim['op']:>2}"
          f" {claim['rhs_value']:14.9f}   margin {claim['margin']:.3e}"
          f"   {claim['status']}")

print()
print(f"  ambient scalar value     = {res.quantity('ambient_curvature'):.6f}")
print(f"  certified min scalar     = {res.quantity('global_min_scalar'):.6f}")
print(f"  volume before surgery    = {res.quantity('volume_reference'):.6f}")
print(f"  volume after surgery     = {res.quantity('volume_total'):.6f}")
ratio = res.quantity("volume_total") / res.quantity("volume_reference")
print(f"  ratio                    = {ratio:.6f}  (band 0.95 .. 1.05)")

# shrinking the tube tightens both the curvature loss and the volume
# band
print()
print("tube radius sweep")
for delta in (0.1, 0.05, 0.025):
    res = surgery_certificate(1, 3, delta)
    ratio = res.quantity("volume_total") / res.quantity("volume_reference")
    print(f"  delta = {delta:5.3f}:  min scalar = "
          f"{res.quantity('global_min_scalar'):9.6f},"
          f"  volume ratio = {ratio:.6f},  status {res.status}")
