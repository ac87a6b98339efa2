"""neckforge: scalar-curvature-controlled necks as explicit warped metrics.

The library builds Gromov-Lawson style tunnels and surgery necks as
piecewise (doubly) warped-product metrics, verifies curvature, volume and
diameter inequalities numerically, and emits machine-checkable certificates.
"""

__version__ = "0.1.0"

from .assembly import (Assembly, AssemblyPiece, build_tunnel,
                       build_tunnel_between, certified_min_scalar,
                       perform_surgery)
from .certificate import (certificate_bytes, load_certificate,
                          make_certificate, recheck_certificate,
                          write_certificate)
from .models import (AmbientModel, flat_space, product_of_rounds,
                     round_sphere, sphere_times_flat, unit_sphere_volume)
from .pipelines import (IngredientMetric, PipelineResult, attach_hemisphere,
                        attach_product_ingredient, hemisphere_standin,
                        product_ingredient, profile_ingredient,
                        round_ball_volume, round_sphere_ingredient,
                        sphere_chain_certificate, surgery_certificate,
                        tunnel_certificate, verify_volume_budget)
from .profiles import DoublyWarpProfile, WarpProfile

__all__ = [
    "AmbientModel", "Assembly", "AssemblyPiece", "DoublyWarpProfile",
    "IngredientMetric", "PipelineResult", "WarpProfile",
    "attach_hemisphere", "attach_product_ingredient", "build_tunnel",
    "build_tunnel_between", "certificate_bytes", "certified_min_scalar",
    "flat_space", "hemisphere_standin", "load_certificate",
    "make_certificate", "perform_surgery", "product_ingredient",
    "product_of_rounds", "profile_ingredient", "recheck_certificate",
    "round_ball_volume", "round_sphere", "round_sphere_ingredient",
    "sphere_chain_certificate", "sphere_times_flat", "surgery_certificate",
    "tunnel_certificate", "unit_sphere_volume", "verify_volume_budget",
    "write_certificate",
]
