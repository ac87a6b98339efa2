"""Headline constructions and their machine-checkable certificates.

Each pipeline assembles profile pieces into one glued chain, measures
curvature, volume and diameter with the library's certified routines,
and emits a certificate whose claims a reader can recheck from the
stored numbers alone.  Trusted inputs, meaning ingredient metrics whose
geometry is not profile-backed, are marked external-trusted in the
provenance instead of being silently assumed.

Ingredient slots follow one convention.  A round ingredient carries its
exact ambient model and its remnant enters the assembly as a real
profile piece; anything else is summarized by its certified floor and
volume, the tunnel attaches to a round local stand-in of matching
curvature, and the certificate records attachment_model =
"round-standin" so the substitution is visible.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
import numbers
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from .assembly import (DEFAULT_INTERFACE_TOL, Assembly, _chain,
                       _sampled_piece, build_tunnel, build_tunnel_between,
                       certified_min_scalar, perform_surgery)
from .certificate import make_certificate, write_certificate
from .errors import (FloorCheckFailed, IngredientFloorTooLow,
                     MissingIngredient, ParameterOutOfRange)
from .measure import profile_volume
from .models import AmbientModel, round_sphere, unit_sphere_volume
from .profiles import WarpProfile

__all__ = [
    "IngredientMetric",
    "round_sphere_ingredient",
    "product_ingredient",
    "profile_ingredient",
    "hemisphere_standin",
    "round_ball_volume",
    "PipelineResult",
    "attach_hemisphere",
    "attach_product_ingredient",
    "sphere_chain_certificate",
    "verify_volume_budget",
    "tunnel_certificate",
    "surgery_certificate",
]

STANDIN_HEADROOM = 1e-3


# ---------------------------------------------------------------- volumes

def _sin_power_integral(power: int, theta: float) -> float:
    """integral of sin(u)^power over [0, theta] for integer power >= 0."""
    if theta < 0.0:
        raise ParameterOutOfRange(f"angle {theta:.6g} must be nonnegative")
    theta = min(theta, math.pi)
    half = 0.5 * special.beta(0.5 * (power + 1), 0.5)
    if theta <= 0.5 * math.pi:
        return half * special.betainc(0.5 * (power + 1), 0.5,
                                      math.sin(theta) ** 2)
    # symmetry about the equator angle pi/2
    tail = half * special.betainc(0.5 * (power + 1), 0.5,
                                  math.sin(math.pi - theta) ** 2)
    return 2.0 * half - tail


def round_ball_volume(dim: int, sphere_radius: float,
                      ball_radius: float) -> float:
    """Volume of a metric ball in the round sphere of the given radius.

    Closed form through the incomplete beta function, so pipeline volume
    accounting has a route independent of profile quadrature.
    """
    if dim < 2:
        raise ParameterOutOfRange("ball volume needs dimension >= 2")
    if sphere_radius <= 0.0:
        raise ParameterOutOfRange("sphere radius must be positive")
    if not 0.0 <= ball_radius <= math.pi * sphere_radius + 1e-12:
        raise ParameterOutOfRange(
            f"ball radius {ball_radius:.6g} outside [0, pi*{sphere_radius:.6g}]")
    theta = ball_radius / sphere_radius
    return (unit_sphere_volume(dim - 1) * sphere_radius ** dim
            * _sin_power_integral(dim - 1, theta))


# ------------------------------------------------------------ ingredients

@dataclass(frozen=True)
class IngredientMetric:
    """A closed manifold summarized for use in a gluing pipeline.

    certified_floor is a strict lower bound for scalar curvature and
    volume the total volume.  trust records where those numbers come
    from: "closed-form" means this library recomputes them from the
    descriptor, "external-trusted" means they were supplied and are
    hypotheses of the resulting certificate, not conclusions.
    """

    name: str
    dim: int
    certified_floor: float
    volume: float
    trust: str = "closed-form"
    model: AmbientModel | None = None
    boundary_totally_geodesic: bool = False
    detail: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ParameterOutOfRange("ingredient dimension must be >= 2")
        if not self.volume > 0.0:
            raise ParameterOutOfRange("ingredient volume must be positive")
        if self.trust not in ("closed-form", "external-trusted"):
            raise ParameterOutOfRange(f"unknown trust level {self.trust!r}")

    def recomputed_floor(self) -> float | None:
        """Recompute the curvature floor from the descriptor.

        Returns None for external-trusted ingredients; their floor is an
        input.  Used by the constructors and the test suite to hold the
        declared floor to within 1e-9 of an independent evaluation.
        """
        kind = self.detail.get("kind")
        if kind == "round":
            return self.model.scalar_curvature
        if kind == "product":
            p, q = self.detail["factor_dims"]
            r = self.detail["factor_radius"]
            return (p * (p - 1) + q * (q - 1)) / r ** 2
        if kind == "profile":
            profile = self.detail["profile"]
            return certified_min_scalar(
                profile, pole_scalars=self.detail.get("pole_scalars", ()))
        return None

    def summary(self) -> dict:
        return {"name": self.name, "dim": self.dim, "trust": self.trust,
                "certified_floor": self.certified_floor,
                "volume": self.volume,
                "boundary_totally_geodesic": self.boundary_totally_geodesic}


def round_sphere_ingredient(dim: int, radius: float) -> IngredientMetric:
    """The round sphere of the given radius as a pipeline ingredient."""
    model = round_sphere(dim, radius)
    return IngredientMetric(
        name=f"round_sphere_{dim}d_r{radius:g}", dim=dim,
        certified_floor=model.scalar_curvature,
        volume=unit_sphere_volume(dim) * radius ** dim,
        model=model, detail={"kind": "round", "radius": float(radius)})


def product_ingredient(base_dim: int, slice_dim: int,
                       factor_radius: float | None = None) -> IngredientMetric:
    """Product of two round spheres scaled to a common factor radius.

    The default radius 1/sqrt(2 n(n-1)) puts the scalar curvature at
    2 n(n-1) (p(p-1)+q(q-1)) which clears the n(n-1) target whenever at
    least one factor has dimension >= 2; equal-dimension products are
    symmetric under swapping the factors by construction.
    """
    p, q = int(base_dim), int(slice_dim)
    if p < 1 or q < 1:
        raise ParameterOutOfRange("product factor dimensions must be >= 1")
    n = p + q
    if n < 3:
        raise ParameterOutOfRange("product ingredient needs dimension >= 3")
    if factor_radius is None:
        factor_radius = 1.0 / math.sqrt(2.0 * n * (n - 1))
    r = float(factor_radius)
    if not r > 0.0:
        raise ParameterOutOfRange("factor radius must be positive")
    floor = (p * (p - 1) + q * (q - 1)) / r ** 2
    volume = (unit_sphere_volume(p) * r ** p) * (unit_sphere_volume(q) * r ** q)
    return IngredientMetric(
        name=f"round_product_{p}x{q}_r{r:g}", dim=n,
        certified_floor=floor, volume=volume, model=None,
        detail={"kind": "product", "factor_dims": (p, q),
                "factor_radius": r})


def profile_ingredient(name: str, profile: WarpProfile,
                       pole_scalars=()) -> IngredientMetric:
    """Wrap a warped profile as an ingredient; floor and volume measured."""
    floor = certified_min_scalar(profile, pole_scalars=tuple(pole_scalars))
    return IngredientMetric(
        name=name, dim=sum(profile.component_dims) + 1,
        certified_floor=floor, volume=profile_volume(profile),
        detail={"kind": "profile", "profile": profile,
                "pole_scalars": tuple(pole_scalars)})


def hemisphere_standin(dim: int, headroom: float = STANDIN_HEADROOM,
                       declared_volume: float | None = None) -> IngredientMetric:
    """Round hemisphere with a strict curvature margin over n(n-1).

    The geodesically convex half of the round sphere with scalar
    curvature n(n-1)(1+headroom), boundary a totally geodesic round
    sphere.  Passing declared_volume replaces the model's own volume by
    an externally certified figure; the result is then marked
    external-trusted and the substitution shows up in certificates.
    """
    if dim < 2:
        raise ParameterOutOfRange("hemisphere dimension must be >= 2")
    if not headroom > 0.0:
        raise ParameterOutOfRange(
            "headroom must be positive; gluing needs strict floor clearance")
    n = int(dim)
    curv = (1.0 + headroom) * n * (n - 1)
    model = AmbientModel(0, n, 1.0, curv / (n * (n - 1)))
    rho = model.slice_curv ** -0.5
    model_volume = 0.5 * unit_sphere_volume(n) * rho ** n
    trust = "closed-form" if declared_volume is None else "external-trusted"
    volume = model_volume if declared_volume is None else float(declared_volume)
    return IngredientMetric(
        name=f"hemisphere_standin_{n}d", dim=n,
        certified_floor=curv, volume=volume, trust=trust, model=model,
        boundary_totally_geodesic=True,
        detail={"kind": "round", "radius": rho, "half": True,
                "model_volume": model_volume,
                "boundary_jet": (rho, 0.0, -1.0 / rho),
                "do_not_glue": "boundary annulus"})


# ------------------------------------------------------------- chain parts

def _round_remnant(sphere_radius: float, fiber_dim: int, u_start: float,
                   u_stop: float, n_nodes: int, *, jet_start=None,
                   jet_end=None, closed_start: bool = False,
                   closed_end: bool = False) -> WarpProfile:
    """Arc of a round sphere profile between two distances from a pole.

    u measures distance from the pole along the profile axis; traversal
    from u_start to u_stop may run in either direction.  Seam jets are
    passed in verbatim (copied from the adjacent tunnel piece) so glued
    interfaces close with gap exactly zero.
    """
    u = np.linspace(u_start, u_stop, n_nodes)
    values = sphere_radius * np.sin(u / sphere_radius)
    if closed_start:
        values[0] = 0.0
    if closed_end:
        values[-1] = 0.0
    grid = np.linspace(0.0, abs(u_stop - u_start), n_nodes)
    return WarpProfile(grid=grid, values=values, fiber_dim=fiber_dim,
                       closed_start=closed_start, closed_end=closed_end,
                       jet_start=jet_start, jet_end=jet_end)


def _rename(pieces, prefix: str):
    return [dataclasses.replace(p, name=f"{prefix}_{p.name}") for p in pieces]


def _attachment_model(ingredient: IngredientMetric,
                      target: float) -> tuple[AmbientModel, str]:
    """Ambient model the tunnel mouth lives in, plus how it was chosen.

    Round ingredients attach in their own exact model.  Anything else is
    represented near the gluing ball by the round sphere of matching
    scalar curvature; only the declared floor and volume of the original
    are used beyond that neighborhood.
    """
    if ingredient.model is not None:
        tag = "round-standin" if ingredient.detail.get("half") else "exact-round"
        return ingredient.model, tag
    n = ingredient.dim
    model = AmbientModel(0, n, 1.0, ingredient.certified_floor / (n * (n - 1)))
    return model, "round-standin"


def _boundary_deviation(profile: WarpProfile, jet) -> float:
    # spline-sampled jet at the open end against the declared one
    s = float(profile.grid[-1])
    return max(abs(float(profile.value(s)) - jet[0]),
               abs(float(profile.derivative(s)) - jet[1]),
               abs(float(profile.derivative(s, 2)) - jet[2]))


# ---------------------------------------------------------------- results

@dataclass(frozen=True)
class PipelineResult:
    """Certificate document plus the assemblies that back its claims."""

    certificate: dict
    assemblies: dict
    certificate_path: Path | None = None

    @property
    def status(self) -> str:
        return self.certificate["status"]

    def claim(self, name: str) -> dict:
        for entry in self.certificate["claims"]:
            if entry["name"] == name:
                return entry
        raise KeyError(name)

    def quantity(self, name: str):
        return self.certificate["quantities"][name]


def _finalize(kind: str, parameters: dict, quantities: dict, claims,
              provenance: dict, assemblies: dict,
              certificate_path, profiles_dir, tolerance: float) -> PipelineResult:
    """Save assemblies, fingerprint their manifests, emit the certificate."""
    artifacts = {}
    if profiles_dir is not None:
        profiles_dir = Path(profiles_dir)
        anchor = (Path(certificate_path).parent if certificate_path is not None
                  else profiles_dir)
        cert_name = (Path(certificate_path).name
                     if certificate_path is not None else None)
        for label, assembly in assemblies.items():
            out = profiles_dir if len(assemblies) == 1 else profiles_dir / label
            manifest = assembly.save_files(out, certificate_ref=cert_name)
            artifacts[f"{label}_manifest"] = {
                "file": os.path.relpath(manifest, anchor),
                "sha256": hashlib.sha256(manifest.read_bytes()).hexdigest(),
            }
    doc = make_certificate(kind, parameters, quantities, claims,
                           provenance=provenance, artifacts=artifacts,
                           tolerance=tolerance)
    path = None
    if certificate_path is not None:
        path = Path(certificate_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_certificate(doc, path)
    return PipelineResult(certificate=doc, assemblies=dict(assemblies),
                          certificate_path=path)


# ---------------------------------------------------------------- gluings

def attach_hemisphere(ingredient: IngredientMetric,
                      hemisphere: IngredientMetric | None = None, *,
                      diameter_target: float = 0.0,
                      sharpness: float = 100.0,
                      tube_radius: float = 0.1,
                      grid_density: float = 1.0,
                      n_profile_nodes: int = 1024,
                      interface_tol: float = DEFAULT_INTERFACE_TOL,
                      tolerance: float = 1e-9,
                      seed: int | None = None,
                      certificate_path=None, profiles_dir=None,
                      pipeline_name: str = "hemisphere_attachment",
                      extra_parameters: dict | None = None,
                      extra_quantities: dict | None = None,
                      extra_claims=(),
                      extra_provenance: dict | None = None) -> PipelineResult:
    """Join an ingredient to a hemisphere through a curvature-safe tunnel.

    Both floors must clear n(n-1) strictly; the tunnel floor sits at
    most 1/sharpness below the smaller attachment curvature and never
    below the target.  With diameter_target > 0 the connecting cylinder
    alone forces the diameter lower bound, so the certificate claims
    min scalar > n(n-1) and diameter >= diameter_target side by side.
    The hemisphere's boundary sphere is never touched: gluing happens at
    an interior pole, the boundary jet rides along verbatim, and the
    certificate checks the built profile actually ends on it.
    """
    n = ingredient.dim
    target = float(n * (n - 1))
    if hemisphere is None:
        hemisphere = hemisphere_standin(n)
    if hemisphere.dim != n:
        raise ParameterOutOfRange(
            f"hemisphere dimension {hemisphere.dim} != ingredient dimension {n}")
    if diameter_target < 0.0:
        raise ParameterOutOfRange("diameter target must be nonnegative")
    if not ingredient.certified_floor > target:
        raise IngredientFloorTooLow(
            f"ingredient floor {ingredient.certified_floor:.9g} must exceed "
            f"{target:.9g} strictly; equality leaves no bending budget")
    if not hemisphere.certified_floor > target:
        raise IngredientFloorTooLow(
            f"hemisphere floor {hemisphere.certified_floor:.9g} must exceed "
            f"{target:.9g} strictly")

    model_a, attach_a = _attachment_model(ingredient, target)
    model_b, attach_b = _attachment_model(hemisphere, target)
    floor = max(target, min(model_a.scalar_curvature,
                            model_b.scalar_curvature) - 1.0 / sharpness)
    tunnel = build_tunnel_between(
        model_a, model_b, tube_radius, tube_radius, floor,
        length=diameter_target, grid_density=grid_density,
        n_profile_nodes=n_profile_nodes, interface_tol=interface_tol)
    r0_a = tunnel.provenance["side_a"]["start_radius"]
    r0_b = tunnel.provenance["side_b"]["start_radius"]
    rho_a = model_a.slice_curv ** -0.5
    rho_b = model_b.slice_curv ** -0.5
    ball_a = round_ball_volume(n, rho_a, r0_a)
    ball_b = round_ball_volume(n, rho_b, r0_b)

    pieces = list(tunnel.pieces)
    exact_a = attach_a == "exact-round"
    if exact_a:
        # the unglued rest of the round ingredient, pole to seam
        arc = _round_remnant(
            rho_a, n - 1, math.pi * rho_a, r0_a, n_profile_nodes,
            closed_start=True,
            jet_end=tunnel.pieces[0].profile.boundary_jets("start")[0])
        pieces.insert(0, _sampled_piece(
            "ingredient_remnant", "remnant", arc,
            pole_scalars=(model_a.scalar_curvature,)))
    equator = 0.5 * math.pi * rho_b
    boundary_jet = hemisphere.detail.get("boundary_jet",
                                         (rho_b, 0.0, -1.0 / rho_b))
    hemi_arc = _round_remnant(
        rho_b, n - 1, r0_b, equator, n_profile_nodes,
        jet_start=tunnel.pieces[-1].profile.boundary_jets("end")[0],
        jet_end=tuple(boundary_jet))
    pieces.append(_sampled_piece("hemisphere_remnant", "remnant", hemi_arc))

    provenance = {
        "pipeline": pipeline_name,
        "ingredient": ingredient.summary(),
        "hemisphere": hemisphere.summary(),
        "attachment_model_a": attach_a,
        "attachment_model_b": attach_b,
        "glue_site_clearance": equator - r0_b,
        "boundary_policy": "glued at an interior pole only; the totally "
                           "geodesic boundary annulus is never modified",
        "tunnel": tunnel.provenance,
        "seed": seed,
    }
    if extra_provenance:
        provenance.update(extra_provenance)
    assembly = _chain(pipeline_name, pieces, provenance, tol=interface_tol)

    # dual route over the profile-backed pieces only: quadrature on one
    # side, closed-form sphere arithmetic on the other
    hemi_model_volume = hemisphere.detail.get(
        "model_volume", 0.5 * unit_sphere_volume(n) * rho_b ** n)
    route_closed = tunnel.total_volume + (hemi_model_volume - ball_b)
    if exact_a:
        route_closed += ingredient.volume - ball_a
    volume_total = assembly.total_volume
    if not exact_a:
        volume_total += ingredient.volume - ball_a
    volume_total += hemisphere.volume - hemi_model_volume
    diameter_lower, diameter_upper = assembly.diameter_bounds()
    global_min = min(assembly.min_scalar, ingredient.certified_floor,
                     hemisphere.certified_floor)

    quantities = {
        "curvature_target": target,
        "ingredient_floor": ingredient.certified_floor,
        "hemisphere_floor": hemisphere.certified_floor,
        "tunnel_floor": floor,
        "global_min_scalar": global_min,
        "diameter_target": float(diameter_target),
        "diameter_lower": diameter_lower,
        "diameter_upper": diameter_upper,
        "volume_total": volume_total,
        "volume_accounting_gap": abs(assembly.total_volume - route_closed),
        "max_interface_gap": assembly.max_interface_gap,
        "boundary_jet_gap": max(
            abs(a - b) for a, b in
            zip(hemi_arc.boundary_jets("end")[0], boundary_jet)),
        "boundary_profile_deviation": _boundary_deviation(hemi_arc,
                                                          boundary_jet),
    }
    if extra_quantities:
        quantities.update(extra_quantities)
    claims = [
        ("ingredient_floor_strict", "ingredient_floor", ">", "curvature_target"),
        ("hemisphere_floor_strict", "hemisphere_floor", ">", "curvature_target"),
        ("scalar_floor", "global_min_scalar", ">", "curvature_target"),
        ("diameter_reached", "diameter_lower", ">=", "diameter_target"),
        ("interfaces_glued", "max_interface_gap", "<=", 1e-8),
        ("boundary_unchanged", "boundary_jet_gap", "<=", 1e-8),
        ("boundary_profile_consistent", "boundary_profile_deviation", "<=", 1e-4),
        ("volume_additivity", "volume_accounting_gap", "<=", 1e-6),
    ] + list(extra_claims)
    parameters = {
        "dim": n,
        "ingredient": ingredient.name,
        "hemisphere": hemisphere.name,
        "diameter_target": float(diameter_target),
        "sharpness": float(sharpness),
        "tube_radius": float(tube_radius),
        "grid_density": float(grid_density),
        "n_profile_nodes": int(n_profile_nodes),
        "seed": seed,
    }
    if extra_parameters:
        parameters.update(extra_parameters)
    return _finalize(pipeline_name, parameters, quantities, claims,
                     provenance, {"chain": assembly}, certificate_path,
                     profiles_dir, tolerance)


def attach_product_ingredient(base_dim: int, slice_dim: int, *,
                              factor_radius: float | None = None,
                              max_rescalings: int = 40,
                              tube_radius: float = 0.05,
                              **options) -> PipelineResult:
    """Hemisphere attachment whose ingredient is a round product of spheres.

    The floor is recomputed from the factor dimensions and radius, never
    assumed.  If the requested radius leaves the floor at or below the
    n(n-1) target, the radius is halved until the floor clears it and
    the chosen value lands in the certificate; running out of halvings
    raises FloorCheckFailed.  The certificate notes that the certified
    object is the round product; a connected-sum reading of the factors
    is not what is certified here.
    """
    p, q = int(base_dim), int(slice_dim)
    if p < 1 or q < 1:
        raise ParameterOutOfRange("product factor dimensions must be >= 1")
    n = p + q
    if n < 3:
        raise ParameterOutOfRange("product attachment needs dimension >= 3")
    target = float(n * (n - 1))
    scale = (1.0 / math.sqrt(2.0 * target) if factor_radius is None
             else float(factor_radius))
    if not scale > 0.0:
        raise ParameterOutOfRange("factor radius must be positive")
    base_curv = float(p * (p - 1) + q * (q - 1))
    if base_curv == 0.0:
        raise FloorCheckFailed(
            "product of two circles is flat; no rescaling clears the target")
    swept = 0
    while not base_curv / scale ** 2 > target and swept < max_rescalings:
        scale *= 0.5
        swept += 1
    if not base_curv / scale ** 2 > target:
        raise FloorCheckFailed(
            f"product floor {base_curv / scale ** 2:.6g} never cleared "
            f"{target:.6g} within {max_rescalings} rescalings")
    ingredient = product_ingredient(p, q, scale)
    note = ("certified object is the round product of the two sphere "
            "factors; a connected-sum reading of the same factors is a "
            "different space and is not certified here")
    return attach_hemisphere(
        ingredient,
        tube_radius=tube_radius,
        pipeline_name="product_attachment",
        extra_quantities={
            "product_floor_recomputed": ingredient.recomputed_floor(),
            "factor_radius": scale,
        },
        extra_claims=[("product_floor_strict", "product_floor_recomputed",
                       ">", "curvature_target")],
        extra_parameters={"factor_dims": [p, q], "rescalings": swept},
        extra_provenance={"construction_note": note,
                          "factor_radius_swept": bool(swept)},
        **options)


def sphere_chain_certificate(volume_target: float, dim: int = 3, *,
                             hemisphere: IngredientMetric | None = None,
                             sharpness: float = 100.0,
                             tube_radius: float = 0.1,
                             grid_density: float = 1.0,
                             n_profile_nodes: int = 1024,
                             interface_tol: float = DEFAULT_INTERFACE_TOL,
                             tolerance: float = 1e-9,
                             seed: int | None = None,
                             certificate_path=None,
                             profiles_dir=None) -> PipelineResult:
    """Beat a volume target by chaining unit round spheres.

    Picks the even count m with floor(m/2) unit-sphere volumes already
    above the target, strings the spheres along identical tunnels, then
    attaches the hemisphere at the far end.  Each gluing spends at most
    1/sharpness of curvature, so the certified composed floor is
    n(n-1) - m/sharpness; the claim list carries that composition
    explicitly rather than assuming losses cancel.
    """
    if not volume_target > 0.0:
        raise ParameterOutOfRange("volume target must be positive")
    n = int(dim)
    if n < 3:
        raise ParameterOutOfRange("sphere chain needs dimension >= 3")
    target = float(n * (n - 1))
    omega = unit_sphere_volume(n)
    m = 2 * (int(volume_target / omega) + 1)
    if hemisphere is None:
        hemisphere = hemisphere_standin(n)
    if not hemisphere.certified_floor > target:
        raise IngredientFloorTooLow(
            f"hemisphere floor {hemisphere.certified_floor:.9g} must exceed "
            f"{target:.9g} strictly")

    unit = round_sphere(n, 1.0)
    link = build_tunnel(unit, tube_radius, length=0.0, sharpness=sharpness,
                        grid_density=grid_density,
                        n_profile_nodes=n_profile_nodes,
                        interface_tol=interface_tol)
    model_b, attach_b = _attachment_model(hemisphere, target)
    attach = build_tunnel_between(
        unit, model_b, tube_radius, tube_radius, target - 1.0 / sharpness,
        length=0.0, grid_density=grid_density,
        n_profile_nodes=n_profile_nodes, interface_tol=interface_tol)
    r0 = link.provenance["side"]["start_radius"]
    r0_aa = attach.provenance["side_a"]["start_radius"]
    r0_ab = attach.provenance["side_b"]["start_radius"]
    rho_b = model_b.slice_curv ** -0.5
    link_start = link.pieces[0].profile.boundary_jets("start")[0]
    link_end = link.pieces[-1].profile.boundary_jets("end")[0]

    pieces = []
    first = _round_remnant(1.0, n - 1, math.pi, r0, n_profile_nodes,
                           closed_start=True, jet_end=link_start)
    pieces.append(_sampled_piece("sphere_01", "remnant", first,
                                 pole_scalars=(target,)))
    for i in range(1, m):
        pieces.extend(_rename(link.pieces, f"link{i:02d}"))
        if i < m - 1:
            body = _round_remnant(1.0, n - 1, r0, math.pi - r0,
                                  n_profile_nodes, jet_start=link_end,
                                  jet_end=link_start)
            pieces.append(_sampled_piece(f"sphere_{i + 1:02d}", "remnant",
                                         body))
    last = _round_remnant(
        1.0, n - 1, r0, math.pi - r0_aa, n_profile_nodes,
        jet_start=link_end,
        jet_end=attach.pieces[0].profile.boundary_jets("start")[0])
    pieces.append(_sampled_piece(f"sphere_{m:02d}", "remnant", last))
    pieces.extend(_rename(attach.pieces, "attach"))
    equator = 0.5 * math.pi * rho_b
    boundary_jet = hemisphere.detail.get("boundary_jet",
                                         (rho_b, 0.0, -1.0 / rho_b))
    hemi_arc = _round_remnant(
        rho_b, n - 1, r0_ab, equator, n_profile_nodes,
        jet_start=attach.pieces[-1].profile.boundary_jets("end")[0],
        jet_end=tuple(boundary_jet))
    pieces.append(_sampled_piece("hemisphere_remnant", "remnant", hemi_arc))

    provenance = {
        "pipeline": "sphere_chain",
        "hemisphere": hemisphere.summary(),
        "attachment_model_b": attach_b,
        "link_tunnel": link.provenance,
        "attach_tunnel": attach.provenance,
        "link_note": "all inter-sphere tunnels reuse one built profile "
                     "chain; links differ only by name",
        "seed": seed,
    }
    assembly = _chain("sphere_chain", pieces, provenance, tol=interface_tol)

    cap = round_ball_volume(n, 1.0, r0)
    cap_aa = round_ball_volume(n, 1.0, r0_aa)
    cap_b = round_ball_volume(n, rho_b, r0_ab)
    hemi_model_volume = hemisphere.detail.get(
        "model_volume", 0.5 * unit_sphere_volume(n) * rho_b ** n)
    # caps of radius r0 removed: one from each end sphere, two from each
    # of the m-2 middles, so 2(m-1) in total, plus the attachment caps
    route_closed = (m * omega - 2.0 * (m - 1) * cap - cap_aa - cap_b
                    + (m - 1) * link.total_volume + attach.total_volume
                    + hemi_model_volume)
    diameter_lower, diameter_upper = assembly.diameter_bounds()
    floor_composed = target - m / sharpness
    global_min = min(assembly.min_scalar, hemisphere.certified_floor)
    volume_total = (assembly.total_volume
                    + hemisphere.volume - hemi_model_volume)

    quantities = {
        "curvature_target": target,
        "volume_target": float(volume_target),
        "unit_sphere_volume": omega,
        "sphere_count": m,
        "hemisphere_floor": hemisphere.certified_floor,
        "floor_composed": floor_composed,
        "global_min_scalar": global_min,
        "volume_total": volume_total,
        "volume_accounting_gap": abs(assembly.total_volume - route_closed),
        "diameter_lower": diameter_lower,
        "diameter_upper": diameter_upper,
        "max_interface_gap": assembly.max_interface_gap,
    }
    claims = [
        ("volume_target_met", "volume_total", ">=", "volume_target"),
        ("scalar_floor_composed", "global_min_scalar", ">", "floor_composed"),
        ("hemisphere_floor_strict", "hemisphere_floor", ">", "curvature_target"),
        ("interfaces_glued", "max_interface_gap", "<=", 1e-8),
        ("volume_additivity", "volume_accounting_gap", "<=", 1e-6),
    ]
    parameters = {
        "dim": n,
        "volume_target": float(volume_target),
        "hemisphere": hemisphere.name,
        "sharpness": float(sharpness),
        "tube_radius": float(tube_radius),
        "grid_density": float(grid_density),
        "n_profile_nodes": int(n_profile_nodes),
        "seed": seed,
    }
    return _finalize("sphere_chain", parameters, quantities, claims,
                     provenance, {"chain": assembly}, certificate_path,
                     profiles_dir, tolerance)


def verify_volume_budget(hemisphere: IngredientMetric | None,
                         excess_scale: float, *,
                         diameter_target: float = 10.0,
                         dim: int = 3,
                         ball_radius: float | None = None,
                         budget_constant: float | None = None,
                         grid_density: float = 1.0,
                         n_profile_nodes: int = 1024,
                         interface_tol: float = DEFAULT_INTERFACE_TOL,
                         tolerance: float = 1e-9,
                         seed: int | None = None,
                         certificate_path=None,
                         profiles_dir=None) -> PipelineResult:
    """Long thin tunnel from a certified hemisphere to a small sphere.

    The hemisphere is an external hypothesis: its volume must sit within
    omega_n * eps^n of the half-sphere reference and its floor above
    n(n-1).  A tunnel of length diameter_target and mouth radius below
    eps runs to a round sphere of radius 10 * eps, and the certificate
    walks the volume excess through five checked links: reference vs
    remnant, remnant vs tunnel, tunnel vs measured total, quadrature vs
    closed-form additivity, and total vs the a-priori budget
    reference + C * eps^(n-1) with C recorded and independent of eps.
    """
    if hemisphere is None:
        raise MissingIngredient(
            "an externally certified hemisphere is required; supply its "
            "floor and volume as an IngredientMetric")
    n = int(dim)
    if n < 3:
        raise ParameterOutOfRange("volume budget check needs dimension >= 3")
    target = float(n * (n - 1))
    omega = unit_sphere_volume(n)
    eps = float(excess_scale)
    if not 0.0 < eps <= 0.08:
        raise ParameterOutOfRange(
            "excess scale must lie in (0, 0.08]; beyond that the small "
            "sphere cannot keep its curvature above the target")
    if hemisphere.dim != n:
        raise ParameterOutOfRange(
            f"hemisphere dimension {hemisphere.dim} != {n}")
    if not hemisphere.certified_floor > target:
        raise IngredientFloorTooLow(
            f"hemisphere floor {hemisphere.certified_floor:.9g} must exceed "
            f"{target:.9g} strictly")
    delta = 0.8 * eps if ball_radius is None else float(ball_radius)
    if not 0.0 < delta < eps:
        raise ParameterOutOfRange(
            f"removed ball radius {delta:.6g} must be positive and smaller "
            f"than the excess scale {eps:.6g}")

    eta = 10.0 * eps
    eta_model = round_sphere(n, eta)
    model_a, attach_a = _attachment_model(hemisphere, target)
    floor = target + 0.5 * min(hemisphere.certified_floor - target,
                               eta_model.scalar_curvature - target)
    tube = delta / 1.98
    tunnel = build_tunnel_between(
        model_a, eta_model, tube, tube, floor, length=diameter_target,
        grid_density=grid_density, n_profile_nodes=n_profile_nodes,
        interface_tol=interface_tol)
    r0_a = tunnel.provenance["side_a"]["start_radius"]
    r0_b = tunnel.provenance["side_b"]["start_radius"]
    rho_a = model_a.slice_curv ** -0.5
    ball_a = round_ball_volume(n, rho_a, r0_a)
    cap_eta = round_ball_volume(n, eta, r0_b)

    equator = 0.5 * math.pi * rho_a
    boundary_jet = hemisphere.detail.get("boundary_jet",
                                         (rho_a, 0.0, -1.0 / rho_a))
    hemi_arc = _round_remnant(
        rho_a, n - 1, equator, r0_a, n_profile_nodes,
        jet_start=tuple(boundary_jet),
        jet_end=tunnel.pieces[0].profile.boundary_jets("start")[0])
    eta_arc = _round_remnant(
        eta, n - 1, r0_b, math.pi * eta, n_profile_nodes, closed_end=True,
        jet_start=tunnel.pieces[-1].profile.boundary_jets("end")[0])
    hemi_piece = _sampled_piece("hemisphere_remnant", "remnant", hemi_arc)
    eta_piece = _sampled_piece("small_sphere_remnant", "remnant", eta_arc,
                               pole_scalars=(eta_model.scalar_curvature,))
    provenance = {
        "pipeline": "volume_budget",
        "hemisphere": hemisphere.summary(),
        "ingredient_status": "EXTERNAL-TRUSTED" if
            hemisphere.trust == "external-trusted" else "closed-form",
        "attachment_model_a": attach_a,
        "small_sphere_radius": eta,
        "tunnel": tunnel.provenance,
        "seed": seed,
    }
    pieces = [hemi_piece] + list(tunnel.pieces) + [eta_piece]
    assembly = _chain("volume_budget", pieces, provenance, tol=interface_tol)

    pack = omega * eps ** n
    vol_reference = 0.5 * omega
    vol_remnant = hemisphere.volume - ball_a
    vol_tunnel = tunnel.total_volume
    vol_eta = omega * eta ** n - cap_eta
    volume_total = vol_remnant + vol_tunnel + vol_eta
    hemi_model_closed = 0.5 * omega * rho_a ** n - ball_a
    additivity_gap = (abs(hemi_piece.volume - hemi_model_closed)
                      + abs(eta_piece.volume - vol_eta))
    if budget_constant is None:
        # a-priori, eps-free: lateral tube area times stretched length,
        # plus the small-sphere block at the largest admitted scale
        budget_constant = (1.2 * unit_sphere_volume(n - 1) * 0.46 ** (n - 1)
                           * (diameter_target + 1.0)
                           + (10.0 ** n + 2.0) * omega * 0.08)
    bound_final = vol_reference + budget_constant * eps ** (n - 1)
    diameter_lower, diameter_upper = assembly.diameter_bounds()
    global_min = min(assembly.min_scalar, hemisphere.certified_floor)

    quantities = {
        "curvature_target": target,
        "excess_scale": eps,
        "ball_radius": delta,
        "small_sphere_radius": eta,
        "ingredient_floor": hemisphere.certified_floor,
        "ingredient_volume": hemisphere.volume,
        "vol_reference": vol_reference,
        "hypothesis_gap": abs(hemisphere.volume - vol_reference),
        "hypothesis_allowance": pack,
        "ball_removed": ball_a,
        "vol_remnant": vol_remnant,
        "vol_tunnel": vol_tunnel,
        "vol_small_sphere": vol_eta,
        "volume_total": volume_total,
        "bound_removal": vol_remnant + 2.0 * pack,
        "bound_tunnel": vol_remnant + vol_tunnel + (10.0 ** n - 1.0) * pack,
        "excess_budget_constant": budget_constant,
        "bound_final": bound_final,
        "achieved_excess_constant": (volume_total - vol_reference)
                                    / eps ** (n - 1),
        "additivity_gap": additivity_gap,
        "global_min_scalar": global_min,
        "diameter_target": float(diameter_target),
        "diameter_lower": diameter_lower,
        "diameter_upper": diameter_upper,
        "max_interface_gap": assembly.max_interface_gap,
    }
    claims = [
        ("hypothesis_volume", "hypothesis_gap", "<", "hypothesis_allowance"),
        ("hypothesis_floor", "ingredient_floor", ">", "curvature_target"),
        ("link1_reference_vs_removal", "vol_reference", "<=", "bound_removal"),
        ("link2_removal_vs_tunnel", "bound_removal", "<=", "bound_tunnel"),
        ("link3_tunnel_vs_total", "bound_tunnel", "<=", "volume_total"),
        ("link4_additivity", "additivity_gap", "<=", 1e-6),
        ("link5_total_vs_budget", "volume_total", "<=", "bound_final"),
        ("scalar_floor", "global_min_scalar", ">", "curvature_target"),
        ("diameter_reached", "diameter_lower", ">=", "diameter_target"),
        ("interfaces_glued", "max_interface_gap", "<=", 1e-8),
    ]
    parameters = {
        "dim": n,
        "excess_scale": eps,
        "ball_radius": delta,
        "diameter_target": float(diameter_target),
        "hemisphere": hemisphere.name,
        "grid_density": float(grid_density),
        "n_profile_nodes": int(n_profile_nodes),
        "seed": seed,
    }
    return _finalize("volume_budget", parameters, quantities, claims,
                     provenance, {"chain": assembly}, certificate_path,
                     profiles_dir, tolerance)


# ----------------------------------------------------- plain certificates

def tunnel_certificate(dim: int = 3, curvature: float = 6.0,
                       tube_radius: float = 0.1, length: float = 2.0,
                       sharpness: float = 100.0, *,
                       grid_density: float = 1.0,
                       n_profile_nodes: int = 1024,
                       interface_tol: float = DEFAULT_INTERFACE_TOL,
                       tolerance: float = 1e-9,
                       seed: int | None = None,
                       certificate_path=None,
                       profiles_dir=None) -> PipelineResult:
    """Certify one tunnel within a single round ambient model.

    Claims the sampled scalar curvature stays above
    curvature - 1/sharpness, the diameter lower bound clears the
    requested length, and all interfaces glue below tolerance.  The
    volume is normalized by tube^n + length*tube^(n-1) so tunnels across
    scales can be compared against one constant.
    """
    n = int(dim)
    if n < 3:
        raise ParameterOutOfRange("tunnel certificate needs dimension >= 3")
    if not curvature > 0.0:
        raise ParameterOutOfRange("ambient curvature must be positive")
    model = AmbientModel(0, n, 1.0, curvature / (n * (n - 1)))
    tunnel = build_tunnel(model, tube_radius, length=length,
                          sharpness=sharpness, grid_density=grid_density,
                          n_profile_nodes=n_profile_nodes,
                          interface_tol=interface_tol)
    diameter_lower, diameter_upper = tunnel.diameter_bounds()
    norm = tube_radius ** n + length * tube_radius ** (n - 1)
    quantities = {
        "curvature": float(curvature),
        "floor": tunnel.provenance["floor"],
        "global_min_scalar": tunnel.min_scalar,
        "length_target": float(length),
        "diameter_lower": diameter_lower,
        "diameter_upper": diameter_upper,
        "volume_total": tunnel.total_volume,
        "achieved_volume_constant": tunnel.total_volume / norm,
        "max_interface_gap": tunnel.max_interface_gap,
    }
    claims = [
        ("scalar_floor", "global_min_scalar", ">", "floor"),
        ("length_reached", "diameter_lower", ">=", "length_target"),
        ("interfaces_glued", "max_interface_gap", "<=", 1e-8),
    ]
    parameters = {
        "dim": n,
        "curvature": float(curvature),
        "tube_radius": float(tube_radius),
        "length": float(length),
        "sharpness": float(sharpness),
        "grid_density": float(grid_density),
        "n_profile_nodes": int(n_profile_nodes),
        "seed": seed,
    }
    provenance = {"pipeline": "tunnel", "tunnel": tunnel.provenance,
                  "seed": seed}
    return _finalize("tunnel", parameters, quantities, claims, provenance,
                     {"tunnel": tunnel}, certificate_path, profiles_dir,
                     tolerance)


def surgery_certificate(base_dim: int, slice_dim: int, tube_radius: float, *,
                        allowance: float | None = None,
                        base_radius: float = 1.0, slice_radius: float = 1.0,
                        grid_density: float = 1.0,
                        n_profile_nodes: int = 1024,
                        interface_tol: float = DEFAULT_INTERFACE_TOL,
                        tolerance: float = 1e-9,
                        seed: int | None = None,
                        certificate_path=None,
                        profiles_dir=None) -> PipelineResult:
    """Certify a codimension >= 3 surgery on a product of round spheres.

    allowance is the delta in both certified bands: scalar curvature
    above kappa - delta and total volume within (1 +- delta) of the
    unmodified product.  It defaults to the tube radius, matching the
    surgery builder's own curvature budget.
    """
    delta = float(tube_radius if allowance is None else allowance)
    if not delta > 0.0:
        raise ParameterOutOfRange("allowance must be positive")
    surgery = perform_surgery(base_dim, slice_dim, tube_radius,
                              base_radius=base_radius,
                              slice_radius=slice_radius, budget=delta,
                              grid_density=grid_density,
                              n_profile_nodes=n_profile_nodes,
                              interface_tol=interface_tol)
    kappa = surgery.provenance["floor"] + delta
    reference = surgery.provenance["volume_reference"]
    quantities = {
        "ambient_curvature": kappa,
        "floor": surgery.provenance["floor"],
        "global_min_scalar": surgery.min_scalar,
        "volume_reference": reference,
        "volume_total": surgery.total_volume,
        "volume_lower_band": (1.0 - delta) * reference,
        "volume_upper_band": (1.0 + delta) * reference,
        "max_interface_gap": surgery.max_interface_gap,
    }
    claims = [
        ("scalar_floor", "global_min_scalar", ">", "floor"),
        ("volume_above_band", "volume_total", ">=", "volume_lower_band"),
        ("volume_below_band", "volume_total", "<=", "volume_upper_band"),
        ("interfaces_glued", "max_interface_gap", "<=", 1e-8),
    ]
    parameters = {
        "base_dim": int(base_dim),
        "slice_dim": int(slice_dim),
        "tube_radius": float(tube_radius),
        "allowance": delta,
        "base_radius": float(base_radius),
        "slice_radius": float(slice_radius),
        "grid_density": float(grid_density),
        "n_profile_nodes": int(n_profile_nodes),
        "seed": seed,
    }
    provenance = {"pipeline": "surgery", "surgery": surgery.provenance,
                  "seed": seed}
    return _finalize("surgery", parameters, quantities, claims, provenance,
                     {"surgery": surgery}, certificate_path, profiles_dir,
                     tolerance)
