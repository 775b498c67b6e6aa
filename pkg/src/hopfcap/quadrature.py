"""Integration over geodesic caps of S^3.

Geodesic polar coordinates about the cap center,

    x(rho, theta, phi) = cos(rho) c + sin(rho) (sin t cos p b1 + sin t sin p b2 + cos t b3),

carry the volume element sin^2(rho) sin(theta) drho dtheta dphi.  The
deterministic rule is Gauss-Legendre in rho and theta and periodic
trapezoid in phi; the stochastic rule draws uniform samples on the cap via
the inverse CDF of the radial density.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import CapDomain, SpherePoint, cap_volume, tangent_basis

WEIGHT_SUM_TOL = 1e-10


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for one cap, with error metadata."""

    nodes: np.ndarray    # (N, 4) points on S^3, strictly inside the cap
    weights: np.ndarray  # (N,) volume-measure weights
    domain: CapDomain
    kind: str            # "gauss" | "montecarlo"
    orders: tuple        # (n_rho, n_theta, n_phi) or (n_samples,)
    seed: int | None = None
    estimated_error: float = 0.0

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def cache_key(self) -> str:
        payload = {
            "center": [float(c) for c in self.domain.center.x],
            "radius": self.domain.radius,
            "orders": list(self.orders),
            "kind": self.kind,
            "seed": self.seed,
        }
        return json.dumps(payload, sort_keys=True)

    def save(self, path) -> None:
        np.savez(
            path,
            nodes=self.nodes,
            weights=self.weights,
            center=self.domain.center.x,
            radius=self.domain.radius,
            kind=self.kind,
            orders=np.asarray(self.orders),
            seed=-1 if self.seed is None else self.seed,
            estimated_error=self.estimated_error,
        )

    @classmethod
    def load(cls, path) -> "QuadratureRule":
        data = np.load(path, allow_pickle=False)
        seed = int(data["seed"])
        return cls(
            nodes=data["nodes"],
            weights=data["weights"],
            domain=CapDomain(SpherePoint(data["center"]), float(data["radius"])),
            kind=str(data["kind"]),
            orders=tuple(int(o) for o in data["orders"]),
            seed=None if seed < 0 else seed,
            estimated_error=float(data["estimated_error"]),
        )


def _polar_nodes(cap: CapDomain, rho, theta, phi):
    """Map polar coordinate grids (flat, same length) to ambient points."""
    b1, b2, b3 = tangent_basis(cap.center)
    direction = (
        np.sin(theta)[:, None] * np.cos(phi)[:, None] * b1
        + np.sin(theta)[:, None] * np.sin(phi)[:, None] * b2
        + np.cos(theta)[:, None] * b3
    )
    return np.cos(rho)[:, None] * cap.center.x + np.sin(rho)[:, None] * direction


def build_gauss_rule(cap: CapDomain, n_rho: int = 64, n_theta: int = 32, n_phi: int = 64) -> QuadratureRule:
    """Tensor-product rule: Gauss-Legendre in rho, theta; trapezoid in phi."""
    if min(n_rho, n_theta, n_phi) < 4:
        raise ValueError("quadrature orders must be >= 4")
    xr, wr = np.polynomial.legendre.leggauss(n_rho)
    rho = 0.5 * cap.radius * (xr + 1.0)
    wrho = 0.5 * cap.radius * wr * np.sin(rho) ** 2
    xt, wt = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * math.pi * (xt + 1.0)
    wtheta = 0.5 * math.pi * wt * np.sin(theta)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    wphi = np.full(n_phi, 2.0 * math.pi / n_phi)

    # Fixed flattening order (rho, theta, phi) for reproducible reductions.
    rr, tt, pp = [a.ravel() for a in np.meshgrid(rho, theta, phi, indexing="ij")]
    weights = (wrho[:, None, None] * wtheta[None, :, None] * wphi[None, None, :]).ravel()
    nodes = _polar_nodes(cap, rr, tt, pp)

    total = float(np.sum(weights))
    vol = cap_volume(cap)
    if abs(total - vol) > WEIGHT_SUM_TOL * max(1.0, vol):
        raise AssertionError(f"weight sum {total} misses cap volume {vol}")
    return QuadratureRule(
        nodes=nodes,
        weights=weights,
        domain=cap,
        kind="gauss",
        orders=(n_rho, n_theta, n_phi),
        estimated_error=abs(total - vol) + 1e-14 * vol,
    )


def _radial_inverse_cdf(cap: CapDomain, u: np.ndarray) -> np.ndarray:
    """Quantiles of the density proportional to sin^2 on (0, radius)."""
    grid = np.linspace(0.0, cap.radius, 20001)
    cdf = (2.0 * grid - np.sin(2.0 * grid)) / (2.0 * cap.radius - math.sin(2.0 * cap.radius))
    rho = np.interp(u, cdf, grid)
    # One Newton polish step; the density vanishes at 0, guard the slope.
    pdf = np.sin(rho) ** 2 / (0.5 * (2.0 * cap.radius - math.sin(2.0 * cap.radius)))
    resid = (2.0 * rho - np.sin(2.0 * rho)) / (2.0 * cap.radius - math.sin(2.0 * cap.radius)) - u
    safe = pdf > 1e-12
    rho = np.where(safe, rho - resid / np.where(safe, pdf, 1.0), rho)
    return np.clip(rho, 0.0, cap.radius)


def build_mc_rule(cap: CapDomain, n_samples: int = 10_000, seed: int = 0) -> QuadratureRule:
    """Uniform Monte Carlo samples on the cap with equal weights vol/n."""
    if n_samples < 1000:
        raise ValueError("Monte Carlo rule needs at least 1000 samples")
    rng = np.random.default_rng(seed)
    rho = _radial_inverse_cdf(cap, rng.random(n_samples))
    direction = rng.standard_normal((n_samples, 3))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    b = np.stack(tangent_basis(cap.center), axis=0)  # (3, 4)
    nodes = np.cos(rho)[:, None] * cap.center.x + np.sin(rho)[:, None] * (direction @ b)
    vol = cap_volume(cap)
    weights = np.full(n_samples, vol / n_samples)
    return QuadratureRule(
        nodes=nodes,
        weights=weights,
        domain=cap,
        kind="montecarlo",
        orders=(n_samples,),
        seed=seed,
        estimated_error=vol / math.sqrt(n_samples),
    )


def integrate(rule: QuadratureRule, f) -> tuple[float, float]:
    """Weighted sum of f over the rule nodes, plus an error estimate.

    ``f`` maps an (N, 4) array of points to (N,) scalars.  The reduction is
    numpy's fixed-order pairwise sum, bit-reproducible for a given rule.
    Gauss rules report a roundoff-level estimate; Monte Carlo rules report
    the standard error of the sample mean.
    """
    fx = np.asarray(f(rule.nodes), dtype=float)
    if fx.shape != (rule.size,):
        raise ValueError(f"integrand returned shape {fx.shape}, expected ({rule.size},)")
    bad = ~np.isfinite(fx)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError(f"non-finite integrand value {fx[i]} at node {i}: {rule.nodes[i]}")
    value = float(np.sum(rule.weights * fx))
    if rule.kind == "montecarlo":
        vol = cap_volume(rule.domain)
        err = float(vol * np.std(fx) / math.sqrt(rule.size))
    else:
        err = float(np.finfo(float).eps * np.sum(np.abs(rule.weights * fx))) + rule.estimated_error
    return value, err
