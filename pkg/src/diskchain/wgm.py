"""Single-microdisk TM whispering-gallery-mode solver.

The disk is reduced to two scalar transcendental equations:

* radial:   n_eff * J_{m+1}(k n_eff R) / J_m(k n_eff R)
                = H_{m+1}^(1)(k R) / H_m^(1)(k R)
* axial:    sqrt(n_c^2 - n_eff^2) * tan(beta h / 2) = n_c^2 * sqrt(n_eff^2 - 1),
            beta = k * sqrt(n_c^2 - n_eff^2)

The system is triangular: the radial equation fixes n_eff without knowing
h, then the axial equation gives h in closed form on the fundamental
branch (beta h / 2 inside (0, pi/2)):

    h = (2 / beta) * atan(n_c^2 sqrt(n_eff^2 - 1) / sqrt(n_c^2 - n_eff^2))

The radial equation mixes a real left side with a complex right side (the
Hankel ratio).  Its imaginary part is the radiative leakage of the mode
and has no real root; the solver finds the root of the real part, which
is the standard high-Q approximation.  The full complex residual is kept
available as a diagnostic: it is ~1e-13 for well-confined geometries and
grows toward ~0.2 as k R approaches the turning point m (large R rows of
the design table), which simply measures how leaky those modes are.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import math
from typing import Optional

import numpy as np

from .core import CONSTANTS
from .specfun import bessel_j, hankel1


class NoSolutionError(RuntimeError):
    """No whispering-gallery solution for the requested geometry."""


class BelowCutoffError(RuntimeError):
    """Slab too thin: no fundamental-branch guided solution."""


@dataclass(frozen=True)
class DiskGeometry:
    """One microdisk: radius and thickness in um.

    thickness may be None while the disk is still being designed (it is
    the solver output); every other invariant is enforced on creation.
    """

    radius: float
    azimuthal_number: int
    refractive_index: float = CONSTANTS.diamond_index
    thickness: Optional[float] = None

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError(f"radius: must be > 0, got {self.radius}")
        if self.thickness is not None and self.thickness <= 0.0:
            raise ValueError(f"thickness: must be > 0, got {self.thickness}")
        if self.refractive_index <= 1.0:
            raise ValueError("refractive_index: n_c > 1 required, got "
                             f"{self.refractive_index}")
        if int(self.azimuthal_number) != self.azimuthal_number or self.azimuthal_number < 1:
            raise ValueError("azimuthal_number: integer >= 1 required, got "
                             f"{self.azimuthal_number}")


@dataclass(frozen=True)
class WgmMode:
    """A solved TM_{m,1} mode."""

    k: float        # vacuum wavevector, 1/um
    n_eff: float
    beta: float     # axial wavevector inside the slab, 1/um
    geometry: DiskGeometry

    def __post_init__(self):
        nc = self.geometry.refractive_index
        if not (1.0 < self.n_eff < nc):
            raise ValueError(f"n_eff: must lie in (1, n_c), got {self.n_eff}")
        beta_def = self.k * math.sqrt(nc * nc - self.n_eff * self.n_eff)
        if abs(self.beta - beta_def) > 1e-9 * max(1.0, beta_def):
            raise ValueError("beta: inconsistent with k*sqrt(n_c^2 - n_eff^2)")

    @property
    def gamma(self) -> float:
        """Exterior axial decay constant k*sqrt(n_eff^2 - 1), 1/um."""
        return self.k * math.sqrt(self.n_eff**2 - 1.0)


# ---------------------------------------------------------------------------
# axial (slab) equation


def _slab_misfit(n: float, k: float, h: float, nc: float) -> float:
    b = k * math.sqrt(nc * nc - n * n)
    return math.sqrt(nc * nc - n * n) * math.tan(0.5 * b * h) \
        - nc * nc * math.sqrt(n * n - 1.0)


def slab_effective_index(k: float, h: float, n_c: float) -> float:
    """Fundamental-branch effective index of the symmetric TM slab.

    Bisection on n_eff in (n_lo, n_c) where n_lo keeps beta*h/2 below
    pi/2, so the search never leaves the fundamental branch.  The misfit
    is positive at the lower end and negative at n_c, which brackets the
    root.
    """
    if k <= 0.0 or h <= 0.0:
        raise ValueError("slab_effective_index: k and h must be > 0")
    if n_c <= 1.0:
        raise ValueError("slab_effective_index: n_c > 1 required")
    lim = n_c * n_c - (math.pi / (k * h)) ** 2
    n_lo = math.sqrt(lim) if lim > 1.0 else 1.0
    eps = 1e-13 * n_c
    lo, hi = n_lo + eps, n_c - eps
    if not (lo < hi):
        raise BelowCutoffError("slab_effective_index: empty fundamental bracket")
    flo = _slab_misfit(lo, k, h, n_c)
    # the lower bracket end can land a rounding error past the tan pole
    # when the branch limit is active; inch upward until the sign settles
    step = eps
    while flo <= 0.0 and lim > 1.0 and step < 1e-6 * (hi - lo):
        lo += step
        step *= 4.0
        flo = _slab_misfit(lo, k, h, n_c)
    fhi = _slab_misfit(hi, k, h, n_c)
    if not (flo > 0.0 > fhi):
        raise BelowCutoffError(
            "slab_effective_index: no fundamental-branch root (below cutoff)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f = _slab_misfit(mid, k, h, n_c)
        if f > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def thickness_for_index(k: float, n_eff: float, n_c: float) -> float:
    """Closed-form fundamental-branch inverse of the slab equation."""
    if not (1.0 < n_eff < n_c):
        raise ValueError("thickness_for_index: need 1 < n_eff < n_c")
    beta = k * math.sqrt(n_c * n_c - n_eff * n_eff)
    gamma = math.sqrt(n_eff * n_eff - 1.0)
    return (2.0 / beta) * math.atan(n_c * n_c * gamma
                                    / math.sqrt(n_c * n_c - n_eff * n_eff))


# ---------------------------------------------------------------------------
# radial equation


def radial_residual(m: int, k: float, n_eff: float, R: float) -> complex:
    """LHS - RHS of the radial resonance condition, complex.

    Near a zero of J_m(k n_eff R) the left side has a pole; there the
    reciprocal form (inverted ratios, same root set) is returned instead
    so scans across the pole stay finite.
    """
    x_in = k * n_eff * R
    j0 = bessel_j(m, x_in)
    j1 = bessel_j(m + 1, x_in)
    h0 = hankel1(m, k * R)
    h1 = hankel1(m + 1, k * R)
    if abs(j0) < 1e-10 * abs(j1):
        return j0 / (n_eff * j1) - h0 / h1
    return n_eff * j1 / j0 - h1 / h0


def _radial_lhs_grid(m: int, k: float, R: float, n_grid: np.ndarray) -> np.ndarray:
    x = k * R * n_grid
    j0 = bessel_j(m, x)
    j1 = bessel_j(m + 1, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        return n_grid * j1 / j0


def solve_disk(R: float, m: int, lam0: float = CONSTANTS.zpl_wavelength,
               n_c: float = CONSTANTS.diamond_index) -> tuple:
    """Design the disk: (n_eff, h) of the TM_{m,1} mode at wavelength lam0.

    Scans n_eff above the interior turning point m/(kR), brackets sign
    changes of the real radial misfit, and keeps the first genuine root
    (pole crossings of J_m masquerade as sign changes; they are rejected
    because the misfit stays large at the bisected point).  The first
    root above the turning point is the fundamental radial mode.
    """
    if R <= 0.0 or lam0 <= 0.0:
        raise ValueError("solve_disk: R and lam0 must be > 0")
    m = int(m)
    k = 2.0 * math.pi / lam0
    if k * R * n_c <= m:
        raise NoSolutionError(
            f"solve_disk: k R n_c = {k * R * n_c:.2f} <= m = {m}; "
            "no interior oscillatory solution at this radius")
    rhs_c = hankel1(m + 1, k * R) / hankel1(m, k * R)
    rhs = rhs_c.real
    n_lo = max(1.0, m / (k * R)) + 1e-6
    n_hi = n_c - 1e-9
    if n_lo >= n_hi:
        raise NoSolutionError("solve_disk: empty n_eff search interval")
    grid = np.linspace(n_lo, n_hi, 4001)
    vals = _radial_lhs_grid(m, k, R, grid) - rhs

    def misfit(n):
        return float(_radial_lhs_grid(m, k, R, np.array([n]))[0]) - rhs

    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or a * b > 0.0:
            continue
        lo, hi = float(grid[i]), float(grid[i + 1])
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            v = misfit(mid)
            if not np.isfinite(v):
                break
            if (v > 0.0) == (b > 0.0):
                hi = mid
            else:
                lo = mid
        root = 0.5 * (lo + hi)
        # genuine root vs. pole of J_m: at a pole the misfit is still huge
        if abs(misfit(root)) < 1e-3 * (1.0 + abs(rhs)):
            h = thickness_for_index(k, root, n_c)
            return root, h
    raise NoSolutionError(f"solve_disk: no radial root for m={m}, R={R}")


def solve_mode(R: float, m: int, lam0: float = CONSTANTS.zpl_wavelength,
               n_c: float = CONSTANTS.diamond_index) -> WgmMode:
    """solve_disk plus packaging into a WgmMode with the solved geometry."""
    n_eff, h = solve_disk(R, m, lam0, n_c)
    k = 2.0 * math.pi / lam0
    geo = DiskGeometry(radius=R, azimuthal_number=int(m),
                       refractive_index=n_c, thickness=h)
    beta = k * math.sqrt(n_c * n_c - n_eff * n_eff)
    return WgmMode(k=k, n_eff=n_eff, beta=beta, geometry=geo)


# ---------------------------------------------------------------------------
# field profile


def _radial_factor(mode: WgmMode, rho: np.ndarray) -> np.ndarray:
    """F(rho) on a 1-d array: J branch inside the rim, Hankel outside, F(R) = 1."""
    geo = mode.geometry
    m = geo.azimuthal_number
    out = np.empty(rho.shape, dtype=complex)
    inside = rho <= geo.radius
    if inside.any():
        jR = bessel_j(m, mode.k * mode.n_eff * geo.radius)
        out[inside] = bessel_j(m, mode.k * mode.n_eff * rho[inside]) / jR
    outside = ~inside
    if outside.any():
        hR = hankel1(m, mode.k * geo.radius)
        out[outside] = hankel1(m, mode.k * rho[outside]) / hR
    return out


def _axial_factor(mode: WgmMode, z: np.ndarray) -> np.ndarray:
    """Even fundamental slab profile on a 1-d array: cos(beta z) inside,
    exponential decay outside.

    The slab eigenvalue equation carries tan(beta h/2), i.e. an even
    standing wave across the slab, so that is the profile used (a running
    exp(i beta z) would not satisfy the matching that produced n_eff).
    """
    h2 = 0.5 * (mode.geometry.thickness if mode.geometry.thickness is not None
                else thickness_for_index(mode.k, mode.n_eff,
                                         mode.geometry.refractive_index))
    az = np.abs(z)
    inside = az <= h2
    out = np.empty(z.shape, dtype=float)
    out[inside] = np.cos(mode.beta * z[inside])
    outside = ~inside
    if outside.any():
        edge = math.cos(mode.beta * h2)
        out[outside] = edge * np.exp(-mode.gamma * (az[outside] - h2))
    return out


def field_profile(mode: WgmMode, rho, z, phi):
    """E_z of the TM mode at (rho, z, phi): F(rho) * axial(z) * exp(i m phi).

    Scalar or broadcastable array coordinates are accepted alike.
    """
    m = mode.geometry.azimuthal_number
    rho_a, z_a, phi_a = np.broadcast_arrays(np.asarray(rho, dtype=float),
                                            np.asarray(z, dtype=float),
                                            np.asarray(phi, dtype=float))
    if np.any(rho_a < 0.0):
        raise ValueError("field_profile: rho must be >= 0")
    shape = rho_a.shape
    val = _radial_factor(mode, rho_a.ravel()) \
        * _axial_factor(mode, z_a.ravel()) \
        * np.exp(1j * m * phi_a.ravel())
    if shape == ():
        return complex(val[0])
    return val.reshape(shape)


@dataclass(frozen=True)
class FieldProfile:
    """Callable field of one solved mode, with an overall amplitude.

    The bare profile is normalised to F(R) = 1 at the rim; amplitude is a
    free overall constant (the hopping rate must not depend on it, which
    the test suite asserts).
    """

    mode: WgmMode
    amplitude: float = 1.0

    def __call__(self, rho, z, phi):
        return self.amplitude * field_profile(self.mode, rho, z, phi)

    def with_amplitude(self, a: float) -> "FieldProfile":
        return replace(self, amplitude=a)


def axial_norm_integral(mode: WgmMode) -> float:
    """Integral of the axial profile squared across the slab interior.

    The overlap integrals are restricted to the disk interiors, so the
    axial direction contributes int_{-h/2}^{h/2} cos^2(beta z) dz, which
    is analytic.  It multiplies every transverse integral identically and
    cancels from all report ratios.
    """
    h = mode.geometry.thickness
    if h is None:
        h = thickness_for_index(mode.k, mode.n_eff,
                                mode.geometry.refractive_index)
    return 0.5 * h + math.sin(mode.beta * h) / (2.0 * mode.beta)
