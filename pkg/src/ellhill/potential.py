"""The four-coupling elliptic Hill potential, its derivative and landscape.

u(x) = b0 k^2 sn^2 x + b1 k^2 cn^2 x / dn^2 x + b2 / sn^2 x + b3 dn^2 x / cn^2 x

with an equivalent all-sn form obtained by shifting the argument through the
half periods.  The four second-order poles sit at x = 0, K, K+iK', iK' (mod
periods); each is active only when the coupling that produces it is nonzero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .elliptic import EllipticModulus, JacobiTriple, jacobi, jacobi_many, \
    reduce_argument, shifted_identities
from .errors import PoleError

SINGULARITY_TOL = 1e-10
DEGENERACY_RATIO = 1e-6
LANDSCAPE_SENTINEL = math.inf


@dataclass(frozen=True)
class PotentialParams:
    """Couplings b0..b3 with their fixed square roots, plus the modulus.

    The square roots are cached once (either supplied or principal); every
    plus/minus formula downstream references these cached roots, which makes
    the six saddle labels deterministic.
    """

    b: tuple
    sqrt_b: tuple
    modulus: EllipticModulus

    @classmethod
    def from_b(cls, b0, b1, b2, b3, k=None, m=None) -> "PotentialParams":
        b = tuple(complex(v) for v in (b0, b1, b2, b3))
        roots = tuple(np.sqrt(complex(v)) for v in b)
        return cls(b, roots, _modulus_arg(k, m))

    @classmethod
    def from_sqrt_b(cls, r0, r1, r2, r3, k=None, m=None) -> "PotentialParams":
        roots = tuple(complex(v) for v in (r0, r1, r2, r3))
        b = tuple(v * v for v in roots)
        return cls(b, roots, _modulus_arg(k, m))

    def __post_init__(self):
        for bs, rs in zip(self.b, self.sqrt_b):
            if abs(rs * rs - bs) > 1e-14 * max(1.0, abs(bs)):
                raise ValueError("cached square roots inconsistent with couplings")

    @property
    def k(self):
        return self.modulus.k

    @property
    def m(self):
        return self.modulus.m

    @cached_property
    def coupling_scale(self):
        return max(abs(v) for v in self.b)

    @cached_property
    def is_degenerate(self):
        """True when b0 ~ b1 or b2 ~ b3; the asymptotic series collapse there."""
        b0, b1, b2, b3 = self.b
        scale = self.coupling_scale
        if scale == 0:
            return True
        return (abs(b0 - b1) < DEGENERACY_RATIO * scale
                or abs(b2 - b3) < DEGENERACY_RATIO * scale)

    def singularities(self):
        """Active second-order poles of u as (location, coupling index)."""
        mod = self.modulus
        points = ((1j * mod.K_prime, 0), (mod.K + 1j * mod.K_prime, 1),
                  (0j, 2), (mod.K, 3))
        return tuple((pt, s) for pt, s in points if self.b[s] != 0)


def _modulus_arg(k, m) -> EllipticModulus:
    if (k is None) == (m is None):
        raise ValueError("give exactly one of k or m")
    if k is not None:
        return EllipticModulus.from_k(k)
    return EllipticModulus.from_m(m)


def singularity_distance(x, p: PotentialParams):
    """Distance from x to the nearest active pole of u (lattice reduced)."""
    mod = p.modulus
    r, _ = reduce_argument(x, mod)
    d = np.full(np.shape(r), np.inf)
    for pt, _s in p.singularities():
        for a in (-1, 0, 1, 2):
            for b in (-1, 0, 1, 2):
                d = np.minimum(d, np.abs(r - (pt + 2 * a * mod.K + 2j * b * mod.K_prime)))
    return d


def _check_regular(x, p: PotentialParams):
    if float(np.min(singularity_distance(x, p))) < SINGULARITY_TOL:
        raise PoleError(f"x={x} within {SINGULARITY_TOL} of a potential singularity")


def eval_u(x: complex, p: PotentialParams) -> complex:
    """Potential in its rational sn/cn/dn form."""
    _check_regular(x, p)
    sn, cn, dn = jacobi(x, p.modulus)
    return _u_from_triple(sn, cn, dn, p)


def _u_from_triple(sn, cn, dn, p: PotentialParams):
    b0, b1, b2, b3 = p.b
    m = p.m
    total = b0 * m * sn * sn
    if b1 != 0:
        total += b1 * m * (cn / dn) ** 2
    if b2 != 0:
        total += b2 / (sn * sn)
    if b3 != 0:
        total += b3 * (dn / cn) ** 2
    return total


def eval_u_many(x, p: PotentialParams):
    """Vectorised u over an array; no pole checks (caller masks)."""
    sn, cn, dn = jacobi_many(x, p.modulus)
    b0, b1, b2, b3 = p.b
    m = p.m
    with np.errstate(divide="ignore", invalid="ignore"):
        total = b0 * m * sn * sn
        total = total + b1 * m * (cn / dn) ** 2
        if b2 != 0:
            total = total + b2 / (sn * sn)
        if b3 != 0:
            total = total + b3 * (dn / cn) ** 2
    return total


def eval_u_shifted(x: complex, p: PotentialParams) -> complex:
    """Potential in the equivalent all-sn form with half-period shifts.

    b0 k^2 sn^2 x + b1 k^2 sn^2(x+K) + b2 k^2 sn^2(x+iK') + b3 k^2 sn^2(x+K+iK')
    """
    _check_regular(x, p)
    b0, b1, b2, b3 = p.b
    m = p.m
    t = jacobi(x, p.modulus)
    total = b0 * m * t.sn ** 2
    for bs, shift in ((b1, "K"), (b2, "iK'"), (b3, "K+iK'")):
        if bs != 0:
            total += bs * m * shifted_identities(x, p.modulus, shift).sn ** 2
    return total


def eval_du(x: complex, p: PotentialParams) -> complex:
    """d u / d x assembled term by term via sn' = cn dn etc."""
    _check_regular(x, p)
    sn, cn, dn = jacobi(x, p.modulus)
    b0, b1, b2, b3 = p.b
    m = p.m
    kp2 = 1.0 - m
    total = 2.0 * b0 * m * sn * cn * dn
    if b1 != 0:
        total += -2.0 * b1 * m * kp2 * sn * cn / dn ** 3
    if b2 != 0:
        total += -2.0 * b2 * cn * dn / sn ** 3
    if b3 != 0:
        total += 2.0 * b3 * kp2 * sn * dn / cn ** 3
    return total


def eval_du_many(x, p: PotentialParams):
    sn, cn, dn = jacobi_many(x, p.modulus)
    b0, b1, b2, b3 = p.b
    m = p.m
    kp2 = 1.0 - m
    with np.errstate(divide="ignore", invalid="ignore"):
        total = 2.0 * b0 * m * sn * cn * dn
        total = total - 2.0 * b1 * m * kp2 * sn * cn / dn ** 3
        if b2 != 0:
            total = total - 2.0 * b2 * cn * dn / sn ** 3
        if b3 != 0:
            total = total + 2.0 * b3 * kp2 * sn * dn / cn ** 3
    return total


@dataclass
class LandscapeGrid:
    """|u| and arg u sampled on a rectangle, pole cells sentinel-marked."""

    x_samples: np.ndarray
    magnitude: np.ndarray
    phase: np.ndarray

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re_x", "im_x", "abs_u", "arg_u"])
            for x, mag, ph in zip(self.x_samples.ravel(),
                                  self.magnitude.ravel(), self.phase.ravel()):
                if math.isinf(mag):
                    writer.writerow([f"{x.real:.12g}", f"{x.imag:.12g}", "inf", ""])
                else:
                    writer.writerow([f"{x.real:.12g}", f"{x.imag:.12g}",
                                     f"{mag:.12g}", f"{ph:.12g}"])


def landscape(p: PotentialParams, window, nx: int, ny: int) -> LandscapeGrid:
    """Sample (|u|, arg u) on an nx-by-ny grid over a complex rectangle.

    window is a pair of opposite corners.  Cells closer to an active pole
    than ~3/4 of a cell diagonal (or overflowing) get the +inf sentinel with
    a NaN phase, keeping the grid rectangular for plotting.
    """
    if nx < 2 or ny < 2:
        raise ValueError("landscape needs nx, ny >= 2")
    c0, c1 = complex(window[0]), complex(window[1])
    re = np.linspace(c0.real, c1.real, nx)
    im = np.linspace(c0.imag, c1.imag, ny)
    X = re[None, :] + 1j * im[:, None]
    u = eval_u_many(X, p)
    mag = np.abs(u)
    phase = np.angle(u)
    # phase in (-pi, pi]: numpy returns [-pi, pi); flip the -pi edge
    phase = np.where(phase == -np.pi, np.pi, phase)
    cell = math.hypot((c1.real - c0.real) / max(nx - 1, 1),
                      (c1.imag - c0.imag) / max(ny - 1, 1))
    near_pole = singularity_distance(X, p) < 0.75 * cell
    bad = near_pole | ~np.isfinite(mag) | (mag > 1e12)
    if p.coupling_scale == 0:
        bad = np.zeros_like(bad)
        mag = np.zeros_like(mag)
        phase = np.zeros_like(phase)
    mag = np.where(bad, LANDSCAPE_SENTINEL, mag)
    phase = np.where(bad, np.nan, phase)
    return LandscapeGrid(X, mag, phase)
