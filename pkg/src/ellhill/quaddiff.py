"""The meromorphic quadratic differential and its foliation.

phi(z) dz^2 = b0 prod_t (z - z_t) / [4 z^2 (z-1)^2 (z - 1/k^2)^2] dz^2

has simple zeros at the four turning points and double poles at 0, 1, 1/k^2
and infinity.  Level lines of constant arg(sqrt(phi) dz) foliate the plane;
lines joining two zeros have finite length integral |sqrt(phi) dz|.  Near a
zero, a pole, a flat saddle or in the large-eigenvalue limit, phi collapses
to the four classic local models (linear, inverse-square, harmonic, single
1/z-type Coulomb factor), each carrying its own small dispersion relation.
"""

from __future__ import annotations

import cmath
import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchAmbiguityError, PoleError, RegimeViolationError
from .potential import PotentialParams
from .saddles import find_saddles, harmonic_frequency
from .turning import TurningPointSet, find_turning_points, REGIME_FACTOR

POLE_RADIUS = 1e-4
CRITICAL_RADIUS = 1e-6
FAR_FIELD = 1e6
SITES = ("turning", "pole", "saddle5", "saddle6", "coulomb")


@dataclass(frozen=True)
class QuadDifferential:
    params: PotentialParams
    lam: complex
    turning: TurningPointSet

    @classmethod
    def at_eigenvalue(cls, p: PotentialParams, lam: complex) -> "QuadDifferential":
        return cls(p, complex(lam), find_turning_points(p, lam))

    @property
    def finite_poles(self):
        return (0j, 1.0 + 0j, 1.0 / self.params.m)

    @property
    def zeros(self):
        return self.turning.roots


def phi(q: QuadDifferential, z: complex) -> complex:
    """The quadratic-differential density at z."""
    z = complex(z)
    b0 = q.params.b[0]
    m = q.params.m
    den = 4.0 * (z * (z - 1.0) * (z - 1.0 / m)) ** 2
    if abs(den) == 0 or min(abs(z - pz) for pz in q.finite_poles) < 1e-10:
        raise PoleError(f"z={z} within 1e-10 of a double pole of phi")
    num = b0
    for zt in q.zeros:
        num *= (z - zt)
    return num / den


def phi_many(q: QuadDifferential, z):
    z = np.asarray(z, dtype=complex)
    b0 = q.params.b[0]
    m = q.params.m
    with np.errstate(divide="ignore", invalid="ignore"):
        den = 4.0 * (z * (z - 1.0) * (z - 1.0 / m)) ** 2
        num = np.full_like(z, b0)
        for zt in q.zeros:
            num = num * (z - zt)
        return num / den


@dataclass(frozen=True)
class LocalApproximation:
    """One of the local models of phi with its coefficients."""

    site: str
    form: str               # "linear" | "inverse-square" | "harmonic" | "coulomb"
    center: complex
    coefficients: tuple

    def evaluate(self, z: complex) -> complex:
        z = complex(z)
        if self.form == "linear":
            return self.coefficients[0] * (z - self.center)
        if self.form == "inverse-square":
            return self.coefficients[0] / (z - self.center) ** 2
        if self.form == "harmonic":
            c0, c2 = self.coefficients
            return c0 + c2 * (z - self.center) ** 2
        if self.form == "coulomb":
            a, m = self.coefficients
            return a / (z * (z - 1.0) * (z - 1.0 / m))
        raise ValueError(self.form)


def local_approx(q: QuadDifferential, site: str, which=None) -> LocalApproximation:
    """Local model of phi at a turning point, pole, flat saddle or in the
    large-eigenvalue limit.

    ``which`` selects the turning-point label (1..4) or the pole (one of
    0, 1, the value 1/k^2, "inf").
    """
    p = q.params
    b0 = p.b[0]
    m = p.m
    if site == "turning":
        label = 2 if which is None else int(which)
        zt = q.turning.root(label)
        others = [q.turning.root(t) for t in range(1, 5) if t != label]
        a = b0
        for zo in others:
            a *= (zt - zo)
        a /= 4.0 * (zt * (zt - 1.0) * (zt - 1.0 / m)) ** 2
        return LocalApproximation(site, "linear", zt, (a,))
    if site == "pole":
        zp = 0j if which is None else which
        if zp == "inf":
            return LocalApproximation(site, "inverse-square", 0j, (b0 / 4.0,))
        zp = complex(zp)
        num = b0
        for zt in q.zeros:
            num *= (zp - zt)
        others = [v for v in q.finite_poles if abs(v - zp) > 1e-12]
        den = 4.0
        for v in others:
            den *= (zp - v) ** 2
        return LocalApproximation(site, "inverse-square", zp, (num / den,))
    if site in ("saddle5", "saddle6"):
        idx = 5 if site == "saddle5" else 6
        saddle = {s.index: s for s in find_saddles(p)}[idx]
        delta = q.lam - saddle.u_star
        scale = p.coupling_scale * abs(p.k)
        if abs(delta) > REGIME_FACTOR * scale:
            raise RegimeViolationError(
                f"|lambda - u(x*{idx})| = {abs(delta):.3g} not << |b||k| = {scale:.3g}")
        d01 = p.b[0] - p.b[1]
        d23 = p.b[2] - p.b[3]
        c0 = d01 * m * delta / (4.0 * d23)
        sq = cmath.sqrt(d01)
        c2 = (sq ** 5) * (cmath.sqrt(m) ** 5) / (4.0 * cmath.sqrt(d23) ** 3)
        if site == "saddle5":
            c2 = -c2
        return LocalApproximation(site, "harmonic", saddle.z_star, (c0, c2))
    if site == "coulomb":
        u_ref = _coulomb_reference(p)
        delta = q.lam - u_ref
        if abs(delta) < p.coupling_scale / REGIME_FACTOR:
            raise RegimeViolationError(
                f"|delta~| = {abs(delta):.3g} not >> |b| = {p.coupling_scale:.3g}")
        return LocalApproximation(site, "coulomb", 0j, (-delta / (4.0 * m), m))
    raise ValueError(f"site must be one of {SITES}")


def _coulomb_reference(p: PotentialParams):
    try:
        return {s.index: s for s in find_saddles(p)}[1].u_star
    except Exception:
        return 0j


def inferred_dispersion(site: str, mu: complex, p: PotentialParams,
                        branch: int = +1) -> complex:
    """Leading eigenvalue increment read off the local model.

    harmonic sites: delta ~ -/+ 4i (mu + 1/2) A and delta-hat ~ +/- 4 (mu + 1/2) A
    with A the shared quarter-root frequency; coulomb: delta~ ~ mu^2.
    ``branch`` picks the upper (+1) or lower (-1) sign family.
    """
    mu = complex(mu)
    if site == "saddle5":
        return -branch * 4j * (mu + 0.5) * harmonic_frequency(p)
    if site == "saddle6":
        return branch * 4.0 * (mu + 0.5) * harmonic_frequency(p)
    if site == "coulomb":
        return mu * mu
    raise ValueError("site must be saddle5, saddle6 or coulomb")


# ---------------------------------------------------------------------------
# Foliation tracing

@dataclass
class FoliationLine:
    theta: float
    points: np.ndarray
    s_values: np.ndarray        # accumulated |dw|
    terminal: str               # critical-point | pole | max-length | domain-exit
    wkb_length: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "re_z", "im_z", "cumulative_wkb_length"])
            for s, z in zip(self.s_values, self.points):
                writer.writerow([f"{s:.12g}", f"{z.real:.12g}", f"{z.imag:.12g}",
                                 f"{s:.12g}"])


def _sqrt_phi(q, z, prev):
    val = phi(q, z)
    if abs(val) == 0:
        raise BranchAmbiguityError(f"step landed on a zero of phi at z={z}")
    root = cmath.sqrt(val)
    if prev is not None and abs(root - prev) > abs(root + prev):
        root = -root
    return root


def trace_foliation(q: QuadDifferential, z0: complex, theta: float,
                    max_len: float, direction_hint: complex | None = None,
                    domain_radius: float = FAR_FIELD) -> FoliationLine:
    """Integrate dz/ds = e^{i theta} / sqrt(phi) from z0.

    The square-root branch is continued by sign continuity; the initial sign
    follows ``direction_hint`` when given.  Stops within 1e-6 of a zero of
    phi, within 1e-4 of a finite pole, at accumulated length max_len, or on
    leaving |z| <= domain_radius.
    """
    z = complex(z0)
    v = _sqrt_phi(q, z, None)
    phase = cmath.exp(1j * theta)
    if direction_hint is not None:
        if (phase / v * np.conj(direction_hint)).real < 0:
            v = -v
    pts = [z]
    svals = [0.0]
    s = 0.0
    ds = max_len / 1000.0
    n_max = 40000
    terminal = "max-length"
    for _ in range(n_max):
        hit = _terminal_check(q, z, domain_radius)
        if hit:
            terminal = hit
            break
        if s >= max_len:
            terminal = "max-length"
            break
        try:
            z_new, v_new = _rk4_step(q, z, v, phase, ds)
        except (PoleError, BranchAmbiguityError):
            ds *= 0.5
            if ds < 1e-13 * max_len:
                terminal = "stalled"
                break
            continue
        # keep each step's rotation of the branch small
        rot = abs(cmath.phase(v_new / v)) if abs(v_new) > 0 else np.pi
        if rot > 0.04 and ds > 1e-12 * max_len:
            ds *= 0.5
            continue
        z, v = z_new, v_new
        s += ds
        pts.append(z)
        svals.append(s)
        if rot < 0.01:
            ds = min(ds * 1.6, max_len / 50.0)
    return FoliationLine(float(theta), np.array(pts), np.array(svals),
                         terminal, s)


def _terminal_check(q, z, domain_radius):
    if min(abs(z - zt) for zt in q.zeros) < CRITICAL_RADIUS:
        return "critical-point"
    if min(abs(z - zp) for zp in q.finite_poles) < POLE_RADIUS:
        return "pole"
    if abs(z) > domain_radius:
        return "pole" if domain_radius >= FAR_FIELD else "domain-exit"
    return None


def _rk4_step(q, z, v, phase, ds):
    def rhs(zz, vv):
        vv = _sqrt_phi(q, zz, vv)
        return phase / vv, vv
    k1, v1 = rhs(z, v)
    k2, v2 = rhs(z + 0.5 * ds * k1, v1)
    k3, _ = rhs(z + 0.5 * ds * k2, v2)
    k4, _ = rhs(z + ds * k3, v2)
    z_new = z + (ds / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    v_new = _sqrt_phi(q, z_new, v)
    return z_new, v_new


def segment_integral(q: QuadDifferential, za: complex, zb: complex,
                     nodes: int = 400):
    """(int sqrt(phi) dz, int |sqrt(phi)| |dz|) on the straight segment."""
    t = (np.arange(nodes) + 0.5) / nodes
    zs = za + (zb - za) * t
    total = 0j
    length = 0.0
    prev = None
    for z in zs:
        prev = _sqrt_phi(q, z, prev)
        total += prev * (zb - za) / nodes
        length += abs(prev) * abs(zb - za) / nodes
    return total, length


def connection_angle(q: QuadDifferential, za: complex, zb: complex,
                     nodes: int = 400) -> float:
    """arg of int sqrt(phi) dz along the segment za -> zb (branch-continued).

    The foliation angle at which a line launched from za can reach zb.
    """
    total, _ = segment_integral(q, za, zb, nodes)
    return float(cmath.phase(total))


def foliation_manifest(lines, path):
    """JSON manifest of terminal classifications for a batch of lines."""
    data = [{"theta": ln.theta, "terminal": ln.terminal,
             "wkb_length": ln.wkb_length,
             "start": [ln.points[0].real, ln.points[0].imag],
             "end": [ln.points[-1].real, ln.points[-1].imag]}
            for ln in lines]
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
