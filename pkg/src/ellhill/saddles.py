"""Saddle points of the potential: the sextic, its asymptotics, local data.

The stationarity condition du/dx = 0 is a sextic Q6 in z = sn^2 x.  For a
small modulus its six roots split into three pairs with distinct scales:
one pair near the K+iK' pole at z ~ 1/k^2, one near the K pole at z ~ 1,
and one in the flat region at z ~ 1/k.  Each pair carries leading-order
closed forms for z, u(x*), g2 and g3 which this module evaluates and which
double as the labelling reference for the numeric roots.
"""

from __future__ import annotations

import cmath
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .elliptic import jacobi, jacobi_many, taylor_at_halfperiod
from .errors import (DegenerateError, DegenerateWarning, PoleTooCloseError,
                     ZeroCoefficientError)
from .potential import PotentialParams, eval_u, eval_u_many, singularity_distance
from .rootfind import (invert_sn2, match_to_predictions, polynomial_roots,
                       polynomial_residual_scale, reduce_to_cell, _lattice_coords)
from .series import SeriesExpansion, make_series

CLASS_KIK = "pole-adjacent-KiK"
CLASS_K = "pole-adjacent-K"
CLASS_FLAT = "flatland"

SERIES_LABEL_MAX_K = 0.3
CAUCHY_RADIUS = 0.1
CAUCHY_NODES = 64
MIN_POLE_DISTANCE = 0.15


@dataclass(frozen=True)
class SaddlePoint:
    index: int            # 1..6
    z_star: complex       # sn^2 x*
    x_star: complex       # representative in the fundamental cell
    u_star: complex
    g2: complex
    g3: complex
    class_tag: str

    @property
    def pair(self) -> str:
        return {CLASS_KIK: "KiK", CLASS_K: "K", CLASS_FLAT: "flat"}[self.class_tag]


def q6_coefficients(p: PotentialParams) -> np.ndarray:
    """Coefficients (highest first) of the stationarity sextic in z = sn^2 x."""
    b0, b1, b2, b3 = p.b
    m = p.m
    kp2 = 1.0 - m
    return np.array([
        b0 * m ** 3,
        -2.0 * b0 * (1.0 + m) * m ** 2,
        (b0 * (1.0 + 4.0 * m + m ** 2) - b1 * kp2 - b2 * m + b3 * kp2 * m) * m,
        2.0 * (-b0 * (1.0 + m) + b1 * kp2 + b2 * (1.0 + m) - b3 * kp2) * m,
        b0 * m - b1 * kp2 * m - b2 * (1.0 + 4.0 * m + m ** 2) + b3 * kp2,
        2.0 * b2 * (1.0 + m),
        -b2,
    ], dtype=complex)


def _quarter_root(value: complex) -> complex:
    return cmath.sqrt(cmath.sqrt(value))


def harmonic_frequency(p: PotentialParams) -> complex:
    """(b0-b1)^(1/4) (b2-b3)^(1/4) k^(1/2) with all roots principal.

    Shared by the flat-pair dispersion formulas here, in the quadratic
    differential, and in the Floquet series, so cross-module identities hold
    to rounding.
    """
    b0, b1, b2, b3 = p.b
    return (_quarter_root(b0 - b1) * _quarter_root(b2 - b3)
            * cmath.sqrt(p.modulus.k))


@dataclass(frozen=True)
class SaddleAsymptotics:
    """Leading-order data of one saddle: where it is and how steep."""

    index: int
    class_tag: str
    z_series: SeriesExpansion
    z_leading: complex
    u_star: complex
    g2: complex
    g3: complex


def _pair_records(p: PotentialParams, pair: str):
    b0, b1, b2, b3 = p.b
    r0, r1, r2, r3 = p.sqrt_b
    k = p.k
    if pair == "KiK":
        recs = []
        for index, sgn in ((1, +1), (2, -1)):
            s = r0 + sgn * r1
            if abs(s) < 1e-300 or abs(r0) == 0:
                raise DegenerateError("pair near K+iK' degenerates for these couplings")
            z = make_series(f"z*{index}", "k", [s / r0], leading_power=-2)
            g3 = 4j * (b0 - b1) * s / (cmath.sqrt(r0) * cmath.sqrt(-sgn * r1))
            recs.append(SaddleAsymptotics(index, CLASS_KIK, z, z.evaluate(k),
                                          s * s, 4.0 * s * s, g3))
        return tuple(recs)
    if pair == "K":
        recs = []
        for index, sgn in ((3, +1), (4, -1)):
            s = r2 + sgn * r3
            if abs(s) < 1e-300:
                raise DegenerateError("pair near K degenerates for these couplings")
            z = make_series(f"z*{index}", "k", [r2 / s])
            g3 = 4.0 * (b2 - b3) * s / (cmath.sqrt(r2) * cmath.sqrt(sgn * r3))
            recs.append(SaddleAsymptotics(index, CLASS_K, z, z.evaluate(k),
                                          s * s, 4.0 * s * s, g3))
        return tuple(recs)
    if pair == "flat":
        d01, d23 = b0 - b1, b2 - b3
        if abs(d01) < 1e-300 or abs(d23) < 1e-300:
            raise DegenerateError("flat pair needs b0 != b1 and b2 != b3")
        ratio = cmath.sqrt(d23) / cmath.sqrt(d01)
        prod = cmath.sqrt(d01) * cmath.sqrt(d23)
        g3_core = 4j * (d01 ** 2 * (b2 + b3) - d23 ** 2 * (b0 + b1)) / (d01 * d23)
        recs = []
        for index, sgn in ((5, +1), (6, -1)):
            z = make_series(f"z*{index}", "k", [sgn * ratio], leading_power=-1)
            recs.append(SaddleAsymptotics(index, CLASS_FLAT, z, z.evaluate(k),
                                          sgn * 2.0 * prod * k,
                                          -sgn * 4.0 * prod * k,
                                          -sgn * g3_core * k ** 2))
        return tuple(recs)
    raise ValueError(f"unknown saddle pair {pair!r}")


def saddle_series(p: PotentialParams, pair: str):
    """Leading-order asymptotics for one saddle pair ("KiK", "K" or "flat")."""
    if p.is_degenerate:
        raise DegenerateError(
            "couplings fail the genericity diagnostic; series pairs disabled")
    return _pair_records(p, pair)


def _all_predictions(p: PotentialParams):
    out = {}
    for pair in ("KiK", "K", "flat"):
        for rec in _pair_records(p, pair):
            out[rec.index] = rec
    return out


def cauchy_u_coefficients(x_center: complex, p: PotentialParams, order: int,
                          radius: float = CAUCHY_RADIUS,
                          nodes: int = CAUCHY_NODES) -> np.ndarray:
    """Taylor coefficients of u about a regular point by a Cauchy contour."""
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = x_center + radius * np.exp(1j * theta)
    vals = eval_u_many(ring, p)
    out = np.empty(order + 1, dtype=complex)
    for mth in range(order + 1):
        out[mth] = np.sum(vals * np.exp(-1j * mth * theta)) / (nodes * radius ** mth)
    return out


def g_coefficients(saddle, p: PotentialParams, order: int) -> SeriesExpansion:
    """Taylor data g_m of u about a saddle (g0 = u(x*), g1 ~ 0, g2 leads)."""
    if order > 10:
        raise ValueError("g_coefficients supports order <= 10")
    x_center = saddle.x_star if isinstance(saddle, SaddlePoint) else complex(saddle)
    dist = float(singularity_distance(x_center, p))
    if dist <= MIN_POLE_DISTANCE:
        raise PoleTooCloseError(
            f"saddle at distance {dist:.3g} from a pole; contour would cross it")
    coeffs = cauchy_u_coefficients(x_center, p, order)
    return make_series("g@saddle", "chi", coeffs)


def steepest_directions(g2: complex):
    """(ascent, descent) angles of the quadratic term, both in [0, 2pi)."""
    if abs(g2) < 1e-14:
        raise ZeroCoefficientError("g2 vanishes; no quadratic steepest directions")
    alpha = cmath.phase(g2)
    ascent = (np.pi - alpha / 2.0) % (2.0 * np.pi)
    descent = (np.pi / 2.0 - alpha / 2.0) % (2.0 * np.pi)
    return ascent, descent


def find_saddles(p: PotentialParams):
    """All six stationary points, root-polished, lifted to x and labelled.

    Labels follow the asymptotic-series predictions when |k| < 0.3 and the
    couplings are generic; otherwise the pairs are ranked by magnitude
    (the 1/k^2 pair, then the 1/k pair, then the O(1) pair).  Merged roots
    are reported with a DegenerateWarning rather than suppressed.
    """
    coeffs = q6_coefficients(p)
    roots = polynomial_roots(coeffs)
    _warn_on_merged(roots, 1e-8)

    use_series = abs(p.k) < SERIES_LABEL_MAX_K and not p.is_degenerate
    preds = None
    if use_series:
        try:
            preds = _all_predictions(p)
        except DegenerateError:
            preds = None

    order = _label_roots(roots, preds, p)
    saddles = []
    for index in range(1, 7):
        z = complex(roots[order[index - 1]])
        class_tag = (CLASS_KIK, CLASS_KIK, CLASS_K, CLASS_K,
                     CLASS_FLAT, CLASS_FLAT)[index - 1]
        x = _lift_saddle(z, p, preds[index] if preds else None)
        g = _local_g(x, p)
        saddles.append(SaddlePoint(index, z, x, g[0], g[2], g[3], class_tag))
    return saddles


def _warn_on_merged(roots, tol):
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            scale = 1.0 + abs(roots[i]) + abs(roots[j])
            if abs(roots[i] - roots[j]) < tol * scale:
                warnings.warn(
                    f"roots {roots[i]:.6g} and {roots[j]:.6g} merged within {tol}",
                    DegenerateWarning, stacklevel=3)
                return


def _label_roots(roots, preds, p):
    if preds is not None:
        targets = [preds[i].z_leading for i in range(1, 7)]
        return match_to_predictions(roots, targets)
    # magnitude fallback: |z| descending pairs -> (1,2), (5,6), (3,4)
    by_mag = sorted(range(6), key=lambda i: -abs(roots[i]))
    pairs = [by_mag[0:2], by_mag[4:6], by_mag[2:4]]  # KiK, K, flat slots
    order = [None] * 6
    for slot, pair in zip(((0, 1), (2, 3), (4, 5)), pairs):
        a, b = sorted(pair, key=lambda i: (roots[i].real, roots[i].imag))
        order[slot[0]], order[slot[1]] = a, b
    return order


def _local_g(x: complex, p: PotentialParams, order: int = 3) -> np.ndarray:
    dist = float(singularity_distance(x, p))
    radius = min(CAUCHY_RADIUS, 0.4 * dist)
    if radius <= 0:
        raise PoleTooCloseError("saddle sits on a singularity")
    return cauchy_u_coefficients(x, p, order, radius=radius)


def _lift_saddle(z: complex, p: PotentialParams, pred) -> complex:
    x_a, x_b = invert_sn2(z, p.modulus)
    if pred is not None and abs(pred.g3) > 0:
        g3_a = _local_g(x_a, p)[3]
        if abs(-g3_a - pred.g3) < abs(g3_a - pred.g3):
            return x_b
        return x_a
    return _im_tiebreak(x_a, x_b, p)


def _im_tiebreak(x_a, x_b, p):
    # prefer the lower half of the period cell (the Im >= 0 representative of
    # the symmetric cell); fall back to lexicographic order
    _, beta_a = _lattice_coords(x_a, p.modulus)
    _, beta_b = _lattice_coords(x_b, p.modulus)
    in_a = 0.0 <= beta_a % 1.0 <= 0.5
    in_b = 0.0 <= beta_b % 1.0 <= 0.5
    if in_a != in_b:
        return x_a if in_a else x_b
    return min(x_a, x_b, key=lambda v: (round(v.real, 12), round(v.imag, 12)))


# ---------------------------------------------------------------------------
# Local re-expansion of u in elliptic monomials

_FAMILY_BY_SHIFT = {"sn": "0", "cn": "K", "dn": "K+iK'"}


def _series_pow(base, n, order):
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0
    for _ in range(n):
        new = np.zeros(order + 1, dtype=complex)
        for i, ai in enumerate(out):
            if ai == 0:
                continue
            top = min(order - i, len(base) - 1)
            new[i : i + top + 1] += ai * np.asarray(base[: top + 1])
        out = new
    return out


def _monomial_basis(family: str, order: int, m) -> np.ndarray:
    """Taylor columns of the local monomials f^j (j even) and f^j g h (odd)."""
    shift = _FAMILY_BY_SHIFT[family]
    sn, cn, dn = (np.asarray(s.coefficients) for s in
                  taylor_at_halfperiod(shift, order, m))
    lead = {"sn": sn, "cn": cn, "dn": dn}[family]
    others = {"sn": (cn, dn), "cn": (sn, dn), "dn": (sn, cn)}[family]
    odd_extra = _series_mul_trunc(others[0], others[1], order)
    cols = np.zeros((order + 1, order + 1), dtype=complex)
    for j in range(2, order + 1):
        col = _series_pow(lead, j, order)
        if j % 2 == 1:
            col = _series_mul_trunc(col, odd_extra, order)
        cols[:, j] = col
    return cols


def _series_mul_trunc(a, b, order):
    out = np.zeros(order + 1, dtype=complex)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        top = min(order - i, len(b) - 1)
        out[i : i + top + 1] += ai * np.asarray(b[: top + 1])
    return out


def local_coefficients(saddle: SaddlePoint, p: PotentialParams,
                       order: int) -> SeriesExpansion:
    """Coefficients of u re-expanded in periodic elliptic monomials.

    Flat-pair upper saddle: powers of sn(chi); flat-pair lower: powers of
    cn(chi+K); pole-adjacent saddles: powers of dn(chi+K+iK').  Solved from
    the Taylor data g_m by forward substitution (the monomial basis is
    triangular in the local coordinate).
    """
    if order > 8:
        raise ValueError("local_coefficients supports order <= 8")
    family = local_family(saddle)
    g = g_coefficients(saddle, p, order)
    basis = _monomial_basis(family, order, p.modulus)
    lam = np.zeros(order + 1, dtype=complex)
    for j in range(2, order + 1):
        acc = g.coefficients[j]
        for i in range(2, j):
            acc -= basis[j, i] * lam[i]
        lam[j] = acc / basis[j, j]
    tag = {"sn": "sn chi", "cn": "cn chi^", "dn": "dn chi~"}[family]
    return make_series(f"lambda@{family}", tag, lam)


def local_family(saddle: SaddlePoint) -> str:
    if saddle.class_tag == CLASS_FLAT:
        return "sn" if saddle.index == 5 else "cn"
    return "dn"


def lambdas_to_g(lam: SeriesExpansion, family: str, m, order=None) -> np.ndarray:
    """Round trip: rebuild Taylor g_m from local monomial coefficients."""
    if order is None:
        order = lam.truncation_order
    basis = _monomial_basis(family, order, m)
    vec = np.zeros(order + 1, dtype=complex)
    vec[: len(lam.coefficients)] = lam.coefficients[: order + 1]
    return basis @ vec


def convergence_region(saddle: SaddlePoint, p: PotentialParams,
                       x: complex) -> bool:
    """Whether x lies inside the convergence belt of the saddle's expansion.

    |sqrt(k) sn(chi)| < 1 for the flat upper saddle, |sqrt(k) cn(chi+K)| < 1
    for the flat lower one, |dn(chi + K + iK')| < 1 near the pole-adjacent
    saddles; all strict.
    """
    mod = p.modulus
    chi = complex(x) - saddle.x_star
    family = local_family(saddle)
    sqrt_k = cmath.sqrt(mod.k)
    try:
        if family == "sn":
            val = sqrt_k * jacobi(chi, mod).sn
        elif family == "cn":
            val = sqrt_k * jacobi(chi + mod.K, mod).cn
        else:
            val = jacobi(chi + mod.K + 1j * mod.K_prime, mod).dn
    except Exception:
        return False
    return bool(abs(val) < 1.0)


# ---------------------------------------------------------------------------
# Export

def saddle_table(saddles) -> list:
    rows = []
    for s in saddles:
        rows.append({
            "index": s.index,
            "z_star": [s.z_star.real, s.z_star.imag],
            "x_star": [s.x_star.real, s.x_star.imag],
            "u_star": [s.u_star.real, s.u_star.imag],
            "g2": [s.g2.real, s.g2.imag],
            "g3": [s.g3.real, s.g3.imag],
            "class": s.class_tag,
        })
    return rows


def saddles_to_json(saddles, path):
    with open(path, "w") as fh:
        json.dump(saddle_table(saddles), fh, indent=1)
