"""Polynomial roots, root pairing, and inversion of z = sn^2 x.

Roots come from the companion matrix (``numpy.roots``) and are polished with
a couple of Newton steps, which is enough to reach residuals at the
rounding floor for the well-scaled quartics and sextics used here.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from .elliptic import EllipticModulus, jacobi, jacobi_many, pole_distance
from .errors import ConvergenceError, LeadingZeroError


def polynomial_roots(coeffs, polish_steps: int = 2) -> np.ndarray:
    """All roots of a polynomial given coefficients highest-first."""
    coeffs = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        raise LeadingZeroError("all-zero polynomial")
    # structural zeros only: tiny-but-finite leading terms are legitimate
    # here (the stationarity sextic leads with b0 k^6)
    if abs(coeffs[0]) < 1e-250:
        raise LeadingZeroError("leading coefficient (numerically) zero")
    roots = np.roots(coeffs)
    dcoeffs = np.polyder(coeffs)
    for _ in range(polish_steps):
        val = np.polyval(coeffs, roots)
        der = np.polyval(dcoeffs, roots)
        step = np.where(np.abs(der) > 0, val / np.where(der == 0, 1, der), 0)
        # damp steps near multiple roots where Newton overshoots
        step = np.where(np.abs(step) < 1.0 + np.abs(roots), step, 0)
        roots = roots - step
    return roots


def polynomial_residual_scale(coeffs, z) -> float:
    """Natural residual scale sum |c_i| |z|^i at the point z."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs) - 1
    return float(sum(abs(c) * abs(z) ** (n - i) for i, c in enumerate(coeffs)))


def match_to_predictions(values, predictions) -> list:
    """Permutation mapping each prediction index to the closest value.

    Globally optimal assignment under a relative distance, so near-collisions
    cannot double-book one value.  Returns indices into ``values`` ordered
    like ``predictions``.
    """
    values = list(values)
    cost = np.array([[abs(v - p) / (1.0 + abs(p)) for v in values]
                     for p in predictions])
    _rows, cols = linear_sum_assignment(cost)
    return list(cols)


def match_consecutive(previous, current) -> list:
    """Pair the roots of one parameter step with the next.

    Exhaustive over all orderings (4! = 24 for the quartic case), minimising
    the total pairing distance; immune to label swaps during close approaches.
    """
    n = len(previous)
    best, best_cost = None, np.inf
    for perm in itertools.permutations(range(n)):
        cost = sum(abs(previous[i] - current[perm[i]]) for i in range(n))
        if cost < best_cost:
            best, best_cost = perm, cost
    return list(best)


def _lattice_coords(x, mod: EllipticModulus):
    p1, p2 = 2.0 * mod.K, 2.0j * mod.K_prime
    det = p1.real * p2.imag - p1.imag * p2.real
    alpha = (x.real * p2.imag - x.imag * p2.real) / det
    beta = (p1.real * x.imag - p1.imag * x.real) / det
    return alpha, beta


def reduce_to_cell(x: complex, mod: EllipticModulus) -> complex:
    """Representative of x in the fundamental cell [0,2K) x [0,2iK')."""
    alpha, beta = _lattice_coords(complex(x), mod)
    return ((alpha - np.floor(alpha)) * 2.0 * mod.K
            + (beta - np.floor(beta)) * 2.0j * mod.K_prime)


def _newton_sn(target: complex, seed: complex, mod: EllipticModulus):
    x = complex(seed)
    for _ in range(60):
        if float(pole_distance(x, mod)) < 1e-9:
            x += 0.05 * mod.K
            continue
        sn, cn, dn = jacobi_many(x, mod)
        f = complex(sn) - target
        if abs(f) < 1e-13 * (1.0 + abs(target)):
            return x
        der = complex(cn) * complex(dn)
        if abs(der) < 1e-300:
            return None
        step = f / der
        cap = 0.5 * min(abs(mod.K), abs(mod.K_prime))
        if abs(step) > cap:
            step *= cap / abs(step)
        x = x - step
    return None


def invert_sn2(z: complex, mod: EllipticModulus):
    """Both preimages of z = sn^2 x in the fundamental cell.

    Newton on sn with seeds targeted at the relevant corner of the cell
    (origin for small z, the K and K+iK' corners for z near 1 and 1/m, the
    iK' pole for large z), plus a coarse grid fallback.
    """
    z = complex(z)
    w = np.sqrt(z)
    k = mod.k
    seeds = []
    if abs(w) < 1.2:
        seeds.append(np.arcsin(complex(w)))
    if abs(w - 1.0) < 0.5:
        kp2 = 1.0 - mod.m
        seeds.append(mod.K + np.sqrt(2.0 * (1.0 - w) / kp2))
    if abs(k * w - 1.0) < 0.5:
        kp2 = 1.0 - mod.m
        seeds.append(mod.K + 1j * mod.K_prime + np.sqrt(2.0 * (k * w - 1.0) / kp2))
    if abs(w) > 0.8:
        # sn(x' + iK') = 1/(k sn x'): solve the small reciprocal target
        seeds.append(1j * mod.K_prime + np.arcsin(1.0 / (k * w)))
    found = []
    for seed in seeds:
        x = _newton_sn(w, seed, mod)
        if x is not None:
            found.append(x)
            break
    if not found:
        for a in np.linspace(0.12, 0.88, 7):
            for b in np.linspace(0.12, 0.88, 7):
                x = _newton_sn(w, a * 2 * mod.K + b * 2j * mod.K_prime, mod)
                if x is not None:
                    found.append(x)
                    break
            if found:
                break
    if not found:
        raise ConvergenceError(f"could not invert sn^2 x = {z}")
    x0 = reduce_to_cell(found[0], mod)
    x1 = reduce_to_cell(-found[0], mod)
    return x0, x1
