"""Jacobi elliptic functions and complete integrals for complex modulus.

The modulus m = k^2 may be any complex number off the cut [1, inf).  K(m) is
computed by a complex AGM and sn/cn/dn by a descending Landen recursion; at
each square root the branch with the ratio in the right half plane is taken,
which keeps both recursions contractive for every modulus this package uses.
Arguments are reduced into the lattice cell spanned by 4K and 2iK' before the
Landen descent so accuracy does not degrade far from the origin.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (ConvergenceError, EllipticDomainError, PoleError)
from .series import SeriesExpansion, make_series

_AGM_MAX_ITER = 64
_AGM_TOL = 1e-15
_LANDEN_TARGET = 1e-10
POLE_PROXIMITY = 1e-12  # below this (lattice reduced) all digits cancel

SHIFT_TAGS = ("0", "K", "K+iK'")


def _on_cut(m: complex) -> bool:
    m = complex(m)
    return m.imag == 0.0 and m.real >= 1.0


def complete_K(m: complex) -> complex:
    """Complete elliptic integral of the first kind, K(m), complex m.

    AGM iteration with the right-half-plane square root rule; analytic on
    the plane cut along m in [1, inf).
    """
    m = complex(m)
    if _on_cut(m):
        raise EllipticDomainError(f"K(m) is cut along [1, inf); got m={m}")
    a, b = 1.0 + 0j, cmath.sqrt(1.0 - m)
    for _ in range(_AGM_MAX_ITER):
        if abs(a - b) <= _AGM_TOL * abs(a):
            return cmath.pi / (2.0 * a)
        a, b = (a + b) / 2.0, _agm_sqrt(a * b, a, b)
    raise ConvergenceError(f"complex AGM did not converge for m={m}")


def _agm_sqrt(ab: complex, a: complex, b: complex) -> complex:
    # pick the root with |a1 - b1| <= |a1 + b1| (right half plane of b1/a1)
    r = cmath.sqrt(ab)
    a1 = (a + b) / 2.0
    if abs(a1 - r) > abs(a1 + r):
        r = -r
    elif abs(a1 - r) == abs(a1 + r) and (r / a1).imag < 0:
        r = -r
    return r


@dataclass(frozen=True)
class EllipticModulus:
    """The modulus m = k^2 together with its quarter periods."""

    m: complex
    k: complex
    k_prime: complex
    K: complex
    K_prime: complex

    @classmethod
    def from_m(cls, m: complex) -> "EllipticModulus":
        return _modulus_from_m(complex(m))

    @classmethod
    def from_k(cls, k: complex) -> "EllipticModulus":
        """Build from a chosen square root k of m (kept as given)."""
        k = complex(k)
        base = _modulus_from_m(k * k)
        return cls(base.m, k, base.k_prime, base.K, base.K_prime)


@lru_cache(maxsize=512)
def _modulus_from_m(m: complex) -> EllipticModulus:
    if _on_cut(m):
        raise EllipticDomainError(f"modulus cut along [1, inf); got m={m}")
    k = cmath.sqrt(m)
    k_prime = cmath.sqrt(1.0 - m)
    return EllipticModulus(m, k, k_prime, complete_K(m), complete_K(1.0 - m))


@dataclass(frozen=True)
class JacobiTriple:
    sn: complex
    cn: complex
    dn: complex

    def __iter__(self):
        return iter((self.sn, self.cn, self.dn))


@lru_cache(maxsize=512)
def _landen_ladder(m: complex):
    """Descending Landen moduli k_1, k_2, ... down to |k_n| < 1e-10."""
    k = cmath.sqrt(m)
    ladder = []
    for _ in range(32):
        if abs(k) < _LANDEN_TARGET:
            break
        kp = cmath.sqrt(1.0 - k * k)
        if kp.real < 0:
            kp = -kp
        k = (1.0 - kp) / (1.0 + kp)
        ladder.append(k)
    else:
        raise ConvergenceError(f"Landen descent stalled for m={m}")
    return tuple(ladder)


def _coerce_modulus(m) -> EllipticModulus:
    if isinstance(m, EllipticModulus):
        return m
    return EllipticModulus.from_m(m)


def reduce_argument(x, mod: EllipticModulus):
    """Reduce x into the cell spanned by 4K and 2iK'.

    Returns (r, cn_sign, dn_sign): sn(x) = sn(r) while cn and dn pick up the
    sign (-1)**n from each 2iK' translation removed.
    """
    p1, p2 = 4.0 * mod.K, 2.0j * mod.K_prime
    det = p1.real * p2.imag - p1.imag * p2.real
    x = np.asarray(x, dtype=complex)
    alpha = (x.real * p2.imag - x.imag * p2.real) / det
    beta = (p1.real * x.imag - p1.imag * x.real) / det
    n1 = np.round(alpha)
    n2 = np.round(beta)
    r = x - n1 * p1 - n2 * p2
    sign = np.where(n2.astype(np.int64) % 2 == 0, 1.0, -1.0)
    return r, sign


def pole_distance(x, mod: EllipticModulus):
    """Distance from x to the nearest pole of the Jacobi triple (iK' lattice)."""
    r, _ = reduce_argument(x, mod)
    d = np.full(np.shape(r), np.inf)
    for a in (-1, 0, 1, 2):
        for b in (-1, 0, 1):
            pole = 1j * mod.K_prime + 2.0 * a * mod.K + 2.0j * b * mod.K_prime
            d = np.minimum(d, np.abs(r - pole))
    return d


def jacobi_many(x, m) -> tuple:
    """Vectorised sn, cn, dn at complex x for complex modulus m.

    Points within POLE_PROXIMITY of a pole yield nan entries instead of
    raising; the scalar wrapper ``jacobi`` raises PoleError there.
    """
    mod = _coerce_modulus(m)
    x = np.asarray(x, dtype=complex)
    r, sign = reduce_argument(x, mod)
    bad = pole_distance(r, mod) < POLE_PROXIMITY

    ladder = _landen_ladder(mod.m)
    scale = 1.0
    for kn in ladder:
        scale *= (1.0 + kn)
    xr = r / scale

    k_base = ladder[-1] if ladder else mod.k
    m_base = k_base * k_base
    s, c = np.sin(xr), np.cos(xr)
    corr = (m_base / 4.0) * (xr - s * c)
    sn = s - corr * c
    cn = c + corr * s
    dn = 1.0 - (m_base / 2.0) * s * s

    for kn in reversed(ladder):
        denom = 1.0 + kn * sn * sn
        sn, cn, dn = ((1.0 + kn) * sn / denom,
                      cn * dn / denom,
                      (1.0 - kn * sn * sn) / denom)

    cn = cn * sign
    dn = dn * sign
    if np.any(bad):
        sn = np.where(bad, np.nan + 0j, sn)
        cn = np.where(bad, np.nan + 0j, cn)
        dn = np.where(bad, np.nan + 0j, dn)
    return sn, cn, dn


def jacobi(x: complex, m) -> JacobiTriple:
    """sn, cn, dn at a single complex argument; PoleError at lattice poles."""
    mod = _coerce_modulus(m)
    if float(pole_distance(complex(x), mod)) < POLE_PROXIMITY:
        raise PoleError(f"x={x} within {POLE_PROXIMITY} of a pole of sn/cn/dn")
    sn, cn, dn = jacobi_many(complex(x), mod)
    return JacobiTriple(complex(sn), complex(cn), complex(dn))


def shifted_identities(x: complex, m, shift: str) -> JacobiTriple:
    """Triple at x + shift computed from the triple at x.

    shift is one of "K", "iK'", "K+iK'".  Uses the half-period identities
        sn(x+K)      =  cn x / dn x
        cn(x+K)      = -k' sn x / dn x
        dn(x+K)      =  k' / dn x
        sn(x+iK')    =  1 / (k sn x)
        cn(x+iK')    = -i dn x / (k sn x)
        dn(x+iK')    = -i cn x / sn x
        sn(x+K+iK')  =  dn x / (k cn x)
        cn(x+K+iK')  = -i k' / (k cn x)
        dn(x+K+iK')  =  i k' sn x / cn x
    """
    mod = _coerce_modulus(m)
    t = jacobi(x, mod)
    k, kp = mod.k, mod.k_prime
    if shift == "K":
        den = t.dn
        _check_denominator(den, shift)
        return JacobiTriple(t.cn / den, -kp * t.sn / den, kp / den)
    if shift == "iK'":
        den = t.sn
        _check_denominator(den, shift)
        return JacobiTriple(1.0 / (k * den), -1j * t.dn / (k * den), -1j * t.cn / den)
    if shift == "K+iK'":
        den = t.cn
        _check_denominator(den, shift)
        return JacobiTriple(t.dn / (k * den), -1j * kp / (k * den), 1j * kp * t.sn / den)
    raise ValueError(f"unknown shift {shift!r}; expected K, iK' or K+iK'")


def _check_denominator(den: complex, shift: str):
    if abs(den) < 1e-13:
        raise PoleError(f"half-period shift {shift} hits a vanishing denominator")


# ---------------------------------------------------------------------------
# Taylor machinery

def _series_mul(a, b, n):
    out = np.zeros(n + 1, dtype=complex)
    for i, ai in enumerate(a[: n + 1]):
        if ai == 0:
            continue
        top = min(n - i, len(b) - 1)
        out[i : i + top + 1] += ai * np.asarray(b[: top + 1])
    return out


def _series_inv(a, n):
    # reciprocal of a power series with a[0] != 0
    inv = np.zeros(n + 1, dtype=complex)
    inv[0] = 1.0 / a[0]
    for j in range(1, n + 1):
        acc = 0j
        for i in range(1, min(j, len(a) - 1) + 1):
            acc += a[i] * inv[j - i]
        inv[j] = -acc / a[0]
    return inv


@lru_cache(maxsize=256)
def _origin_taylor(m: complex, order: int):
    """Taylor coefficients of sn, cn, dn about 0, from their ODE system."""
    n = order
    S = np.zeros(n + 1, dtype=complex)
    C = np.zeros(n + 1, dtype=complex)
    D = np.zeros(n + 1, dtype=complex)
    C[0] = 1.0
    D[0] = 1.0
    if n >= 1:
        S[1] = 1.0
    for j in range(1, n):
        # next coefficient from sn' = cn dn, cn' = -sn dn, dn' = -m sn cn
        cd = sum(C[i] * D[j - i] for i in range(j + 1))
        sd = sum(S[i] * D[j - i] for i in range(j + 1))
        sc = sum(S[i] * C[j - i] for i in range(j + 1))
        S[j + 1] = cd / (j + 1)
        C[j + 1] = -sd / (j + 1)
        D[j + 1] = -m * sc / (j + 1)
    return S, C, D


def taylor_at_halfperiod(shift: str, order: int, m) -> tuple:
    """Taylor series of (sn, cn, dn) in the local coordinate at a half period.

    shift "0" expands sn(x), cn(x), dn(x) about x = 0; shift "K" expands the
    triple of x = K + t in powers of t; shift "K+iK'" likewise.  Coefficient
    lists start at power 0 and have length order + 1.
    """
    if order > 12:
        raise ValueError("taylor_at_halfperiod supports order <= 12")
    mod = _coerce_modulus(m)
    S, C, D = _origin_taylor(mod.m, order)
    kp, k = mod.k_prime, mod.k
    if shift == "0":
        sn, cn, dn = S, C, D
    elif shift == "K":
        Dinv = _series_inv(D, order)
        sn = _series_mul(C, Dinv, order)
        cn = -kp * _series_mul(S, Dinv, order)
        dn = kp * Dinv
    elif shift == "K+iK'":
        Cinv = _series_inv(C, order)
        sn = _series_mul(D, Cinv, order) / k
        cn = (-1j * kp / k) * Cinv
        dn = 1j * kp * _series_mul(S, Cinv, order)
    else:
        raise ValueError(f"unknown shift {shift!r}; expected one of {SHIFT_TAGS}")
    tag = {"0": "chi", "K": "chi'", "K+iK'": "chi''"}[shift]
    return tuple(
        make_series(f"{name}@{shift}", tag, coeffs)
        for name, coeffs in (("sn", sn), ("cn", cn), ("dn", dn))
    )
