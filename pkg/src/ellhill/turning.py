"""Turning points: the quartic in z = sn^2 x, its regimes, and trajectories.

u(x) - lambda = 0 becomes the quartic Q4(z) after clearing the pole factors,
Q4(z) = (u(z) - lambda) z (1-z)(1-k^2 z).  Three eigenvalue regimes admit
series solutions: lambda pinned near either flat saddle (two roots split off
the saddle like +-sqrt(delta)) and lambda large (each root falls toward one
of the poles 0, 1, 1/k^2, infinity).  Trajectories under an eigenvalue
control are tracked with globally matched root pairing between samples.
"""

from __future__ import annotations

import cmath
import csv
import json
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (CollisionError, DegenerateError, DegenerateWarning,
                     RegimeViolationError)
from .potential import PotentialParams
from .rootfind import match_consecutive, match_to_predictions, polynomial_roots
from .saddles import find_saddles
from .series import SeriesExpansion, make_series

REGIMES = ("near5", "near6", "largeLambda")
REGIME_FACTOR = 0.5          # enforce "<<" / ">>" up to this factor
CROSS_RATIO_ORDER = {
    "near5": (3, 2, 1, 4),
    "near6": (2, 3, 1, 4),
    "largeLambda": (2, 1, 3, 4),
    "generic": (1, 2, 3, 4),
}


def q4_coefficients(p: PotentialParams, lam: complex) -> np.ndarray:
    """Coefficients (z^4 .. z^0) of the turning-point quartic."""
    b0, b1, b2, b3 = p.b
    m = p.m
    lam = complex(lam)
    coeffs = np.array([
        b0 * m ** 2,
        -((lam + b0 - b1) * m + (b0 - b3) * m ** 2),
        lam + (lam + b0 - 2.0 * b1 + b2 - 2.0 * b3) * m,
        -(lam + b2 - b3 - (b1 - b2) * m),
        b2,
    ], dtype=complex)
    if np.max(np.abs(coeffs)) == 0:
        raise DegenerateError("all-zero turning quartic (b = 0, lambda = 0)")
    return coeffs


@dataclass(frozen=True)
class TurningPointSet:
    lam: complex
    roots: tuple            # ordered z1..z4
    regime: str
    labels: tuple           # cross-ratio ordering applied, e.g. (3, 2, 1, 4)
    cross_ratio: complex

    def root(self, label: int) -> complex:
        return self.roots[label - 1]

    def to_json_dict(self):
        return {
            "lambda": [self.lam.real, self.lam.imag],
            "roots": [[z.real, z.imag] for z in self.roots],
            "regime": self.regime,
            "labels": list(self.labels),
            "cross_ratio": [self.cross_ratio.real, self.cross_ratio.imag],
        }


@lru_cache(maxsize=128)
def _flat_saddle_data(p: PotentialParams):
    try:
        saddles = find_saddles(p)
    except Exception:
        return None
    by = {s.index: s for s in saddles}
    if 5 not in by or 6 not in by:
        return None
    return by


def cross_ratio(z1, z2, z3, z4) -> complex:
    """(z1 - z2)(z3 - z4) / ((z1 - z4)(z2 - z3))."""
    num = (z1 - z2) * (z3 - z4)
    den = (z1 - z4) * (z2 - z3)
    if abs(den) == 0:
        raise DegenerateError("cross ratio denominator vanishes")
    return num / den


def detect_regime(p: PotentialParams, lam: complex):
    """Which series regime lambda sits in, or "generic"."""
    scale = p.coupling_scale
    by = _flat_saddle_data(p)
    if by is not None and scale > 0:
        bk = scale * abs(p.k)
        if abs(lam - by[5].u_star) <= REGIME_FACTOR * bk:
            return "near5"
        if abs(lam - by[6].u_star) <= REGIME_FACTOR * bk:
            return "near6"
    if scale == 0 or abs(lam) >= scale / REGIME_FACTOR:
        return "largeLambda"
    return "generic"


def find_turning_points(p: PotentialParams, lam: complex,
                        regime: str | None = None) -> TurningPointSet:
    """Solve the quartic and label the roots z1..z4.

    Labels track the regime's series predictions where one applies; at a
    generic eigenvalue they fall back to magnitude-then-angle ordering.
    Merged roots are a DegenerateWarning, not an error.
    """
    lam = complex(lam)
    coeffs = q4_coefficients(p, lam)
    roots = polynomial_roots(coeffs)
    _warn_on_merged(roots, 1e-10)
    if regime is None:
        regime = detect_regime(p, lam)
    order = _label_turning(roots, p, lam, regime)
    ordered = tuple(complex(roots[i]) for i in order)
    cr_labels = CROSS_RATIO_ORDER.get(regime, (1, 2, 3, 4))
    try:
        cr = cross_ratio(*(ordered[i - 1] for i in cr_labels))
    except DegenerateError:
        cr = complex("nan")
    return TurningPointSet(lam, ordered, regime, cr_labels, cr)


def _warn_on_merged(roots, tol):
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            scale = 1.0 + abs(roots[i]) + abs(roots[j])
            if abs(roots[i] - roots[j]) < tol * scale:
                warnings.warn(
                    f"turning points {roots[i]:.6g}, {roots[j]:.6g} merged",
                    DegenerateWarning, stacklevel=3)
                return


def _label_turning(roots, p, lam, regime):
    preds = None
    if regime in ("near5", "near6"):
        by = _flat_saddle_data(p)
        if by is not None:
            s = by[5 if regime == "near5" else 6]
            try:
                series = _split_series(p, regime, s, order=3)
                delta = lam - s.u_star
                preds = [series[t].evaluate(delta) for t in range(4)]
            except DegenerateError:
                preds = None
    elif regime == "largeLambda":
        u_ref = _reference_u(p)
        delta = lam - u_ref
        if abs(delta) > 0:
            series = _large_lambda_series(p, u_ref, order=2)
            preds = [series[t].evaluate(1.0 / delta) for t in range(4)]
    if preds is not None and all(np.isfinite(v) for v in preds):
        return match_to_predictions(roots, preds)
    order = sorted(range(4), key=lambda i: (abs(roots[i]), cmath.phase(roots[i])))
    return order


def _reference_u(p: PotentialParams):
    by = None
    try:
        by = {s.index: s for s in find_saddles(p)}
    except Exception:
        pass
    if by and 1 in by:
        return by[1].u_star
    return 0j


# ---------------------------------------------------------------------------
# Series solutions of the quartic

def _quarter_root(v):
    return cmath.sqrt(cmath.sqrt(v))


def turning_series(p: PotentialParams, regime: str, small_param: complex,
                   order: int = 3, u_ref: complex | None = None,
                   enforce_regime: bool = True):
    """The four displayed root expansions for the requested regime.

    ``small_param`` is delta (near5), delta-hat (near6) or delta-tilde
    (largeLambda); the returned SeriesExpansions use delta^(1/2) steps for
    the pair splitting off the flat saddle and powers of 1/delta-tilde at
    large eigenvalue.  Raises RegimeViolationError outside the documented
    factor-0.5 window.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    small = complex(small_param)
    scale = p.coupling_scale
    if regime in ("near5", "near6"):
        if enforce_regime and abs(small) > REGIME_FACTOR * scale * abs(p.k):
            raise RegimeViolationError(
                f"|delta|={abs(small):.3g} not << |b||k|={scale * abs(p.k):.3g}")
        by = _flat_saddle_data(p)
        if by is None:
            raise DegenerateError("flat saddle pair unavailable for these couplings")
        s = by[5 if regime == "near5" else 6]
        return _split_series(p, regime, s, order)
    if enforce_regime and abs(small) < scale / REGIME_FACTOR:
        raise RegimeViolationError(
            f"|delta~|={abs(small):.3g} not >> |b|={scale:.3g}")
    if u_ref is None:
        u_ref = _reference_u(p)
    return _large_lambda_series(p, u_ref, min(order, 2))


def _split_series(p: PotentialParams, regime, saddle, order):
    b0, b1, b2, b3 = p.b
    k = p.k
    d01, d23 = b0 - b1, b2 - b3
    if abs(d01) < 1e-300 or abs(d23) < 1e-300:
        raise DegenerateError("split series need b0 != b1 and b2 != b3")
    var = "delta" if regime == "near5" else "delta^"
    q01, q23 = _quarter_root(d01), _quarter_root(d23)
    sqk = cmath.sqrt(k)
    c_half = q23 / (q01 ** 3 * sqk ** 3)
    c_one = 1.0 / (2.0 * d01 * k ** 2)
    c_three = 1.0 / (8.0 * q01 ** 5 * q23 * sqk ** 5)
    if regime == "near5":
        s2 = (-c_half, c_one, -c_three)
        s3 = (c_half, c_one, c_three)
    else:
        s2 = (1j * c_half, c_one, -1j * c_three)
        s3 = (-1j * c_half, c_one, 1j * c_three)
    z0 = saddle.z_star
    z1c = (b2 / d23, b2 * b3 / d23 ** 3, (b2 + b3) * b2 * b3 / d23 ** 5)
    z4c = ((1.0 - b1 / b0) / k ** 2 if b0 != 0 else complex("inf"),
           -b1 / (b0 * d01 * k ** 2),
           -b1 / (d01 ** 3 * k ** 2))
    n_int = min(order if order < 3 else 2, 2)
    n_half = min(order, 3)
    return (
        make_series(f"z1@{regime}", var, z1c[: n_int + 1]),
        make_series(f"z2@{regime}", var, (z0,) + s2[:n_half], power_step=0.5),
        make_series(f"z3@{regime}", var, (z0,) + s3[:n_half], power_step=0.5),
        make_series(f"z4@{regime}", var, z4c[: n_int + 1]),
    )


def _large_lambda_series(p: PotentialParams, u_ref: complex, order):
    b0, b1, b2, b3 = p.b
    m = p.m
    kp2 = 1.0 - m
    u = complex(u_ref)
    n = min(order, 2)
    z1c = (1.0,
           -b3 * kp2,
           -b3 * kp2 * (b2 + b0 * m + b3 * m - u))
    z2c = (b2,
           b2 * (b3 + b1 * m - u),
           b2 * (b2 * (b0 * m - b1 * kp2 * m + b3 * kp2) + (b3 + b1 * m - u) ** 2))
    z3c = (1.0 / m,
           b1 * kp2 / m,
           b1 * kp2 * (b0 + b1 + b2 * m - u) / m)
    z4c = (1.0 / (b0 * m),
           -(b1 + b3 * m - u) / (b0 * m),
           -(b1 * kp2 + m * (b2 - b3 * kp2)) / m)
    var = "1/delta~"
    return (
        make_series("z1@largeLambda", var, z1c[: n + 1]),
        make_series("z2@largeLambda", var, z2c[: n + 1], leading_power=1),
        make_series("z3@largeLambda", var, z3c[: n + 1]),
        make_series("z4@largeLambda", var, z4c[: n + 1], leading_power=-1),
    )


# ---------------------------------------------------------------------------
# Eigenvalue controls and trajectories

@dataclass(frozen=True)
class LinearControl:
    """lambda(s) = u(x*5) + s [u(x*6) - u(x*5)] + delta, s in [0, 1]."""

    delta: complex
    srange: tuple = (0.0, 1.0)

    def lambda_at(self, p: PotentialParams, s: float) -> complex:
        by = _flat_saddle_data(p)
        if by is None:
            raise DegenerateError("linear control needs the flat saddle pair")
        u5, u6 = by[5].u_star, by[6].u_star
        return u5 + s * (u6 - u5) + self.delta


@dataclass(frozen=True)
class ExponentialControl:
    """lambda(s) = u(x*5) + delta + amp (1 - exp[rate s/(s-1)]), s in [0, end]."""

    delta: complex
    amplitude: float = 1000.0
    rate: float = 0.05
    end: float = 0.90

    @property
    def srange(self):
        return (0.0, self.end)

    def lambda_at(self, p: PotentialParams, s: float) -> complex:
        by = _flat_saddle_data(p)
        if by is None:
            raise DegenerateError("exponential control needs the flat saddle pair")
        if s >= 1.0:
            bump = 1.0
        else:
            bump = 1.0 - cmath.exp(self.rate * s / (s - 1.0))
        return by[5].u_star + self.delta + self.amplitude * bump


@dataclass(frozen=True)
class ConstantControl:
    lam: complex
    srange: tuple = (0.0, 1.0)

    def lambda_at(self, p: PotentialParams, s: float) -> complex:
        return self.lam


@dataclass
class TrajectoryRecord:
    control_samples: np.ndarray
    lambda_path: np.ndarray
    root_paths: tuple          # four arrays, matched continuously

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["varsigma", "re_lambda", "im_lambda"]
            for t in range(1, 5):
                header += [f"re_z{t}", f"im_z{t}"]
            writer.writerow(header)
            for i, s in enumerate(self.control_samples):
                row = [f"{s:.12g}", f"{self.lambda_path[i].real:.12g}",
                       f"{self.lambda_path[i].imag:.12g}"]
                for t in range(4):
                    z = self.root_paths[t][i]
                    row += [f"{z.real:.12g}", f"{z.imag:.12g}"]
                writer.writerow(row)


def trace_trajectory(p: PotentialParams, control, samples: int) -> TrajectoryRecord:
    """Track the four quartic roots along an eigenvalue control.

    ``control`` is one of the control dataclasses above or an explicit array
    of eigenvalues.  Consecutive samples are paired by the globally optimal
    assignment; a close approach below 1e-8 (relative) aborts with
    CollisionError carrying the control value.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    if isinstance(control, (list, tuple, np.ndarray)):
        lams = np.asarray(control, dtype=complex)
        svals = np.linspace(0.0, 1.0, len(lams))
    else:
        svals = np.linspace(control.srange[0], control.srange[1], samples)
        lams = np.array([control.lambda_at(p, s) for s in svals], dtype=complex)

    first = find_turning_points(p, lams[0])
    paths = [[z] for z in first.roots]
    current = list(first.roots)
    for i in range(1, len(lams)):
        roots = polynomial_roots(q4_coefficients(p, lams[i]))
        perm = match_consecutive(current, roots)
        current = [complex(roots[perm[t]]) for t in range(4)]
        _collision_check(current, float(svals[i]))
        for t in range(4):
            paths[t].append(current[t])
    return TrajectoryRecord(svals, lams, tuple(np.array(t) for t in paths))


def _collision_check(roots, svalue):
    for i in range(4):
        for j in range(i + 1, 4):
            scale = 1.0 + abs(roots[i]) + abs(roots[j])
            if abs(roots[i] - roots[j]) < 1e-8 * scale:
                raise CollisionError(
                    f"turning points collided at varsigma={svalue:.6g}",
                    varsigma=svalue)


def turning_set_to_json(tset: TurningPointSet, path):
    with open(path, "w") as fh:
        json.dump(tset.to_json_dict(), fh, indent=1)
