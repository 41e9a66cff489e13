"""Reduction of the proportional model to partner Schrodinger problems.

The coupling matrix is diagonalized in closed form; each sign sigma = +/-1
selects one partner potential wtilde^2 - sigma*wtilde'. The reduction is
well defined only below the critical coupling sqrt(kf^2 + km^2); at or above
it the square root turns zero or imaginary and the shifted superpotential
degenerates, so those inputs are refused unless diagnostics are requested.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .errors import SupercriticalError
from .model import CoupledModel


@dataclass(frozen=True)
class SpinEigenpair:
    """One eigenvalue/eigenvector pair of the 2x2 coupling matrix."""

    sigma: int
    lam: complex          # sigma * sqrt(kf^2 + km^2 - kv^2); complex when supercritical
    chi: np.ndarray       # unit-norm 2-spinor
    normalized: bool
    subcritical: bool


@dataclass(frozen=True)
class ReducedProblem:
    """One partner problem: shifted superpotential and the eps <-> E^2 map."""

    sigma: int
    model: CoupledModel
    energy: float
    shift: float                 # kv*E / (kf^2+km^2-kv^2)
    scale: float                 # sqrt(kf^2+km^2-kv^2)
    epsilon_coefficient: float   # eps = coeff * E^2
    subcritical: bool

    def w_tilde(self, x):
        return self.scale * (self.model.profile.value(x) + self.shift)

    def w_tilde_prime(self, x):
        return self.scale * self.model.profile.derivative(x)

    def effective_potential(self, x):
        wt = self.w_tilde(x)
        return wt * wt - self.sigma * self.w_tilde_prime(x)

    def epsilon_of_energy(self, energy):
        return self.epsilon_coefficient * energy**2


def coupling_matrix(kf, km, kv, zero_energy_variant=False):
    """Explicit 2x2 coupling matrix in the chosen sign convention.

    The finite-energy reduction and the zero-energy first-order system carry
    the electric coupling with opposite imaginary signs; the eigenvalues
    agree, the eigenvectors do not, so both conventions are kept explicit.
    """
    s = +1.0 if zero_energy_variant else -1.0
    return np.array(
        [
            [kf, -1j * (km - s * kv)],
            [1j * (km + s * kv), -kf],
        ]
    )


def critical_field(kf, km):
    """Coupling magnitude beyond which the discrete spectrum vanishes."""
    return math.hypot(kf, km)


def is_subcritical(kf, km, kv):
    """Strict predicate: bound states require |kv| < sqrt(kf^2 + km^2)."""
    return abs(kv) < critical_field(kf, km)


def _eigvec(kf, km, kv, lam, zero_energy_variant):
    """Eigenvector for eigenvalue lam.

    The two row formulas are algebraically the same vector but lose
    precision in different corners (cancellation in lam -+ kf, vanishing
    denominators), so both are built when possible and the one with the
    smaller explicit residual wins. km = kv = 0 leaves a diagonal matrix.
    """
    s = +1.0 if zero_energy_variant else -1.0
    d1 = km - s * kv   # first-row denominator
    d2 = km + s * kv   # second-row denominator
    scale = max(abs(kf), abs(km), abs(kv), 1.0)
    candidates = []
    if abs(d1) > 1e-300:
        candidates.append(np.array([1.0, 1j * (lam - kf) / d1], dtype=complex))
    if abs(d2) > 1e-300:
        candidates.append(np.array([-1j * (kf + lam) / d2, 1.0], dtype=complex))
    if not candidates:
        # diagonal coupling matrix: basis spinors
        if abs(lam - kf) <= 1e-14 * scale:
            return np.array([1.0, 0.0], dtype=complex)
        return np.array([0.0, 1.0], dtype=complex)
    matrix = coupling_matrix(kf, km, kv, zero_energy_variant)
    best, best_res = None, math.inf
    for chi in candidates:
        chi = chi / np.linalg.norm(chi)
        res = float(np.linalg.norm(matrix @ chi - lam * chi))
        if res < best_res:
            best, best_res = chi, res
    return best


def spin_eigensystem(kf, km, kv, zero_energy_variant=False):
    """Both sigma = +/-1 eigenpairs of the coupling matrix.

    Supercritical couplings return complex eigenvalues flagged via
    `subcritical=False` instead of raising, so sweeps can cross the
    transition.
    """
    if kf == 0 and km == 0 and kv == 0:
        raise ValueError("all couplings zero: the coupling matrix vanishes")
    rad = kf * kf + km * km - kv * kv
    sub = rad > 0
    root = math.sqrt(rad) if sub else cmath.sqrt(complex(rad))
    pairs = []
    for sigma in (+1, -1):
        lam = sigma * root
        chi = _eigvec(kf, km, kv, lam, zero_energy_variant)
        pairs.append(
            SpinEigenpair(sigma=sigma, lam=lam, chi=chi, normalized=True, subcritical=sub)
        )
    return tuple(pairs)


def reduce(model, sigma, energy=0.0, allow_supercritical=False):
    """Partner problem for the given sigma and energy.

    For kv = 0 the energy argument is inert (the shift vanishes) and
    eps = E^2 exactly. Supercritical or exactly-critical couplings raise
    unless diagnostics are explicitly requested.
    """
    kf, km, kv = model.kappa_f, model.kappa_m, model.kappa_v
    rad = kf * kf + km * km - kv * kv
    sub = rad > 0
    if not sub and not allow_supercritical:
        raise SupercriticalError(kv, critical_field(kf, km))
    scale = math.sqrt(rad) if sub else cmath.sqrt(complex(rad))
    if kv == 0 or energy == 0:
        shift = 0.0
    else:
        shift = kv * energy / rad if rad != 0 else math.inf
    coeff = (kf * kf + km * km) / rad if rad != 0 else math.inf
    return ReducedProblem(
        sigma=sigma,
        model=model,
        energy=energy,
        shift=shift,
        scale=scale,
        epsilon_coefficient=coeff,
        subcritical=sub,
    )
