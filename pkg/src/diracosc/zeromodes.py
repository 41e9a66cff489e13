"""Exact E = 0 bound states by three mechanisms.

* quadrature: integrate the shared profile and exponentiate, for the
  proportional model (mechanism "quadrature");
* interface matching for two-sided constant profiles ("interface_matching");
* transformed-potential construction with independent f and m ("transformed_potential").

The transformed-potential path is implemented in full but deserves a warning: for
every admissible parameter set the target eigenvalue sits below the minimum
of the transformed potential, so the construction fails with
ConstructionFailedError carrying the spectrum it did find. See the test
suite for the quantitative statement.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels, numerics, susy
from .errors import (
    ConstructionFailedError,
    DegenerateSpinorError,
    SupercriticalError,
)
from .model import (
    CoupledModel,
    CustomProfile,
    GeneralProfiles,
    Grid,
    ScalarField,
    SpinorField,
    StepProfile,
)


@dataclass(frozen=True)
class ZeroModeResult:
    psi: SpinorField
    mechanism: str             # "quadrature" | "interface_matching" | "transformed_potential"
    normalizable: bool
    decay_rates: tuple         # asymptotic exponents toward -inf and +inf
    metadata: dict

    @property
    def dirac_residual(self):
        return self.metadata.get("dirac_residual")


@dataclass(frozen=True)
class StepMatchProblem:
    """Two-sided constant oscillator/mass magnitudes and a trial energy."""

    f_plus: float
    f_minus: float
    m_plus: float
    m_minus: float
    energy: float = 0.0

    def __post_init__(self):
        # the oscillator magnitudes may vanish (pure mass kink); the mass
        # magnitudes may not, or the component relations degenerate at E = 0
        for name in ("f_plus", "f_minus"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be a nonnegative magnitude")
        for name in ("m_plus", "m_minus"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be a positive magnitude")


def zero_mode_quadrature(model, grid):
    """Zero mode of the proportional model via cumulative quadrature.

    phi_sigma = exp(-lambda_sigma * I(x)) with I the integral of W from 0;
    sigma is chosen so the exponent decays on both sides (judged from the
    signs of lambda*W at the box ends, where the profiles have saturated).
    When neither sign works the result is returned with normalizable=False
    and both candidates' decay rates in the metadata; a supercritical model
    raises instead since lambda is no longer real.
    """
    pair_plus, pair_minus = susy.spin_eigensystem(
        model.kappa_f, model.kappa_m, model.kappa_v, zero_energy_variant=True
    )
    if not pair_plus.subcritical:
        raise SupercriticalError(
            model.kappa_v, susy.critical_field(model.kappa_f, model.kappa_m)
        )
    x = grid.nodes
    w = np.asarray(model.profile.value(x), dtype=float)
    integral = kernels.cumulative_simpson_center(w, grid.spacing, grid.center_index)
    w_left, w_right = w[0], w[-1]

    tried = {}
    for pair in (pair_plus, pair_minus):
        lam = float(np.real(pair.lam))
        rates = (-lam * w_left, lam * w_right)   # exponents toward -inf, +inf
        tried[pair.sigma] = rates
        if rates[0] > 0 and rates[1] > 0:
            expo = -lam * integral
            expo -= expo.max()                   # overflow guard; rescaled below
            phi = np.exp(expo)
            psi = SpinorField(grid, pair.chi[0] * phi, pair.chi[1] * phi).normalize()
            meta = {
                "sigma": pair.sigma,
                "lambda": lam,
                "chi": pair.chi,
                "candidates": tried,
                "dirac_residual": numerics.dirac_residual(model.general(), psi, 0.0),
            }
            return ZeroModeResult(psi, "quadrature", True, rates, meta)
    zero = np.zeros(grid.n_points, dtype=complex)
    return ZeroModeResult(
        SpinorField(grid, zero, zero),
        "quadrature",
        False,
        tried[+1],
        {"candidates": tried},
    )


def _signed_step(plus, minus, flip):
    """(right value, left value) with the left minus sign applied internally."""
    sign = -1.0 if flip else 1.0
    return sign * plus, sign * (-minus)


def match_interface(problem, flip_f=False, flip_m=False, residual_tol=1e-12):
    """Scalar continuity condition for two-sided constant profiles.

    The exterior solutions decay like exp(-lambda_plus x) and
    exp(+lambda_minus x); continuity of both spinor components at x = 0
    collapses to one condition on the component ratios. Returns None when
    the residual exceeds residual_tol, else (constant, ratio, lambda_plus,
    lambda_minus) where `constant` normalizes the mode exactly on the line
    and psi1/psi2 = i*ratio. flip_f / flip_m negate the respective profile
    globally, covering the four sign arrangements with one code path.
    """
    E = problem.energy
    lam_p = problem.f_plus**2 + problem.m_plus**2 - E * E
    lam_m = problem.f_minus**2 + problem.m_minus**2 - E * E
    if lam_p <= 0 or lam_m <= 0:
        raise ValueError("need E^2 < f^2 + m^2 on both sides for decaying solutions")
    lam_p, lam_m = math.sqrt(lam_p), math.sqrt(lam_m)

    f_r, f_l = _signed_step(problem.f_plus, problem.f_minus, flip_f)
    m_r, m_l = _signed_step(problem.m_plus, problem.m_minus, flip_m)

    den_r = E - m_r
    den_l = m_l - E
    scale = max(abs(m_r), abs(m_l), abs(E), 1.0)
    if abs(den_r) < 1e-14 * scale or abs(den_l) < 1e-14 * scale:
        raise DegenerateSpinorError(
            "component relation divides by E -+ m; matching undefined"
        )
    ratio_r = (lam_p + f_r) / den_r       # psi1/psi2 = i*ratio on the right
    ratio_l = (lam_m - f_l) / den_l       # and on the left
    if abs(ratio_r - ratio_l) > residual_tol * max(abs(ratio_r), abs(ratio_l), 1.0):
        return None

    amp2 = ratio_r**2 + 1.0
    const = 1.0 / math.sqrt(amp2 * (0.5 / lam_p + 0.5 / lam_m))
    return const, ratio_r, lam_p, lam_m


def step_match(problem, grid, flip_f=False, flip_m=False):
    """Matched step-profile mode on a grid, or None when no solution exists.

    Phase convention: the upper component is real (positive for the
    standard sign arrangement), the lower imaginary. The closed-form
    normalization constant is kept in the metadata while the returned field
    is renormalized on the grid (the Riemann sum across the kink differs
    from the exact integral at order (lambda*h)^2).
    """
    matched = match_interface(problem, flip_f=flip_f, flip_m=flip_m)
    if matched is None:
        return None
    const, ratio, lam_p, lam_m = matched
    x = grid.nodes
    env = np.where(x >= 0, np.exp(-lam_p * x), np.exp(lam_m * x))
    upper = -const * ratio * env + 0j
    lower = const * 1j * env
    raw = SpinorField(grid, upper, lower)
    psi = raw.normalize()

    sf = -1.0 if flip_f else 1.0
    sm = -1.0 if flip_m else 1.0
    profiles = GeneralProfiles(
        f=StepProfile(sf * problem.f_plus, sf * problem.f_minus),
        m=StepProfile(sm * problem.m_plus, sm * problem.m_minus),
        v=CustomProfile(lambda xx: np.zeros_like(np.asarray(xx, float)), name="zero"),
    )
    meta = {
        "normalization_constant": const,
        "component_ratio": ratio,
        "lambda_plus": lam_p,
        "lambda_minus": lam_m,
        "grid_norm_of_closed_form": raw.norm_squared,
        "energy": problem.energy,
        "dirac_residual": numerics.dirac_residual(profiles, psi, problem.energy),
    }
    return ZeroModeResult(psi, "interface_matching", True, (lam_m, lam_p), meta)


def transformed_potential_profiles(params):
    """(f, m, potential) callables for a closed parameter set."""
    lam, nu = params.lam, params.nu

    def mass(x):
        return math.sqrt(2.0 * lam) / np.cosh(np.asarray(x, dtype=float))

    def osc(x):
        return (lam + 0.5) * np.tanh(np.asarray(x, dtype=float)) + nu

    def potential(x):
        x = np.asarray(x, dtype=float)
        return (
            lam * lam + nu * nu
            - lam * (lam - 1.0) / np.cosh(x) ** 2
            + 2.0 * lam * nu * np.tanh(x)
        )

    return osc, mass, potential


def zero_mode_transformed(params, grid, tol=1e-3):
    """Transformed-potential construction targeting level index params.n.

    Builds the decoupled second-order problem, eigensolves it, and demands
    an eigenvalue of magnitude <= tol at level index n. For admissible
    parameters the spectrum never contains one (the target lies below the
    potential minimum lam - nu^2/(lam-1) > 0), so this raises
    ConstructionFailedError with the spectrum attached; the reconstruction
    below it documents what would be returned if a root existed.
    """
    if not params.valid:
        raise ValueError(f"invalid parameters: {params.reason}")
    osc, mass, potential = transformed_potential_profiles(params)
    pot = ScalarField(grid, potential(grid.nodes))
    result = numerics.eigensolve(numerics.build_schrodinger(pot), k=params.n + 3)
    spectrum = result.values
    pick = int(np.argmin(np.abs(spectrum)))
    if pick != params.n or abs(spectrum[pick]) > tol:
        raise ConstructionFailedError(
            f"no eigenvalue of magnitude <= {tol:g} at level {params.n}: "
            f"|E^2|min = {abs(spectrum[pick]):g} at level {pick} "
            f"(potential minimum {params.lam - params.nu**2 / (params.lam - 1):g} > 0)",
            spectrum=spectrum,
        )
    phi1 = ScalarField(grid, result.vectors[:, pick])
    return _assemble_transformed(params, grid, phi1, osc, mass, potential)


def _assemble_transformed(params, grid, phi1, osc, mass, potential):
    """Spinor from a first-component solution of the transformed problem.

    psi1 = sqrt(m)*phi1; psi2 follows from the first coupled equation at
    E = 0 with a central-difference derivative. Exposed separately so the
    reconstruction can be validated on synthetic inputs.
    """
    x = grid.nodes
    h = grid.spacing
    m = mass(x)
    f = osc(x)
    psi1 = np.sqrt(m) * np.asarray(phi1.samples, dtype=complex)
    d = np.zeros_like(psi1)
    d[1:-1] = (psi1[2:] - psi1[:-2]) / (2.0 * h)
    d[0] = (psi1[1] - psi1[0]) / h
    d[-1] = (psi1[-1] - psi1[-2]) / h
    psi2 = 1j * (-d - f * psi1) / m
    psi = SpinorField(grid, psi1, psi2).normalize()
    profiles = GeneralProfiles(
        f=CustomProfile(osc, name="transformed_f"),
        m=CustomProfile(mass, name="transformed_m"),
        v=CustomProfile(lambda xx: np.zeros_like(np.asarray(xx, float)), name="zero"),
    )
    rate_left = abs(params.lam - params.nu)
    rate_right = abs(params.lam + params.nu)
    meta = {
        "lambda": params.lam,
        "nu": params.nu,
        "n": params.n,
        "dirac_residual": numerics.dirac_residual(profiles, psi, 0.0),
    }
    return ZeroModeResult(psi, "transformed_potential", True, (rate_left, rate_right), meta)
