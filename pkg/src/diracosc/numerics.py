"""Discretized Hamiltonians and the numerical ground truth they provide.

Dense storage with direct LAPACK eigensolves keeps every run deterministic;
the largest matrices used by the verification suite are ~8000x8000. The
first-order operator uses antisymmetric central differences plus an optional
second-difference regulator (strength r) that lifts the lattice doubler
branch by 2r/h; r = 1 is the default for spectra, while residual diagnostics
always run at r = 0 so they measure the continuum equation.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np
import scipy.linalg

from . import kernels
from .errors import ZeroOutputError
from .model import Grid, GeneralProfiles, ScalarField, SpinorField


@dataclass(frozen=True)
class DiracMatrix:
    grid: Grid
    storage: np.ndarray          # dense Hermitian, dimension 2*n_points
    wilson_r: float
    profiles: GeneralProfiles

    @property
    def dimension(self):
        return 2 * self.grid.n_points


@dataclass(frozen=True)
class SchrodingerMatrix:
    grid: Grid
    storage: np.ndarray          # dense symmetric, dimension n_points
    potential: ScalarField

    @property
    def dimension(self):
        return self.grid.n_points


@dataclass(frozen=True)
class EigenResult:
    """Eigenpairs in ascending eigenvalue order, h-normalized vectors.

    kind is "dirac" (interleaved two-component vectors) or "schrodinger".
    bound_flags default to False until classify_bound runs.
    """

    kind: str
    grid: Grid
    values: np.ndarray
    vectors: np.ndarray          # columns match values
    residuals: np.ndarray
    bound_flags: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.bound_flags is None:
            object.__setattr__(
                self, "bound_flags", np.zeros(len(self.values), dtype=bool)
            )

    def node_density(self, i):
        """Per-node probability of eigenvector i (components summed for dirac)."""
        p = np.abs(self.vectors[:, i]) ** 2
        if self.kind == "dirac":
            p = p[0::2] + p[1::2]
        return p

    def bound(self):
        """(values, column indices) of the bound-flagged pairs."""
        idx = np.where(self.bound_flags)[0]
        return self.values[idx], idx


def _sample(profile, x):
    vals = np.asarray(profile.value(x), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("profile produced non-finite values on the grid")
    return vals


def build_dirac(profiles, grid, wilson_r=1.0):
    """Assemble the first-order operator for independent f, m, v profiles."""
    if wilson_r < 0:
        raise ValueError("wilson_r must be >= 0")
    x = grid.nodes
    f = _sample(profiles.f, x)
    m = _sample(profiles.m, x)
    v = _sample(profiles.v, x)
    H = kernels.assemble_dirac(f, m, v, grid.spacing, float(wilson_r))
    return DiracMatrix(grid=grid, storage=H, wilson_r=float(wilson_r), profiles=profiles)


def build_schrodinger(potential, grid=None):
    """Assemble -d2/dx2 + V from a sampled potential."""
    if grid is not None and grid.n_points != potential.grid.n_points:
        raise ValueError("grid does not match the sampled potential")
    grid = potential.grid
    H = kernels.assemble_schrodinger(
        np.asarray(potential.samples, dtype=float), grid.spacing
    )
    return SchrodingerMatrix(grid=grid, storage=H, potential=potential)


def _fix_phase(vectors):
    """Deterministic phase: largest-magnitude entry of each column real-positive."""
    for i in range(vectors.shape[1]):
        col = vectors[:, i]
        j = np.argmax(np.abs(col))
        piv = col[j]
        if piv != 0:
            vectors[:, i] = col * (abs(piv) / piv)
    return vectors


def eigensolve(matrix, k=None, window=None):
    """Eigenpairs of an assembled matrix with the h-weighted normalization.

    Schrodinger: the k algebraically smallest pairs. Dirac: pairs ordered by
    |E| so states near the gap center surface first; `window=(lo, hi)`
    restricts the solve to that eigenvalue range (much faster than a full
    decomposition for large matrices). Values are reported in ascending
    order; selection, not ordering, is by |E|.
    """
    H = matrix.storage
    dim = H.shape[0]
    if k is not None and k > dim:
        raise ValueError(f"k={k} exceeds matrix dimension {dim}")
    is_dirac = isinstance(matrix, DiracMatrix)
    try:
        if window is not None:
            vals, vecs = scipy.linalg.eigh(H, subset_by_value=window)
        elif k is not None and not is_dirac:
            vals, vecs = scipy.linalg.eigh(H, subset_by_index=[0, k - 1])
        else:
            vals, vecs = scipy.linalg.eigh(H)
    except scipy.linalg.LinAlgError as err:  # pragma: no cover - LAPACK failure
        raise RuntimeError(f"eigensolver did not converge: {err}") from err
    if is_dirac and k is not None and k < len(vals):
        keep = np.sort(np.argsort(np.abs(vals), kind="stable")[:k])
        vals, vecs = vals[keep], vecs[:, keep]
    res = np.linalg.norm(H @ vecs - vecs * vals, axis=0)
    vecs = _fix_phase(vecs / math.sqrt(matrix.grid.spacing))
    return EigenResult(
        kind="dirac" if is_dirac else "schrodinger",
        grid=matrix.grid,
        values=vals,
        vectors=vecs,
        residuals=res,
    )


def _outer_masses(density, outer_frac):
    n = len(density)
    kk = max(1, int(round(outer_frac * n)))
    tot = density.sum()
    if tot == 0:
        return 1.0, 1.0
    return density[:kk].sum() / tot, density[-kk:].sum() / tot


def _resolve_cluster(result, idx, outer_frac):
    """Re-mix a near-degenerate cluster to separate localized from edge states.

    Eigenvectors inside a (numerically) degenerate cluster are an arbitrary
    orthogonal mixture; LAPACK happily hybridizes a physical midgap state
    with a wall artifact at the same energy. Diagonalizing the outer-mass
    quadratic form inside the cluster subspace yields localization-sorted
    representatives deterministically. Values become Rayleigh quotients and
    residuals are widened by the cluster spread, both within degeneracy_tol.
    """
    if len(idx) == 1:
        return
    vecs = result.vectors[:, idx]
    n = result.grid.n_points
    kk = max(1, int(round(outer_frac * n)))
    outer = np.zeros(vecs.shape[0], dtype=bool)
    if result.kind == "dirac":
        node_outer = np.zeros(n, dtype=bool)
        node_outer[:kk] = node_outer[-kk:] = True
        outer[0::2] = outer[1::2] = node_outer
    else:
        outer[:kk] = outer[-kk:] = True
    sub = vecs[outer, :]
    gram = sub.conj().T @ sub
    _, rot = np.linalg.eigh(gram)
    mixed = vecs @ rot
    h = result.grid.spacing
    mixed /= np.sqrt(np.sum(np.abs(mixed) ** 2, axis=0) * h)
    lam = result.values[idx]
    ray = np.real(np.sum(np.abs(rot) ** 2 * lam[:, None], axis=0))
    spread = np.sqrt(np.sum(np.abs(rot) ** 2 * (lam[:, None] - ray) ** 2, axis=0))
    order = np.argsort(ray, kind="stable")
    result.vectors[:, idx] = _fix_phase(mixed[:, order])
    result.values[idx] = ray[order]
    result.residuals[idx] = (result.residuals[idx].max() + spread)[order]


def classify_bound(result, continuum_edge, outer_frac=0.1, outer_tol=0.01,
                   degeneracy_tol=1e-6):
    """Flag eigenpairs that are genuine bound states.

    A pair is bound when its eigenvalue lies strictly below the supplied
    continuum edge (|E| for dirac, algebraic for schrodinger) and at most
    outer_tol of its probability mass sits in the outer outer_frac of the
    grid on each side. Near-degenerate clusters are re-mixed first (see
    _resolve_cluster) so hybridization with boundary artifacts cannot hide a
    localized state.
    """
    out = replace(
        result,
        values=result.values.copy(),
        vectors=result.vectors.copy(),
        residuals=result.residuals.copy(),
        bound_flags=np.zeros(len(result.values), dtype=bool),
    )
    below = (
        np.abs(out.values) < continuum_edge
        if out.kind == "dirac"
        else out.values < continuum_edge
    )
    cand = np.where(below)[0]
    if len(cand) == 0:
        return out
    # cluster candidates by eigenvalue gaps
    start = 0
    clusters = []
    for i in range(1, len(cand) + 1):
        if i == len(cand) or abs(out.values[cand[i]] - out.values[cand[i - 1]]) > degeneracy_tol:
            clusters.append(cand[start:i])
            start = i
    for cl in clusters:
        _resolve_cluster(out, cl, outer_frac)
    for i in cand:
        left, right = _outer_masses(out.node_density(i), outer_frac)
        if left <= outer_tol and right <= outer_tol:
            out.bound_flags[i] = True
    return out


def dirac_continuum_edge(profiles, grid):
    """Scattering threshold |E| for profiles that saturate at the box ends.

    Each side contributes sqrt(f^2 + m^2) - |v| evaluated at the end node;
    the edge is the smaller one, clamped at zero. Exact for the odd
    saturating shapes used throughout; heuristic otherwise.
    """
    edges = []
    for xs in (-grid.half_length, grid.half_length):
        fs = float(np.asarray(profiles.f.value(xs)))
        ms = float(np.asarray(profiles.m.value(xs)))
        vs = float(np.asarray(profiles.v.value(xs)))
        edges.append(math.hypot(fs, ms) - abs(vs))
    return max(0.0, min(edges))


def schrodinger_continuum_edge(reduced, grid):
    """min over the two ends of wtilde^2 for a reduced partner problem."""
    ends = np.array([-grid.half_length, grid.half_length])
    return float(np.min(np.real(reduced.w_tilde(ends)) ** 2))


def dirac_residual(profiles, psi, energy, exclude_frac=0.05, jump_mask=True):
    """|| (H - E) psi || / || psi || with H matrix-free at r = 0.

    The outer exclude_frac of nodes on each side is ignored (boundary
    stencils), as are nodes straddling a profile discontinuity when
    jump_mask is set: the continuum equation holds one-sidedly at a jump and
    a central difference across it measures nothing.
    """
    grid = psi.grid
    x = grid.nodes
    f = _sample(profiles.f, x)
    m = _sample(profiles.m, x)
    v = _sample(profiles.v, x)
    r1, r2 = kernels.dirac_apply(f, m, v, grid.spacing, 0.0, psi.upper, psi.lower,
                                 float(energy))
    n = grid.n_points
    mask = np.ones(n, dtype=bool)
    k = int(exclude_frac * n)
    if k > 0:
        mask[:k] = mask[-k:] = False
    if jump_mask:
        for prof in (f, m, v):
            rng = prof.max() - prof.min()
            if rng == 0:
                continue
            jumps = np.where(np.abs(np.diff(prof)) > 0.25 * rng)[0]
            for j in jumps:
                mask[max(j - 1, 0):min(j + 2, n)] = False
    num = np.sqrt(np.sum((np.abs(r1) ** 2 + np.abs(r2) ** 2)[mask]) * grid.spacing)
    den = np.sqrt(
        np.sum((np.abs(psi.upper) ** 2 + np.abs(psi.lower) ** 2)[mask]) * grid.spacing
    )
    if den == 0:
        raise ValueError("psi vanishes on the interior")
    return num / den


def reconstruct_spinor(phi, chi, model, sigma, energy, zero_tol=1e-2):
    """Physical spinor from a reduced-problem solution phi.

    Applies the first-order intertwining operator to chi*phi(x) nodewise
    (central differences) and normalizes. At E = 0 the operator annihilates
    the supersymmetric ground state; that is detected by comparing output to
    input norm against zero_tol and reported as ZeroOutputError so the
    caller can switch to the direct first-order construction.
    """
    grid = phi.grid
    x = grid.nodes
    h = grid.spacing
    f = model.kappa_f * np.asarray(model.profile.value(x), dtype=float)
    m = model.kappa_m * np.asarray(model.profile.value(x), dtype=float)
    v = model.kappa_v * np.asarray(model.profile.value(x), dtype=float)
    p1 = chi[0] * np.asarray(phi.samples, dtype=complex)
    p2 = chi[1] * np.asarray(phi.samples, dtype=complex)
    # intertwiner = sigma_x p - sigma_y f + sigma_z m - v + E
    o1, o2 = kernels.dirac_apply(f, m, -v, h, 0.0, p1, p2, -float(energy))
    out_norm = math.sqrt(float(np.sum(np.abs(o1) ** 2 + np.abs(o2) ** 2)) * h)
    in_norm = math.sqrt(float(np.sum(np.abs(p1) ** 2 + np.abs(p2) ** 2)) * h)
    if in_norm == 0:
        raise ValueError("phi is identically zero")
    if out_norm < zero_tol * in_norm:
        raise ZeroOutputError(
            "the intertwining operator annihilated chi*phi (zero-energy ground "
            "state); build the state from the first-order equation instead"
        )
    return SpinorField(grid, o1 / out_norm, o2 / out_norm)


def selfconsistent_level(model, sigma, level, grid, seed_energy, tol=1e-10,
                         max_iter=100):
    """Fixed-point solve of one level when the potential carries the energy.

    With an electric coupling the reduced potential depends on E, so the
    partner-problem spectrum is found by iterating: solve with E_k inside
    the potential, read off eps at `level`, map back to E_{k+1}. Returns
    (energy, eps, iterations). Seeds of opposite sign probe the two
    branches. Raises RuntimeError when the loop fails to settle.
    """
    from .susy import reduce as susy_reduce

    E = float(seed_energy)
    sgn = 1.0 if E >= 0 else -1.0
    for it in range(1, max_iter + 1):
        red = susy_reduce(model, sigma, energy=E)
        pot = ScalarField(grid, red.effective_potential(grid.nodes))
        res = eigensolve(build_schrodinger(pot), k=level + 1)
        eps = float(res.values[level])
        if eps < 0:
            raise RuntimeError(f"level {level} has negative eps={eps:g}")
        E_new = sgn * math.sqrt(eps / red.epsilon_coefficient)
        if abs(E_new - E) < tol:
            return E_new, eps, it
        E = E_new
    raise RuntimeError(f"fixed-point iteration did not converge in {max_iter} steps")
