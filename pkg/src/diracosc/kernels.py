"""Hot numeric kernels: Hamiltonian assembly, matrix-free application, quadrature.

Each kernel exists twice: a numba-compiled loop version and a vectorized
pure-numpy version. The numba path is used when numba imports cleanly and the
environment variable ``DIRACOSC_NO_NUMBA`` is unset; setting it to 1/true/yes
forces the numpy path. Both variants stay importable (``*_numba`` may be None)
so tests and ``benchmarks/bench_kernels.py`` can compare them directly.

The selection only affects speed. Results agree to machine rounding; reports
produced with a fixed backend are byte-reproducible.
"""

import os

import numpy as np

_flag = os.environ.get("DIRACOSC_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in {"1", "true", "yes", "on"}

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled via DIRACOSC_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    njit = None
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# pure-numpy implementations


def assemble_dirac_numpy(f, m, v, h, r):
    """Dense Hermitian matrix of the first-order operator on interleaved nodes.

    Layout: index 2j is the upper component at node j, 2j+1 the lower one.
    Momentum enters through antisymmetric central differences (-i/2h on the
    off-diagonal spinor-swapped neighbors), the oscillator profile f through
    +/- i f on the same-node spinor swap, the mass m with opposite signs on
    the two components, and v on both. A second-difference regulator of
    strength r (opposite sign on the two components) lifts the lattice
    doubler branch by 2r/h; r = 0 disables it. End stencils are truncated,
    which pins the wavefunction to zero one spacing outside the last node.
    """
    n = f.shape[0]
    H = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    up = 2 * np.arange(n)
    lo = up + 1
    c = 1.0 / (2.0 * h)
    # sigma_x p
    H[up[:-1], lo[1:]] += -1j * c
    H[up[1:], lo[:-1]] += 1j * c
    H[lo[:-1], up[1:]] += -1j * c
    H[lo[1:], up[:-1]] += 1j * c
    # -sigma_y f
    H[up, lo] += 1j * f
    H[lo, up] += -1j * f
    # sigma_z m + v
    H[up, up] += m + v
    H[lo, lo] += -m + v
    if r != 0.0:
        w = r / h
        H[up, up] += w
        H[lo, lo] += -w
        H[up[:-1], up[1:]] += -w / 2.0
        H[up[1:], up[:-1]] += -w / 2.0
        H[lo[:-1], lo[1:]] += w / 2.0
        H[lo[1:], lo[:-1]] += w / 2.0
    return H


def assemble_schrodinger_numpy(pot, h):
    """Dense symmetric matrix of -d2/dx2 + pot with truncated end stencils."""
    n = pot.shape[0]
    H = np.zeros((n, n))
    idx = np.arange(n)
    H[idx, idx] = 2.0 / h**2 + pot
    H[idx[:-1], idx[:-1] + 1] = -1.0 / h**2
    H[idx[:-1] + 1, idx[:-1]] = -1.0 / h**2
    return H


def dirac_apply_numpy(f, m, v, h, r, psi1, psi2, energy):
    """Matrix-free (H - E) psi for the interleaved operator above.

    Matches assemble_dirac_* exactly, including the truncated boundary
    stencils, so residuals measured here agree with the assembled matrix.
    """
    c = 1.0 / (2.0 * h)
    d1 = np.zeros_like(psi1)
    d2 = np.zeros_like(psi2)
    d1[0] = psi1[1] * c
    d1[-1] = -psi1[-2] * c
    d1[1:-1] = (psi1[2:] - psi1[:-2]) * c
    d2[0] = psi2[1] * c
    d2[-1] = -psi2[-2] * c
    d2[1:-1] = (psi2[2:] - psi2[:-2]) * c
    out1 = -1j * d2 + 1j * f * psi2 + (m + v - energy) * psi1
    out2 = -1j * d1 - 1j * f * psi1 + (-m + v - energy) * psi2
    if r != 0.0:
        w = r / h
        s1 = np.zeros_like(psi1)
        s2 = np.zeros_like(psi2)
        s1[:-1] += psi1[1:]
        s1[1:] += psi1[:-1]
        s2[:-1] += psi2[1:]
        s2[1:] += psi2[:-1]
        out1 += w * psi1 - (w / 2.0) * s1
        out2 += -w * psi2 + (w / 2.0) * s2
    return out1, out2


def _interval_integral_numpy(w, h):
    """Integral of w over each interval [x_j, x_{j+1}], fourth order.

    Interior intervals average the two bracketing quadratic fits, which
    cancels their leading error: h/24 * (-w[j-1] + 13 w[j] + 13 w[j+1]
    - w[j+2]). The first and last interval fall back to the one-sided
    quadratic; they occur once per side so the cumulative order is kept.
    """
    n = w.shape[0]
    inc = np.empty(n - 1)
    inc[0] = h / 12.0 * (5.0 * w[0] + 8.0 * w[1] - w[2])
    inc[-1] = h / 12.0 * (-w[-3] + 8.0 * w[-2] + 5.0 * w[-1])
    if n > 3:
        inc[1:-1] = h / 24.0 * (-w[:-3] + 13.0 * w[1:-2] + 13.0 * w[2:-1] - w[3:])
    return inc


def cumulative_simpson_center_numpy(w, h, center):
    """Cumulative integral of sampled w from the center node outward.

    I[j] approximates the integral from x[center] to x[j]; fourth-order
    accurate (see _interval_integral_numpy). Needs at least 2 nodes on each
    side of the center.
    """
    n = w.shape[0]
    inc = _interval_integral_numpy(w, h)
    out = np.zeros(n)
    out[center + 1:] = np.cumsum(inc[center:])
    out[center - 1::-1] = -np.cumsum(inc[center - 1::-1])
    return out


# ---------------------------------------------------------------------------
# numba implementations (compiled lazily on first call)

if HAVE_NUMBA:

    @njit(cache=True)
    def assemble_dirac_numba(f, m, v, h, r):
        n = f.shape[0]
        H = np.zeros((2 * n, 2 * n), dtype=np.complex128)
        c = 1.0 / (2.0 * h)
        w = r / h
        for j in range(n):
            u = 2 * j
            lo = u + 1
            H[u, lo] += 1j * f[j]
            H[lo, u] += -1j * f[j]
            H[u, u] += m[j] + v[j]
            H[lo, lo] += -m[j] + v[j]
            if j + 1 < n:
                H[u, lo + 2] += -1j * c
                H[u + 2, lo] += 1j * c
                H[lo, u + 2] += -1j * c
                H[lo + 2, u] += 1j * c
            if r != 0.0:
                H[u, u] += w
                H[lo, lo] += -w
                if j + 1 < n:
                    H[u, u + 2] += -w / 2.0
                    H[u + 2, u] += -w / 2.0
                    H[lo, lo + 2] += w / 2.0
                    H[lo + 2, lo] += w / 2.0
        return H

    @njit(cache=True)
    def assemble_schrodinger_numba(pot, h):
        n = pot.shape[0]
        H = np.zeros((n, n))
        for j in range(n):
            H[j, j] = 2.0 / h**2 + pot[j]
            if j + 1 < n:
                H[j, j + 1] = -1.0 / h**2
                H[j + 1, j] = -1.0 / h**2
        return H

    @njit(cache=True)
    def dirac_apply_numba(f, m, v, h, r, psi1, psi2, energy):
        n = psi1.shape[0]
        out1 = np.zeros(n, dtype=np.complex128)
        out2 = np.zeros(n, dtype=np.complex128)
        c = 1.0 / (2.0 * h)
        w = r / h
        for j in range(n):
            left1 = psi1[j - 1] if j > 0 else 0.0 + 0.0j
            right1 = psi1[j + 1] if j + 1 < n else 0.0 + 0.0j
            left2 = psi2[j - 1] if j > 0 else 0.0 + 0.0j
            right2 = psi2[j + 1] if j + 1 < n else 0.0 + 0.0j
            d1 = (right1 - left1) * c
            d2 = (right2 - left2) * c
            o1 = -1j * d2 + 1j * f[j] * psi2[j] + (m[j] + v[j] - energy) * psi1[j]
            o2 = -1j * d1 - 1j * f[j] * psi1[j] + (-m[j] + v[j] - energy) * psi2[j]
            if r != 0.0:
                o1 += w * psi1[j] - (w / 2.0) * (left1 + right1)
                o2 += -w * psi2[j] + (w / 2.0) * (left2 + right2)
            out1[j] = o1
            out2[j] = o2
        return out1, out2

    @njit(cache=True)
    def cumulative_simpson_center_numba(w, h, center):
        n = w.shape[0]
        inc = np.empty(n - 1)
        inc[0] = h / 12.0 * (5.0 * w[0] + 8.0 * w[1] - w[2])
        inc[n - 2] = h / 12.0 * (-w[n - 3] + 8.0 * w[n - 2] + 5.0 * w[n - 1])
        for j in range(1, n - 2):
            inc[j] = h / 24.0 * (-w[j - 1] + 13.0 * w[j] + 13.0 * w[j + 1] - w[j + 2])
        out = np.zeros(n)
        acc = 0.0
        for j in range(center, n - 1):
            acc += inc[j]
            out[j + 1] = acc
        acc = 0.0
        for j in range(center - 1, -1, -1):
            acc -= inc[j]
            out[j] = acc
        return out

else:
    assemble_dirac_numba = None
    assemble_schrodinger_numba = None
    dirac_apply_numba = None
    cumulative_simpson_center_numba = None


if HAVE_NUMBA:
    # dense first-order assembly is measurably faster vectorized (strided
    # diagonal writes beat scattered per-row stores; see benchmarks/), so it
    # stays on numpy in both lanes
    assemble_dirac = assemble_dirac_numpy
    assemble_schrodinger = assemble_schrodinger_numba
    dirac_apply = dirac_apply_numba
    cumulative_simpson_center = cumulative_simpson_center_numba
    BACKEND = "numba"
else:
    assemble_dirac = assemble_dirac_numpy
    assemble_schrodinger = assemble_schrodinger_numpy
    dirac_apply = dirac_apply_numpy
    cumulative_simpson_center = cumulative_simpson_center_numpy
    BACKEND = "numpy"
