"""Arbitrary-precision ball arithmetic for strongly amplified states.

In the broken-symmetry regime, and whenever squeezing sits in the gain guide,
covariance entries grow like ``exp(2 * lambda * t)``, often past 1e20 over the
plotted time window.  Entanglement (the partially transposed symplectic
eigenvalue) and the uncertainty-relation margin live in the *small* directions of
such matrices and are destroyed by double-precision rounding.  This module
evaluates the closed-form propagator in ``flint.arb`` ball arithmetic with a
working precision chosen from an a-priori growth bound, so every quantity comes
with a rigorous error radius.
"""

import math
from contextlib import contextmanager

import flint
import numpy as np
from flint import arb, arb_mat

__all__ = [
    "workprec",
    "bits_for",
    "to_arb_mat",
    "to_float",
    "van_loan_blocks",
    "sym_part",
    "det",
    "min_eig_hermitian",
    "radius",
]

BASE_BITS = 96
MAX_BITS = 1 << 15


@contextmanager
def workprec(bits):
    with flint.ctx.workprec(int(bits)):
        yield


def log_norm(M):
    """Largest eigenvalue of the symmetric part: ``||exp(M t)||_2 <= exp(mu t)``."""
    M = np.asarray(M, dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[-1])


def bits_for(M, t_max, extra=BASE_BITS):
    """Working precision that keeps fourth-order invariants of ``V(t)`` accurate.

    Determinants of the covariance matrix combine four entries of size up to
    ``exp(2 mu t)``, so their cancellation costs about ``8 mu t / ln 2`` bits.
    """
    growth = max(0.0, log_norm(M)) * float(t_max)
    bits = extra + math.ceil(8.0 * growth / math.log(2.0))
    if bits > MAX_BITS:
        raise OverflowError(
            f"growth exponent {growth:.3g} over the time window needs {bits} bits"
        )
    return bits


def to_arb_mat(A):
    A = np.asarray(A, dtype=float)
    return arb_mat([[arb(float(x)) for x in row] for row in A])


def to_float(A):
    """Midpoints of an ``arb_mat`` as a float array (``inf`` beyond double range)."""
    rows, cols = A.nrows(), A.ncols()
    out = np.empty((rows, cols))
    for i in range(rows):
        for j in range(cols):
            out[i, j] = float(A[i, j].mid())
    return out


def radius(A):
    """Largest ball radius among the entries of an ``arb_mat``."""
    return max(
        float(A[i, j].rad()) for i in range(A.nrows()) for j in range(A.ncols())
    )


def van_loan_blocks(M, D, t):
    """``(exp(M t), Q(t))`` with ``Q(t) = int_0^t e^{Ms} D e^{M^T s} ds`` as balls.

    Uses the exponential of the block matrix ``[[M, D], [0, -M^T]]``; call under
    :func:`workprec`.
    """
    n = M.shape[0]
    B = np.zeros((2 * n, 2 * n))
    B[:n, :n] = M
    B[:n, n:] = D
    B[n:, n:] = -M.T
    E = (to_arb_mat(B) * arb(float(t))).exp()
    F = arb_mat([[E[i, j] for j in range(n)] for i in range(n)])
    G = arb_mat([[E[i, n + j] for j in range(n)] for i in range(n)])
    return F, G * F.transpose()


def sym_part(A):
    return (A + A.transpose()) * arb(0.5)


def det(A):
    return A.det()


def _charpoly_real(V):
    """Coefficients (highest first) of ``det(x I - (V + i Omega))``.

    ``V + i Omega`` is Hermitian, so the polynomial is real and all its roots
    are real; the (zero-containing) imaginary parts are dropped.
    """
    n = V.nrows()
    H = flint.acb_mat(V)
    for k in range(0, n, 2):
        H[k, k + 1] += flint.acb(0, 1)
        H[k + 1, k] -= flint.acb(0, 1)
    poly = H.charpoly()
    coeffs = [poly[i] for i in range(n, -1, -1)]
    return [c.real for c in coeffs]


def _horner3(coeffs, x):
    p, dp, ddp = coeffs[0], arb(0), arb(0)
    for c in coeffs[1:]:
        ddp = ddp * x + dp
        dp = dp * x + p
        p = p * x + c
    return p, dp, 2 * ddp


def min_eig_hermitian(V, maxiter=400):
    """Smallest eigenvalue of ``V + i Omega`` for a real symmetric ``arb_mat`` ``V``.

    Laguerre's iteration on the real-rooted characteristic polynomial, started
    left of every root, increases monotonically to the smallest root.  Midpoint
    arithmetic is used for the iteration itself and it stops at double-precision
    resolution relative to ``1 + |x|``.  Clustered and repeated roots, which
    defeat interval eigen-isolation, need no special handling here.
    """
    coeffs = [c.mid() for c in _charpoly_real(V)]
    n = len(coeffs) - 1
    # Cauchy bound on root magnitudes
    bound = 1 + max(abs(c) for c in coeffs[1:])
    x = -bound
    tol = arb(2) ** -58
    for _ in range(maxiter):
        p, dp, ddp = _horner3(coeffs, x)
        # x is a root to working precision; a ball straddling 0 would give NaN below
        if p.contains(0):
            break
        G = dp / p
        H = G * G - ddp / p
        disc = (n - 1) * (n * H - G * G)
        root = disc.sqrt() if disc > 0 else arb(0)
        denom = G + root if G >= 0 else G - root
        if denom.contains(0):
            break
        step = (n / denom).mid()
        x = (x - step).mid()
        if abs(step) <= tol * (1 + abs(x)):
            break
    return x
