"""Dense matrix exponential by scaling and squaring with diagonal Pade approximants.

Follows Higham's 2005 selection of approximant degree (3, 5, 7, 9 or 13) from
the 1-norm of the argument.  No eigendecomposition is involved, so defective
matrices (e.g. the drift matrix at an exceptional point) are handled exactly
like any other input.
"""

import math

import numpy as np

__all__ = ["expm"]

_B3 = (120.0, 60.0, 12.0, 1.0)
_B5 = (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0)
_B7 = (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0)
_B9 = (
    17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
    2162160.0, 110880.0, 3960.0, 90.0, 1.0,
)
_B13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)

# Largest 1-norm for which the degree-m approximant is accurate to unit roundoff.
_THETA = ((3, 1.495585217958292e-2), (5, 2.539398330063230e-1),
          (7, 9.504178996162932e-1), (9, 2.097847961257068e0))
_THETA13 = 5.371920351148152


def _pade_low(A, b):
    # degrees 3..9: U = A * sum b_odd A^(k-1), V = sum b_even A^k
    n = A.shape[0]
    ident = np.eye(n)
    A2 = A @ A
    powers = [ident, A2]
    for _ in range(2, (len(b) - 1) // 2 + 1):
        powers.append(powers[-1] @ A2)
    U = sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
    V = sum(b[2 * k] * powers[k] for k in range(len(powers)))
    return A @ U, V


def _pade13(A):
    b = _B13
    ident = np.eye(A.shape[0])
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    return U, V


def expm(A):
    """Return ``exp(A)`` for a square real or complex array.

    Parameters
    ----------
    A : array_like, shape (n, n)

    Returns
    -------
    ndarray, shape (n, n)
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.issubdtype(A.dtype, np.inexact):
        A = A.astype(float)
    if A.size == 0:
        return np.eye(0, dtype=A.dtype)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix exponential of a non-finite matrix")

    norm = np.linalg.norm(A, 1)
    for m, theta in _THETA:
        if norm <= theta:
            U, V = _pade_low(A, {3: _B3, 5: _B5, 7: _B7, 9: _B9}[m])
            return np.linalg.solve(V - U, V + U)

    s = max(0, math.ceil(math.log2(norm / _THETA13))) if norm > _THETA13 else 0
    U, V = _pade13(A / 2.0 ** s)
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R
