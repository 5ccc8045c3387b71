"""Reference computations that share no code with the package.

Each oracle takes a different route to a quantity the package computes:

* ``mp_expm`` / ``mp_lyapunov``: arbitrary-precision exponentials, with the
  covariance obtained from the vectorised (Kronecker) form of the Lyapunov
  equation instead of the block-exponential trick.
* ``fock_moment_rates``: time derivatives of the first and second quadrature
  moments from a truncated two-mode master equation, giving the drift and
  diffusion matrices without any Langevin algebra.
* ``fock_log_negativity``: trace norm of the partial transpose of a Fock-space
  density matrix.
* ``symplectic_log_negativity``: smallest symplectic eigenvalue of the
  partially transposed covariance matrix from the spectrum of ``i Omega V``.
* ``hessian_drift``: drift matrix from the symbolic Hessian of the
  quadratic Hamiltonian in quadrature variables.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np
import sympy as sp

OMEGA = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)


def mp_expm(A, dps=50):
    with mp.workdps(dps):
        E = mp.expm(mp.matrix(np.asarray(A, dtype=float).tolist()))
        return np.array([[float(E[i, j]) for j in range(E.cols)] for i in range(E.rows)])


def mp_lyapunov(M, D, V0, t, dps=60):
    """Solve ``dV/dt = MV + VM^T + D`` via ``vec(V)' = (I(x)M + M(x)I) vec(V) + vec(D)``."""
    n = len(M)
    with mp.workdps(dps):
        Mm = mp.matrix(np.asarray(M, dtype=float).tolist())
        K = mp.zeros(n * n + 1, n * n + 1)
        # row-major vec: V[i,j] -> i*n + j; (MV)_ij = M_ik V_kj, (VM^T)_ij = V_ik M_jk
        for i in range(n):
            for j in range(n):
                row = i * n + j
                for k in range(n):
                    K[row, k * n + j] += Mm[i, k]
                    K[row, i * n + k] += Mm[j, k]
                K[row, n * n] = mp.mpf(float(D[i][j]))
        E = mp.expm(K * mp.mpf(t))
        v0 = [mp.mpf(float(V0[i][j])) for i in range(n) for j in range(n)] + [mp.mpf(1)]
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                out[i, j] = float(mp.fsum(E[i * n + j, c] * v0[c] for c in range(n * n + 1)))
        return out


def hessian_drift(g, gamma, J, r, theta, placement):
    """Drift matrix ``Omega Hess(H) + diag(g, g, -gamma, -gamma)`` built symbolically."""
    qa, pa, qb, pb = sp.symbols("q_a p_a q_b p_b", real=True)
    a = (qa + sp.I * pa) / sp.sqrt(2)
    b = (qb + sp.I * pb) / sp.sqrt(2)
    eps = r * sp.exp(sp.I * theta)
    H = J * (sp.conjugate(a) * b + a * sp.conjugate(b))
    squeeze = lambda c: sp.I / 2 * (eps * sp.conjugate(c) ** 2 - sp.conjugate(eps) * c ** 2)
    if placement in ("loss", "both"):
        H += squeeze(b)
    if placement in ("gain", "both"):
        H += squeeze(a)
    H = sp.expand(sp.simplify(H))
    X = [qa, pa, qb, pb]
    Hess = sp.hessian(H, X)
    Om = sp.Matrix(OMEGA.astype(int).tolist())
    M = Om * Hess + sp.diag(g, g, -gamma, -gamma)
    return np.array(sp.N(M), dtype=complex).real


def _ops(N):
    a1 = np.diag(np.sqrt(np.arange(1, N)), 1)
    I = np.eye(N)
    return np.kron(a1, I), np.kron(I, a1)


def _coherent(alpha, N):
    n = np.arange(N)
    fact = np.array([float(mp.factorial(int(k))) for k in n])
    v = np.exp(-abs(alpha) ** 2 / 2) * alpha ** n / np.sqrt(fact)
    return v / np.linalg.norm(v)


def fock_moment_rates(g, gamma, J, r, theta, placement, alpha=0.0, beta=0.0, N=14):
    """``(d mu/dt, dV/dt)`` at a coherent state from the master equation.

    Gain is the jump operator ``sqrt(2g) a^dag`` and loss ``sqrt(2 gamma) b``
    (zero-temperature reservoirs); the Hamiltonian is the coupling plus the
    degenerate squeezing term(s).
    """
    a, b = _ops(N)
    ad, bd = a.conj().T, b.conj().T
    eps = r * np.exp(1j * theta)
    H = J * (ad @ b + a @ bd)
    if placement in ("loss", "both"):
        H = H + 0.5j * (eps * bd @ bd - np.conj(eps) * b @ b)
    if placement in ("gain", "both"):
        H = H + 0.5j * (eps * ad @ ad - np.conj(eps) * a @ a)
    psi = np.kron(_coherent(alpha, N), _coherent(beta, N))
    rho = np.outer(psi, psi.conj())

    def dissipator(L, rho):
        LdL = L.conj().T @ L
        return L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)

    drho = -1j * (H @ rho - rho @ H)
    drho = drho + dissipator(np.sqrt(2 * g) * ad, rho) + dissipator(np.sqrt(2 * gamma) * b, rho)

    X = [(a + ad) / np.sqrt(2), -1j * (a - ad) / np.sqrt(2),
         (b + bd) / np.sqrt(2), -1j * (b - bd) / np.sqrt(2)]
    mu = np.array([np.trace(x @ rho).real for x in X])
    dmu = np.array([np.trace(x @ drho).real for x in X])
    dV = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            sym = X[i] @ X[j] + X[j] @ X[i]
            dV[i, j] = np.trace(sym @ drho).real - 2 * (dmu[i] * mu[j] + mu[i] * dmu[j])
    return dmu, dV


def fock_log_negativity(s, N=80):
    """Log negativity of a two-mode squeezed vacuum with squeeze parameter ``s``."""
    n = np.arange(N)
    c = np.tanh(s) ** n / np.cosh(s)
    psi = np.zeros((N, N))
    psi[n, n] = c
    # rho[(i,j),(k,l)] = psi[i,j] psi[k,l]; transpose on the second mode swaps j and l
    rho = np.einsum("ij,kl->ijkl", psi, psi)
    pt = rho.transpose(0, 3, 2, 1).reshape(N * N, N * N)
    return float(np.log(np.abs(np.linalg.eigvalsh(pt)).sum()))


def symplectic_log_negativity(V):
    """``max(0, -ln eta)`` with ``eta`` read off the spectrum of ``i Omega V^PT``."""
    P = np.diag([1.0, 1.0, 1.0, -1.0])
    Vpt = P @ np.asarray(V, dtype=float) @ P
    nu = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ Vpt)))
    return max(0.0, -float(np.log(nu[0])))


def fock_gaussian_moments(alpha, beta, H_coeffs, N=24):
    """Moments of ``exp(-i H) |alpha, beta>`` for a quadratic ``H`` in Fock space.

    ``H_coeffs = (J, s_a, s_b)`` gives ``H = J (a^dag b + a b^dag) + (s_a a^dag^2 + s_b b^dag^2 + h.c.)/2``.
    Returns ``(mu, V, n_a, n_b, corr)`` with ``corr = |<a^dag b> - <a^dag><b>|``.
    """
    from scipy.linalg import expm as dense_expm

    a, b = _ops(N)
    ad, bd = a.conj().T, b.conj().T
    J, sa, sb = H_coeffs
    H = J * (ad @ b + a @ bd)
    H = H + 0.5 * (sa * ad @ ad + np.conj(sa) * a @ a) + 0.5 * (sb * bd @ bd + np.conj(sb) * b @ b)
    psi = dense_expm(-1j * H) @ np.kron(_coherent(alpha, N), _coherent(beta, N))
    ev = lambda op: complex(psi.conj() @ op @ psi)
    X = [(a + ad) / np.sqrt(2), -1j * (a - ad) / np.sqrt(2),
         (b + bd) / np.sqrt(2), -1j * (b - bd) / np.sqrt(2)]
    mu = np.array([ev(x).real for x in X])
    V = np.array([[ev(X[i] @ X[j] + X[j] @ X[i]).real - 2 * mu[i] * mu[j] for j in range(4)]
                  for i in range(4)])
    corr = abs(ev(ad @ b) - np.conj(ev(a)) * ev(b))
    return mu, V, ev(ad @ a).real, ev(bd @ b).real, corr
