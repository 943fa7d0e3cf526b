"""Deterministic symmetric eigendecomposition by cyclic Jacobi rotations."""

from __future__ import annotations

import numpy as np


def jacobi_eigh(a, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigenvalues and eigenvectors of a real symmetric matrix.

    Cyclic-by-row Jacobi sweeps until the off-diagonal Frobenius norm falls
    below ``tol`` times the matrix norm. Eigenvalues are returned in
    descending order; each eigenvector column is signed so that its first
    component with magnitude above 1e-12 is positive. The rotation order is
    fixed, so the result depends only on the input matrix.

    Returns
    -------
    w : (n,) ndarray
    v : (n, n) ndarray, columns are unit eigenvectors, a @ v = v * w
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = np.linalg.norm(a[offdiag])
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) + 100.0 * abs(apq) == abs(diff):
                    # apq negligible next to the diagonal gap; avoids overflow in tau
                    t = apq / diff
                else:
                    # Rutishauser's stable rotation angle.
                    tau = diff / (2.0 * apq)
                    t = np.copysign(1.0, tau) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    for k in range(n):
        nz = np.flatnonzero(np.abs(v[:, k]) > 1e-12)
        if nz.size and v[nz[0], k] < 0:
            v[:, k] = -v[:, k]
    return w, v
