import numpy as np


def hermitian(A):
    return 0.5 * (A + A.conj().T)


def vec(A):
    """Column-stacking vectorization."""
    return np.asarray(A).reshape(-1, order="F")


def unvec(x, m):
    return np.asarray(x).reshape(m, m, order="F")


def power_iteration(A, tol=1e-10, max_iter=10000, rng=None):
    """Dominant eigenvalue of a Hermitian PSD matrix."""
    n = A.shape[0]
    rng = np.random.default_rng(0) if rng is None else rng
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = A @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        new = float(np.real(x.conj() @ y))
        x = y / ny
        if abs(new - lam) <= tol * abs(new):
            return new
        lam = new
    return lam


def project_simplex(v, total):
    """Euclidean projection of a real vector onto {x >= 0, sum(x) = total}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def project_psd_trace(R, total):
    """Projection onto {R >= 0, tr R = total} in the Frobenius norm."""
    w, V = np.linalg.eigh(hermitian(R))
    w = project_simplex(w, total)
    return (V * w) @ V.conj().T


def psd_sqrt(R):
    w, V = np.linalg.eigh(hermitian(R))
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
