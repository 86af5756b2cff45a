"""Small complex linear-algebra toolkit.

Matrices are plain ``numpy`` arrays of ``complex128``. Every routine accepts a
stack of matrices with shape ``(..., n, n)`` so that a whole frequency grid
can be factorized in one call.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy import optimize

from .errors import BracketError, DimensionError, InvalidInputError

__all__ = ["as_complex_matrix", "lu_det", "dft", "idft", "bisect"]


def as_complex_matrix(m, *, square: bool = False) -> np.ndarray:
    """Validate ``m`` and return it as a complex array of shape ``(..., r, c)``."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] == 0 or a.shape[-2] == 0:
        raise DimensionError(f"expected a non-empty matrix, got shape {a.shape}")
    if square and a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape[-2:]}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix contains NaN or Inf entries")
    return a


def lu_det(m, method: str = "lapack") -> complex | np.ndarray:
    """Determinant from an LU factorization with partial (row) pivoting.

    Parameters
    ----------
    m : array_like, shape (..., n, n)
        A square complex matrix or a stack of them.
    method : {"lapack", "elimination"}
        ``"lapack"`` runs LAPACK ``zgetrf`` through numpy's batched
        determinant; ``"elimination"`` is a numpy-vectorized Gaussian
        elimination over the stack (slower, no LAPACK involved).

    Returns
    -------
    complex or ndarray
        The determinant(s). A matrix whose pivot column is entirely zero
        yields exactly ``0``; no exception is raised for singular input.
    """
    a = as_complex_matrix(m, square=True)
    if method == "lapack":
        det = np.linalg.det(a)
        return complex(det) if det.ndim == 0 else det
    if method != "elimination":
        raise InvalidInputError(f"unknown method {method!r}")
    n = a.shape[-1]
    lead = a.shape[:-2]
    work = a.reshape(-1, n, n).copy()
    nb = work.shape[0]
    det = np.ones(nb, dtype=np.complex128)
    rows = np.arange(nb)

    for k in range(n):
        p = k + np.argmax(np.abs(work[:, k:, k]), axis=1)
        swap = p != k
        if swap.any():
            s = rows[swap]
            top = work[s, k, :].copy()
            work[s, k, :] = work[s, p[swap], :]
            work[s, p[swap], :] = top
            det[swap] = -det[swap]
        pivot = work[:, k, k]
        det *= pivot
        if k == n - 1:
            break
        singular = pivot == 0
        factors = work[:, k + 1:, k] / np.where(singular, 1.0, pivot)[:, None]
        factors[singular] = 0.0
        work[:, k + 1:, k + 1:] -= factors[:, :, None] * work[:, None, k, k + 1:]

    if not lead:
        return complex(det[0])
    return det.reshape(lead)


def dft(v) -> np.ndarray:
    """Direct O(N^2) discrete Fourier transform, ``X[n] = sum_i v[i] exp(-2j pi i n / N)``."""
    x = np.asarray(v, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError("dft needs a non-empty 1-D vector")
    n = x.size
    idx = np.arange(n)
    # reduce i*n mod N before scaling so the phase stays exact for large N
    kernel = np.exp(-2j * np.pi * (np.outer(idx, idx) % n) / n)
    return kernel @ x


def idft(v) -> np.ndarray:
    """Inverse of :func:`dft` (conjugate kernel, divided by N)."""
    x = np.asarray(v, dtype=np.complex128)
    return np.conj(dft(np.conj(x))) / x.size


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Find a sign change of ``f`` in ``[lo, hi]`` to within bracket width ``tol``.

    Raises
    ------
    BracketError
        If ``f(lo)`` and ``f(hi)`` do not have opposite signs.
    """
    if not lo < hi:
        raise InvalidInputError(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(f"f({lo})={flo:g} and f({hi})={fhi:g} have the same sign")
    # scipy stops when the half-width drops below xtol
    return float(optimize.bisect(f, lo, hi, xtol=tol / 2, rtol=4 * np.finfo(float).eps,
                                 maxiter=2000))
