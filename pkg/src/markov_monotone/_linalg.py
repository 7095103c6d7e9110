import numpy as np
import scipy.linalg

from .errors import SingularSystem

RESIDUAL_TARGET = 1e-10


def solve(A: np.ndarray, b: np.ndarray, transpose: bool = False) -> np.ndarray:
    """Solve ``A x = b`` (or ``A^T x = b``) by LU with partial pivoting.

    One step of iterative refinement runs if the max-norm residual exceeds
    ``RESIDUAL_TARGET``.
    """
    M = A.T if transpose else A
    try:
        lu = scipy.linalg.lu_factor(M, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystem(str(exc)) from None
    if np.any(np.diag(lu[0]) == 0.0):
        raise SingularSystem("zero pivot in LU factorisation")
    x = scipy.linalg.lu_solve(lu, b)
    r = b - M @ x
    if np.max(np.abs(r), initial=0.0) > RESIDUAL_TARGET:
        x = x + scipy.linalg.lu_solve(lu, r)
    if not np.all(np.isfinite(x)):
        raise SingularSystem("non-finite solution")
    return x
