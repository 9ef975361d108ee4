"""Deterministic solvers for the assembled SPD normal equations.

Default backend is Jacobi-preconditioned conjugate gradients with a fixed
sequential reduction order, so repeated solves are bit-identical.  A sparse
LU factorization (SuperLU) is available as the direct backend for large
systems where a factorization beats iteration.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConvergenceFailure, SingularSystem
from .system import assemble

DIRECT = "direct"
CG = "cg"


@dataclass
class SolveOptions:
    method: str = CG
    cg_rel_residual: float = 1e-10
    cg_max_iters: int | None = None  # default 10 * n_unknowns
    initial_guess: np.ndarray | None = None

    def __post_init__(self):
        if self.method not in (CG, DIRECT):
            raise ValueError(f"unknown method {self.method!r}")
        if self.cg_rel_residual <= 0:
            raise ValueError("cg_rel_residual must be positive")
        if self.cg_max_iters is not None and self.cg_max_iters <= 0:
            raise ValueError("cg_max_iters must be positive")


def _pixel(shape, index):
    if shape is None:
        return None
    return (int(index % shape[1]), int(index // shape[1]))


def _solve_cg(A, b, opts, shape):
    n = len(b)
    diag = A.diagonal()
    bad = np.nonzero(diag <= 0)[0]
    if len(bad):
        i = int(bad[0])
        raise SingularSystem(i, _pixel(shape, i), "nonpositive diagonal")
    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        return np.zeros(n)
    inv_diag = 1.0 / diag
    x = np.zeros(n) if opts.initial_guess is None else opts.initial_guess.astype(np.float64).copy()
    max_iters = opts.cg_max_iters if opts.cg_max_iters is not None else 10 * n
    r = b - A @ x
    z = inv_diag * r
    p = z.copy()
    rz = float(np.dot(r, z))
    res = float(np.linalg.norm(r))
    for it in range(max_iters):
        if res <= opts.cg_rel_residual * norm_b:
            return x
        Ap = A @ p
        pAp = float(np.dot(p, Ap))
        if pAp <= 0.0:
            i = int(np.argmax(np.abs(p)))
            raise SingularSystem(i, _pixel(shape, i), "nonpositive curvature")
        alpha = rz / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        # periodic recomputation keeps the recurred residual honest
        if (it + 1) % 50 == 0:
            r = b - A @ x
        res = float(np.linalg.norm(r))
        z = inv_diag * r
        rz_next = float(np.dot(r, z))
        p = z + (rz_next / rz) * p
        rz = rz_next
    if res <= opts.cg_rel_residual * norm_b:
        return x
    raise ConvergenceFailure(res / norm_b, max_iters)


def _solve_direct(A, b, opts, shape):
    diag = A.diagonal()
    bad = np.nonzero(diag <= 0)[0]
    if len(bad):
        i = int(bad[0])
        raise SingularSystem(i, _pixel(shape, i), "nonpositive diagonal")
    try:
        lu = spla.splu(sp.csc_matrix(A))
        x = lu.solve(b)
    except RuntimeError as e:
        raise SingularSystem(0, _pixel(shape, 0), str(e)) from None
    if not np.all(np.isfinite(x)):
        i = int(np.nonzero(~np.isfinite(x))[0][0])
        raise SingularSystem(i, _pixel(shape, i), "factorization produced non-finite values")
    # reject factorizations whose backward error is inconsistent with a
    # well-posed SPD solve
    norm_b = float(np.linalg.norm(b))
    if norm_b > 0:
        res = float(np.linalg.norm(A @ x - b))
        if res > 1e-6 * norm_b:
            i = int(np.argmax(np.abs(A @ x - b)))
            raise SingularSystem(i, _pixel(shape, i), "large backward error")
    return x


def solve_spd(A, b, opts=None, shape=None):
    """Solve A x = b for symmetric positive definite sparse A."""
    opts = opts or SolveOptions()
    A = sp.csr_matrix(A)
    b = np.asarray(b, np.float64)
    if A.shape[0] != A.shape[1] or A.shape[0] != len(b):
        raise ValueError("inconsistent system dimensions")
    sym_gap = abs(A - A.T)
    if sym_gap.nnz and sym_gap.max() > 1e-12 * max(1.0, abs(A).max()):
        raise ValueError("matrix is not symmetric")
    if opts.method == DIRECT:
        return _solve_direct(A, b, opts, shape)
    return _solve_cg(A, b, opts, shape)


def solve_rows(sys, opts=None):
    """Assemble and solve; minimizes sum w (r.x - rhs)^2."""
    A, b = assemble(sys)
    return solve_spd(A, b, opts, shape=sys.shape)
