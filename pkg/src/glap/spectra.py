"""Symmetric eigensolvers for grounded Laplacians and graph Laplacians.

Three routes, kept deliberately independent so they can cross-check each
other:

* :func:`smallest_grounded_eigenpair` - inverse iteration with zero shift
  (the grounded Laplacian of a connected graph is positive definite), inner
  solves by Cholesky factorization below ``direct_threshold`` and conjugate
  gradients above it, convergence certified by the residual of the Rayleigh
  quotient.
* :func:`algebraic_connectivity` - the second-smallest Laplacian eigenvalue,
  computed on the orthogonal complement of the all-ones vector with explicit
  deflation at every iteration; a Lanczos backend (ARPACK) takes over above
  ``lanczos_threshold`` where bulk-edge eigenvalue clustering makes plain
  inverse iteration impractically slow.
* :func:`dense_spectrum_oracle` - full eigendecomposition by cyclic Jacobi
  rotations, used as the brute-force reference for everything else.

Determinism: start vectors derive from ``SolverConfig.seed`` through
``numpy.random.Generator(PCG64(SeedSequence(seed)))``; repeated calls with
identical inputs produce identical output bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapExceededError, ConvergenceError, NotPositiveDefiniteError
from .graphs import SymMatrix

DENSE_ORACLE_CAP = 400

INF_NORM_ONE = "inf-norm-one"
TWO_NORM_ONE = "two-norm-one"


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the iterative solvers.

    ``tolerance`` is the 2-norm residual threshold for the unit eigenvector,
    ``shift`` an optional spectral shift for the inner solves.
    """

    tolerance: float = 1e-10
    max_iterations: int = 5000
    seed: int = 0
    shift: float | None = None
    direct_threshold: int = 1200
    lanczos_threshold: int = 600

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class SpectralPair:
    """One eigenpair with its convergence evidence.

    ``residual`` is ``||M x - lambda x||_2`` for the 2-norm-normalized
    eigenvector, regardless of the normalization the stored vector uses.
    """

    eigenvalue: float
    eigenvector: np.ndarray
    residual: float
    iterations: int
    normalization: str


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _sign_fix(x: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(x)))
    return -x if x[k] < 0 else x


def _power_of_inverse(apply_a, solve, x0, tol, max_iter, deflate=False):
    """Inverse iteration core. Returns (lam, x_unit, residual, iterations);
    raises ConvergenceError when the residual never reaches tol."""
    x = np.asarray(x0, dtype=float)
    if deflate:
        x = x - x.mean()
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ValueError("start vector is zero after deflation")
    x /= nx
    best = (np.inf, None, None)
    for it in range(1, max_iter + 1):
        y = solve(x)
        if deflate:
            y = y - y.mean()
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0:
            raise ConvergenceError(
                "inner solve produced a non-finite or zero iterate",
                best_residual=best[0] if best[1] is not None else None,
            )
        x = y / ny
        ax = apply_a(x)
        lam = float(x @ ax)
        res = float(np.linalg.norm(ax - lam * x))
        if res < best[0]:
            best = (res, lam, x.copy())
        if res <= tol:
            return lam, x, res, it
    raise ConvergenceError(
        f"no convergence within {max_iter} iterations "
        f"(best residual {best[0]:.3e}, tolerance {tol:.3e})",
        best_residual=best[0],
    )


def _dense_spd_solver(a: np.ndarray):
    try:
        factor = sla.cho_factor(a, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "Cholesky factorization failed: matrix is not positive definite "
            "(grounded system of a disconnected graph?)"
        ) from exc
    return lambda b: sla.cho_solve(factor, b, check_finite=False)


def _cg_solver(a_csr, tol):
    diag = a_csr.diagonal()
    m = spla.LinearOperator(
        a_csr.shape, matvec=lambda v: v / np.where(diag > 0, diag, 1.0)
    )
    rtol = max(1e-13, tol * 1e-3)
    maxiter = 20 * a_csr.shape[0]

    def solve(b):
        y, _info = spla.cg(a_csr, b, rtol=rtol, atol=0.0, maxiter=maxiter, M=m)
        # a partial solve still advances inverse iteration; the outer
        # residual test keeps the final answer honest
        return y

    return solve


def smallest_grounded_eigenpair(
    l_g: SymMatrix, cfg: SolverConfig | None = None
) -> SpectralPair:
    """Minimum eigenpair of a grounded Laplacian.

    The eigenvector is sign-fixed to be nonnegative and scaled so the largest
    component equals 1; entries in ``[-tolerance, 0)`` are clamped to 0.  An
    all-ones start is tried first (it always overlaps the nonnegative target
    eigenvector), falling back to a seeded random start.
    """
    cfg = cfg or SolverConfig()
    dim = l_g.dim
    if dim < 1:
        raise ValueError("empty matrix")
    shift = cfg.shift or 0.0
    if dim <= cfg.direct_threshold:
        a = l_g.to_dense()
        solve = _dense_spd_solver(a - shift * np.eye(dim) if shift else a)
        apply_a = lambda v: a @ v  # noqa: E731
    else:
        a = l_g.to_csr()
        a_solve = a - shift * np.eye(dim) if shift else a
        solve = _cg_solver(a_solve, cfg.tolerance)
        apply_a = lambda v: a @ v  # noqa: E731

    starts = [np.ones(dim), _rng(cfg.seed).standard_normal(dim)]
    total_it = 0
    last_err: ConvergenceError | None = None
    for x0 in starts:
        try:
            lam, x, res, it = _power_of_inverse(
                apply_a, solve, x0, cfg.tolerance, cfg.max_iterations
            )
            total_it += it
            break
        except ConvergenceError as err:
            total_it += cfg.max_iterations
            last_err = err
    else:
        raise ConvergenceError(
            f"smallest eigenpair did not converge from either start "
            f"(best residual {last_err.best_residual})",
            best_residual=last_err.best_residual,
        )

    scale = max(1.0, max(abs(v) for v in l_g.diagonal()) if l_g.entries else 1.0)
    if lam < -cfg.tolerance * scale:
        raise NotPositiveDefiniteError(
            f"negative Rayleigh quotient {lam:.3e}: input is not positive "
            "definite (disconnected graph?)"
        )
    x = _sign_fix(x)
    x = x / np.max(x)
    x[(x >= -cfg.tolerance) & (x < 0.0)] = 0.0
    return SpectralPair(lam, x, res, total_it, INF_NORM_ONE)


def _lanczos_lambda2(l: SymMatrix, cfg: SolverConfig, c: float):
    """Largest eigenvalue of c*I - L - (c/n) * ones*ones^T via ARPACK; equals
    c - lambda2(L).  The all-ones direction maps to eigenvalue 0 and the
    start vector is deflated, so the returned vector lies in its complement."""
    dim = l.dim
    a = l.to_csr()
    ncalls = [0]

    def op(v):
        ncalls[0] += 1
        return c * v - a @ v - c * float(np.mean(v))

    v0 = _rng(cfg.seed).standard_normal(dim)
    v0 -= v0.mean()
    try:
        theta, vec = spla.eigsh(
            spla.LinearOperator((dim, dim), matvec=op, dtype=float),
            k=1,
            which="LA",
            v0=v0,
            ncv=min(dim - 1, 40),
            tol=max(cfg.tolerance / (4.0 * max(c, 1.0)), 1e-15),
            maxiter=max(10 * dim, 2000),
        )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"Lanczos backend did not converge: {exc}") from exc
    x = vec[:, 0]
    x = x - x.mean()
    x /= np.linalg.norm(x)
    ax = a @ x
    lam = float(x @ ax)
    res = float(np.linalg.norm(ax - lam * x))
    return lam, x, res, ncalls[0]


def algebraic_connectivity(
    l: SymMatrix, cfg: SolverConfig | None = None
) -> SpectralPair:
    """Second-smallest eigenvalue of a graph Laplacian and its eigenvector.

    Works on the orthogonal complement of the all-ones kernel vector with
    explicit deflation at every iteration.  Disconnected graphs legitimately
    return an eigenvalue of ~0 (the second kernel direction).
    """
    cfg = cfg or SolverConfig()
    dim = l.dim
    if dim < 2:
        raise ValueError("algebraic connectivity needs at least 2 vertices")
    d_max = max((v for i, j, v in l.entries if i == j), default=0)
    c = 2.0 * d_max + 1.0

    if dim > cfg.lanczos_threshold:
        lam, x, res, it = _lanczos_lambda2(l, cfg, c)
    else:
        a = l.to_dense()
        # rank-one shift moves the ones-kernel up to c; the tiny ridge keeps
        # the factorization alive when a second kernel direction exists
        m = a + (c / dim) * np.ones((dim, dim)) + (1e-12 * c) * np.eye(dim)
        solve = _dense_spd_solver(m)
        x0 = _rng(cfg.seed).standard_normal(dim)
        lam, x, res, it = _power_of_inverse(
            lambda v: a @ v,
            solve,
            x0,
            cfg.tolerance,
            cfg.max_iterations,
            deflate=True,
        )
    if res > cfg.tolerance:
        raise ConvergenceError(
            f"algebraic connectivity residual {res:.3e} above tolerance",
            best_residual=res,
        )
    if abs(lam) < 1e-13 * c:
        lam = 0.0
    return SpectralPair(lam, _sign_fix(x), res, it, TWO_NORM_ONE)


def lambda_max_bound(l: SymMatrix) -> float:
    """Gershgorin upper bound on the largest eigenvalue (row-sum of absolute
    values), exact integer arithmetic."""
    acc = [0] * l.dim
    for i, j, v in l.entries:
        acc[i] += abs(v)
        if i != j:
            acc[j] += abs(v)
    return float(max(acc, default=0))


def dense_spectrum_oracle(
    m: SymMatrix, tolerance: float | None = None, cap: int = DENSE_ORACLE_CAP
) -> list[SpectralPair]:
    """Full eigendecomposition by cyclic Jacobi rotations.

    Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius
    norm drops below ``tolerance`` (default ``1e-12 * max(1, ||M||_F)``).
    Returns eigenpairs in ascending eigenvalue order, eigenvectors 2-norm
    normalized, residuals measured against the original matrix.
    """
    dim = m.dim
    if dim > cap:
        raise CapExceededError(f"dense oracle capped at {cap}, got {dim}")
    a0 = m.to_dense()
    a = a0.copy()
    if tolerance is None:
        tolerance = 1e-12 * max(1.0, float(np.linalg.norm(a0)))
    v = np.eye(dim)

    def off_norm(mat):
        return float(np.sqrt(np.sum(mat**2) - np.sum(np.diag(mat) ** 2)))

    sweeps = 0
    max_sweeps = 60
    rot_floor = tolerance / max(1, dim * dim)
    while off_norm(a) > tolerance:
        sweeps += 1
        if sweeps > max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not reach off-norm {tolerance:.3e} "
                f"in {max_sweeps} sweeps",
                best_residual=off_norm(a),
            )
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                if abs(apq) <= rot_floor:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) if theta != 0 else 1.0
                t /= abs(theta) + np.sqrt(theta * theta + 1.0)
                cth = 1.0 / np.sqrt(t * t + 1.0)
                sth = t * cth
                acp, acq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = cth * acp - sth * acq
                a[:, q] = sth * acp + cth * acq
                arp, arq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = cth * arp - sth * arq
                a[q, :] = sth * arp + cth * arq
                a[p, q] = a[q, p] = 0.0
                vcp, vcq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = cth * vcp - sth * vcq
                v[:, q] = sth * vcp + cth * vcq

    order = np.argsort(np.diag(a), kind="stable")
    pairs = []
    for idx in order:
        lam = float(a[idx, idx])
        vec = _sign_fix(v[:, idx])
        res = float(np.linalg.norm(a0 @ vec - lam * vec))
        pairs.append(SpectralPair(lam, vec, res, sweeps, TWO_NORM_ONE))
    return pairs
