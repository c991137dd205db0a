"""RIS phase-shift optimization.

The joint-transmission problem maximizes ``||f Phi G + d||^2`` over unit
modulus reflection coefficients.  Writing ``chi = diag(f) G`` and
``v = [q; t]`` with ``q_n = exp(-j theta_n)`` turns it into the homogeneous
quadratic program ``max v^H C v`` s.t. ``|v_i| = 1``, whose semidefinite
relaxation

    max Tr(C V)  s.t.  V_ii = 1,  V >= 0

is solved here and then rounded back to phases by Gaussian randomization.

Two SDP solvers are provided:

``"mixing"`` (default)
    Low-rank factorization ``V = Y Y^H`` with unit-norm rows of ``Y``,
    maximized by exact row-wise coordinate ascent.  With ``rank**2 >= 2n``
    it reaches the SDP optimum and each sweep costs one pass over ``C``.

``"admm"``
    Alternating-direction augmented Lagrangian on the dual,
    ``min sum(y)`` s.t. ``Diag(y) - C = Z >= 0``, with a Hermitian
    eigendecomposition per iteration for the PSD projection.

Both report the same certificate: the primal iterate is rescaled to a unit
diagonal (hence exactly feasible) and the dual candidate ``y`` is shifted by
``min(0, lambda_min(Diag(y) - C))`` so that it is dual feasible.  The
difference of the two objectives is a rigorous bound on suboptimality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SizeLimitError
from .seeding import make_rng

TWO_PI = 2 * np.pi
BRUTE_FORCE_LIMIT = 10**8


def wrap_phase(theta) -> np.ndarray:
    """Reduce angles to ``[0, 2*pi)``."""
    out = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    # mod of a tiny negative number rounds up to exactly 2*pi
    out[out >= TWO_PI] = 0.0
    return out


@dataclass(frozen=True)
class PhaseConfig:
    """RIS phase shifts in radians; reflection amplitudes are fixed at 1."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).reshape(-1)
        if not np.all(np.isfinite(theta)):
            raise InvalidInputError("phase shifts must be finite")
        object.__setattr__(self, "theta", wrap_phase(theta))

    @property
    def coefficients(self) -> np.ndarray:
        """Diagonal of the reflection matrix, ``exp(j theta)``."""
        return np.exp(1j * self.theta)

    def __len__(self):
        return self.theta.size


def align_phases(f, g_k, d_k) -> PhaseConfig:
    """Phases that co-phase every reflected path of one user with its direct path."""
    prod = np.asarray(f, dtype=complex) * np.asarray(g_k, dtype=complex)
    theta = np.angle(complex(d_k)) - np.angle(prod)
    theta[prod == 0] = 0.0
    return PhaseConfig(theta)


def effective_channel(f, phases: PhaseConfig, g_k, d_k) -> complex:
    coeff = np.exp(1j * np.asarray(getattr(phases, "theta", phases), dtype=float))
    return complex(np.sum(np.asarray(f) * coeff * np.asarray(g_k)) + d_k)


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(m)]


def _matrix_from_json(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.size == 0:
        return np.zeros((len(rows), 0), dtype=complex)
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass(frozen=True)
class QcqpProblem:
    """Homogenized unit-modulus QCQP for ``max ||f Phi G + d||^2``."""

    chi: np.ndarray
    d: np.ndarray
    c_matrix: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.chi.shape[0]

    def objective(self, phases) -> float:
        """``||f Phi G + d||^2`` for the given phases (``PhaseConfig`` or angles)."""
        theta = np.asarray(getattr(phases, "theta", phases), dtype=float)
        return float(np.sum(np.abs(np.exp(1j * theta) @ self.chi + self.d) ** 2))

    def to_json(self) -> str:
        return json.dumps(
            {
                "chi": _matrix_to_json(self.chi),
                "d": _matrix_to_json(self.d[None, :])[0],
                "c_matrix": _matrix_to_json(self.c_matrix),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "QcqpProblem":
        data = json.loads(text)
        chi = _matrix_from_json(data["chi"])
        d = _matrix_from_json([data["d"]])[0]
        return cls(chi.reshape(-1, d.size), d, _matrix_from_json(data["c_matrix"]))


def build_qcqp(f, g_matrix, d) -> QcqpProblem:
    f = np.asarray(f, dtype=complex).reshape(-1)
    g = np.asarray(g_matrix, dtype=complex).reshape(f.size, -1)
    d = np.asarray(d, dtype=complex).reshape(-1)
    if g.shape[1] != d.size:
        raise InvalidInputError(f"G has {g.shape[1]} columns but d has {d.size} entries")
    chi = f[:, None] * g
    stacked = np.vstack([chi, d[None, :]])
    c = stacked @ stacked.conj().T
    # exact Hermitian symmetry regardless of BLAS rounding
    c = (c + c.conj().T) / 2
    return QcqpProblem(chi=chi, d=d, c_matrix=c)


@dataclass(frozen=True)
class SdpSolution:
    v_matrix: np.ndarray
    objective: float
    duality_gap: float
    iterations: int
    certified: bool = True
    upper_bound: float = math.nan
    method: str = "mixing"

    @property
    def relative_gap(self) -> float:
        return self.duality_gap / max(abs(self.objective), np.finfo(float).tiny)

    def to_json(self) -> str:
        return json.dumps(
            {
                "v_matrix": _matrix_to_json(self.v_matrix),
                "objective": self.objective,
                "duality_gap": self.duality_gap,
                "iterations": self.iterations,
                "certified": self.certified,
                "upper_bound": self.upper_bound,
                "method": self.method,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SdpSolution":
        data = json.loads(text)
        data["v_matrix"] = _matrix_from_json(data["v_matrix"])
        return cls(**data)


def _hermitian_input(problem) -> np.ndarray:
    c = np.asarray(getattr(problem, "c_matrix", problem), dtype=complex)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidInputError(f"C must be square, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("C must be finite")
    scale = np.linalg.norm(c)
    if np.linalg.norm(c - c.conj().T) > 1e-12 * max(scale, 1.0):
        raise InvalidInputError("C must be Hermitian")
    return (c + c.conj().T) / 2


def _certificate(c: np.ndarray, v: np.ndarray, y: np.ndarray):
    """(objective, upper bound, gap) for a unit-diagonal PSD ``v`` and dual guess ``y``."""
    obj = float(np.real(np.vdot(c, v)))
    lam = np.linalg.eigvalsh(np.diag(y) - c)[0]
    upper = float(np.sum(y) - c.shape[0] * min(lam, 0.0))
    return obj, upper, max(upper - obj, 0.0)


def _unit_diagonal(x: np.ndarray) -> np.ndarray:
    diag = np.sqrt(np.clip(np.real(np.diag(x)), np.finfo(float).tiny, None))
    v = x / np.outer(diag, diag)
    v = (v + v.conj().T) / 2
    np.fill_diagonal(v, 1.0)
    return v


def _solve_mixing(c, tol, max_iter, rank, seed, check_every=5):
    n = c.shape[0]
    p = rank or int(math.ceil(math.sqrt(2 * n))) + 1
    rng = make_rng(seed)
    y_fac = rng.standard_normal((n, p)) + 1j * rng.standard_normal((n, p))
    y_fac /= np.linalg.norm(y_fac, axis=1, keepdims=True)
    cdiag = np.real(np.diag(c))
    best = None
    sweep = 0
    for sweep in range(1, max_iter + 1):
        for i in range(n):
            grad = c[i] @ y_fac - cdiag[i] * y_fac[i]
            norm = np.linalg.norm(grad)
            if norm > 0:
                y_fac[i] = grad / norm
        if sweep % check_every and sweep != max_iter:
            continue
        v = y_fac @ y_fac.conj().T
        np.fill_diagonal(v, 1.0)
        y = np.real(np.sum((c @ y_fac) * y_fac.conj(), axis=1))
        obj, upper, gap = _certificate(c, v, y)
        if best is None or gap < best[3]:
            best = (v, obj, upper, gap, sweep)
        if gap <= tol * abs(obj):
            break
    return best, sweep


def _solve_admm(c, tol, max_iter, mu):
    # min <-C, X> s.t. diag X = 1, X >= 0; dual max sum(u) s.t. Diag(u) + S = -C
    n = c.shape[0]
    cm = -c
    x = np.eye(n, dtype=complex)
    s = np.zeros_like(x)
    norm_c = np.linalg.norm(cm)
    best = None
    it = 0
    for it in range(1, max_iter + 1):
        u = np.real(np.diag(cm - s)) - mu * (np.real(np.diag(x)) - 1)
        w = cm - np.diag(u) - mu * x
        w = (w + w.conj().T) / 2
        evals, evecs = np.linalg.eigh(w)
        pos = evals > 0
        s = (evecs[:, pos] * evals[pos]) @ evecs[:, pos].conj().T
        x = (s - w) / mu
        pres = np.linalg.norm(np.real(np.diag(x)) - 1) / (1 + math.sqrt(n))
        dres = np.linalg.norm(cm - np.diag(u) - s) / (1 + norm_c)
        if (max(pres, dres) < tol and it % 5 == 0) or it == max_iter:
            v = _unit_diagonal(x)
            obj, upper, gap = _certificate(c, v, -u)
            if best is None or gap < best[3]:
                best = (v, obj, upper, gap, it)
            if gap <= tol * abs(obj):
                break
    return best, it


def solve_sdp(problem, tol: float = 1e-6, max_iter: int = 5000, method: str = "mixing",
              rank: int | None = None, seed: int = 0, mu: float = 0.1) -> SdpSolution:
    """Solve ``max Tr(C V)`` s.t. ``diag(V) = 1``, ``V >= 0``.

    ``problem`` is a :class:`QcqpProblem` or a Hermitian matrix.  The
    returned solution is certified when its duality gap is at most
    ``tol * |objective|``; otherwise the best iterate seen is returned with
    ``certified=False``.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be > 0")
    if max_iter < 1:
        raise InvalidInputError("max_iter must be >= 1")
    c = _hermitian_input(problem)
    n = c.shape[0]
    scale = float(np.linalg.norm(c))
    if scale == 0.0 or n == 0:
        return SdpSolution(np.eye(n, dtype=complex), 0.0, 0.0, 0, True, 0.0, method)
    cs = c / scale
    if method == "mixing":
        best, iterations = _solve_mixing(cs, tol, max_iter, rank, seed)
    elif method == "admm":
        best, iterations = _solve_admm(cs, tol, max_iter, mu)
    else:
        raise InvalidInputError(f"unknown SDP method {method!r}")
    v, obj, upper, gap, _ = best
    return SdpSolution(
        v_matrix=v,
        objective=obj * scale,
        duality_gap=gap * scale,
        iterations=iterations,
        certified=bool(gap <= tol * abs(obj)),
        upper_bound=upper * scale,
        method=method,
    )


def phases_from_lifted(vbar: np.ndarray) -> np.ndarray:
    """Phase shifts encoded by lifted vectors (one per column).

    The first N entries divided by the last one equal ``exp(-j theta)``.
    """
    ratio = vbar[:-1] / vbar[-1]
    return wrap_phase(-np.angle(ratio))


def randomize_extract(solution: SdpSolution, problem: QcqpProblem, n_candidates: int = 100,
                      rng_seed: int = 0) -> PhaseConfig:
    """Best of ``n_candidates`` Gaussian-randomized roundings of ``V*``.

    Candidates ``U Sigma^(1/2) r`` with ``r ~ CN(0, I)`` are projected to
    unit modulus relative to their last entry and ranked by the original
    objective; ties go to the earliest draw.
    """
    if n_candidates < 1:
        raise InvalidInputError("n_candidates must be >= 1")
    n = problem.n_elements
    if n == 0:
        return PhaseConfig(np.zeros(0))
    evals, evecs = np.linalg.eigh(solution.v_matrix)
    factor = evecs * np.sqrt(np.clip(evals, 0.0, None))
    rng = make_rng(rng_seed)
    size = factor.shape[0]

    def draw(m):
        r = (rng.standard_normal((size, m)) + 1j * rng.standard_normal((size, m))) / math.sqrt(2)
        return factor @ r

    vbar = draw(n_candidates)
    bad = np.flatnonzero(vbar[-1] == 0)
    while bad.size:
        vbar[:, bad] = draw(bad.size)
        bad = bad[vbar[-1, bad] == 0]
    thetas = phases_from_lifted(vbar)
    values = np.sum(np.abs(np.exp(1j * thetas).T @ problem.chi + problem.d) ** 2, axis=1)
    return PhaseConfig(thetas[:, int(np.argmax(values))])


def brute_force_phases(f, g_matrix, d, levels: int, chunk: int = 1 << 16):
    """Exhaustive search over ``theta_n in {2 pi m / levels}``.

    Returns ``(PhaseConfig, objective)``; among equal objectives the
    lexicographically smallest index vector wins.
    """
    f = np.asarray(f, dtype=complex).reshape(-1)
    d = np.asarray(d, dtype=complex).reshape(-1)
    g = np.asarray(g_matrix, dtype=complex).reshape(f.size, d.size)
    n = f.size
    if levels < 1:
        raise InvalidInputError("levels must be >= 1")
    total = levels**n
    if total > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"{levels}^{n} = {total} grid points exceeds {BRUTE_FORCE_LIMIT}")
    chi = f[:, None] * g
    if n == 0:
        return PhaseConfig(np.zeros(0)), float(np.sum(np.abs(d) ** 2))
    best_val, best_idx = -np.inf, None
    step = TWO_PI / levels
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = np.array(np.unravel_index(idx, (levels,) * n)).reshape(n, -1)
        vals = np.sum(np.abs(np.exp(1j * step * digits).T @ chi + d) ** 2, axis=1)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_idx = float(vals[j]), digits[:, j]
    return PhaseConfig(step * best_idx), best_val
