"""Radial basis networks with movable centers.

The model is f(x) = sum_a c_a G(||x - t_a||^2) with a Gaussian radial
profile. Both the coefficients and the center positions are trainable:
coefficients by a regularized pseudo-inverse solve, centers by gradient
descent on the squared-error objective (optionally with decaying noise).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, DivergenceDetected, InvalidN, SingularSystem

_JITTER_FLOOR = 1e-12


@dataclass(frozen=True)
class HBFModel:
    """Centers, coefficients, radial width, and ridge regularization."""

    centers: np.ndarray  # (n, d)
    coeffs: np.ndarray  # (n,)
    sigma: float
    lam: float = 0.0

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        w = np.asarray(self.coeffs, dtype=float).ravel()
        if c.shape[0] != w.size or c.shape[0] < 1:
            raise DimensionMismatch("one coefficient per center required")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "coeffs", w)

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    @property
    def d(self) -> int:
        return self.centers.shape[1]


@dataclass(frozen=True)
class TrainingSet:
    inputs: np.ndarray  # (N, d)
    targets: np.ndarray  # (N,)

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        y = np.asarray(self.targets, dtype=float).ravel()
        if x.shape[0] != y.size or x.shape[0] < 1:
            raise DimensionMismatch("one target per input required")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "targets", y)

    @property
    def size(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class TrainConfig:
    """Gradient-descent settings.

    noise_amplitude is the initial scale of the zero-mean perturbations and
    decays as 1/iteration; zero (the default) gives plain gradient descent.
    resolve_every > 0 re-solves the coefficients by pseudo-inverse every
    that many iterations. update_centers=False freezes the centers (the
    fixed-center baseline).
    """

    omega: float
    max_iters: int
    grad_tol: float = 1e-8
    noise_amplitude: float = 0.0
    seed: int = 0
    update_centers: bool = True
    update_coeffs: bool = True
    resolve_every: int = 0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be nonnegative")


def radial_basis(r2, sigma: float):
    """Gaussian radial profile G(r^2) = exp(-r^2 / (2 sigma^2))."""
    return np.exp(-np.asarray(r2, dtype=float) / (2.0 * sigma**2))


def radial_basis_deriv(r2, sigma: float):
    """dG/d(r^2) = -G(r^2) / (2 sigma^2)."""
    return -radial_basis(r2, sigma) / (2.0 * sigma**2)


def _design(model: HBFModel, X: np.ndarray) -> np.ndarray:
    """(N, n) matrix of G(||x_i - t_a||^2)."""
    r2 = cdist(X, model.centers, "sqeuclidean")
    return radial_basis(r2, model.sigma)


def hbf_eval(model: HBFModel, x) -> float:
    """f(x) = sum_a c_a G(||x - t_a||^2)."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != model.d:
        raise DimensionMismatch(f"input dim {x.size} != model dim {model.d}")
    return float((_design(model, x[None, :]) @ model.coeffs)[0])


def hbf_eval_batch(model: HBFModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.d:
        raise DimensionMismatch("input dim differs from model dim")
    return _design(model, X) @ model.coeffs


def residuals(model: HBFModel, data: TrainingSet) -> np.ndarray:
    """Delta_i = y_i - f(x_i)."""
    return data.targets - hbf_eval_batch(model, data.inputs)


def objective(model: HBFModel, data: TrainingSet) -> float:
    """Sum of squared residuals."""
    r = residuals(model, data)
    return float(r @ r)


def grad_coeffs(model: HBFModel, data: TrainingSet) -> np.ndarray:
    """dH/dc_a = -2 sum_i Delta_i G(||x_i - t_a||^2)."""
    Phi = _design(model, data.inputs)
    delta = data.targets - Phi @ model.coeffs
    return -2.0 * (Phi.T @ delta)


def grad_centers(model: HBFModel, data: TrainingSet) -> np.ndarray:
    """dH/dt_a = 4 c_a sum_i Delta_i G'(||x_i - t_a||^2) (x_i - t_a)."""
    r2 = cdist(data.inputs, model.centers, "sqeuclidean")
    Gp = radial_basis_deriv(r2, model.sigma)  # (N, n)
    delta = data.targets - radial_basis(r2, model.sigma) @ model.coeffs
    diff = data.inputs[:, None, :] - model.centers[None, :, :]  # (N, n, d)
    weighted = (delta[:, None] * Gp)[:, :, None] * diff
    return 4.0 * model.coeffs[:, None] * weighted.sum(axis=0)


@dataclass(frozen=True)
class SolveResult:
    coeffs: np.ndarray
    max_residual: float
    underdetermined: bool  # n > N: fewer examples than centers


def solve_coeffs(model: HBFModel, data: TrainingSet) -> SolveResult:
    """Optimal coefficients c = (Phi^T Phi + lam g)^{-1} Phi^T y.

    Phi is the data/center design matrix and g the center Gram matrix. The
    system is solved in its equivalent stacked least-squares form
    [Phi; sqrt(lam) L^T] c ~ [y; 0] with g + jitter = L L^T, which avoids
    squaring the condition number of Phi; a jitter floor on the diagonal
    keeps near-singular Gaussian systems solvable.
    """
    Phi = _design(model, data.inputs)
    g = radial_basis(
        cdist(model.centers, model.centers, "sqeuclidean"), model.sigma
    )
    g[np.diag_indices_from(g)] += _JITTER_FLOOR
    try:
        L = np.linalg.cholesky(g)
        A = np.vstack([Phi, np.sqrt(model.lam + _JITTER_FLOOR) * L.T])
        rhs = np.concatenate([data.targets, np.zeros(model.n)])
        c, _, _, _ = np.linalg.lstsq(A, rhs, rcond=None)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("normal equations unsolvable after jitter") from exc
    if not np.all(np.isfinite(c)):
        raise SingularSystem("normal-equation solve produced non-finite values")
    res = data.targets - Phi @ c
    return SolveResult(
        coeffs=c,
        max_residual=float(np.max(np.abs(res))),
        underdetermined=model.n > data.size,
    )


def median_pairwise_distance(X) -> float:
    """Default radial width: median pairwise distance of the inputs."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    D = cdist(X, X)
    vals = D[np.triu_indices_from(D, k=1)]
    med = float(np.median(vals)) if vals.size else 1.0
    return med if med > 0 else 1.0


def init_centers(data: TrainingSet, n: int, seed: int = 0) -> np.ndarray:
    """Seeded k-means placement of n centers.

    Initialization draws n distinct examples; Lloyd iterations run for at
    most 50 rounds or until the relative center shift drops below 1e-8.
    Empty clusters are re-seeded to the farthest point; assignment ties
    break toward the lowest center index.
    """
    N = data.size
    if n < 1 or n > N:
        raise InvalidN(f"need 1 <= n <= {N}, got {n}")
    rng = np.random.default_rng(seed)
    X = data.inputs
    centers = X[rng.choice(N, size=n, replace=False)].copy()
    for _ in range(50):
        D = cdist(X, centers, "sqeuclidean")
        assign = np.argmin(D, axis=1)  # argmin takes the lowest index on ties
        new = np.empty_like(centers)
        for a in range(n):
            members = X[assign == a]
            if members.size == 0:
                new[a] = X[np.argmax(np.min(D, axis=1))]
            else:
                new[a] = members.mean(axis=0)
        shift = np.linalg.norm(new - centers)
        scale = np.linalg.norm(centers) + 1e-30
        centers = new
        if shift / scale < 1e-8:
            break
    return centers


@dataclass(frozen=True)
class TrainTrace:
    """Per-iteration record: objective and sup-norm of the full gradient."""

    iterations: np.ndarray
    objectives: np.ndarray
    grad_inf_norms: np.ndarray
    converged: bool = False

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["iteration", "objective", "grad_inf_norm"])
            for it, obj, gn in zip(
                self.iterations, self.objectives, self.grad_inf_norms
            ):
                writer.writerow([int(it), repr(float(obj)), repr(float(gn))])


def train(model: HBFModel, data: TrainingSet, config: TrainConfig):
    """Joint gradient descent on coefficients and centers.

    c <- c - omega dH/dc + eta, t <- t - omega dH/dt + mu, with zero-mean
    Gaussian noise whose amplitude decays as 1/iteration. Stops at
    max_iters or when the sup-norm of the active gradient falls below
    grad_tol. Deterministic given the seed.
    """
    rng = np.random.default_rng(config.seed)
    c = model.coeffs.copy()
    t = model.centers.copy()
    cur = replace(model, centers=t, coeffs=c)

    its, objs, gnorms = [], [], []
    h0 = objective(cur, data)
    converged = False
    for it in range(1, config.max_iters + 1):
        gc = grad_coeffs(cur, data)
        gt = grad_centers(cur, data)
        parts = []
        if config.update_coeffs:
            parts.append(np.max(np.abs(gc)))
        if config.update_centers:
            parts.append(np.max(np.abs(gt)))
        gnorm = float(max(parts)) if parts else 0.0
        h = objective(cur, data)

        its.append(it)
        objs.append(h)
        gnorms.append(gnorm)

        if h > 1e6 * max(h0, 1e-300):
            raise DivergenceDetected(
                f"objective {h:.3e} exceeded 1e6 x initial {h0:.3e}"
            )
        if gnorm < config.grad_tol:
            converged = True
            break

        amp = config.noise_amplitude / it
        if config.update_coeffs:
            c = c - config.omega * gc
            if amp > 0:
                c = c + amp * rng.standard_normal(c.shape)
        if config.update_centers:
            t = t - config.omega * gt
            if amp > 0:
                t = t + amp * rng.standard_normal(t.shape)
        cur = replace(cur, centers=t, coeffs=c)

        if config.resolve_every > 0 and it % config.resolve_every == 0:
            c = solve_coeffs(cur, data).coeffs
            cur = replace(cur, coeffs=c)

    trace = TrainTrace(
        iterations=np.asarray(its),
        objectives=np.asarray(objs),
        grad_inf_norms=np.asarray(gnorms),
        converged=converged,
    )
    return cur, trace


@dataclass(frozen=True)
class FixedPointReport:
    """Deviation of the centers from their weighted-mean stationarity form."""

    residual: float
    skipped: tuple = ()  # center indices with degenerate denominators


def center_fixed_point_residual(
    model: HBFModel, data: TrainingSet, denom_tol: float = 1e-12
) -> FixedPointReport:
    """Stationary centers satisfy t_a = sum_i P_i^a x_i / sum_i P_i^a.

    P_i^a = Delta_i G'(||x_i - t_a||^2). Centers whose denominator is below
    denom_tol in magnitude are skipped and reported.
    """
    r2 = cdist(data.inputs, model.centers, "sqeuclidean")
    Gp = radial_basis_deriv(r2, model.sigma)
    delta = data.targets - radial_basis(r2, model.sigma) @ model.coeffs
    P = delta[:, None] * Gp  # (N, n)
    denom = P.sum(axis=0)
    skipped = []
    worst = 0.0
    for a in range(model.n):
        if abs(denom[a]) <= denom_tol:
            skipped.append(a)
            continue
        t_hat = (P[:, a] @ data.inputs) / denom[a]
        worst = max(worst, float(np.max(np.abs(model.centers[a] - t_hat))))
    return FixedPointReport(residual=worst, skipped=tuple(skipped))


@dataclass(frozen=True)
class CapacityReport:
    ratio: float
    ok: bool


def check_capacity(N: int, n: int, d: int, threshold: float = 5.0) -> CapacityReport:
    """Examples-per-parameter ratio N / (n + n d); passes at >= threshold."""
    if N < 1 or n < 1 or d < 1:
        raise ValueError("N, n, d must all be positive")
    ratio = N / (n + n * d)
    return CapacityReport(ratio=float(ratio), ok=ratio >= threshold)


def model_to_json(model: HBFModel) -> str:
    return json.dumps(
        {
            "d": model.d,
            "n": model.n,
            "sigma": model.sigma,
            "lambda": model.lam,
            "centers": model.centers.tolist(),
            "coeffs": model.coeffs.tolist(),
        }
    )


def model_from_json(text: str) -> HBFModel:
    doc = json.loads(text)
    return HBFModel(
        centers=np.asarray(doc["centers"], dtype=float),
        coeffs=np.asarray(doc["coeffs"], dtype=float),
        sigma=float(doc["sigma"]),
        lam=float(doc["lambda"]),
    )
