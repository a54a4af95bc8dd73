"""Kernels induced by rectifier feature maps and their group averages.

Monte-Carlo estimation runs only over the (template, bias) draws; the group
average is always an exact finite sum, so orbit invariance holds sample by
sample rather than statistically. A closed-form kernel for the step
nonlinearity and Gram-matrix / selectivity diagnostics round out the module.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    KernelAsymmetric,
    OutOfRange,
    WeightsNotNormalized,
)
from .pooling import mex
from .signals import FiniteGroup, Orbit, Signal, cyclic_group, normalize

TEMPLATE_LAWS = ("gaussian", "uniform_sphere")
BIAS_LAWS = ("gaussian", "uniform")


@dataclass(frozen=True)
class TemplateSampler:
    """Random law for (template, bias) draws; identical seed, identical stream.

    The Gaussian/Gaussian configuration is the validation setup: absorbing
    the bias into an augmented coordinate makes the induced kernel a
    first-order arc-cosine kernel with a closed form.
    """

    template_law: str = "gaussian"
    bias_law: str = "gaussian"
    bias_range: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.template_law not in TEMPLATE_LAWS:
            raise ValueError(f"unknown template law {self.template_law!r}")
        if self.bias_law not in BIAS_LAWS:
            raise ValueError(f"unknown bias law {self.bias_law!r}")
        if self.bias_law == "uniform" and not self.bias_range > 0:
            raise ValueError("uniform bias law needs bias_range > 0")

    def draw(self, d: int, S: int, stream: int = 0):
        """Draw S templates (rows) and biases; ``stream`` derives a substream."""
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(stream,))
        )
        T = rng.standard_normal((S, d))
        if self.template_law == "uniform_sphere":
            T /= np.linalg.norm(T, axis=1, keepdims=True)
        if self.bias_law == "gaussian":
            b = rng.standard_normal(S)
        else:
            b = rng.uniform(-self.bias_range, self.bias_range, S)
        return T, b


@dataclass(frozen=True)
class KernelEstimate:
    """Monte-Carlo kernel value with its standard error."""

    value: float
    stderr: float
    samples: int

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("need at least 2 samples for a standard error")


def _estimate(products: np.ndarray) -> KernelEstimate:
    S = products.size
    return KernelEstimate(
        value=float(np.mean(products)),
        stderr=float(np.std(products, ddof=1) / np.sqrt(S)),
        samples=S,
    )


def k0_mc(x: Signal, x2: Signal, sampler: TemplateSampler, S: int) -> KernelEstimate:
    """Base kernel estimate: mean over draws of |<t,x>+b|_+ |<t,x'>+b|_+."""
    if x.dim != x2.dim:
        raise DimensionMismatch("inputs have different dimensions")
    T, b = sampler.draw(x.dim, S)
    u = np.maximum(T @ x.values + b, 0.0)
    v = np.maximum(T @ x2.values + b, 0.0)
    return _estimate(u * v)


def ktilde_mc(
    x: Signal,
    x2: Signal,
    G: FiniteGroup,
    sampler: TemplateSampler,
    S: int,
) -> KernelEstimate:
    """Group-averaged kernel estimate.

    The double group sum factorizes per sample into the product of two
    single group averages; only the (t, b) draw is Monte-Carlo.
    """
    if x.dim != x2.dim or x.dim != G.dim:
        raise DimensionMismatch("signal/group dimensions differ")
    T, b = sampler.draw(x.dim, S)
    # <g t, x> = <t, g^{-1} x>; summing over all g covers all inverses.
    gx = x.values[G.elements]  # (order, d), rows are g x
    gx2 = x2.values[G.elements]
    u = np.maximum(T @ gx.T + b[:, None], 0.0).mean(axis=1)
    v = np.maximum(T @ gx2.T + b[:, None], 0.0).mean(axis=1)
    return _estimate(u * v)


def arccos1_kernel(u: np.ndarray, v: np.ndarray) -> float:
    """Closed-form first-order arc-cosine kernel for standard normal weights.

    E |<w,u>|_+ |<w,v>|_+ = (1/2pi) |u||v| (sin th + (pi - th) cos th).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    c = np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)
    th = np.arccos(c)
    return float(nu * nv * (np.sin(th) + (np.pi - th) * np.cos(th)) / (2 * np.pi))


def step_kernel_exact(xs: float, xs2: float, p: float) -> float:
    """Integral over [-p, p] of step(b - xs) * step(b - xs2) db = p - max(xs, xs2)."""
    if not p > 0:
        raise OutOfRange("p must be positive")
    if abs(xs) > p or abs(xs2) > p:
        raise OutOfRange("projections must lie in [-p, p]")
    return p - max(xs, xs2)


def step_kernel_numeric(
    xs: float,
    xs2: float,
    p: float,
    grid_points: int = 100_000,
    alpha: float = 1e4,
) -> float:
    """Trapezoid oracle for step_kernel_exact.

    The step is replaced by its ramp approximation
    alpha * (|s|_+ - |s - 1/alpha|_+) and the product integrated on a
    uniform b-grid.
    """
    if grid_points < 1000:
        raise ValueError("grid_points must be >= 1000")
    if not p > 0:
        raise OutOfRange("p must be positive")
    if abs(xs) > p or abs(xs2) > p:
        raise OutOfRange("projections must lie in [-p, p]")

    def ramp_step(s):
        return alpha * (np.maximum(s, 0.0) - np.maximum(s - 1.0 / alpha, 0.0))

    b = np.linspace(-p, p, grid_points)
    integrand = ramp_step(b - xs) * ramp_step(b - xs2)
    return float(np.trapezoid(integrand, b))


def ktilde_step(
    I: Signal,
    I2: Signal,
    templates,
    weights,
    G: FiniteGroup,
    p: float,
) -> float:
    """Group- and template-averaged step-nonlinearity kernel.

    p minus the weighted average over templates, and exact double group
    average, of max(<I2, g t>, <I, g' t>).
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(np.sum(w) - 1.0) > 1e-12:
        raise WeightsNotNormalized("weights must be nonnegative and sum to 1")
    if len(templates) != w.size:
        raise DimensionMismatch("one weight per template required")
    total = 0.0
    for t, wt in zip(templates, w):
        gt = t.values[G.elements]  # rows g t
        a = gt @ I2.values  # <I2, g t> over g
        c = gt @ I.values  # <I, g' t> over g'
        if np.max(np.abs(a)) > p + 1e-12 or np.max(np.abs(c)) > p + 1e-12:
            raise OutOfRange("projections must lie in [-p, p]")
        total += wt * float(np.mean(np.maximum(a[:, None], c[None, :])))
    return p - total


@dataclass(frozen=True)
class GramReport:
    """Symmetric kernel matrix with eigenvalue extremes and a PSD verdict."""

    matrix: np.ndarray
    min_eigenvalue: float
    max_eigenvalue: float
    psd_pass: bool


def gram(points, kernel) -> GramReport:
    """Build the full kernel matrix and test positive semidefiniteness.

    psd_pass allows eigenvalues down to -1e-8 relative to the largest one
    (floating-point slack).
    """
    m = len(points)
    if m < 2:
        raise ValueError("need at least 2 points")
    K = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            kij = kernel(points[i], points[j])
            kji = kernel(points[j], points[i]) if j > i else kij
            if abs(kij - kji) > 1e-9:
                raise KernelAsymmetric(f"K({i},{j}) != K({j},{i})")
            K[i, j] = K[j, i] = 0.5 * (kij + kji)
    eig = np.linalg.eigvalsh(K)
    lo, hi = float(eig[0]), float(eig[-1])
    return GramReport(
        matrix=K,
        min_eigenvalue=lo,
        max_eigenvalue=hi,
        psd_pass=lo >= -1e-8 * max(abs(hi), 1.0),
    )


def gram_to_csv(report: GramReport, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["row", "col", "value"])
        m = report.matrix.shape[0]
        for i in range(m):
            for j in range(m):
                writer.writerow([i, j, repr(report.matrix[i, j])])


def gram_summary_json(report: GramReport, n_points: int, kernel_id: str, seed: int) -> str:
    return json.dumps(
        {
            "min_eig": report.min_eigenvalue,
            "max_eig": report.max_eigenvalue,
            "psd_pass": report.psd_pass,
            "n_points": n_points,
            "kernel_id": kernel_id,
            "seed": seed,
        }
    )


def mex_similarity(x: Signal, y: Signal, G: FiniteGroup, xi: float) -> float:
    """Log-mean-exp aggregation of the dot products <x, g y> over the group.

    Symmetric (the multiset {<x, g y>} equals {<y, g x>}) but not positive
    semidefinite in general.
    """
    if x.dim != y.dim or x.dim != G.dim:
        raise DimensionMismatch("signal/group dimensions differ")
    dots = y.values[G.elements] @ x.values
    return mex(dots, xi)


@dataclass(frozen=True)
class MexScanResult:
    found: bool
    instances_tried: int
    min_eigenvalue: float
    dim: int = 0
    xi: float = 0.0


def mex_npsd_scan(
    max_instances: int = 1000,
    seed: int = 0,
    dims=(2, 3, 4),
    xis=(1.0, 5.0, 25.0),
    n_points: int = 6,
    eig_threshold: float = -1e-6,
) -> MexScanResult:
    """Randomized search for a non-PSD pairwise similarity matrix.

    Each instance draws random unit vectors, builds the pairwise
    log-mean-exp similarity matrix over a cyclic group, and checks its
    smallest eigenvalue. Stops at the first eigenvalue below the threshold.
    """
    rng = np.random.default_rng(seed)
    worst = np.inf
    for trial in range(max_instances):
        d = int(rng.choice(dims))
        xi = float(rng.choice(xis))
        G = cyclic_group(d)
        pts = [normalize(rng.standard_normal(d)) for _ in range(n_points)]
        m = len(pts)
        K = np.empty((m, m))
        for i in range(m):
            for j in range(i, m):
                K[i, j] = K[j, i] = mex_similarity(pts[i], pts[j], G, xi)
        lo = float(np.linalg.eigvalsh(K)[0])
        worst = min(worst, lo)
        if lo < eig_threshold:
            return MexScanResult(
                found=True,
                instances_tried=trial + 1,
                min_eigenvalue=lo,
                dim=d,
                xi=xi,
            )
    return MexScanResult(found=False, instances_tried=max_instances, min_eigenvalue=worst)


@dataclass(frozen=True)
class SelectivityReport:
    """Extremes of the normalized kernel across same- and distinct-orbit pairs."""

    same_orbit_min: float
    distinct_orbit_max: float

    @property
    def margin(self) -> float:
        return self.same_orbit_min - self.distinct_orbit_max


def selectivity_scan(orbits, kernel) -> SelectivityReport:
    """Compare normalized kernel values within and across orbits.

    The caller guarantees an invariant (group-averaged) kernel; values are
    normalized as K(x,y) / sqrt(K(x,x) K(y,y)).
    """

    def khat(a, b):
        return kernel(a, b) / np.sqrt(kernel(a, a) * kernel(b, b))

    same_min = np.inf
    distinct_max = -np.inf
    for oi, orb_i in enumerate(orbits):
        for oj, orb_j in enumerate(orbits):
            if oj < oi:
                continue
            for a in orb_i.members:
                for b in orb_j.members:
                    v = khat(a, b)
                    if oi == oj:
                        same_min = min(same_min, v)
                    else:
                        distinct_max = max(distinct_max, v)
    return SelectivityReport(
        same_orbit_min=float(same_min), distinct_orbit_max=float(distinct_max)
    )
