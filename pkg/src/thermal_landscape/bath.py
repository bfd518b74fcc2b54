"""Scalar bath functions and kernel integrals.

Glauber transition weight, square window and its Fourier transform, bath
correlation function, the frequency-overlap kernel C(nu', nu) and the
Lamb-shift kernel K(nu2, nu1).

Quadrature strategy: composite Gauss-Legendre panels whose width is tied
to the fastest oscillation of the integrand, with the error estimated by
halving the panel width.  The frequency integrals share one node grid
across all Bohr-frequency pairs, so a full kernel table costs a single
matrix product.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import expit

from .errors import QuadratureFailure

SQRT_2PI = math.sqrt(2.0 * math.pi)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class BathSpec:
    """Bath parameters: inverse temperature, time scale and Gaussian cutoff.

    Infinite beta or tau are never represented here; the Davies limit has
    its own code path in the lindblad module.  ``weight`` selects the
    transition-weight family; "flat" (gamma = 1) exists as a test
    surrogate only.
    """

    beta: float
    tau: float
    lambda0: float = 1.0
    weight: str = "glauber"

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be finite and > 0, got {self.tau}")
        if not (math.isfinite(self.lambda0) and self.lambda0 > 0):
            raise ValueError(f"lambda0 must be finite and > 0, got {self.lambda0}")
        if self.weight not in ("glauber", "flat"):
            raise ValueError(f"unknown weight selector {self.weight!r}")


@dataclass(frozen=True)
class QuadReport:
    abs_tol: float
    max_estimated_error: float


@dataclass(frozen=True)
class KernelTable:
    """Overlap kernel C(nu', nu) (and optionally Lamb kernel K) on a Bohr set.

    ``C[k, l]`` is the overlap integral with nu' = bohr_freqs[k] and
    nu = bohr_freqs[l].
    """

    bohr_freqs: np.ndarray
    C: np.ndarray
    K: np.ndarray | None
    quad_report: QuadReport


def glauber_prefactor(beta, lambda0):
    return 1.0 / (2.0 + math.log1p(beta * lambda0))


def gamma(omega, spec: BathSpec):
    """Transition weight gamma_beta(omega); vectorized over omega."""
    omega = np.asarray(omega, dtype=float)
    if spec.weight == "flat":
        out = np.ones_like(omega)
    else:
        pref = glauber_prefactor(spec.beta, spec.lambda0)
        out = pref * np.exp(-(omega**2) / (2.0 * spec.lambda0**2)) * expit(
            -spec.beta * omega
        )
    return out if out.ndim else float(out)


def gamma_zero_temperature(omega, lambda0=1.0, beta_cap=1e6):
    """beta = infinity convention: Boltzmann factor replaced by a step.

    The Glauber prefactor vanishes as beta -> infinity, so it is evaluated
    at a configured cap instead; omega = 0 takes half weight.
    """
    omega = np.asarray(omega, dtype=float)
    pref = glauber_prefactor(beta_cap, lambda0)
    step = np.where(omega < 0, 1.0, np.where(omega > 0, 0.0, 0.5))
    out = pref * np.exp(-(omega**2) / (2.0 * lambda0**2)) * step
    return out if out.ndim else float(out)


def window_hat(omega, tau):
    """Fourier transform of the normalized square window of width tau.

    Equals sqrt(2/(pi tau)) sin(omega tau / 2) / omega with the limit
    sqrt(tau/(2 pi)) at omega = 0.
    """
    omega = np.asarray(omega, dtype=float)
    x = omega * tau / 2.0
    out = math.sqrt(tau / (2.0 * math.pi)) * np.sinc(x / math.pi)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# panel quadrature helpers
# ---------------------------------------------------------------------------


def _panel_nodes(edges):
    """Gauss-Legendre nodes/weights on the panels delimited by ``edges``."""
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _make_edges(a, b, h, forced=()):
    n_panels = max(8, int(math.ceil((b - a) / h)))
    edges = np.linspace(a, b, n_panels + 1)
    inner = [p for p in forced if a < p < b]
    if inner:
        edges = np.unique(np.concatenate([edges, np.array(inner, dtype=float)]))
    return edges


def _refine_edges(edges):
    mids = 0.5 * (edges[1:] + edges[:-1])
    return np.unique(np.concatenate([edges, mids]))


def _gamma_support_radius(spec: BathSpec, tiny):
    """Radius beyond which the Gaussian envelope of gamma is below ``tiny``."""
    pref = glauber_prefactor(spec.beta, spec.lambda0)
    arg = max(pref / max(tiny, 1e-300), math.e)
    return spec.lambda0 * (math.sqrt(2.0 * math.log(arg)) + 1.0)


def _freq_panel_width(spec: BathSpec, rate):
    """Panel width resolving the oscillation ``rate`` and gamma's features."""
    h = 4.0 * math.pi / max(rate, 1e-12)
    if spec.weight == "glauber":
        h = min(h, 0.35 / max(spec.beta, 1.0), spec.lambda0 / 3.0)
    return h


# ---------------------------------------------------------------------------
# bath correlation function
# ---------------------------------------------------------------------------


def _c_beta_direct(t_values, spec: BathSpec, abs_tol):
    """c_beta on a batch of times by shared-grid panel quadrature.

    Only |t| is evaluated (c(-t) = conj(c(t))); the refinement passes that
    estimate the quadrature error run on a subsample of the batch, since
    the error varies smoothly with t.
    """
    if spec.weight != "glauber":
        raise ValueError("bath_correlation is defined for the glauber weight")
    t_values = np.atleast_1d(np.asarray(t_values, dtype=float))
    t_abs = np.unique(np.abs(t_values))
    rate = float(t_abs[-1]) if t_abs.size else 1.0
    w_rad = _gamma_support_radius(spec, abs_tol * 1e-3)
    h = _freq_panel_width(spec, rate)
    h = min(h, (2 * w_rad) / 8)

    def one_pass(edges, ts):
        nodes, wts = _panel_nodes(edges)
        g = gamma(nodes, spec) * wts
        out = np.empty(len(ts), dtype=complex)
        chunk = max(1, int(4e6 // max(len(nodes), 1)))
        for i in range(0, len(ts), chunk):
            phases = np.exp(1j * np.outer(ts[i : i + chunk], nodes))
            out[i : i + chunk] = phases @ g
        return out / SQRT_2PI

    probe = t_abs[:: max(1, len(t_abs) // 48)]
    edges = _make_edges(-w_rad, w_rad, h)
    for _ in range(3):
        fine = _refine_edges(edges)
        err = float(np.max(np.abs(one_pass(edges, probe) - one_pass(fine, probe))))
        if err <= 0.5 * abs_tol:
            break
        edges = fine
    else:
        raise QuadratureFailure(
            f"bath correlation error estimate {err:.3e} exceeds {abs_tol:.3e}"
        )
    pos_vals = one_pass(edges, t_abs)
    lookup = dict(zip(t_abs.tolist(), pos_vals))
    out = np.array(
        [
            lookup[abs(t)] if t >= 0 else np.conj(lookup[abs(t)])
            for t in t_values.tolist()
        ],
        dtype=complex,
    )
    return out


class BathCorrelation:
    """Cached bath correlation function c_beta(t).

    Values are precomputed on a uniform grid and served through cubic
    interpolation.  The grid covers [-t_max, t_max] where t_max is the
    smaller of tau and the decay range of c_beta (the logistic factor
    gives an exp(-pi t / beta)-type tail, the Gaussian cutoff a 1/lambda0
    scale); outside the grid, values are obtained by direct quadrature.
    """

    def __init__(self, spec: BathSpec, abs_tol=1e-10, grid_points=4096):
        self.spec = spec
        self.abs_tol = abs_tol
        t_decay = 12.0 * spec.beta + 10.0 / spec.lambda0 + 5.0
        self.t_max = min(spec.tau, t_decay)
        self._decay_limited = t_decay < spec.tau
        grid = np.linspace(-self.t_max, self.t_max, grid_points)
        vals = _c_beta_direct(grid, spec, abs_tol)
        self._re = CubicSpline(grid, vals.real)
        self._im = CubicSpline(grid, vals.imag)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty(t.shape, dtype=complex)
        inside = np.abs(t) <= self.t_max
        out[inside] = self._re(t[inside]) + 1j * self._im(t[inside])
        if np.any(~inside):
            if self._decay_limited:
                out[~inside] = 0.0  # beyond the decay range, |c| < abs_tol
            else:
                out[~inside] = _c_beta_direct(t[~inside], self.spec, self.abs_tol)
        return complex(out[0]) if scalar else out


def bath_correlation(t, spec: BathSpec, cache: BathCorrelation | None = None):
    """c_beta(t) = (2 pi)^{-1/2} integral gamma(omega) e^{+i omega t} domega."""
    if cache is not None:
        return cache(t)
    vals = _c_beta_direct(np.atleast_1d(t), spec, abs_tol=1e-10)
    return complex(vals[0]) if np.ndim(t) == 0 else vals


# ---------------------------------------------------------------------------
# overlap kernel C(nu', nu)
# ---------------------------------------------------------------------------


def _overlap_interval(freqs, spec: BathSpec, abs_tol):
    if spec.weight == "glauber":
        # gamma's Gaussian envelope bounds the integrand; pick the radius so
        # the truncated tail stays far below abs_tol.
        peak = spec.tau / (2.0 * math.pi)
        tiny = abs_tol / (100.0 * max(peak, 1.0))
        w_rad = _gamma_support_radius(spec, tiny)
        return -w_rad, w_rad
    # flat weight: only the 1/omega^2 window tails decay; truncate where the
    # remaining tail is below abs_tol / 2.
    radius = max(50.0, 8.0 / (math.pi * spec.tau * abs_tol))
    if radius > 5e6:
        raise QuadratureFailure(
            "flat-weight overlap kernel needs an impractical integration range; "
            "loosen abs_tol"
        )
    return float(np.min(freqs) - radius), float(np.max(freqs) + radius)


def _overlap_once(freqs, spec, secular_mu, edges):
    nodes, wts = _panel_nodes(edges)
    f_mat = window_hat(nodes[:, None] - freqs[None, :], spec.tau)
    if secular_mu is not None:
        f_mat = f_mat * (np.abs(nodes[:, None] - freqs[None, :]) < secular_mu)
    g = gamma(nodes, spec) * wts
    return f_mat.T @ (f_mat * g[:, None])


def _overlap_matrix(freqs, spec: BathSpec, secular_mu, abs_tol):
    freqs = np.asarray(freqs, dtype=float)
    a, b = _overlap_interval(freqs, spec, abs_tol)
    forced = []
    if secular_mu is not None:
        if secular_mu <= 0:
            raise ValueError("secular_mu must be positive")
        for nu in freqs:
            forced.extend((nu - secular_mu, nu + secular_mu))
    h = min(_freq_panel_width(spec, spec.tau), (b - a) / 8)
    edges = _make_edges(a, b, h, forced)
    c1 = _overlap_once(freqs, spec, secular_mu, edges)
    edges = _refine_edges(edges)
    c2 = _overlap_once(freqs, spec, secular_mu, edges)
    err = float(np.max(np.abs(c1 - c2)))
    if err > abs_tol:
        edges = _refine_edges(edges)
        c3 = _overlap_once(freqs, spec, secular_mu, edges)
        err = float(np.max(np.abs(c2 - c3)))
        c2 = c3
        if err > abs_tol:
            raise QuadratureFailure(
                f"overlap kernel error estimate {err:.3e} exceeds {abs_tol:.3e}"
            )
    return c2.astype(complex), err


def overlap_kernel(nu_prime, nu, spec: BathSpec, secular_mu=None, abs_tol=1e-10):
    """C(nu', nu) = integral gamma(w) fhat*(w - nu') fhat(w - nu) dw.

    With ``secular_mu`` set, both window factors are truncated to
    |w - nu| < mu before integrating.
    """
    freqs = np.array([float(nu_prime), float(nu)])
    if freqs[0] == freqs[1]:
        mat, _ = _overlap_matrix(freqs[:1], spec, secular_mu, abs_tol)
        return complex(mat[0, 0])
    mat, _ = _overlap_matrix(freqs, spec, secular_mu, abs_tol)
    return complex(mat[0, 1])


# ---------------------------------------------------------------------------
# Lamb-shift kernel K(nu2, nu1)
# ---------------------------------------------------------------------------


def _center_factor(sigma, width):
    """integral of e^{i sigma v} over |v| <= width/2 (= width at sigma = 0)."""
    return width * np.sinc(sigma * width / (2.0 * math.pi))


def _lamb_once(freqs, spec, corr, edges):
    tau = spec.tau
    nodes, wts = _panel_nodes(edges)
    base = -np.sign(nodes) * corr(nodes) * wts  # sgn(t1 - t2) = -sgn(u)
    widths = tau - np.abs(nodes)
    half_phase = np.exp(0.5j * np.outer(nodes, freqs))  # e^{i nu u / 2}
    m = len(freqs)
    out = np.empty((m, m), dtype=complex)
    for k in range(m):
        # e^{i (nu_k - nu_l) u / 2} = half_phase[:, k] * conj(half_phase[:, l])
        row_base = base * half_phase[:, k]
        for l in range(m):
            integrand = row_base * half_phase[:, l].conj() * _center_factor(
                freqs[k] + freqs[l], widths
            )
            out[k, l] = np.sum(integrand)
    return (1j / (2.0 * SQRT_2PI * tau)) * out


def _lamb_matrix(freqs, spec: BathSpec, corr: BathCorrelation, abs_tol):
    freqs = np.asarray(freqs, dtype=float)
    u_max = min(spec.tau, corr.t_max)
    rate = 2.0 * float(np.max(np.abs(freqs))) if len(freqs) else 0.0
    h = min(
        4.0 * math.pi / max(rate, 1e-12),
        1.0 / (3.0 * spec.lambda0),
        0.35 / max(spec.beta, 1.0),
        u_max / 8,
    )
    edges = _make_edges(-u_max, u_max, h, forced=(0.0,))
    k1 = _lamb_once(freqs, spec, corr, edges)
    edges = _refine_edges(edges)
    k2 = _lamb_once(freqs, spec, corr, edges)
    err = float(np.max(np.abs(k1 - k2)))
    if err > abs_tol:
        edges = _refine_edges(edges)
        k3 = _lamb_once(freqs, spec, corr, edges)
        err = float(np.max(np.abs(k2 - k3)))
        k2 = k3
        if err > abs_tol:
            raise QuadratureFailure(
                f"Lamb kernel error estimate {err:.3e} exceeds {abs_tol:.3e}"
            )
    return k2, err


def lamb_kernel(nu2, nu1, spec: BathSpec, cache: BathCorrelation | None = None,
                abs_tol=1e-8):
    """Lamb-shift kernel K(nu2, nu1).

    Defined by the double time integral of sgn(t1 - t2) c_beta(t2 - t1)
    e^{i nu2 t2 + i nu1 t1} over the window square, reduced to one
    dimension in u = t2 - t1 (the centre-coordinate integral is analytic).
    """
    corr = cache if cache is not None else BathCorrelation(spec)
    freqs = np.array([float(nu2), float(nu1)])
    if freqs[0] == freqs[1]:
        mat, _ = _lamb_matrix(freqs[:1], spec, corr, abs_tol)
        return complex(mat[0, 0])
    mat, _ = _lamb_matrix(freqs, spec, corr, abs_tol)
    return complex(mat[0, 1])


def build_kernel_table(bohr_freqs, spec: BathSpec, include_lamb=False,
                       secular_mu=None, abs_tol=1e-10, lamb_abs_tol=1e-8,
                       corr: BathCorrelation | None = None) -> KernelTable:
    """Evaluate the overlap (and optionally Lamb) kernel on a Bohr set."""
    freqs = np.asarray(bohr_freqs, dtype=float)
    c_mat, c_err = _overlap_matrix(freqs, spec, secular_mu, abs_tol)
    k_mat = None
    err = c_err
    if include_lamb:
        if corr is None:
            corr = BathCorrelation(spec, abs_tol=min(abs_tol, 1e-10))
        k_mat, k_err = _lamb_matrix(freqs, spec, corr, lamb_abs_tol)
        err = max(err, k_err)
    return KernelTable(
        bohr_freqs=freqs,
        C=c_mat,
        K=k_mat,
        quad_report=QuadReport(abs_tol=abs_tol, max_estimated_error=err),
    )
