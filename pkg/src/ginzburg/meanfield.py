"""Classical mean-field chain response to a uniformly moving detector.

With the interaction switched on at t = 0 from an undeformed chain, the mean
displacement field obeys

    rho_c * phi_tt = Upsilon_c * phi_xx - g a_d * h''(x, x_d(t)),
    x_d(t) = x0 + v t,

and is computed by three independent routes:

  modesum   brute-force double quadrature of the mode expansion
            phi(x,t) = -(g a_d/rho_c) sum_alpha u_a(x)/Omega_a
                       * int_0^t dt' sin[Omega_a (t-t')]
                       * int dx' u_a(x') h''(x', x_d(t'))
  series    the analytic time integral of the mode sum (long-wavelength
            mode functions), three cosine families per mode weighted by the
            cutoff f(Omega_a w/c_s)
  closed    the three-wave-packet form
            phi = (g a_d/rho_c) [ h(x, x_d)/(c_s^2 - v^2)
                                  - h(x, x0 + c_s t)/(2 c_s (c_s - v))
                                  - h(x, x0 - c_s t)/(2 c_s (c_s + v)) ]

The closed and series routes split into a packet co-moving with the detector
plus right/left sound ripples launched from x0 at switch-on; the three
packets integrate to zero net displacement at every time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PoleError, ToleranceError, ValidationError
from .modes import DEFAULT_Y_MAX, mode_frequencies
from .params import SystemParams
from .specfun import cutoff_f, kernel_h, kernel_h_deriv

# chunk cap for the (time x space) kernel matrix, in elements
_CHUNK_ELEMENTS = 16_000_000
# detector-centered half-width of the extended integration domain, in units of w
_EXTENDED_HALFWIDTH_W = 250.0


@dataclass(frozen=True)
class Trajectory:
    """Uniform detector trajectory x_d(t) = x0 + v*t, switched on at t = 0."""

    x0: float
    v: float

    def position(self, t):
        return self.x0 + self.v * np.asarray(t, dtype=float)

    def validate(self, params: SystemParams):
        half = params.chain.L / 2.0
        if abs(self.x0) >= half:
            raise ValidationError(f"|x0| = {abs(self.x0)} must be < L/2 = {half}")


@dataclass(frozen=True)
class QuadReport:
    """Panel-doubling diagnostics for the modesum route."""

    panels_x: int
    panels_t: int
    doublings: int
    error_estimate: float
    tolerance: float
    converged: bool


@dataclass(frozen=True)
class FieldProfile:
    """phi-bar sampled on a grid at one time, plus route metadata."""

    grid: np.ndarray
    t: float
    values: np.ndarray
    route: str
    components: dict | None = None
    constraint_integral: float = math.nan   # trapezoid of phi over the grid
    l1_integral: float = math.nan            # trapezoid of |phi|
    meta: dict = field(default_factory=dict)


def _pole_check(v, c_s):
    if abs(abs(v) - c_s) <= 1e-12 * c_s:
        raise PoleError(
            f"|v| = c_s is a pole of the closed/series forms (v = {v}); "
            "use the modesum route for sonic trajectories")


# -- closed form --------------------------------------------------------------


def meanfield_closed(x, t, traj: Trajectory, params: SystemParams,
                     include_image: bool = False, components: bool = False):
    """Three-packet closed form; optionally returns the packet decomposition.

    include_image adds, for each packet, the reflected-argument term
    [ (x + X + L)^2 + w^2 ]^(-3/2) that the far-from-edge approximation
    drops (debug/error-budget use only).
    """
    chain, det = params.chain, params.detector
    c, v, w = chain.c_s, traj.v, det.w
    _pole_check(v, c)
    pref = params.g * det.a_d / chain.rho_c
    x = np.asarray(x, dtype=float)

    centers = {
        "comoving": (traj.x0 + v * t, pref / (c * c - v * v)),
        "ripple_right": (traj.x0 + c * t, -pref / (2.0 * c * (c - v))),
        "ripple_left": (traj.x0 - c * t, -pref / (2.0 * c * (c + v))),
    }
    parts = {}
    for name, (center, coeff) in centers.items():
        term = coeff * kernel_h(x, center, w)
        if include_image:
            term = term + coeff * kernel_h(x, -center - chain.L, w)
        parts[name] = term
    total = parts["comoving"] + parts["ripple_right"] + parts["ripple_left"]
    if components:
        return total, parts
    return total


# -- mode series --------------------------------------------------------------


def _series_k_and_weights(params: SystemParams, alpha_max):
    chain = params.chain
    if alpha_max is None:
        alpha_max = chain.N - 1
    if not 1 <= alpha_max <= chain.N - 1:
        raise ValidationError(f"alpha_max must be in 1..{chain.N - 1}, got {alpha_max}")
    alphas = np.arange(1, alpha_max + 1)
    omega = mode_frequencies(chain, alphas)
    k = omega / chain.c_s          # long-wavelength convention
    f = cutoff_f(omega * params.detector.w / chain.c_s)
    return k, f


def meanfield_series(x, t, traj: Trajectory, params: SystemParams,
                     alpha_max: int | None = None, components: bool = False):
    """Analytic-time-integral mode series (three cosine families per mode).

    Per mode alpha, with k = Omega_alpha/c_s and f = f(Omega_alpha w/c_s):

        phi_alpha = -(2 g a_d / (rho_c w^2)) f cos[k (x + L/2)]
                    * { cos[k(x0 + c t + L/2)] / (L c (c - v))
                      - 2 cos[k(x0 + v t + L/2)] / (L (c^2 - v^2))
                      + cos[k(x0 - c t + L/2)] / (L c (c + v)) }

    The three families cancel mode-by-mode at t = 0.
    """
    chain, det = params.chain, params.detector
    c, v, w, L = chain.c_s, traj.v, det.w, chain.L
    _pole_check(v, c)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(np.abs(x) > L / 2 * (1 + 1e-12)):
        raise ValidationError("grid outside the chain [-L/2, L/2]")

    k, f = _series_k_and_weights(params, alpha_max)
    pref = -2.0 * params.g * det.a_d / (chain.rho_c * w * w)
    coeff = {
        "ripple_right": (traj.x0 + c * t, 1.0 / (L * c * (c - v))),
        "comoving": (traj.x0 + v * t, -2.0 / (L * (c * c - v * v))),
        "ripple_left": (traj.x0 - c * t, 1.0 / (L * c * (c + v))),
    }
    # u-matrix on the output grid: cos[k (x + L/2)], shape (nx, nmodes)
    cos_x = np.cos(np.multiply.outer(x + L / 2.0, k))
    parts = {}
    for name, (center, a) in coeff.items():
        weights = pref * f * a * np.cos(k * (center + L / 2.0))
        parts[name] = cos_x @ weights
    total = parts["comoving"] + parts["ripple_right"] + parts["ripple_left"]
    if scalar:
        total = float(total[0])
        parts = {n: float(p[0]) for n, p in parts.items()}
    if components:
        return total, parts
    return total


# -- brute-force mode sum ------------------------------------------------------


def _gauss_panels(a, b, n_panels, n_nodes=8):
    """Composite Gauss-Legendre nodes/weights on [a, b] with uniform panels."""
    xg, wg = np.polynomial.legendre.leggauss(n_nodes)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


def _modesum_once(x_out, t, traj, params, k, omega, panels_x, panels_t,
                  longwave, extended_domain):
    """One fixed-resolution evaluation of the double quadrature."""
    chain, det = params.chain, params.detector
    L, w = chain.L, det.w
    pref = -params.g * det.a_d / chain.rho_c

    tq, wt = _gauss_panels(0.0, t, panels_t)
    xd = traj.position(tq)                                 # (nt,)

    if extended_domain:
        # detector-centered offsets; exploits translation invariance so the
        # kernel factor is computed once
        R = _EXTENDED_HALFWIDTH_W * w
        xiq, wx = _gauss_panels(-R, R, panels_x)
        hpp = kernel_h_deriv(2, xiq, 0.0, w) * wx          # (nx,)
        cos_k_xi = np.cos(np.multiply.outer(xiq, k))
        sin_k_xi = np.sin(np.multiply.outer(xiq, k))
        c_alpha = hpp @ cos_k_xi                           # (nmodes,)
        s_alpha = hpp @ sin_k_xi
        phase = np.multiply.outer(xd + L / 2.0, k)         # (nt, nmodes)
        s_mat = math.sqrt(2.0 / L) * (np.cos(phase) * c_alpha - np.sin(phase) * s_alpha)
    else:
        xq, wx = _gauss_panels(-L / 2.0, L / 2.0, panels_x)
        u_mat = math.sqrt(2.0 / L) * np.cos(np.multiply.outer(xq + L / 2.0, k))
        s_mat = np.empty((tq.size, k.size))
        chunk = max(1, _CHUNK_ELEMENTS // xq.size)
        for i0 in range(0, tq.size, chunk):
            i1 = min(i0 + chunk, tq.size)
            kern = kernel_h_deriv(2, xq[None, :], xd[i0:i1, None], w)
            s_mat[i0:i1] = (kern * wx[None, :]) @ u_mat

    sin_t = np.sin(np.multiply.outer(t - tq, omega)) * wt[:, None]
    q_alpha = np.einsum("ta,ta->a", sin_t, s_mat) / omega

    u_out = math.sqrt(2.0 / L) * np.cos(np.multiply.outer(x_out + L / 2.0, k))
    return pref * (u_out @ q_alpha)


def meanfield_modesum(x, t, traj: Trajectory, params: SystemParams,
                      alpha_max: int | None = None, longwave: bool = False,
                      extended_domain: bool = False, rel_tol: float = 1e-4,
                      max_doublings: int = 3, return_report: bool = False):
    """Brute-force double quadrature of the mode expansion.

    Both the spatial integral (u_alpha against the kernel curvature) and the
    time integral (sin[Omega (t-t')] against the moving kernel) use composite
    Gauss-Legendre panels sized to the shortest mode wavelength and fastest
    phase; the whole evaluation is repeated with doubled panel counts until
    consecutive profiles agree to rel_tol of the profile peak.

    longwave switches the mode wavenumber to Omega_alpha/c_s; extended_domain
    integrates over a detector-centered window instead of the physical chain
    (the far-from-edge idealization the analytic routes make).  Raises
    ToleranceError (carrying the achieved estimate) if the doubling budget
    runs out.
    """
    chain, det = params.chain, params.detector
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x_out = np.atleast_1d(x)
    if np.any(np.abs(x_out) > chain.L / 2 * (1 + 1e-12)):
        raise ValidationError("grid outside the chain [-L/2, L/2]")
    if t == 0.0:
        out = np.zeros_like(x_out)
        report = QuadReport(0, 0, 0, 0.0, rel_tol, True)
        out = float(out[0]) if scalar else out
        return (out, report) if return_report else out

    if alpha_max is None:
        y = mode_frequencies(chain) * det.w / chain.c_s
        alpha_max = int(np.count_nonzero(y <= DEFAULT_Y_MAX)) or 1
    if not 1 <= alpha_max <= chain.N - 1:
        raise ValidationError(f"alpha_max must be in 1..{chain.N - 1}, got {alpha_max}")
    alphas = np.arange(1, alpha_max + 1)
    omega = mode_frequencies(chain, alphas)
    k = omega / chain.c_s if longwave else alphas * math.pi / chain.L

    c_s, w = chain.c_s, det.w
    k_max = float(k.max())
    # panel sizing: resolve the kernel width w and the shortest wavelength
    dx_target = min(w / 2.5, (2.0 * math.pi / k_max) / 3.0)
    span_x = 2.0 * _EXTENDED_HALFWIDTH_W * w if extended_domain else chain.L
    panels_x = max(8, int(math.ceil(span_x / dx_target)))
    rate = float(omega.max()) + k_max * abs(traj.v)
    panels_t = max(4, int(math.ceil(t * rate / (2.0 * math.pi) * 3.0)))

    prev = _modesum_once(x_out, t, traj, params, k, omega, panels_x, panels_t,
                         longwave, extended_domain)
    est = math.inf
    doublings = 0
    for doublings in range(1, max_doublings + 1):
        panels_x *= 2
        panels_t *= 2
        cur = _modesum_once(x_out, t, traj, params, k, omega, panels_x, panels_t,
                            longwave, extended_domain)
        scale = float(np.max(np.abs(cur))) or 1.0
        est = float(np.max(np.abs(cur - prev))) / scale
        prev = cur
        if est <= rel_tol:
            break
    else:
        raise ToleranceError(
            f"modesum quadrature did not reach rel_tol={rel_tol:.2e} after "
            f"{max_doublings} doublings (achieved {est:.2e})",
            achieved=est, target=rel_tol)

    report = QuadReport(panels_x=panels_x, panels_t=panels_t, doublings=doublings,
                        error_estimate=est, tolerance=rel_tol, converged=True)
    out = float(prev[0]) if scalar else prev
    return (out, report) if return_report else out


# -- profiles ------------------------------------------------------------------

_ROUTES = ("closed", "series", "modesum")


def profile(route: str, grid, t, traj: Trajectory, params: SystemParams,
            **route_kwargs) -> FieldProfile:
    """Evaluate one route on a spatial grid and attach the constraint report.

    The constraint integral (trapezoid of phi over the grid) should vanish
    relative to the L1 norm on grids that resolve the packets.
    """
    if route not in _ROUTES:
        raise ValidationError(f"unknown route {route!r}; choose from {_ROUTES}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValidationError("grid must be a 1-d array with at least 2 points")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("grid must be strictly increasing")
    half = params.chain.L / 2.0
    if grid[0] < -half * (1 + 1e-12) or grid[-1] > half * (1 + 1e-12):
        raise ValidationError(f"grid outside the chain [-{half}, {half}]")
    traj.validate(params)

    meta = {"trajectory": {"x0": traj.x0, "v": traj.v}}
    components = None
    if route == "closed":
        values, components = meanfield_closed(grid, t, traj, params,
                                              components=True, **route_kwargs)
    elif route == "series":
        values, components = meanfield_series(grid, t, traj, params,
                                              components=True, **route_kwargs)
    else:
        values, report = meanfield_modesum(grid, t, traj, params,
                                           return_report=True, **route_kwargs)
        meta["quadrature"] = report

    constraint = float(np.trapezoid(values, grid))
    l1 = float(np.trapezoid(np.abs(values), grid))
    return FieldProfile(grid=grid, t=float(t), values=values, route=route,
                        components=components, constraint_integral=constraint,
                        l1_integral=l1, meta=meta)
