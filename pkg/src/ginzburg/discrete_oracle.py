"""Brute-force integration of the discrete N-dipole chain plus detector.

Hamilton's equations for the site displacements phi_n (n spanning
-(N-1)/2 .. (N-1)/2, free ends) and the detector center of mass:

    dphi_n/dt = p_n / m_c
    dp_n/dt   = k_c (phi_{n+1} - 2 phi_n + phi_{n-1}) - G h''(n a_c - x_d)
    dx_d/dt   = p_d / M_d
    dp_d/dt   = G sum_n [ -h''(n a_c - x_d) + phi_n h'''(n a_c - x_d) ]

with G = g a_d a_c and h(s) = (s^2 + w^2)^(-3/2).  All forces derive from
one Hamiltonian, so the kick-drift-kick (velocity Verlet) stepping below is
symplectic and the total energy is a clean drift diagnostic.

This module is the validation oracle for the continuum mean-field routes:
no continuum approximation, no mode truncation, no switch-on idealization
beyond starting from the undeformed chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StabilityError, ValidationError
from .params import SystemParams
from .specfun import kernel_h_deriv

# center-of-mass constraint slack per site, relative to the field scale
_CONSTRAINT_TOL = 1e-10


def site_positions(params: SystemParams) -> np.ndarray:
    """Dipole positions n*a_c for n = -(N-1)/2 .. (N-1)/2."""
    chain = params.chain
    n = np.arange(chain.N) - (chain.N - 1) // 2
    return n * chain.a_c


@dataclass
class ChainState:
    """Phase-space snapshot: chain displacements/momenta plus detector."""

    t: float
    phi: np.ndarray
    p: np.ndarray
    x_d: float
    p_d: float

    def copy(self) -> "ChainState":
        return ChainState(self.t, self.phi.copy(), self.p.copy(), self.x_d, self.p_d)

    def constraint_residuals(self) -> tuple[float, float]:
        """(|sum phi_n|, |sum p_n|) scaled by N * max amplitude."""
        n = self.phi.size
        phi_scale = max(float(np.max(np.abs(self.phi))), 1e-300)
        p_scale = max(float(np.max(np.abs(self.p))), 1e-300)
        return (abs(float(self.phi.sum())) / (n * phi_scale),
                abs(float(self.p.sum())) / (n * p_scale))

    def validate(self, params: SystemParams):
        if self.phi.shape != (params.chain.N,) or self.p.shape != (params.chain.N,):
            raise ValidationError(
                f"state arrays must have shape ({params.chain.N},)")
        r_phi, r_p = self.constraint_residuals()
        if r_phi > _CONSTRAINT_TOL or r_p > _CONSTRAINT_TOL:
            raise ValidationError(
                "center-of-mass constraint violated: "
                f"sum(phi) residual {r_phi:.2e}, sum(p) residual {r_p:.2e}")


def initial_state(params: SystemParams, x_d: float = 0.0, v: float = 0.0,
                  phi=None, p=None) -> ChainState:
    """Undeformed chain (unless phi/p given) with detector at x_d moving at v."""
    N = params.chain.N
    phi = np.zeros(N) if phi is None else np.asarray(phi, dtype=float).copy()
    p = np.zeros(N) if p is None else np.asarray(p, dtype=float).copy()
    state = ChainState(t=0.0, phi=phi, p=p, x_d=float(x_d),
                       p_d=float(v) * params.detector.M_d)
    state.validate(params)
    return state


def _chain_forces(phi, x_sites, x_d, params: SystemParams):
    k_c = params.chain.k_c
    d = np.diff(phi)
    f = np.empty_like(phi)
    f[0] = k_c * d[0]
    f[1:-1] = k_c * (d[1:] - d[:-1])
    f[-1] = -k_c * d[-1]
    big_g = params.g * params.detector.a_d * params.chain.a_c
    if big_g != 0.0:
        f -= big_g * kernel_h_deriv(2, x_sites, x_d, params.detector.w)
    return f


def _detector_force(phi, x_sites, x_d, params: SystemParams) -> float:
    big_g = params.g * params.detector.a_d * params.chain.a_c
    if big_g == 0.0:
        return 0.0
    w = params.detector.w
    h2 = kernel_h_deriv(2, x_sites, x_d, w)
    h3 = kernel_h_deriv(3, x_sites, x_d, w)
    return big_g * float(np.sum(-h2 + phi * h3))


def force_field(state: ChainState, params: SystemParams,
                include_detector: bool = True):
    """(dp_n/dt, dp_d/dt) at the given phase-space point.

    include_detector=False zeroes the detector force (prescribed-trajectory
    mode, where back-action on the center of mass is neglected).
    """
    x_sites = site_positions(params)
    f_chain = _chain_forces(state.phi, x_sites, state.x_d, params)
    f_det = (_detector_force(state.phi, x_sites, state.x_d, params)
             if include_detector else 0.0)
    return f_chain, f_det


def total_energy(state: ChainState, params: SystemParams,
                 include_detector: bool = True) -> float:
    """Chain kinetic + elastic + interaction energy (+ detector kinetic)."""
    chain, det = params.chain, params.detector
    e = float(np.sum(state.p ** 2)) / (2.0 * chain.m_c)
    e += 0.5 * chain.k_c * float(np.sum(np.diff(state.phi) ** 2))
    if include_detector:
        e += state.p_d ** 2 / (2.0 * det.M_d)
    big_g = params.g * det.a_d * chain.a_c
    if big_g != 0.0:
        x_sites = site_positions(params)
        h1 = kernel_h_deriv(1, x_sites, state.x_d, det.w)
        h2 = kernel_h_deriv(2, x_sites, state.x_d, det.w)
        e += big_g * float(np.sum(-h1 + state.phi * h2))
    return e


@dataclass(frozen=True)
class ChainTrajectory:
    """Stored snapshots of an integrate() run (stride store_every)."""

    times: np.ndarray
    phi: np.ndarray     # (n_snapshots, N)
    p: np.ndarray
    x_d: np.ndarray
    p_d: np.ndarray

    def __len__(self) -> int:
        return self.times.size

    def __getitem__(self, i: int) -> ChainState:
        return ChainState(float(self.times[i]), self.phi[i].copy(),
                          self.p[i].copy(), float(self.x_d[i]), float(self.p_d[i]))

    @property
    def final(self) -> ChainState:
        return self[len(self) - 1]


def integrate(state: ChainState, params: SystemParams, dt: float, steps: int,
              mode: str = "prescribed", store_every: int = 1) -> ChainTrajectory:
    """Kick-drift-kick leapfrog for `steps` steps of size dt.

    prescribed: x_d(t) = x_d(0) + (p_d/M_d) t exactly, p_d untouched.
    dynamic:    detector kicked and drifted alongside the chain.

    dt may be negative (time-reversed run).  Raises StabilityError when
    |dt| exceeds a tenth of the shortest chain period.
    """
    chain, det = params.chain, params.detector
    if mode not in ("prescribed", "dynamic"):
        raise ValidationError(f"mode must be 'prescribed' or 'dynamic', got {mode!r}")
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    if store_every < 1:
        raise ValidationError(f"store_every must be >= 1, got {store_every}")
    omega_max = 2.0 * math.sqrt(chain.k_c / chain.m_c)
    dt_max = 0.1 * 2.0 * math.pi / omega_max
    if dt == 0.0 or abs(dt) > dt_max:
        raise StabilityError(
            f"|dt| = {abs(dt):.3e} outside (0, {dt_max:.3e}] "
            "(0.1 x shortest chain period)")
    state.validate(params)

    x_sites = site_positions(params)
    phi = state.phi.copy()
    p = state.p.copy()
    t0, x_d, p_d = state.t, state.x_d, state.p_d
    v_d = p_d / det.M_d
    dynamic = mode == "dynamic"

    rec_t, rec_phi, rec_p, rec_xd, rec_pd = [], [], [], [], []

    def record(t):
        rec_t.append(t)
        rec_phi.append(phi.copy())
        rec_p.append(p.copy())
        rec_xd.append(x_d)
        rec_pd.append(p_d)

    record(t0)
    f_chain = _chain_forces(phi, x_sites, x_d, params)
    f_det = _detector_force(phi, x_sites, x_d, params) if dynamic else 0.0
    for step in range(1, steps + 1):
        p += 0.5 * dt * f_chain
        phi += dt * p / chain.m_c
        if dynamic:
            p_d += 0.5 * dt * f_det
            x_d += dt * p_d / det.M_d
        else:
            x_d = state.x_d + v_d * (step * dt)
        f_chain = _chain_forces(phi, x_sites, x_d, params)
        p += 0.5 * dt * f_chain
        if dynamic:
            f_det = _detector_force(phi, x_sites, x_d, params)
            p_d += 0.5 * dt * f_det
        if step % store_every == 0 or step == steps:
            record(t0 + step * dt)

    return ChainTrajectory(times=np.asarray(rec_t),
                           phi=np.asarray(rec_phi), p=np.asarray(rec_p),
                           x_d=np.asarray(rec_xd), p_d=np.asarray(rec_pd))
