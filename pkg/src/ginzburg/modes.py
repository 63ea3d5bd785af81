"""Continuum normal modes of the free-ended chain and their detector couplings.

Frequencies and eigenfunctions (alpha = 1 .. N-1):

    Omega_alpha = 2 sqrt(k_c/m_c) sin(alpha pi a_c / 2L)
    u_alpha(x)  = sqrt(2/L) cos[alpha pi (x + L/2) / L]

In the long-wavelength regime (alpha pi a_c / 2L << 1) the wavenumber is
Omega_alpha / c_s and u_alpha may be written with that argument instead;
that variant sits behind the `longwave` flag.

The renormalized mode-detector coupling is

    g_alpha = -(g hbar Omega_alpha / (w^2 c_s^2))
              * sqrt(2 Omega_alpha / (rho_c L m_tilde_d omega_d))
              * f(Omega_alpha w / c_s),

negative for positive inputs; probabilities only ever use |g_alpha|.  Modes
with Omega_alpha w / c_s > y_max are truncated (default y_max = 10, where
f < 1e-3).

A detector moving at v > c_s resonates with the mode where

    v Omega_alpha / c_s = Omega_alpha + omega_d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModeCutoffError, ModeIndexError, SubsonicError, ValidationError
from .params import ChainParams, SystemParams
from .specfun import cutoff_f

DEFAULT_Y_MAX = 10.0


def _check_alpha(alpha, N):
    if not (isinstance(alpha, (int, np.integer)) and 1 <= alpha <= N - 1):
        raise ModeIndexError(f"mode index must be an integer in 1..{N - 1}, got {alpha!r}")


def mode_frequency(alpha, chain: ChainParams):
    """Omega_alpha from the exact sine dispersion (no small-angle shortcut)."""
    _check_alpha(alpha, chain.N)
    return 2.0 * math.sqrt(chain.k_c / chain.m_c) * math.sin(
        alpha * math.pi * chain.a_c / (2.0 * chain.L))


def mode_frequencies(chain: ChainParams, alphas=None):
    """Vectorized Omega_alpha for an array of indices (default all 1..N-1)."""
    if alphas is None:
        alphas = np.arange(1, chain.N)
    alphas = np.asarray(alphas)
    return 2.0 * math.sqrt(chain.k_c / chain.m_c) * np.sin(
        alphas * math.pi * chain.a_c / (2.0 * chain.L))


def mode_function(alpha, x, chain: ChainParams, longwave: bool = False):
    """Orthonormal eigenfunction u_alpha(x) on |x| <= L/2.

    longwave=True evaluates the wavenumber as Omega_alpha/c_s instead of
    alpha*pi/L (identical in the limit alpha*pi*a_c/2L -> 0).
    """
    _check_alpha(alpha, chain.N)
    L = chain.L
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > L / 2 * (1.0 + 1e-12)):
        raise ValidationError(f"position outside the chain [-L/2, L/2], L={L}")
    if longwave:
        k = mode_frequency(alpha, chain) / chain.c_s
    else:
        k = alpha * math.pi / L
    out = math.sqrt(2.0 / L) * np.cos(k * (x + L / 2.0))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ModeSpectrum:
    """Full spectrum plus the retained-mode mask after the cutoff."""

    alphas: np.ndarray     # 1..N-1
    omega: np.ndarray      # Omega_alpha
    retained: np.ndarray   # bool: Omega_alpha * w / c_s <= y_max
    y_max: float

    @property
    def retained_alphas(self) -> np.ndarray:
        return self.alphas[self.retained]


def mode_spectrum(params: SystemParams, y_max: float = DEFAULT_Y_MAX) -> ModeSpectrum:
    chain = params.chain
    alphas = np.arange(1, chain.N)
    omega = mode_frequencies(chain, alphas)
    y = omega * params.detector.w / chain.c_s
    return ModeSpectrum(alphas=alphas, omega=omega, retained=y <= y_max, y_max=y_max)


@dataclass(frozen=True)
class ModeCoupling:
    alpha: int
    g_alpha: float
    omega_d: float
    omega_alpha: float
    f_factor: float


def coupling_strengths(params: SystemParams, omega_d, alphas=None,
                       y_max: float = DEFAULT_Y_MAX) -> np.ndarray:
    """g_alpha for an index array, cutoff applied as a factor (no truncation).

    The cutoff enters only through f; indices past y_max still get their
    formula value here, so CSV emission can show the suppressed tail.
    """
    chain, det = params.chain, params.detector
    if omega_d <= 0:
        raise ValidationError(f"omega_d must be positive, got {omega_d}")
    omega = mode_frequencies(chain, alphas)
    c_s, w = chain.c_s, det.w
    pref = -(params.g * params.hbar * omega) / (w ** 2 * c_s ** 2)
    root = np.sqrt(2.0 * omega / (chain.rho_c * chain.L * det.m_tilde_d * omega_d))
    return pref * root * cutoff_f(omega * w / c_s)


def mode_coupling(alpha, params: SystemParams, omega_d,
                  y_max: float = DEFAULT_Y_MAX) -> ModeCoupling:
    """Signed coupling g_alpha for one retained mode.

    Raises ModeIndexError outside 1..N-1 and ModeCutoffError for valid
    indices truncated by the cutoff.
    """
    chain = params.chain
    _check_alpha(alpha, chain.N)
    omega = mode_frequency(alpha, chain)
    y = omega * params.detector.w / chain.c_s
    if y > y_max:
        raise ModeCutoffError(
            f"mode {alpha} truncated: Omega_alpha*w/c_s = {y:.4g} > y_max = {y_max}")
    g_alpha = float(coupling_strengths(params, omega_d, alphas=np.array([alpha]),
                                       y_max=y_max)[0])
    return ModeCoupling(alpha=int(alpha), g_alpha=g_alpha, omega_d=float(omega_d),
                        omega_alpha=omega, f_factor=float(cutoff_f(y)))


# -- resonance --------------------------------------------------------------

@dataclass(frozen=True)
class Resonance:
    alpha0: int
    detuning: float        # |v*Omega/c_s - Omega - omega_d| at alpha0, exact dispersion
    omega_star: float      # target frequency omega_d c_s / (v - c_s)
    alpha_linear: float    # continuous index from the linear dispersion map


def _detuning(alpha, v, omega_d, chain: ChainParams) -> float:
    om = mode_frequency(alpha, chain)
    return abs(v * om / chain.c_s - om - omega_d)


def resonance_mode(v, omega_d, params: SystemParams,
                   y_max: float = DEFAULT_Y_MAX) -> Resonance:
    """Mode index closest to the Ginzburg resonance v*Omega/c_s = Omega + omega_d.

    Solves Omega* = omega_d c_s/(v - c_s); the returned alpha0 minimizes the
    exact-dispersion detuning (floor/ceil of the arcsin-mapped continuous
    index are compared), which coincides with rounding the linear-map index
    Omega* L/(pi c_s) in the long-wavelength regime.
    """
    chain = params.chain
    if omega_d <= 0:
        raise ValidationError(f"omega_d must be positive, got {omega_d}")
    c_s = chain.c_s
    if v <= c_s:
        raise SubsonicError(
            f"subsonic: no Ginzburg resonance (v = {v:.6g} <= c_s = {c_s:.6g})")
    omega_star = omega_d * c_s / (v - c_s)
    alpha_linear = omega_star * chain.L / (math.pi * c_s)

    omega_top = 2.0 * math.sqrt(chain.k_c / chain.m_c)
    if omega_star >= omega_top:
        alpha_cont = float(chain.N - 1)
    else:
        alpha_cont = (2.0 * chain.L / (math.pi * chain.a_c)) * math.asin(
            omega_star / omega_top)
    candidates = {int(np.clip(f(alpha_cont), 1, chain.N - 1))
                  for f in (math.floor, math.ceil)}
    alpha0 = min(candidates, key=lambda a: _detuning(a, v, omega_d, chain))

    y = mode_frequency(alpha0, chain) * params.detector.w / c_s
    if y > y_max:
        raise ModeCutoffError(
            f"resonant mode {alpha0} lies past the cutoff (y = {y:.4g} > {y_max})")
    return Resonance(alpha0=alpha0, detuning=_detuning(alpha0, v, omega_d, chain),
                     omega_star=omega_star, alpha_linear=alpha_linear)


@dataclass(frozen=True)
class ResonancePair:
    alpha1: int
    alpha2: int
    detuning1: float
    detuning2: float
    # |v_i Omega/c_s - Omega - omega_dj| for the cross combinations (i != j),
    # evaluated at both in-play modes
    cross_detunings: dict
    # nearest retained mode to each cross combination and its detuning
    cross_nearest: dict
    guard_band: float
    selectivity_violated: bool
    degenerate_modes: bool


def resonance_pair(v1, v2, omega_d1, omega_d2, params: SystemParams,
                   guard_band: float | None = None,
                   y_max: float = DEFAULT_Y_MAX) -> ResonancePair:
    """Resonant indices for two branches plus cross-resonance diagnostics.

    Branch i pairs v_i with omega_di.  Selectivity requires that no retained
    chain mode sits within the guard band of either *cross* combination
    (v1 with omega_d2, v2 with omega_d1); the guard band defaults to
    20*max(|g_alpha1|, |g_alpha2|)/hbar, the margin at which the rotating
    wave approximation is comfortably valid.
    """
    chain = params.chain
    c_s = chain.c_s
    if not (c_s < v1 < v2):
        raise ValidationError(
            f"need c_s < v1 < v2, got c_s={c_s:.6g}, v1={v1:.6g}, v2={v2:.6g}")
    r1 = resonance_mode(v1, omega_d1, params, y_max=y_max)
    r2 = resonance_mode(v2, omega_d2, params, y_max=y_max)

    if guard_band is None:
        g1 = mode_coupling(r1.alpha0, params, omega_d1, y_max=y_max).g_alpha
        g2 = mode_coupling(r2.alpha0, params, omega_d2, y_max=y_max).g_alpha
        guard_band = 20.0 * max(abs(g1), abs(g2)) / params.hbar

    cross_nearest = {}
    spectrum = mode_spectrum(params, y_max=y_max)
    retained = spectrum.alphas[spectrum.retained]
    omega_ret = spectrum.omega[spectrum.retained]
    violated = False
    cross_detunings = {
        "v1_omega_d2_at_alpha1": _detuning(r1.alpha0, v1, omega_d2, chain),
        "v1_omega_d2_at_alpha2": _detuning(r2.alpha0, v1, omega_d2, chain),
        "v2_omega_d1_at_alpha1": _detuning(r1.alpha0, v2, omega_d1, chain),
        "v2_omega_d1_at_alpha2": _detuning(r2.alpha0, v2, omega_d1, chain),
    }
    for tag, v, om_d in (("v1_omega_d2", v1, omega_d2), ("v2_omega_d1", v2, omega_d1)):
        det_all = np.abs(v * omega_ret / c_s - omega_ret - om_d)
        j = int(det_all.argmin())
        cross_nearest[tag] = {"alpha": int(retained[j]), "detuning": float(det_all[j])}
        if det_all[j] < guard_band:
            violated = True

    return ResonancePair(
        alpha1=r1.alpha0, alpha2=r2.alpha0,
        detuning1=r1.detuning, detuning2=r2.detuning,
        cross_detunings=cross_detunings, cross_nearest=cross_nearest,
        guard_band=float(guard_band), selectivity_violated=violated,
        degenerate_modes=r1.alpha0 == r2.alpha0)
