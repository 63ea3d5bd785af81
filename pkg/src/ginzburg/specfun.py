"""Interaction-kernel special functions.

The chain sees the detector through the kernel

    h(x, x_d) = [(x - x_d)^2 + w^2]^(-3/2),

whose width is the chain-detector distance w and whose curvature drives the
dipoles.  Mode couplings are damped by the cutoff f(y) = y*K1(y) with
y = Omega_alpha w / c_s, where K1 is the modified Bessel function of the
second kind; f(0) = 1 and f falls past y ~ 1, filtering modes with
wavelength shorter than w.
"""

from __future__ import annotations

import numpy as np
from scipy.special import k1 as _scipy_k1

from .errors import ValidationError


def kernel_h(x, x_d, w):
    """h(x, x_d) = [(x - x_d)^2 + w^2]^(-3/2); peak w^-3 at x = x_d."""
    if w <= 0:
        raise ValidationError(f"w must be positive, got {w}")
    s = np.asarray(x, dtype=float) - x_d
    return (s * s + w * w) ** -1.5


def kernel_h_deriv(order, x, x_d, w):
    """Closed-form d^k/dx^k of kernel_h for k in {1, 2, 3}.

    With s = x - x_d and r2 = s^2 + w^2:
        h'   = -3 s r2^(-5/2)
        h''  =  3 (4 s^2 - w^2) r2^(-7/2)      (h''(x_d) = -3 w^-5)
        h''' = 15 s (3 w^2 - 4 s^2) r2^(-9/2)
    """
    if w <= 0:
        raise ValidationError(f"w must be positive, got {w}")
    if order not in (1, 2, 3):
        raise ValidationError(f"derivative order must be 1, 2 or 3, got {order}")
    s = np.asarray(x, dtype=float) - x_d
    r2 = s * s + w * w
    if order == 1:
        return -3.0 * s * r2 ** -2.5
    if order == 2:
        return 3.0 * (4.0 * s * s - w * w) * r2 ** -3.5
    return 15.0 * s * (3.0 * w * w - 4.0 * s * s) * r2 ** -4.5


def bessel_k1(y):
    """Modified Bessel function K1(y) for y > 0.

    Delegates to scipy.special.k1 (Cephes: Chebyshev series with log term
    below y = 2, scaled asymptotic-form series above), which holds full
    double-precision relative accuracy across the needed range, including
    the exponentially small tail (K1(30) ~ 2e-14).
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValidationError("bessel_k1 requires y > 0")
    out = _scipy_k1(y)
    return out if out.ndim else float(out)


def cutoff_f(y):
    """Coupling cutoff f(y) = y * K1(y) for y >= 0.

    f(0) = 1 by continuous extension (hard-coded, no quadrature at 0);
    strictly decreasing; -> 0 as y -> infinity.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValidationError("cutoff_f requires y >= 0")
    # below ~1e-9 the correction y^2/2*(ln(y/2)+gamma-1/2) is sub-ulp, and
    # K1 itself overflows near the subnormal range; use the limit value
    small = y <= 1e-9
    safe = np.where(small, 1.0, y)
    out = np.where(small, 1.0, safe * _scipy_k1(safe))
    return out if out.ndim else float(out)
