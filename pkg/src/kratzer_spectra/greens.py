"""Green functions G(x, y; W) of the self-adjoint Hamiltonians."""

import math
from dataclasses import dataclass

from . import basis
from . import spectral
from .errors import DomainError, OnSpectrum

ON_SPECTRUM_TOL = 1e-10
# beyond |lambda| x> = DIRECT_Z the Omega P P + c C P sum cancels; use the decaying form
DIRECT_Z = 8.0


@dataclass(frozen=True)
class GreenSample:
    x: float
    y: float
    W: complex
    value: complex
    dx: complex  # d/dx of G at fixed y


def _check_off_spectrum(p, ext, W):
    if W.imag != 0.0 or W.real >= 0.0:
        return
    e = W.real
    window = (e * (1 + 1e-6), min(e * (1 - 1e-6), -1e-300))
    for lv in spectral.discrete_spectrum(p, ext, window, n_limit=50):
        if abs(e - lv.energy) < ON_SPECTRUM_TOL * abs(lv.energy):
            raise OnSpectrum(f"W = {e!r} coincides with the level E_{lv.n} = {lv.energy!r}")


def _decaying_form(p, ext, x, y, W, upper):
    # G = -P(x<) v1(x>) / Wr(P, v1); upper selects the x > y branch
    px, dpx = basis.solution_pair(basis.PRINCIPAL, p, ext, x, W)
    vx, dvx = basis.solution_pair(basis.V1, p, ext, x, W)
    py, dpy = basis.solution_pair(basis.PRINCIPAL, p, ext, y, W)
    vy, dvy = basis.solution_pair(basis.V1, p, ext, y, W)
    wr = py * dvy - dpy * vy
    if upper:
        return -py * vx / wr, -py * dvx / wr
    return -px * vy / wr, -dpx * vy / wr


def _display_form(p, ext, x, y, W, upper):
    # G = Omega P(x) P(y) + c C(x>) P(x<)
    omega = spectral.omega_norm(p, ext, W)
    c = spectral.green_prefactor(p)
    px, dpx = basis.solution_pair(basis.PRINCIPAL, p, ext, x, W)
    py = basis.solution_pair(basis.PRINCIPAL, p, ext, y, W)[0]
    if upper:
        cx, dcx = basis.solution_pair(basis.CONJUGATE, p, ext, x, W)
        return omega * px * py + c * cx * py, omega * dpx * py + c * dcx * py
    cy = basis.solution_pair(basis.CONJUGATE, p, ext, y, W)[0]
    return omega * px * py + c * cy * px, omega * dpx * py + c * cy * dpx


def green(p, ext, x, y, W, form="auto", upper=None):
    """G(x, y; W) with the jump d/dx G(y+0) - d/dx G(y-0) = -1.

    form: "display" (Omega-weighted Principal/Conjugate sum), "decaying"
    (Principal times the solution decaying at infinity) or "auto".
    R1 always uses u1(x<) v1(x>)/omega.  ``upper`` forces the x > y (True)
    or x < y (False) branch, which matters only at x = y.
    """
    ext = spectral._check_ext(p, ext)
    x, y = float(x), float(y)
    if not (x > 0 and y > 0):
        raise DomainError("Green function needs x, y > 0")
    W = complex(W)
    if W == 0:
        raise DomainError("W = 0 is the continuum threshold; no Green function sample")
    _check_off_spectrum(p, ext, W)
    if upper is None:
        upper = x >= y
    if form == "auto":
        z = abs(basis.branch_lambda(W)) * max(x, y)
        form = "decaying" if ext.range_id == "R1" or z > DIRECT_Z else "display"
    if form == "display":
        if ext.range_id == "R1":
            raise DomainError("R1 Green function is evaluated in decaying form only")
        value, dx = _display_form(p, ext, x, y, W, upper)
    elif form == "decaying":
        value, dx = _decaying_form(p, ext, x, y, W, upper)
    else:
        raise ValueError(f"unknown form {form!r}")
    return GreenSample(x, y, W, complex(value), complex(dx))


def derivative_jump(p, ext, y, W, form="auto"):
    """d/dx G(y+0, y) - d/dx G(y-0, y); equals -1."""
    up = green(p, ext, y, y, W, form, upper=True)
    dn = green(p, ext, y, y, W, form, upper=False)
    return up.dx - dn.dx


def _inverse_omega(p, ext, e):
    if ext.range_id == "R1":
        # G = u1 v1/omega: poles are the zeros of omega = Gamma(beta+)/Gamma(alpha+)
        mu = basis.mu_of(p)
        return basis.omega(p.g1, mu, basis.branch_lambda(e)).real
    try:
        return 1.0 / spectral.omega_norm(p, ext, e).real
    except ZeroDivisionError:
        return 0.0


def omega_poles(p, ext, window, n_limit=10):
    """Real negative poles of the Green function, refined from each discrete level's neighbourhood."""
    levels = spectral.discrete_spectrum(p, ext, window, n_limit)
    out = []
    for lv in levels:
        lo, hi = lv.energy * (1 + 1e-6), lv.energy * (1 - 1e-6)
        f_lo, f_hi = _inverse_omega(p, ext, lo), _inverse_omega(p, ext, hi)
        if (f_lo > 0) == (f_hi > 0):
            out.append(math.nan)
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= 1e-15 * abs(mid):
                break
            fm = _inverse_omega(p, ext, mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (f_lo > 0):
                lo, f_lo = mid, fm
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return out
