"""Closed-form-independent checks: ODE shooting from Frobenius seeds and quadrature.

Nothing here calls the special-function or basis modules.  Seeds at small x are
power series of psi'' = (g1/x + g2/x^2 - W) psi summed directly, the decaying
solution at large x is its asymptotic series, and integration uses scipy.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .errors import DomainError, NonConvergence, StepFailure

EULER = 0.5772156649015329


@dataclass(frozen=True)
class ShootingConfig:
    """Integration geometry and tolerances; None lengths are picked per energy."""

    x_start: float = None
    x_match: float = None
    x_far: float = None
    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_steps: int = 200000
    n_scan: int = 120

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            t = getattr(self, name)
            if not 0 < t <= 1e-4:
                raise ValueError(f"{name} must lie in (0, 1e-4]")
        xs = [v for v in (self.x_start, self.x_match, self.x_far) if v is not None]
        if any(v <= 0 for v in xs) or xs != sorted(xs) or len(set(xs)) != len(xs):
            raise ValueError("need 0 < x_start < x_match < x_far")


@dataclass(frozen=True)
class SampledSolution:
    xs: tuple
    values: tuple
    derivatives: tuple


# ---------------------------------------------------------------------------
# series seeds


def _power_series(g1, W, s, x, tol=1e-18, k_max=400):
    """x^s sum c_k x^k with c_0 = 1; returns (value, derivative, coefficients)."""
    coeffs = [1.0 + 0j]
    val = 1.0 + 0j
    der = s + 0j
    c_prev2, c_prev = 0j, 1.0 + 0j
    xk = 1.0
    for k in range(1, k_max):
        c = (g1 * c_prev - W * c_prev2) / (k * (2 * s + k - 1))
        coeffs.append(c)
        xk *= x
        val += c * xk
        der += c * (s + k) * xk
        c_prev2, c_prev = c_prev, c
        if k > 3 and abs(c * xk) < tol * abs(val) and abs(c_prev2 * xk / x) < tol * abs(val):
            break
    else:
        raise NonConvergence("Frobenius series did not converge at the seed point")
    xs = x ** s
    return xs * val, xs * der / x, coeffs


def _log_series_r3(g1, W, k0, x, tol=1e-18, k_max=400):
    """u3 = ln(k0 x) y1 + x^{1/2} sum d_k x^k, d_0 = 0, with y1 the s = 1/2 series."""
    y, dy, c = _power_series(g1, W, 0.5, x, tol, k_max)
    d = [0j]
    h, dh = 0j, 0j
    xk = 1.0
    for k in range(1, k_max):
        cm = c[k] if k < len(c) else 0j
        dm2 = d[k - 2] if k >= 2 else 0j
        dk = (g1 * d[k - 1] - W * dm2 - 2 * k * cm) / (k * k)
        d.append(dk)
        xk *= x
        h += dk * xk
        dh += dk * (k + 0.5) * xk
        if k > 3 and abs(dk * xk) < tol * (abs(h) + abs(y)) and k >= len(c) - 1:
            break
    sq = math.sqrt(x)
    h, dh = sq * h, sq * dh / x
    lg = math.log(k0 * x)
    return lg * y + h, lg * dy + y / x + dh


def _log_series_r5(g1, W, k0, x, tol=1e-18, k_max=400):
    """u5 = sum e_k x^k + g1 ln(x) y1, e_0 = 1, e_1 = g1 (ln k0 + C)."""
    y, dy, c = _power_series(g1, W, 1.0, x, tol, k_max)
    e = [1.0 + 0j, g1 * (math.log(k0) + EULER) + 0j]
    a = e[0] + e[1] * x
    da = e[1]
    xk = x
    for k in range(2, k_max):
        cm = c[k - 1] if k - 1 < len(c) else 0j
        ek = (g1 * e[k - 1] - W * e[k - 2] - g1 * (2 * k - 1) * cm) / (k * (k - 1))
        e.append(ek)
        da += ek * k * xk
        xk *= x
        a += ek * xk
        if k > 3 and abs(ek * xk) < tol * abs(a) and k >= len(c):
            break
    lx = math.log(x)
    return a + g1 * lx * y, da + g1 * (y / x + lx * dy)


def principal_seed(p, ext, W, x):
    """Value and derivative of the extension's Principal solution near the origin.

    Built from the boundary form of each range: the a.b. coefficients of the
    Principal solution are (sin, cos) of the extension angle (R2, R3, R5) or
    the phases e^{+-i theta} (R4).
    """
    rid = ext.range_id
    g1, g2, k0 = p.g1, p.g2, p.k0
    W = complex(W)
    if rid == "R1":
        mu = math.sqrt(g2 + 0.25)
        v, d, _ = _power_series(g1, W, 0.5 + mu, x)
        return v, d
    s, c = (1.0, 0.0) if ext.is_endpoint else (math.sin(ext.angle), math.cos(ext.angle))
    if rid == "R2":
        mu = math.sqrt(g2 + 0.25)
        v1, d1, _ = _power_series(g1, W, 0.5 + mu, x)
        v2, d2, _ = _power_series(g1, W, 0.5 - mu, x)
        a1, a2 = s * k0 ** (0.5 + mu), c * k0 ** (0.5 - mu)
        return a1 * v1 + a2 * v2, a1 * d1 + a2 * d2
    if rid == "R3":
        v1, d1, _ = _power_series(g1, W, 0.5, x)
        v3, d3 = _log_series_r3(g1, W, k0, x)
        return s * v1 + c * v3, s * d1 + c * d3
    if rid == "R5":
        v1, d1, _ = _power_series(g1, W, 1.0, x)
        v5, d5 = _log_series_r5(g1, W, k0, x)
        return s * k0 * v1 + c * v5, s * k0 * d1 + c * d5
    # R4: e^{i theta} k0^{1/2+i kappa} u1 + conjugate partner
    kappa = math.sqrt(-g2 - 0.25)
    vp, dp, _ = _power_series(g1, W, complex(0.5, kappa), x)
    vm, dm, _ = _power_series(g1, W, complex(0.5, -kappa), x)
    ap = cmath.exp(1j * ext.angle) * k0 ** complex(0.5, kappa)
    am = cmath.exp(-1j * ext.angle) * k0 ** complex(0.5, -kappa)
    return ap * vp + am * vm, ap * dp + am * dm


def decaying_seed(p, E, x, n_terms=60):
    """e^{-tau x} x^rho sum b_k x^{-k} (E < 0), asymptotic; returns (value, derivative).

    When the first correction is not small (weak binding, g1 > 0) the
    log-derivative comes from first-order WKB instead; inward integration
    damps the growing admixture such a seed carries.
    """
    tau = math.sqrt(-E)
    rho = -p.g1 / (2 * tau)
    env = math.exp(-tau * x) * x ** rho
    b = 1.0
    val, der = 1.0, 0.0
    best = math.inf
    for k in range(1, n_terms):
        b *= (p.g2 - (rho - k + 1) * (rho - k)) / (2 * tau * k)
        t = b * x ** (-k)
        if k == 1 and abs(t) > 0.1:
            q = p.g1 / x + p.g2 / x ** 2 - E
            dq = -p.g1 / x ** 2 - 2 * p.g2 / x ** 3
            return env, env * (-math.sqrt(q) - dq / (4 * q))
        if abs(t) > best:
            break  # asymptotic series started to diverge
        best = abs(t)
        val += t
        der += -k * t / x
        if abs(t) < 1e-17 * abs(val):
            break
    return env * val, env * (der + (rho / x - tau) * val)


# ---------------------------------------------------------------------------
# integration in t = ln x with y1 = psi, y2 = x psi'


def _rhs(g1, g2, W):
    def f(t, y):
        x = math.exp(t)
        return [y[1], y[1] + (g1 * x + g2 - W * x * x) * y[0]]
    return f


def _integrate(p, W, x0, v0, d0, x1, cfg, t_eval=None):
    y0 = [v0, x0 * d0]
    if isinstance(v0, complex) or isinstance(d0, complex):
        y0 = np.array(y0, dtype=complex)
    sol = solve_ivp(_rhs(p.g1, p.g2, W), (math.log(x0), math.log(x1)), y0,
                    method="DOP853", rtol=cfg.rel_tol, atol=cfg.abs_tol, t_eval=t_eval)
    if not sol.success:
        raise StepFailure(sol.message)
    return sol


def _geometry(p, E, cfg):
    """(x_start, x_match, x_far) for a real negative energy."""
    tau = math.sqrt(-E)
    x_start = cfg.x_start if cfg.x_start is not None else 1e-4 / max(p.k0, tau, abs(p.g1))
    if cfg.x_match is not None:
        x_match = cfg.x_match
    else:
        # outer classical turning point of g1/x + g2/x^2 = E, else the decay length
        disc = p.g1 ** 2 - 4 * tau * tau * p.g2
        x_tp = (-p.g1 + math.sqrt(disc)) / (2 * tau * tau) if disc >= 0 else 0.0
        x_match = max(x_tp, 1.0 / tau, 10 * x_start)
    x_far = cfg.x_far if cfg.x_far is not None else x_match + 40.0 / tau
    return x_start, x_match, x_far


def integrate_solution(p, ext, W, cfg=ShootingConfig(), xs=None):
    """Integrate the Principal solution outward from its series seed.

    Samples at ``xs`` (default: 50 log-spaced points up to x_far).
    """
    W = complex(W)
    if W.imag == 0 and W.real < 0:
        x_start, _, x_far = _geometry(p, W.real, cfg)
    else:
        x_start = cfg.x_start if cfg.x_start is not None else 1e-4 / p.k0
        x_far = cfg.x_far if cfg.x_far is not None else 20.0
    if xs is None:
        xs = np.geomspace(10 * x_start, x_far, 50)
    xs = np.asarray(sorted(float(x) for x in xs))
    if xs[0] < x_start:
        raise DomainError(f"sample point {xs[0]!r} below x_start = {x_start!r}")
    v0, d0 = principal_seed(p, ext, W, x_start)
    if W.imag == 0:
        W = W.real
        v0, d0 = v0.real, d0.real
    sol = _integrate(p, W, x_start, v0, d0, xs[-1] * (1 + 1e-12), cfg, np.log(xs))
    vals = sol.y[0]
    ders = sol.y[1] / xs
    return SampledSolution(tuple(xs), tuple(vals), tuple(ders))


def _wronskian_mismatch(p, ext, E, cfg):
    x_start, x_match, x_far = _geometry(p, E, cfg)
    v0, d0 = principal_seed(p, ext, E, x_start)
    out = _integrate(p, E, x_start, v0.real, d0.real, x_match, cfg)
    u, xu = out.y[0][-1], out.y[1][-1]
    vf, df = decaying_seed(p, E, x_far)
    inn = _integrate(p, E, x_far, vf, df, x_match, cfg)
    w, xw = inn.y[0][-1], inn.y[1][-1]
    return (u * xw - xu * w) / (math.hypot(u, xu) * math.hypot(w, xw))


def shoot_eigenvalues(p, ext, window, cfg=ShootingConfig()):
    """Energies in window = (E_min, E_max), E_max < 0, where the origin and infinity solutions match."""
    e_min, e_max = float(window[0]), float(window[1])
    if not e_min < e_max < 0:
        raise ValueError("shooting window must satisfy E_min < E_max < 0")
    grid = -np.geomspace(-e_min, -e_max, cfg.n_scan)
    f = lambda e: _wronskian_mismatch(p, ext, e, cfg)
    vals = [f(e) for e in grid]
    roots = []
    for (a, fa), (b, fb) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if fa == 0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-15 * abs(a), rtol=1e-14, maxiter=200))
    if vals[-1] == 0:
        roots.append(float(grid[-1]))
    return sorted(roots)


def shoot_near(p, ext, guess, rel_width=1e-3, cfg=ShootingConfig()):
    """Refine one level in guess*(1 +- rel_width) by shooting."""
    a, b = guess * (1 + rel_width), guess * (1 - rel_width)
    f = lambda e: _wronskian_mismatch(p, ext, e, cfg)
    fa, fb = f(a), f(b)
    if fa * fb > 0:
        raise NonConvergence(f"no shooting sign change around {guess!r}")
    return brentq(f, a, b, xtol=1e-15 * abs(guess), rtol=1e-14, maxiter=200)


# ---------------------------------------------------------------------------
# quadrature


def quad_inner_product(fn_a, fn_b, domain=(0.0, math.inf), tol=1e-10, breakpoints=()):
    """Integral of fn_a * fn_b over domain, split on a log grid.

    The piece [0, x_lo] below the first breakpoint is dropped; its size is
    bounded by x_lo |f(x_lo)| for integrands vanishing at the origin and is
    added to the error estimate.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if tol < 1e-10:
        raise ValueError("tol must be >= 1e-10")
    f = lambda x: fn_a(x) * fn_b(x)
    edges = sorted({float(b) for b in breakpoints if lo < b < hi})
    total, err = 0.0, 0.0
    if lo == 0.0:
        x_lo = 1e-12 if not edges else min(1e-12, edges[0] * 1e-3)
        err += abs(f(x_lo)) * x_lo
        pts = [x_lo]
        top = edges[0] if edges else (1.0 if hi > 1.0 else hi)
        pts += list(np.geomspace(x_lo, top, 13)[1:])
        edges = pts + [e for e in edges if e > top]
    else:
        edges = [lo] + edges
    if math.isfinite(hi) and edges[-1] < hi:
        edges.append(hi)
    for a, b in zip(edges, edges[1:]):
        v, e = quad(f, a, b, limit=500, epsabs=tol * 1e-2, epsrel=tol)
        total += v
        err += e
    if not math.isfinite(hi):
        v, e = quad(f, edges[-1], math.inf, limit=500, epsabs=tol * 1e-2, epsrel=tol)
        total += v
        err += e
    if err > max(tol, tol * abs(total)) * 100:
        raise NonConvergence(f"quadrature error estimate {err:.3g} exceeds tolerance {tol:.3g}")
    return total
