"""Solution bases of psi'' - (g1/x + g2/x^2 - W) psi = 0 for all five coupling ranges.

Conventions: z = lambda x with lambda = 2 sqrt|W| exp(i(phi - pi)/2), W = |W| e^{i phi},
0 <= phi < 2 pi.  Every solution is returned together with its x-derivative,
computed from the analytic derivative of the underlying series.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import special_fns as sf
from .errors import DomainError, IllConditioned, InvalidSolution
from .model import ExtensionParam, classify

EULER = sf.EULER_GAMMA
VM_SWITCH = 1e-3           # |2 mu - m| below which v_(m) is interpolated in mu
_VM_NODES = (-4e-3, -2e-3, 2e-3, 4e-3)


@dataclass(frozen=True)
class SolutionId:
    """Names a solution: U1, U2, U3, U5, V1, Vm (with m), Principal or Conjugate."""

    tag: str
    m: int = None

    def __post_init__(self):
        if self.tag not in ("U1", "U2", "U3", "U5", "V1", "Vm", "Principal", "Conjugate"):
            raise InvalidSolution(f"unknown solution tag {self.tag!r}")
        if (self.tag == "Vm") != (self.m is not None):
            raise InvalidSolution("Vm needs an integer m; other tags take none")


U1 = SolutionId("U1")
U2 = SolutionId("U2")
U3 = SolutionId("U3")
U5 = SolutionId("U5")
V1 = SolutionId("V1")
PRINCIPAL = SolutionId("Principal")
CONJUGATE = SolutionId("Conjugate")


def Vm(m):
    return SolutionId("Vm", int(m))


@dataclass(frozen=True)
class SolutionSample:
    value: complex
    derivative: complex
    x: float
    W: complex


def branch_lambda(W):
    """lambda = 2 sqrt|W| exp(i(phi - pi)/2) with phi = arg W taken in [0, 2 pi)."""
    W = complex(W)
    if W == 0:
        return 0j
    if W.imag == 0.0:
        phi = 0.0 if W.real > 0 else math.pi
    else:
        phi = cmath.phase(W)
        if phi < 0.0:
            phi += 2.0 * math.pi
    return 2.0 * math.sqrt(abs(W)) * cmath.exp(0.5j * (phi - math.pi))


def mu_of(p):
    return classify(p).mu.value


# ---------------------------------------------------------------------------
# primitive solutions; each returns (value, derivative)


def _frobenius_hyper(s, a, b, lam, x, ctl):
    """x^s e^{-z/2} Phi(a, b; z) and its x-derivative."""
    z = lam * x
    w, dw = sf._phi_pair(a, b, z, ctl)
    pref = sf._safe_exp(s * math.log(x) - 0.5 * z, "solution prefactor")
    value = pref * w
    deriv = pref * ((s / x - 0.5 * lam) * w + lam * dw)
    return value, deriv


def _zero_energy_0f1(s, b, g1, x, ctl):
    """x^s 0F1(; b; g1 x): the W -> 0 limit of x^s e^{-z/2} Phi(s + g1/lambda, b; z)."""
    t = g1 * x
    term = 1 + 0j
    total = 1 + 0j
    dtotal = 0j
    for k in range(ctl.max_terms):
        term *= t / ((b + k) * (k + 1))
        total += term
        dtotal += (k + 1) * term
        if abs(term) < 1e-17 * abs(total) and k > 2:
            break
    xs = x ** s
    return xs * total, xs * (s * total + dtotal) / x


def _u1_mu(g1, mu, lam, x, ctl):
    if lam == 0:
        return _zero_energy_0f1(0.5 + mu, 1 + 2 * mu, g1, x, ctl)
    return _frobenius_hyper(0.5 + mu, 0.5 + mu + g1 / lam, 1 + 2 * mu, lam, x, ctl)


def _v1_mu(g1, mu, lam, x, ctl):
    if lam == 0:
        raise DomainError("v1 is not defined at W = 0")
    z = lam * x
    a = 0.5 + mu + g1 / lam
    b = 1 + 2 * mu
    w, dw = sf._psi_pair(a, b, z, ctl)
    s = 0.5 + mu
    pref = sf._safe_exp(2 * mu * cmath.log(lam) + s * math.log(x) - 0.5 * z, "v1 prefactor")
    return pref * w, pref * ((s / x - 0.5 * lam) * w + lam * dw)


def _check_u2(mu):
    b = 1 - 2 * mu
    if mu == 0 or sf.is_nonpositive_integer(b):
        raise InvalidSolution(f"u2 is undefined for 2 mu = {2 * mu.real:g}")


def omega(g1, mu, lam):
    """omega(W) = Gamma(beta+)/Gamma(alpha+), so that Wr(u1, v1) = -omega."""
    return sf.gamma_ratio([1 + 2 * mu], [0.5 + mu + g1 / lam])


def a_m_coefficient(m, g1, lam):
    """a_m = lambda^m Gamma(alpha_{+m})/(m! Gamma(alpha_{-m})), a polynomial in lambda."""
    out = 1 + 0j
    for j in range(m):
        out *= g1 + lam * (0.5 * (1 - m) + j)
    return out / math.factorial(m)


def _vm_raw(m, g1, mu, lam, x, ctl):
    u2 = _u1_mu(g1, -mu, lam, x, ctl)
    u1 = _u1_mu(g1, mu, lam, x, ctl)
    c = a_m_coefficient(m, g1, lam) * sf.gamma(1 - 2 * mu)
    return u2[0] - c * u1[0], u2[1] - c * u1[1]


def _vm_mu(m, g1, mu, lam, x, ctl):
    mu = complex(mu)
    if not (m >= 2 and m - 1 < 2 * mu.real < m + 1 and mu.imag == 0):
        raise InvalidSolution(f"v_(m) needs m - 1 < 2 mu < m + 1 with m >= 2 (m={m})")
    offset = 2 * mu.real - m
    if abs(offset) >= VM_SWITCH:
        return _vm_raw(m, g1, mu, lam, x, ctl)
    # removable singularity at 2 mu = m: cubic interpolation in mu
    centre = 0.5 * m
    nodes = [centre + d for d in _VM_NODES]
    vals = [_vm_raw(m, g1, complex(n), lam, x, ctl) for n in nodes]
    target = mu.real
    value = 0j
    deriv = 0j
    for i, ni in enumerate(nodes):
        weight = 1.0
        for j, nj in enumerate(nodes):
            if j != i:
                weight *= (target - nj) / (ni - nj)
        value += weight * vals[i][0]
        deriv += weight * vals[i][1]
    return value, deriv


def _u3_series(g1, lam, x, k0, ctl):
    z = lam * x
    g = g1 / lam
    phi, dphi = sf._phi_pair(0.5 + g, 1.0, z, ctl)
    s, ds = sf._phi_mu_derivative_series(g, z, ctl)
    log_kx = math.log(k0 * x)
    inner = log_kx * phi + s
    dinner = phi / x + lam * (log_kx * dphi + ds)
    pref = sf._safe_exp(0.5 * math.log(x) - 0.5 * z, "u3 prefactor")
    return pref * inner, pref * ((0.5 / x - 0.5 * lam) * inner + dinner)


def _near_pole(a, tol=1e-3):
    a = complex(a)
    return abs(a.imag) < tol and a.real < tol and abs(a.real - round(a.real)) < tol


def _u3(g1, lam, x, k0, ctl):
    if lam == 0:
        t = g1 * x
        term = 1.0
        harm = 0.0
        f0 = 0j
        df0 = 0j
        h = 0j
        dh = 0j
        for k in range(ctl.max_terms):
            if k > 0:
                term *= t / (k * k)
                harm += 1.0 / k
            f0 += term
            h += harm * term
            df0 += k * term / x
            dh += harm * k * term / x
            if k > 3 and abs(term) < 1e-17 * abs(f0):
                break
        log_kx = math.log(k0 * x)
        inner = log_kx * f0 - 2 * h
        dinner = f0 / x + log_kx * df0 - 2 * dh
        xs = math.sqrt(x)
        return xs * inner, xs * (0.5 * inner / x + dinner)
    z = lam * x
    alpha = 0.5 + g1 / lam
    risky = abs(z) > sf.SERIES_RADIUS and (abs(cmath.phase(z)) > math.pi / 4 or abs(z) > 40.0)
    if risky and not _near_pole(alpha):
        # u3 = omega0 u1 - Gamma(alpha) v1 avoids the cancelling Taylor series
        w0 = 2 * sf.digamma(1) - sf.digamma(alpha) - cmath.log(lam / k0)
        u1 = _u1_mu(g1, 0j, lam, x, ctl)
        v1 = _v1_mu(g1, 0j, lam, x, ctl)
        ga = sf.gamma(alpha)
        return w0 * u1[0] - ga * v1[0], w0 * u1[1] - ga * v1[1]
    return _u3_series(g1, lam, x, k0, ctl)


def _u5_remainder(g1, lam, a, z, ctl):
    """R(z) = sum_k z^k [c_k (g1 (1 + C - H_k - H_{k+1}) + lambda/2) + g1 d_k] and R'(z)."""
    tiny = ctl.rel_tol * 1e-4
    poch = 1 + 0j          # (a)_k
    dpoch = 0j             # d/da (a)_k
    denom = 1.0            # (2)_k k!
    harm_k = 0.0
    harm_k1 = 1.0
    zk = 1 + 0j
    total = 0j
    dtotal = 0j
    for k in range(ctl.max_terms):
        ck = poch / denom
        dk = dpoch / denom
        coef = ck * (g1 * (1.0 + EULER - harm_k - harm_k1) + 0.5 * lam) + g1 * dk
        term = coef * zk
        total += term
        if k > 0:
            dtotal += k * term / z
        if k > 2 and abs(term) <= tiny * max(abs(total), 1e-300) and \
                abs((a + k) * z) < (k + 2) * (k + 1):
            break
        dpoch = dpoch * (a + k) + poch
        poch *= a + k
        denom *= (k + 2) * (k + 1)
        harm_k += 1.0 / (k + 1)
        harm_k1 += 1.0 / (k + 2)
        zk *= z
    else:
        raise sf.NonConvergence("u5 series did not converge")
    return total, dtotal


def _u5_series(g1, lam, x, k0, ctl):
    z = lam * x
    a = 1 + g1 / lam
    phi, dphi = sf._phi_pair(a, 2.0, z, ctl)
    r, dr = _u5_remainder(g1, lam, a, z, ctl)
    log_kx = math.log(k0 * x)
    t = g1 * log_kx * phi + r
    dt = g1 * phi / x + g1 * log_kx * lam * dphi + lam * dr
    ez = sf._safe_exp(-0.5 * z, "u5 prefactor")
    inner = 1.0 + x * t
    value = ez * inner
    deriv = -0.5 * lam * value + ez * (t + x * dt)
    return value, deriv


def _u5(g1, lam, x, k0, ctl):
    if lam == 0:
        t = g1 * x
        term = 1.0
        harm_k = 0.0
        harm_k1 = 1.0
        log_kx = math.log(k0 * x)
        s = 0j
        ds = 0j
        for k in range(ctl.max_terms):
            if k > 0:
                term *= t / ((k + 1) * k)
                harm_k += 1.0 / k
                harm_k1 += 1.0 / (k + 1)
            c = g1 * (log_kx + 1.0 + EULER - harm_k - harm_k1)
            s += term * c
            ds += term * (k * c / x + g1 / x)
            if k > 3 and abs(term) < 1e-17:
                break
        return 1.0 + x * s, s + x * ds
    z = lam * x
    a = 1 + g1 / lam
    risky = abs(z) > sf.SERIES_RADIUS and (abs(cmath.phase(z)) > math.pi / 4 or abs(z) > 40.0)
    if risky and not _near_pole(a):
        w12 = omega_half(g1, lam, k0)
        u1 = _u1_mu(g1, 0.5 + 0j, lam, x, ctl)
        v1 = _v1_mu(g1, 0.5 + 0j, lam, x, ctl)
        ga = sf.gamma(a)
        return ga * v1[0] - w12 * u1[0], ga * v1[1] - w12 * u1[1]
    return _u5_series(g1, lam, x, k0, ctl)


def omega_zero(g1, lam, k0):
    """omega_0 = 2 psi(1) - psi(alpha) - ln(lambda/k0), range 3."""
    return 2 * sf.digamma(1) - sf.digamma(0.5 + g1 / lam) - cmath.log(lam / k0)


def omega_half(g1, lam, k0):
    """omega_{1/2} = g1 C + g1 [psi(alpha_{1/2}) + ln(lambda/k0)] - g1 - lambda/2, range 5."""
    a = 1 + g1 / lam
    return g1 * EULER + g1 * (sf.digamma(a) + cmath.log(lam / k0)) - g1 - 0.5 * lam


# ---------------------------------------------------------------------------
# public evaluation


def _range_of(p):
    return classify(p).range_id


def _ext_for(p, ext):
    rid = _range_of(p)
    if ext is None:
        if rid == "R1":
            return ExtensionParam("R1")
        raise InvalidSolution(f"{rid} needs an extension angle for this solution")
    if ext.range_id != rid:
        raise InvalidSolution(f"extension for {ext.range_id} used with couplings in {rid}")
    return ext


def _default_m(mu):
    m = int(round(2 * mu.real))
    return max(m, 2)


def _principal_pair(p, ext, x, W, ctl, conjugate=False):
    rid = _range_of(p)
    ext = _ext_for(p, ext)
    mu = mu_of(p)
    lam = branch_lambda(W)
    g1, k0 = p.g1, p.k0
    if rid == "R1":
        if conjugate:
            return _vm_mu(_default_m(mu), g1, mu, lam, x, ctl)
        return _u1_mu(g1, mu, lam, x, ctl)
    angle = ext.angle
    s, c = math.sin(angle), math.cos(angle)
    if ext.is_endpoint:
        s, c = 1.0, 0.0
    if rid == "R2":
        u1 = _u1_mu(g1, mu, lam, x, ctl)
        u2 = _u1_mu(g1, -mu, lam, x, ctl)
        ka = k0 ** (0.5 + mu.real)
        kb = k0 ** (0.5 - mu.real)
        if conjugate:
            return -ka * c * u1[0] + kb * s * u2[0], -ka * c * u1[1] + kb * s * u2[1]
        return ka * s * u1[0] + kb * c * u2[0], ka * s * u1[1] + kb * c * u2[1]
    if rid == "R3":
        u1 = _u1_mu(g1, 0j, lam, x, ctl)
        u3 = _u3(g1, lam, x, k0, ctl) if (c != 0.0 or conjugate) else (0j, 0j)
        if conjugate:
            return c * u1[0] - s * u3[0], c * u1[1] - s * u3[1]
        return s * u1[0] + c * u3[0], s * u1[1] + c * u3[1]
    if rid == "R4":
        u1 = _u1_mu(g1, mu, lam, x, ctl)
        u2 = _u1_mu(g1, -mu, lam, x, ctl)
        kappa = mu.imag
        ka = cmath.exp((0.5 + 1j * kappa) * math.log(k0) + 1j * angle)
        kb = cmath.exp((0.5 - 1j * kappa) * math.log(k0) - 1j * angle)
        if conjugate:
            return 1j * (kb * u2[0] - ka * u1[0]), 1j * (kb * u2[1] - ka * u1[1])
        return ka * u1[0] + kb * u2[0], ka * u1[1] + kb * u2[1]
    # R5
    u1 = _u1_mu(g1, 0.5 + 0j, lam, x, ctl)
    u5 = _u5(g1, lam, x, k0, ctl) if (c != 0.0 or conjugate) else (0j, 0j)
    if conjugate:
        return k0 * c * u1[0] - s * u5[0], k0 * c * u1[1] - s * u5[1]
    return k0 * s * u1[0] + c * u5[0], k0 * s * u1[1] + c * u5[1]


def solution_pair(sid, p, ext, x, W, ctl=sf.DEFAULT_CONTROL):
    """(value, x-derivative) of the solution named by ``sid``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"solutions are defined for x > 0, got {x}")
    W = complex(W)
    rid = _range_of(p)
    mu = mu_of(p)
    lam = branch_lambda(W)
    tag = sid.tag
    if tag == "U1":
        return _u1_mu(p.g1, mu, lam, x, ctl)
    if tag == "U2":
        _check_u2(mu)
        return _u1_mu(p.g1, -mu, lam, x, ctl)
    if tag == "U3":
        if rid != "R3":
            raise InvalidSolution("u3 exists only in range R3 (g2 = -1/4)")
        return _u3(p.g1, lam, x, p.k0, ctl)
    if tag == "U5":
        if rid != "R5":
            raise InvalidSolution("u5 exists only in range R5 (g2 = 0)")
        return _u5(p.g1, lam, x, p.k0, ctl)
    if tag == "V1":
        return _v1_mu(p.g1, mu, lam, x, ctl)
    if tag == "Vm":
        return _vm_mu(sid.m, p.g1, mu, lam, x, ctl)
    return _principal_pair(p, ext, x, W, ctl, conjugate=(tag == "Conjugate"))


def eval_solution(sid, p, ext, x, W, ctl=sf.DEFAULT_CONTROL):
    """Evaluate a named solution and its derivative at (x; W)."""
    value, deriv = solution_pair(sid, p, ext, x, W, ctl)
    return SolutionSample(sf._finite(complex(value), "solution"),
                          sf._finite(complex(deriv), "solution derivative"), float(x), complex(W))


def eval_vm(m, p, x, W, ctl=sf.DEFAULT_CONTROL):
    return eval_solution(Vm(m), p, None, x, W, ctl)


def eval_v1(p, x, W, ctl=sf.DEFAULT_CONTROL):
    return eval_solution(V1, p, None, x, W, ctl)


def v1_decomposition(p, x, W, ctl=sf.DEFAULT_CONTROL):
    """v1 = lambda^{2 mu} Gamma(-2 mu)/Gamma(alpha-) u1 + Gamma(2 mu)/Gamma(alpha+) u2.

    Independent route to v1 for non-integer 2 mu; returns (value, derivative).
    """
    mu = mu_of(p)
    if sf._is_integer(2 * mu):
        raise InvalidSolution("decomposition needs 2 mu non-integer")
    lam = branch_lambda(W)
    g1 = p.g1
    x = float(x)
    cp = cmath.exp(2 * mu * cmath.log(lam)) * sf.gamma_ratio([-2 * mu], [0.5 - mu + g1 / lam])
    cr = sf.gamma_ratio([2 * mu], [0.5 + mu + g1 / lam])
    u1 = _u1_mu(g1, mu, lam, x, ctl)
    u2 = _u1_mu(g1, -mu, lam, x, ctl)
    return cp * u1[0] + cr * u2[0], cp * u1[1] + cr * u2[1]


def wronskian(id_a, id_b, p, ext, x, W, ctl=sf.DEFAULT_CONTROL):
    """Wr(f, g) = f g' - f' g at x."""
    fa, dfa = solution_pair(id_a, p, ext, x, W, ctl)
    fb, dfb = solution_pair(id_b, p, ext, x, W, ctl)
    return complex(fa * dfb - dfa * fb)


# ---------------------------------------------------------------------------
# small-x asymptotic forms and the boundary-coefficient fit


def asymptotic_form(tag, p, x):
    """(value, derivative) of u1as, u2as, u3as or u5as at x."""
    x = float(x)
    k0 = p.k0
    mu = mu_of(p)
    kx = k0 * x
    if tag == "U1as":
        if _range_of(p) == "R5":
            return kx + 0j, k0 + 0j
        s = 0.5 + mu
        v = cmath.exp(s * math.log(kx))
        return v, s * v / x
    if tag == "U2as":
        if _range_of(p) == "R4":
            s = 0.5 - mu
            v = cmath.exp(s * math.log(kx))
            return v, s * v / x
        mu_r = mu.real
        s = 0.5 - mu_r
        lead = kx ** s
        out = lead + 0j
        dout = s * lead / x + 0j
        if _range_of(p) == "R2":
            c = -(p.g1 / k0) / (2 * mu_r - 1)
            out += c * kx ** (s + 1)
            dout += c * (s + 1) * kx ** s * k0
        return out, dout
    if tag == "U3as":
        v = math.sqrt(kx) * math.log(kx)
        return v + 0j, (0.5 * math.log(kx) + 1.0) / math.sqrt(kx) * k0 + 0j
    if tag == "U5as":
        g1 = p.g1
        v = 1.0 + g1 * x * math.log(kx) + EULER * g1 * x
        return v + 0j, g1 * (math.log(kx) + 1.0 + EULER) + 0j
    raise InvalidSolution(f"unknown asymptotic form {tag!r}")


def asymptotic_regime(p, W):
    """Upper end of the small-x window where the two-form fit is meaningful."""
    bound = min(0.01 / p.k0, 0.01 / abs(p.g1))
    if W != 0:
        bound = min(bound, 0.1 / math.sqrt(abs(W)))
    return bound


@dataclass(frozen=True)
class BoundaryFit:
    a1: complex
    a2: complex
    residual: float


def _fit_columns(p, xs, extra):
    rid = _range_of(p)
    mu = mu_of(p)
    k0 = p.k0
    kx = k0 * np.asarray(xs, dtype=float)
    lk = np.log(kx)
    if rid == "R3":
        first = np.array([asymptotic_form("U1as", p, x)[0] for x in xs])
        second = np.array([asymptotic_form("U3as", p, x)[0] for x in xs])
        extras = []
        for k in range(1, extra + 1):
            extras += [kx ** (0.5 + k), kx ** (0.5 + k) * lk]
    elif rid == "R5":
        first = kx.astype(complex)
        second = np.array([asymptotic_form("U5as", p, x)[0] for x in xs])
        extras = []
        for k in range(1, extra + 1):
            extras += [kx ** (1 + k), kx ** (1 + k) * lk]
    else:
        first = np.array([asymptotic_form("U1as", p, x)[0] for x in xs])
        second = np.array([asymptotic_form("U2as", p, x)[0] for x in xs])
        s1 = 0.5 + mu
        s2 = 0.5 - mu
        shift2 = 2 if rid == "R2" else 1    # R2's u2as already carries the x^{3/2-mu} term
        extras = []
        for k in range(1, extra + 1):
            extras += [np.exp((s1 + k) * lk), np.exp((s2 + shift2 + k - 1) * lk)]
    cols = [first, second] + [np.asarray(e, dtype=complex) for e in extras]
    return np.column_stack(cols)


def boundary_fit(p, xs, values, extra_orders=2):
    """Least-squares a.b. coefficients (a1, a2) of samples near the origin.

    Fits ``values`` at points ``xs`` to a1*first + a2*second plus ``extra_orders``
    pairs of higher-order nuisance terms, where (first, second) are the range's
    asymptotic forms (u1as, u2as), (u1as, u3as) or (u1as, u5as).
    """
    xs = [float(x) for x in xs]
    if len(xs) < 3:
        raise IllConditioned("boundary_fit needs at least 3 sample points")
    if min(xs) <= 0:
        raise DomainError("boundary_fit samples must have x > 0")
    extra = max(0, min(int(extra_orders), (len(xs) - 3) // 2))
    a = _fit_columns(p, xs, extra)
    y = np.asarray(values, dtype=complex)
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0):
        raise IllConditioned("degenerate asymptotic column")
    scaled = a / norms
    sv = np.linalg.svd(scaled, compute_uv=False)
    if sv[-1] <= 1e-13 * sv[0]:
        raise IllConditioned("sample points do not separate the asymptotic forms")
    coef, *_ = np.linalg.lstsq(scaled, y, rcond=None)
    coef = coef / norms
    resid = np.linalg.norm(a @ coef - y) / max(np.linalg.norm(y), 1e-300)
    return BoundaryFit(complex(coef[0]), complex(coef[1]), float(resid))


def fit_samples(sid, p, ext, W, xs, ctl=sf.DEFAULT_CONTROL):
    """Convenience: evaluate a solution at ``xs`` and run boundary_fit."""
    values = [solution_pair(sid, p, ext, x, W, ctl)[0] for x in xs]
    return boundary_fit(p, xs, values)
