"""Gamma-family functions and confluent hypergeometric kernels on the complex plane.

All routines work in double precision with ``complex`` scalars.  The Kummer
function is summed as a Taylor series near the origin, continued outward by
local Taylor steps of its differential equation where the plain series would
cancel, and replaced by the two-exponential asymptotic expansion for large
arguments.  The Tricomi function uses the two-Kummer connection formula (or the
logarithmic form for integer ``b``) near the origin and its asymptotic series,
continued inward, elsewhere.
"""

import cmath
import math
from dataclasses import dataclass

from .errors import BranchError, NonConvergence, NumericOverflow, PoleError

EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

# B_2, B_4, ..., B_18
_BERNOULLI = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66,
              -691.0 / 2730, 7.0 / 6, -3617.0 / 510, 43867.0 / 798)

SERIES_RADIUS = 8.0          # plain Taylor series for Phi inside this radius
PSI_DIRECT_RADIUS = 6.0      # connection / log formula for Psi inside this radius
ASYMPTOTIC_RADIUS = 30.0     # try the asymptotic expansions beyond this radius
_MAX_ASYMPTOTIC_RADIUS = 5000.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for the hypergeometric series."""

    rel_tol: float = 1e-12
    max_terms: int = 500

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-6):
            raise ValueError("rel_tol must lie in (0, 1e-6]")
        if int(self.max_terms) != self.max_terms or self.max_terms < 50:
            raise ValueError("max_terms must be an integer >= 50")


DEFAULT_CONTROL = SeriesControl()


def is_nonpositive_integer(z):
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _is_integer(z):
    z = complex(z)
    return z.imag == 0.0 and z.real == math.floor(z.real)


def _finite(w, what):
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise NumericOverflow(f"{what} is not finite")
    return w


def _safe_exp(w, what="exponential"):
    if w.real > 709.0:
        raise NumericOverflow(f"{what} overflows (log-magnitude {w.real:.1f})")
    return cmath.exp(w)


def _sinpi(z):
    # reduce the real part first so that pi*z keeps its digits
    shift = 2.0 * round(z.real / 2.0)
    return cmath.sin(math.pi * (z - shift))


def _cospi(z):
    shift = 2.0 * round(z.real / 2.0)
    return cmath.cos(math.pi * (z - shift))


def _shift_count(z):
    n = 0
    if z.real < 0.0:
        n = int(math.ceil(-z.real))
    while abs(z + n) < 15.0:
        n += 1
    return n


# ---------------------------------------------------------------------------
# Gamma, log Gamma, digamma, trigamma


def _stirling(z):
    inv = 1.0 / z
    inv2 = inv * inv
    acc = 0j
    power = inv
    for k, b2k in enumerate(_BERNOULLI, start=1):
        acc += b2k / (2 * k * (2 * k - 1)) * power
        power *= inv2
    return (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + acc


def log_gamma(z):
    """Principal branch of ln Gamma(z) (branch cut along the negative real axis).

    Raises PoleError at z = 0, -1, -2, ...
    """
    z = complex(z)
    if is_nonpositive_integer(z):
        raise PoleError(f"log_gamma pole at {z}")
    if z.real < -40.0 and abs(z.imag) < 300.0:
        value = _LOG_PI - cmath.log(_sinpi(z)) - log_gamma(1.0 - z)
        # the reflection formula is exact up to 2*pi*i*k; Stirling fixes k
        k = round((_stirling(z).imag - value.imag) / (2.0 * math.pi))
        return value + 2j * math.pi * k
    n = _shift_count(z)
    if n == 0:
        return _stirling(z)
    acc = 0j
    for j in range(n):
        acc += cmath.log(z + j)
    return _stirling(z + n) - acc


def gamma(z):
    """Gamma(z) via exp(log_gamma); overflow raises NumericOverflow."""
    return _safe_exp(log_gamma(z), "gamma")


def rgamma(z):
    """1/Gamma(z), equal to zero at the poles of Gamma."""
    if is_nonpositive_integer(z):
        return 0j
    return cmath.exp(-log_gamma(z))


def gamma_ratio(num, den):
    """Product of Gamma(num_i) divided by product of Gamma(den_j), via log_gamma.

    A pole in the denominator gives zero; a pole in the numerator raises PoleError.
    """
    total = 0j
    for d in den:
        if is_nonpositive_integer(d):
            return 0j
        total -= log_gamma(d)
    for n in num:
        total += log_gamma(n)
    return _safe_exp(total, "gamma ratio")


def digamma(z):
    """psi(z) = Gamma'(z)/Gamma(z)."""
    z = complex(z)
    if is_nonpositive_integer(z):
        raise PoleError(f"digamma pole at {z}")
    if z.real < -40.0 and abs(z.imag) < 300.0:
        return digamma(1.0 - z) - math.pi * _cospi(z) / _sinpi(z)
    n = _shift_count(z)
    acc = 0j
    for j in range(n):
        acc += 1.0 / (z + j)
    w = z + n
    inv2 = 1.0 / (w * w)
    power = inv2
    tail = 0j
    for k, b2k in enumerate(_BERNOULLI, start=1):
        tail += b2k / (2 * k) * power
        power *= inv2
    return cmath.log(w) - 0.5 / w - tail - acc


def trigamma(z):
    """psi'(z), used for the derivatives of the characteristic functions."""
    z = complex(z)
    if is_nonpositive_integer(z):
        raise PoleError(f"trigamma pole at {z}")
    if z.real < -40.0 and abs(z.imag) < 300.0:
        s = _sinpi(z)
        return -trigamma(1.0 - z) + math.pi ** 2 / (s * s)
    n = _shift_count(z)
    acc = 0j
    for j in range(n):
        acc += 1.0 / ((z + j) * (z + j))
    w = z + n
    inv = 1.0 / w
    inv2 = inv * inv
    power = inv2 * inv
    tail = 0j
    for b2k in _BERNOULLI:
        tail += b2k * power
        power *= inv2
    return inv + 0.5 * inv2 + tail + acc


def pochhammer(a, k):
    out = 1 + 0j
    for j in range(k):
        out *= a + j
    return out


# ---------------------------------------------------------------------------
# Kummer Phi


def _phi_series(a, b, z, ctl):
    """Taylor series for Phi and Phi'. Returns (value, derivative, sum of |terms|)."""
    tiny = ctl.rel_tol * 1e-4
    term = 1 + 0j
    total = 1 + 0j
    dtotal = 0j
    magnitude = 1.0
    for k in range(ctl.max_terms):
        den = (b + k) * (k + 1)
        if den == 0:
            raise PoleError("Kummer series hits b = 0, -1, ...")
        term *= (a + k) / den * z
        total += term
        dtotal += (k + 1) * term
        magnitude += abs(term)
        if term == 0:
            break
        small = abs(term) <= tiny * abs(total) and \
            abs((k + 1) * term) <= tiny * max(abs(dtotal), abs(total))
        if small and abs((a + k + 1) * z) < abs((b + k + 1) * (k + 2)):
            break
    else:
        raise NonConvergence(f"Kummer series exceeded {ctl.max_terms} terms at z={z}")
    return total, dtotal / z, magnitude


def _taylor_step(a, b, z0, w, dw, h, ctl):
    """Advance a solution of z w'' + (b - z) w' - a w = 0 from z0 to z0 + h."""
    tiny = ctl.rel_tol * 1e-4
    e_prev = w + 0j          # c_k h^k
    e_curr = dw * h          # c_{k+1} h^{k+1}
    value = e_prev + e_curr
    deriv_h = e_curr         # sum of k c_k h^k
    h2 = h * h
    for k in range(ctl.max_terms):
        e_next = ((a + k) * e_prev * h2 - (k + 1) * (k + b - z0) * e_curr * h) / \
            (z0 * (k + 1) * (k + 2))
        value += e_next
        deriv_h += (k + 2) * e_next
        if k > 2 and abs(e_next) + abs(e_curr) <= tiny * (abs(value) + abs(deriv_h)):
            break
        e_prev, e_curr = e_curr, e_next
    else:
        raise NonConvergence("local Taylor step did not converge")
    return value, deriv_h / h


def _continue(a, b, z_from, w, dw, z_to, ctl):
    """Carry (w, w') along the straight segment z_from -> z_to (which avoids 0)."""
    pos = complex(z_from)
    z_to = complex(z_to)
    while True:
        remaining = z_to - pos
        if remaining == 0:
            return w, dw
        hmax = min(abs(pos) / 3.0, 2.0)
        if abs(remaining) <= hmax:
            w, dw = _taylor_step(a, b, pos, w, dw, remaining, ctl)
            return w, dw
        h = remaining / abs(remaining) * hmax
        w, dw = _taylor_step(a, b, pos, w, dw, h, ctl)
        pos = pos + h


def _asymptotic_terms(p, q, w, tol, max_terms=400):
    """Optimally truncated sum of (p)_s (q)_s / s! * w^s.

    Returns (terms, converged).  ``terms`` lists the retained summands.
    """
    terms = [1 + 0j]
    term = 1 + 0j
    total = 1 + 0j
    for s in range(max_terms):
        nxt = term * (p + s) * (q + s) / (s + 1) * w
        if nxt == 0:
            return terms, True
        if abs(nxt) > abs(term) and s > 0:
            return terms, abs(term) <= tol * abs(total)
        terms.append(nxt)
        total += nxt
        term = nxt
        if abs(nxt) <= tol * abs(total):
            return terms, True
    return terms, False


def _phi_asymptotic(a, b, z, tol=1e-16):
    """Large-|z| expansion of Phi and Phi' with both exponential contributions."""
    logz = cmath.log(z)
    sign = 1.0 if cmath.phase(z) >= 0.0 else -1.0
    lg_b = log_gamma(b)
    value = 0j
    deriv = 0j
    bound = 0.0
    if not is_nonpositive_integer(b - a):
        terms, ok = _asymptotic_terms(a, a - b + 1, -1.0 / z, tol)
        if not ok:
            return None
        expo = sign * 1j * math.pi * a - a * logz + lg_b - log_gamma(b - a)
        pref = _safe_exp(expo, "Phi asymptotic")
        s = sum(terms)
        ds = sum(t * (-a - j) for j, t in enumerate(terms)) / z
        value += pref * s
        deriv += pref * ds
        bound += abs(pref) * abs(terms[-1])
    if not is_nonpositive_integer(a):
        terms, ok = _asymptotic_terms(b - a, 1 - a, 1.0 / z, tol)
        if not ok:
            return None
        expo = z + (a - b) * logz + lg_b - log_gamma(a)
        pref = _safe_exp(expo, "Phi asymptotic")
        s = sum(terms)
        ds = sum(t * (1.0 + (a - b - j) / z) for j, t in enumerate(terms))
        value += pref * s
        deriv += pref * ds
        bound += abs(pref) * abs(terms[-1])
    if bound > 1e-14 * abs(value):
        return None
    return value, deriv


def _phi_pair(a, b, z, ctl=DEFAULT_CONTROL):
    a = complex(a)
    b = complex(b)
    z = complex(z)
    if is_nonpositive_integer(b):
        raise PoleError(f"Kummer Phi undefined for b = {b}")
    if z == 0:
        return 1 + 0j, a / b
    if is_nonpositive_integer(a):
        w, dw, _ = _phi_series(a, b, z, ctl)
        return w, dw
    if z.real < 0.0:
        w, dw = _phi_pair(b - a, b, -z, ctl)
        ez = _safe_exp(z, "Kummer transform")
        return ez * w, ez * (w - dw)
    r = abs(z)
    if r >= ASYMPTOTIC_RADIUS:
        res = _phi_asymptotic(a, b, z)
        if res is not None:
            return res
    if r <= SERIES_RADIUS or abs(cmath.phase(z)) <= math.pi / 4:
        w, dw, _ = _phi_series(a, b, z, ctl)
        return w, dw
    z0 = z / r * SERIES_RADIUS
    w, dw, _ = _phi_series(a, b, z0, ctl)
    return _continue(a, b, z0, w, dw, z, ctl)


def kummer_phi(a, b, z, ctl=DEFAULT_CONTROL):
    """Kummer's confluent hypergeometric function Phi(a, b; z) = 1F1(a; b; z)."""
    w, _ = _phi_pair(a, b, z, ctl)
    return _finite(w, "kummer_phi")


def kummer_phi_derivative(a, b, z, ctl=DEFAULT_CONTROL):
    """d/dz Phi(a, b; z)."""
    _, dw = _phi_pair(a, b, z, ctl)
    return _finite(dw, "kummer_phi_derivative")


def kummer_phi_limit(a, n, z, ctl=DEFAULT_CONTROL):
    """lim_{b -> -n} Phi(a, b; z)/Gamma(b).

    Equals z^(n+1) Gamma(a+n+1)/((n+1)! Gamma(a)) Phi(a+n+1, n+2; z); the Gamma
    ratio is the Pochhammer symbol (a)_(n+1), which is finite for every a.
    """
    if int(n) != n or n < 0:
        raise ValueError("n must be a non-negative integer")
    n = int(n)
    z = complex(z)
    coeff = pochhammer(complex(a), n + 1) / math.factorial(n + 1)
    if z == 0 or coeff == 0:
        return 0j
    return _finite(z ** (n + 1) * coeff * kummer_phi(complex(a) + n + 1, n + 2, z, ctl),
                   "kummer_phi_limit")


# ---------------------------------------------------------------------------
# Tricomi Psi


def _psi_asymptotic(a, b, z, tol=1e-16):
    terms, ok = _asymptotic_terms(a, a - b + 1, -1.0 / z, tol)
    if not ok:
        return None
    pref = cmath.exp(-a * cmath.log(z))
    s = sum(terms)
    ds = sum(t * (-a - j) for j, t in enumerate(terms)) / z
    return pref * s, pref * ds


def _psi_integer_b(a, n, z, ctl):
    """Logarithmic form of Psi(a, n+1; z) for n = 0, 1, 2, ..."""
    tiny = ctl.rel_tol * 1e-4
    logz = cmath.log(z)
    value = 0j
    lead = (-1) ** (n + 1) * rgamma(a - n) / math.factorial(n)
    if lead != 0:
        psi_a = digamma(a)
        harm_k = 0.0                         # H_k
        harm_nk = sum(1.0 / j for j in range(1, n + 1))   # H_{n+k}
        poch = 1 + 0j                        # (a)_k
        dpoch = 0j                           # (a)_k * sum_{j<k} 1/(a+j)
        coef = 1 + 0j                        # 1/((n+1)_k k!)
        zk = 1 + 0j
        total = 0j
        for k in range(ctl.max_terms):
            bracket = logz + psi_a - (harm_k - EULER_GAMMA) - (harm_nk - EULER_GAMMA)
            term = (poch * bracket + dpoch) * coef * zk
            total += term
            if k > 2 and abs(term) <= tiny * abs(total) and \
                    abs((a + k) * z) < abs((n + 1 + k) * (k + 1)):
                break
            dpoch = dpoch * (a + k) + poch
            poch *= a + k
            coef /= (n + 1 + k) * (k + 1)
            zk *= z
            harm_k += 1.0 / (k + 1)
            harm_nk += 1.0 / (n + k + 1)
        else:
            raise NonConvergence("logarithmic Tricomi series did not converge")
        value += lead * total
    ra = rgamma(a)
    if n > 0 and ra != 0:
        acc = 0j
        for k in range(1, n + 1):
            acc += math.factorial(k - 1) * pochhammer(1 - a + k, n - k) / \
                math.factorial(n - k) * z ** (-k)
        value += ra * acc
    return value


def _psi_small(a, b, z, ctl):
    """Psi near the origin: connection formula, or the log form for integer b."""
    if _is_integer(b):
        bi = int(round(b.real))
        if bi >= 1:
            return _psi_integer_b(a, bi - 1, z, ctl)
        # Psi(a, b; z) = z^(1-b) Psi(a-b+1, 2-b; z)
        return z ** (1 - bi) * _psi_integer_b(a - bi + 1, 1 - bi, z, ctl)
    c1 = gamma_ratio([1 - b], [a - b + 1])
    c2 = gamma_ratio([b - 1], [a])
    out = 0j
    if c1 != 0:
        out += c1 * _phi_pair(a, b, z, ctl)[0]
    if c2 != 0:
        out += c2 * cmath.exp((1 - b) * cmath.log(z)) * _phi_pair(a - b + 1, 2 - b, z, ctl)[0]
    return out


def _psi_pair(a, b, z, ctl=DEFAULT_CONTROL):
    a = complex(a)
    b = complex(b)
    z = complex(z)
    if z == 0:
        raise PoleError("Tricomi Psi is singular at z = 0")
    if z.imag == 0.0 and z.real < 0.0:
        raise BranchError("Tricomi Psi: z on the branch cut (negative real axis)")
    if is_nonpositive_integer(a):
        m = int(round(-a.real))
        if is_nonpositive_integer(b) and -b.real < m:
            raise PoleError("polynomial Tricomi case with b a non-positive integer")
        w, dw, _ = _phi_series(a, b, z, ctl)
        scale = (-1) ** m * pochhammer(b, m)
        return scale * w, scale * dw
    r = abs(z)
    if r <= PSI_DIRECT_RADIUS:
        w = _psi_small(a, b, z, ctl)
        dw = -a * _psi_small(a + 1, b + 1, z, ctl)
        return w, dw
    radius = max(ASYMPTOTIC_RADIUS, r)
    while True:
        zf = z / r * radius
        res = _psi_asymptotic(a, b, zf)
        if res is not None:
            break
        radius *= 1.5
        if radius > _MAX_ASYMPTOTIC_RADIUS:
            raise NonConvergence("Tricomi asymptotic series never converged")
    if zf == z:
        return res
    return _continue(a, b, zf, res[0], res[1], z, ctl)


def tricomi_psi(a, b, z, ctl=DEFAULT_CONTROL):
    """Tricomi's confluent hypergeometric function Psi(a, b; z) = U(a, b, z)."""
    w, _ = _psi_pair(a, b, z, ctl)
    return _finite(w, "tricomi_psi")


def tricomi_psi_derivative(a, b, z, ctl=DEFAULT_CONTROL):
    _, dw = _psi_pair(a, b, z, ctl)
    return _finite(dw, "tricomi_psi_derivative")


# ---------------------------------------------------------------------------
# mu-derivative of x^mu Phi(1/2 + mu + g, 1 + 2 mu; z) at mu = 0


def _phi_mu_derivative_series(g, z, ctl):
    """Return (S, S') with S = sum_k d/dmu[coef_k(mu)] z^k at mu = 0."""
    tiny = ctl.rel_tol * 1e-4
    alpha = 0.5 + complex(g)
    poch = 1 + 0j          # (alpha)_k
    dpoch = 0j             # d(alpha)_k / d alpha
    harm = 0.0             # H_k
    inv_fact2 = 1.0        # 1/(k!)^2
    zk = 1 + 0j            # z^k
    zkm1 = 0j              # z^(k-1)
    total = 0j
    dtotal = 0j
    for k in range(ctl.max_terms):
        coef = (dpoch - 2.0 * poch * harm) * inv_fact2
        term = coef * zk
        total += term
        dtotal += k * coef * zkm1
        if k > 2 and abs(term) <= tiny * max(abs(total), 1e-300) and \
                abs((alpha + k) * z) < (k + 1) ** 2:
            break
        dpoch = dpoch * (alpha + k) + poch
        poch *= alpha + k
        harm += 1.0 / (k + 1)
        inv_fact2 /= (k + 1) ** 2
        zkm1 = zk
        zk *= z
        if poch == 0 and dpoch == 0:
            break
    else:
        raise NonConvergence("mu-derivative series did not converge")
    return total, dtotal


def phi_mu_derivative(g1_over_lambda, z, x_power_arg, ctl=DEFAULT_CONTROL):
    """d/dmu [x^mu Phi(1/2 + mu + g1/lambda, 1 + 2 mu; z)] at mu = 0.

    The series is differentiated term by term; the x^mu factor contributes
    ln(x) * Phi(1/2 + g1/lambda, 1; z).
    """
    z = complex(z)
    x = complex(x_power_arg)
    s, _ = _phi_mu_derivative_series(g1_over_lambda, z, ctl)
    log_part = cmath.log(x) * kummer_phi(0.5 + complex(g1_over_lambda), 1.0, z, ctl) \
        if x != 1 else 0j
    return _finite(log_part + s, "phi_mu_derivative")
