"""Spectral data: continuum densities, discrete levels, thresholds and zero modes.

Energies are in units of 1/length^2 (2m/hbar^2 = 1).  A DiscreteLevel's weight Q
normalizes the range's Principal solution: U_n(x) = Q * Principal(x; E_n).
"""

import cmath
import math
from dataclasses import dataclass, field

from . import basis
from . import special_fns as sf
from .errors import (BracketFailure, NotApplicable, PoleError, PoleProximity,
                     ThresholdCase)
from .model import CouplingParams, ExtensionParam, canonical_angle, classify

EULER = sf.EULER_GAMMA
POLE_TOL = 1e-10          # relative distance to a pole rejected by characteristic_value
ANGLE_TOL = 1e-9          # E = 0 membership tolerance on extension angles
BISECT_TOL = 1e-13
TINY_ENERGY = 1e-24       # E below this * g1^2 is evaluated at this value


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class DiscreteLevel:
    n: int
    energy: float
    weight_Q: float
    bracket: tuple


@dataclass(frozen=True)
class CharacteristicFn:
    """Real characteristic function on E < 0 whose zeros are the discrete levels.

    tag: F2nu (R2), Omega3 (R3), Theta (R4, zeros of cos Theta), Omega5 (R5),
    ClosedForm (R1 and the endpoint angles; value is 1/Omega_norm).
    """

    range_id: str
    ext: ExtensionParam
    tag: str
    params: CouplingParams

    def value(self, E):
        return characteristic_value(self, E)

    def derivative(self, E):
        return _char_derivative(self, E)


@dataclass
class SpectrumReport:
    params: CouplingParams
    range_id: str
    angle: float
    continuum: dict
    discrete: list
    zero_mode: float = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "params": {"g1": self.params.g1, "g2": self.params.g2, "k0": self.params.k0},
            "range": self.range_id,
            "angle": self.angle,
            "continuum": {"support": [0.0, None],
                          "energies": list(self.continuum["energies"]),
                          "density": list(self.continuum["density"])},
            "discrete": [{"n": lv.n, "energy": lv.energy, "weight_Q": lv.weight_Q,
                          "bracket": list(lv.bracket)} for lv in self.discrete],
            "zero_mode": self.zero_mode,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d):
        pr = d["params"]
        levels = [DiscreteLevel(int(lv["n"]), float(lv["energy"]), float(lv["weight_Q"]),
                                tuple(lv["bracket"])) for lv in d["discrete"]]
        cont = {"energies": [float(e) for e in d["continuum"]["energies"]],
                "density": [float(s) for s in d["continuum"]["density"]]}
        return cls(CouplingParams(pr["g1"], pr["g2"], pr["k0"]), d["range"], d["angle"],
                   cont, levels, d["zero_mode"], list(d["notes"]))


# ---------------------------------------------------------------------------
# helpers


def _mu(p):
    return classify(p).mu.value


def _rid(p):
    return classify(p).range_id


def _check_ext(p, ext):
    rid = _rid(p)
    if ext is None:
        ext = ExtensionParam("R1") if rid == "R1" else None
    if ext is None or ext.range_id != rid:
        raise NotApplicable(f"extension does not match range {rid}")
    return ext


def _pole_offset(rid, mu):
    """c in ℰ_n = -g1^2/(c + 2n)^2 for the endpoint/R1 spectra."""
    return {"R1": 1 + 2 * mu.real, "R2": 1 + 2 * mu.real, "R3": 1.0, "R5": 2.0}[rid]


def endpoint_energy(p, n):
    """Endpoint (or R1) level ℰ_n = -g1^2/(c + 2n)^2 with c = 1+2mu, 1+2mu, 1, 2."""
    rid = _rid(p)
    if rid == "R4":
        raise NotApplicable("R4 has no endpoint spectrum")
    c = _pole_offset(rid, _mu(p))
    return -p.g1 ** 2 / (c + 2 * n) ** 2


def _r1_type_q(g1, mu, n):
    """(2 tau)^{mu+1}/Gamma(1+2mu) sqrt(tau Gamma(1+2mu+n)/(|g1| n!)), tau = |g1|/(1+2mu+2n)."""
    tau = abs(g1) / (1 + 2 * mu + 2 * n)
    log_q = ((mu + 1) * math.log(2 * tau)
             + 0.5 * (math.log(tau) + math.lgamma(1 + 2 * mu + n) - math.log(abs(g1))
                      - math.lgamma(n + 1)))
    return math.exp(log_q - math.lgamma(1 + 2 * mu))


def _nearest_pole(p, E):
    """Nearest endpoint pole ℰ_n to E (g1 < 0, R2/R3/R5), or None."""
    rid = _rid(p)
    if p.g1 > 0 or rid not in ("R2", "R3", "R5"):
        return None
    tau = math.sqrt(-E)
    c = _pole_offset(rid, _mu(p))
    guess = 0.5 * (abs(p.g1) / tau - c)
    best = None
    for n in (math.floor(guess), math.ceil(guess)):
        if n >= 0:
            en = endpoint_energy(p, n)
            if best is None or abs(E - en) < abs(E - best):
                best = en
    return best


# ---------------------------------------------------------------------------
# real characteristic functions on E < 0


def _digamma_rgamma(a):
    """psi(a)/Gamma(a) for real a, finite at the poles a = 0, -1, ..."""
    if a >= 0.5:
        return sf.digamma(a).real * sf.rgamma(a).real
    # reflection: 1/Gamma(a) = sin(pi a) Gamma(1-a)/pi
    g = sf.gamma(1 - a).real / math.pi
    s, c = math.sin(math.pi * a), math.cos(math.pi * a)
    return (sf.digamma(1 - a).real * s - math.pi * c) * g


def _f2_real(p, E):
    """f2(E) and f2'(E) for E < 0 (range R2)."""
    mu = _mu(p).real
    tau = math.sqrt(-E)
    g = p.g1 / (2 * tau)
    ap, am = 0.5 + mu + g, 0.5 - mu + g
    da = p.g1 / (4 * tau ** 3)
    t2mu = (2 * tau / p.k0) ** (2 * mu)
    if am >= 0.5:
        f2 = sf.gamma_ratio([1 - 2 * mu, ap], [1 + 2 * mu, am]).real * t2mu
        return f2, f2 * ((sf.digamma(ap) - sf.digamma(am)).real * da - mu / tau ** 2)
    # alpha_- may sit on a pole of Gamma (a zero of f2); alpha_+ < 5/2 here
    scale = t2mu * sf.gamma_ratio([1 - 2 * mu, ap], [1 + 2 * mu]).real
    rm = sf.rgamma(am).real
    f2 = scale * rm
    d = scale * ((sf.digamma(ap).real * da - mu / tau ** 2) * rm - _digamma_rgamma(am) * da)
    return f2, d


def _omega3_real(p, E, angle):
    tau = math.sqrt(-E)
    a = 0.5 + p.g1 / (2 * tau)
    val = (sf.digamma(a).real + math.log(2 * tau / p.k0) - 2 * sf.digamma(1).real
           - math.tan(angle))
    der = sf.trigamma(a).real * p.g1 / (4 * tau ** 3) - 1.0 / (2 * tau ** 2)
    return val, der


def _omega_half_real(p, E):
    tau = math.sqrt(-E)
    g1 = p.g1
    a = 1 + g1 / (2 * tau)
    val = g1 * EULER + g1 * (sf.digamma(a).real + math.log(2 * tau / p.k0)) - g1 - tau
    der = g1 ** 2 * sf.trigamma(a).real / (4 * tau ** 3) - g1 / (2 * tau ** 2) + 1 / (2 * tau)
    return val, der


def _theta_gamma(kappa):
    return sf.log_gamma(complex(1.0, 2 * kappa)).imag


def _theta_real(p, E, angle):
    """Theta(E) and Theta'(E) for range R4."""
    kappa = _mu(p).imag
    tau = math.sqrt(-E)
    a = complex(0.5 + p.g1 / (2 * tau), kappa)
    val = angle + _theta_gamma(kappa) - sf.log_gamma(a).imag + kappa * math.log(p.k0 / (2 * tau))
    der = -sf.digamma(a).imag * p.g1 / (4 * tau ** 3) + kappa / (2 * tau ** 2)
    return val, der


def _char_pair(cf, E):
    p, ext = cf.params, cf.ext
    if cf.tag == "F2nu":
        f2, d = _f2_real(p, E)
        return f2 + math.tan(ext.angle), d
    if cf.tag == "Omega3":
        return _omega3_real(p, E, ext.angle)
    if cf.tag == "Theta":
        th, d = _theta_real(p, E, ext.angle)
        return math.cos(th), -math.sin(th) * d
    if cf.tag == "Omega5":
        w, d = _omega_half_real(p, E)
        return p.k0 * math.tan(ext.angle) - w, -d
    # closed form: 1/Omega_norm
    h = 1e-7 * abs(E)
    v = 1.0 / omega_norm(p, ext, E).real
    vp = 1.0 / omega_norm(p, ext, E + h).real
    vm = 1.0 / omega_norm(p, ext, E - h).real
    return v, (vp - vm) / (2 * h)


def characteristic_fn(p, ext=None):
    ext = _check_ext(p, ext)
    rid = ext.range_id
    if rid == "R1" or ext.is_endpoint:
        tag = "ClosedForm"
    else:
        tag = {"R2": "F2nu", "R3": "Omega3", "R4": "Theta", "R5": "Omega5"}[rid]
    return CharacteristicFn(rid, ext, tag, p)


def characteristic_value(cf, E):
    """Real value of the characteristic function at E < 0."""
    E = float(E)
    if not E < 0:
        raise ValueError("characteristic functions are evaluated at E < 0")
    pole = _nearest_pole(cf.params, E)
    if pole is not None and abs(E - pole) < POLE_TOL * abs(pole):
        raise PoleProximity(f"E = {E!r} is within {POLE_TOL:g} of the pole {pole!r}")
    try:
        return _char_pair(cf, E)[0]
    except PoleError as exc:
        raise PoleProximity(str(exc)) from None


def _char_derivative(cf, E):
    return _char_pair(cf, float(E))[1]


# ---------------------------------------------------------------------------
# Omega_norm: sigma'(E) = Im Omega_norm(E + i0)/pi, G = Omega_norm P P + c C P


def _log_ratio(num, den):
    return sum(sf.log_gamma(a) for a in num) - sum(sf.log_gamma(b) for b in den)


def _f2_direct(p, mu, lam, g):
    ratio = sf.gamma_ratio([1 - 2 * mu, 0.5 + mu + g], [1 + 2 * mu, 0.5 - mu + g])
    return ratio * cmath.exp(2 * mu * cmath.log(lam / p.k0))


def _omega_norm_r1(p, mu, W):
    lam = basis.branch_lambda(W)
    g1 = p.g1
    m = basis._default_m(complex(mu))

    def raw(mv):
        t1 = (cmath.exp(2 * mv * cmath.log(lam))
              * sf.gamma_ratio([-2 * mv, 0.5 + mv + g1 / lam], [0.5 - mv + g1 / lam, 1 + 2 * mv]))
        t2 = basis.a_m_coefficient(m, g1, lam) * sf.gamma(1 - 2 * mv) / (2 * mv)
        return t1 + t2

    if abs(2 * mu - m) >= basis.VM_SWITCH:
        return raw(mu)
    nodes = [0.5 * m + d for d in basis._VM_NODES]
    vals = [raw(n) for n in nodes]
    out = 0j
    for i, ni in enumerate(nodes):
        w = 1.0
        for j, nj in enumerate(nodes):
            if j != i:
                w *= (mu - nj) / (ni - nj)
        out += w * vals[i]
    return out


def omega_norm(p, ext, W):
    """Omega_norm(W): coefficient of Principal(x)Principal(y) in the Green function.

    sigma'(E) = Im Omega_norm(E + i0)/pi, and Omega_norm ~ -Q_n^2/(W - E_n) at levels.
    """
    ext = _check_ext(p, ext)
    W = complex(W)
    rid = ext.range_id
    mu = _mu(p)
    k0 = p.k0
    if rid == "R1":
        return _omega_norm_r1(p, mu.real, W)
    lam = basis.branch_lambda(W)
    s, c = math.sin(ext.angle), math.cos(ext.angle)
    if ext.is_endpoint:
        s, c = 1.0, 0.0
    if rid == "R2":
        f2 = _f2_direct(p, mu.real, lam, p.g1 / lam)
        return (c - f2 * s) / (s + f2 * c) / (2 * mu.real * k0)
    if rid == "R3":
        w0 = basis.omega_zero(p.g1, lam, k0)
        return (w0 * s - c) / (w0 * c + s)
    if rid == "R4":
        kappa = mu.imag
        lnd = _r4_log_d(p, kappa, lam, ext.angle)
        d = cmath.exp(lnd)
        return -1j / (4 * kappa * k0) * (d - 1) / (d + 1)
    w12 = basis.omega_half(p.g1, lam, k0)
    return (w12 * s + k0 * c) / (k0 * s - w12 * c) / k0


def _r4_log_d(p, kappa, lam, theta):
    """ln D with D = a/b = e^{2 i theta} Gamma(beta)Gamma(alpha-)(lambda/k0)^{-2i kappa}/(Gamma(alpha)Gamma(beta-))."""
    g = p.g1 / lam
    beta = complex(1.0, 2 * kappa)
    ap = 0.5 + 1j * kappa + g
    am = 0.5 - 1j * kappa + g
    return (2j * theta + sf.log_gamma(beta) + sf.log_gamma(am) - sf.log_gamma(beta.conjugate())
            - sf.log_gamma(ap) - 2j * kappa * cmath.log(lam / p.k0))


def green_prefactor(p):
    """c in G = Omega_norm P(x)P(y) + c C(x>)P(x<); fixes the derivative jump at -1."""
    rid = _rid(p)
    mu = _mu(p)
    k0 = p.k0
    if rid == "R1":
        return 1 / (2 * mu.real)
    if rid == "R2":
        return 1 / (2 * mu.real * k0)
    if rid == "R3":
        return 1.0
    if rid == "R4":
        return -1 / (4 * mu.imag * k0)
    return -1 / k0


# ---------------------------------------------------------------------------
# continuum density


def _one_minus_tanh(y):
    # 1 - tanh(y) = 2/(1 + e^{2y})
    if y > 0:
        e = math.exp(-2 * y)
        return 2 * e / (1 + e)
    return 2 / (1 + math.exp(2 * y))


def _log_abs_gamma_sq(a):
    return 2 * sf.log_gamma(a).real


def _r1_type_log_b(p, mu, pp, with_k0):
    """ln[|Gamma(alpha+)|^2 (2p/k0)^{2mu} e^{-pi g1/2p}/Gamma(beta+)^2] at E = pp^2."""
    a = complex(0.5 + mu, -p.g1 / (2 * pp))
    scale = p.k0 if with_k0 else 1.0
    return (_log_abs_gamma_sq(a) + 2 * mu * math.log(2 * pp / scale)
            - math.pi * p.g1 / (2 * pp) - 2 * math.lgamma(1 + 2 * mu))


def threshold_param(p):
    """Extension angle at which E = 0 is an eigenvalue (g1 > 0, ranges R2-R5)."""
    rid = _rid(p)
    if rid == "R1" or p.g1 < 0:
        raise NotApplicable("thresholds exist only for g1 > 0 in ranges R2-R5")
    g1, k0 = p.g1, p.k0
    mu = _mu(p)
    if rid == "R2":
        m = mu.real
        t = -sf.gamma_ratio([1 - 2 * m], [1 + 2 * m]).real * (g1 / k0) ** (2 * m)
        return canonical_angle(rid, math.atan(t))
    if rid == "R3":
        return canonical_angle(rid, math.atan(math.log(g1 / k0) + 2 * EULER))
    if rid == "R5":
        return canonical_angle(rid, math.atan((g1 / k0) * (math.log(g1 / k0) + EULER - 1)))
    kappa = mu.imag
    phi = kappa * math.log(g1 / k0) - _theta_gamma(kappa) + math.pi / 2
    return canonical_angle(rid, phi - math.pi * math.floor(phi / math.pi))


def _angle_distance(rid, a, b):
    d = math.fmod(abs(a - b), math.pi)
    return min(d, math.pi - d)


def at_threshold(p, ext):
    if p.g1 < 0 or ext.range_id == "R1":
        return False
    return _angle_distance(ext.range_id, ext.angle, threshold_param(p)) < ANGLE_TOL


def continuum_density(p, ext, E):
    """sigma'(E) for E >= 0 from the closed forms of each range."""
    ext = _check_ext(p, ext)
    E = float(E)
    if E < 0:
        raise ValueError("continuum_density needs E >= 0")
    if E == 0 and at_threshold(p, ext):
        raise ThresholdCase("E = 0 at the threshold extension carries a delta weight")
    E = max(E, TINY_ENERGY * p.g1 ** 2)
    pp = math.sqrt(E)
    rid = ext.range_id
    mu = _mu(p)
    k0 = p.k0
    if rid == "R1":
        return math.exp(_r1_type_log_b(p, mu.real, pp, False)) / (2 * math.pi)
    s, c = math.sin(ext.angle), math.cos(ext.angle)
    if ext.is_endpoint:
        s, c = 1.0, 0.0
    W = complex(E, 0.0)
    lam = basis.branch_lambda(W)
    if rid == "R2":
        m = mu.real
        b = math.exp(_r1_type_log_b(p, m, pp, True))
        f2 = _f2_direct(p, m, lam, p.g1 / lam)
        ac = f2.real * c + s                     # A cos(nu)
        return b / (2 * math.pi * k0 * (ac ** 2 + (m * b * c) ** 2))
    if rid == "R3":
        b = 0.5 * math.pi * _one_minus_tanh(math.pi * p.g1 / (2 * pp))
        w = sf.digamma(0.5 + p.g1 / lam) + cmath.log(lam / k0) - 2 * sf.digamma(1)
        ac = w.real * c - s                      # A cos(vartheta)
        return b / (math.pi * (ac ** 2 + (b * c) ** 2))
    if rid == "R5":
        b = _r5_b(p.g1, pp)
        w12 = basis.omega_half(p.g1, lam, k0)
        ac = k0 * s - w12.real * c               # A cos(epsilon)
        return b / (math.pi * (ac ** 2 + (b * c) ** 2))
    kappa = mu.imag
    one_minus = r4_one_minus_d2(p, E)
    d = cmath.exp(_r4_log_d(p, kappa, lam, ext.angle))
    d2 = 1.0 - one_minus
    denom = 1.0 + 2.0 * d.real + d2
    return one_minus / (4 * math.pi * kappa * k0 * denom)


def _r5_b(g1, pp):
    # (pi/2)|g1| e^{-pi g1/2p}/sinh(pi|g1|/2p)
    a = math.pi * abs(g1) / (2 * pp)
    e = math.exp(-2 * a)
    if g1 > 0:
        factor = 2 * e / (1 - e)
    else:
        factor = 2 / (1 - e)
    return 0.5 * math.pi * abs(g1) * factor


def r4_d_squared(p, E):
    """|D(E)|^2 = (1 + e^{-2 pi kappa} e^{-pi g1/p})/(1 + e^{2 pi kappa} e^{-pi g1/p})."""
    return 1.0 - r4_one_minus_d2(p, E)


def r4_one_minus_d2(p, E):
    kappa = _mu(p).imag
    pp = math.sqrt(max(float(E), TINY_ENERGY * p.g1 ** 2))
    u = 2 * math.pi * kappa - math.pi * p.g1 / pp
    expit = 1 / (1 + math.exp(-u)) if u > -700 else math.exp(u)
    return -math.expm1(-4 * math.pi * kappa) * expit


def r2_density_parts(p, ext, E):
    """(A(E), B(E)) of the R2 continuum density from their explicit closed forms."""
    mu = _mu(p).real
    pp = math.sqrt(E)
    b = math.exp(_r1_type_log_b(p, mu, pp, True))
    base_a = math.exp(_log_abs_gamma_sq(complex(0.5 + mu, -p.g1 / (2 * pp)))
                      + 2 * mu * math.log(2 * pp / p.k0) - 2 * math.lgamma(1 + 2 * mu))
    y = math.pi * p.g1 / (2 * pp)
    a = (mu * base_a / math.sin(2 * math.pi * mu)
         * (math.exp(-y) * math.cos(2 * math.pi * mu) + math.exp(y)) + math.tan(ext.angle))
    return a, b


# ---------------------------------------------------------------------------
# discrete spectrum


def closed_form_levels(p, variant, n_count=10):
    """Levels with explicit energies and weights; empty for g1 > 0."""
    mu = _mu(p).real
    g1, k0 = p.g1, p.k0
    if g1 > 0:
        return []
    out = []
    if variant == "R2_nu0_mirror":
        n = 0
        while len(out) < n_count:
            c = 1 - 2 * mu + 2 * n
            if c > 0:
                tau = abs(g1) / c
                q = abs(_r1_type_q_signed(g1, -mu, n)) * k0 ** -(0.5 - mu)
                out.append(DiscreteLevel(n, -tau * tau, q, (-math.inf, 0.0)))
            n += 1
        return out
    for n in range(n_count):
        if variant == "R1":
            q = _r1_type_q(g1, mu, n)
        elif variant == "R2_endpoint":
            q = _r1_type_q(g1, mu, n) * k0 ** -(0.5 + mu)
        elif variant == "R3_endpoint":
            q = 2 * abs(g1) * (1 + 2 * n) ** -1.5
        elif variant == "R5_endpoint":
            q = (2 / k0) * (abs(g1) / (2 + 2 * n)) ** 1.5
        else:
            raise NotApplicable(f"unknown closed-form variant {variant!r}")
        off = {"R1": 1 + 2 * mu, "R2_endpoint": 1 + 2 * mu, "R3_endpoint": 1.0,
               "R5_endpoint": 2.0}[variant]
        e = -g1 ** 2 / (off + 2 * n) ** 2
        lo = -math.inf if n == 0 else -g1 ** 2 / (off + 2 * n - 2) ** 2
        hi = -g1 ** 2 / (off + 2 * n + 2) ** 2
        out.append(DiscreteLevel(n, e, q, (lo, hi)))
    return out


def _r1_type_q_signed(g1, mu, n):
    """R1 weight formula continued to negative mu (used for the nu = 0 mirror)."""
    tau = abs(g1) / (1 + 2 * mu + 2 * n)
    q2 = ((2 * tau) ** (2 * mu + 2) / sf.gamma(1 + 2 * mu).real ** 2
          * tau * sf.gamma(1 + 2 * mu + n).real / (abs(g1) * math.factorial(n)))
    return math.sqrt(q2)


def _endpoint_variant(rid):
    return {"R1": "R1", "R2": "R2_endpoint", "R3": "R3_endpoint", "R5": "R5_endpoint"}[rid]


def _bisect(fn, lo, hi, f_lo, f_hi):
    """Sign bisection on [lo, hi] to width BISECT_TOL*|E|, then one secant polish."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= BISECT_TOL * abs(mid):
            break
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (f_lo > 0):
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
    if math.isfinite(f_lo) and math.isfinite(f_hi) and f_lo != f_hi:
        sec = lo - f_lo * (hi - lo) / (f_hi - f_lo)
        if lo <= sec <= hi:
            return sec
    return 0.5 * (lo + hi)


def _safe_eval(cf, E):
    try:
        return _char_pair(cf, E)[0]
    except PoleError:
        return math.nan


def _weight(cf, E):
    p, ext = cf.params, cf.ext
    val, d = _char_pair(cf, E)
    mu = _mu(p)
    k0 = p.k0
    if cf.tag == "F2nu":
        q2 = 1.0 / (-2 * mu.real * k0 * d * math.cos(ext.angle) ** 2)
    elif cf.tag == "Omega3":
        q2 = 1.0 / (-d * math.cos(ext.angle) ** 2)
    elif cf.tag == "Omega5":
        q2 = 1.0 / (-d * math.cos(ext.angle) ** 2)
    else:
        _, td = _theta_real(p, E, ext.angle)
        q2 = 1.0 / (4 * mu.imag * k0 * td)
    if not q2 > 0:
        raise BracketFailure(f"non-positive weight at E = {E!r}")
    return math.sqrt(q2)


def _label_offset(rid):
    # R2 labels the root in (ℰ_{n-1}, ℰ_n) by n; R3 and R5 label it n - 1
    return 0 if rid == "R2" else -1


def _solve_bracket(cf, lo, hi, what):
    fn = lambda e: _safe_eval(cf, e)
    f_lo, f_hi = fn(lo), fn(hi)
    if not (f_lo > 0 and f_hi < 0):
        raise BracketFailure(f"{what}: no sign change on [{lo!r}, {hi!r}] "
                             f"(values {f_lo!r}, {f_hi!r})")
    return _bisect(fn, lo, hi, f_lo, f_hi)


def _inner_end(pole, side):
    # a point just inside a pole bracket; side=+1 above the pole, -1 below
    return pole * (1 - side * 1e-9)


def _lowest_bound(cf, hi, e_min):
    """Walk E downward from hi until the characteristic function is positive."""
    e = min(2 * hi, hi - 1.0) if hi < 0 else -1.0
    while True:
        if e <= e_min:
            return e_min
        v = _safe_eval(cf, e)
        if v > 0:
            return e
        e *= 4.0


def _levels_pole_bracketed(cf, window, n_limit):
    p = cf.params
    rid = cf.range_id
    e_min, e_max = window
    off = _label_offset(rid)
    out = []
    j = 0
    # skip brackets entirely below the window
    while endpoint_energy(p, j) < e_min:
        j += 1
    while len(out) < n_limit:
        upper_pole = endpoint_energy(p, j)
        lower_pole = endpoint_energy(p, j - 1) if j > 0 else -math.inf
        if lower_pole >= e_max:
            break
        hi = _inner_end(upper_pole, -1)
        if lower_pole == -math.inf or lower_pole < e_min:
            lo = _lowest_bound(cf, upper_pole, e_min) if lower_pole == -math.inf else e_min
            lo = max(lo, e_min)
            if _safe_eval(cf, lo) <= 0:
                j += 1
                continue
        else:
            lo = _inner_end(lower_pole, +1)
        e = _solve_bracket(cf, lo, hi, f"{rid} bracket {j}")
        if e > e_max:
            break
        if e >= e_min:
            out.append(DiscreteLevel(j + off, e, _weight(cf, e), (lower_pole, upper_pole)))
        j += 1
    return out


def _single_level(cf, window):
    """g1 > 0 in R2/R3/R5: at most one negative level, present iff F(0-) < 0."""
    p = cf.params
    e_min, e_max = window
    f0 = zero_limit(p, cf.ext)
    if f0 >= 0:
        return []
    hi = None
    for k in range(2, 40):
        e = -p.g1 ** 2 * 10.0 ** (-k)
        v = _safe_eval(cf, e)
        if v < 0:
            hi = e
            break
    if hi is None:
        return []
    lo = _lowest_bound(cf, hi, e_min)
    if _safe_eval(cf, lo) <= 0:
        return []
    e = _solve_bracket(cf, lo, hi, f"{cf.range_id} single level")
    if e > e_max or e < e_min:
        return []
    return [DiscreteLevel(0, e, _weight(cf, e), (-math.inf, 0.0))]


def zero_limit(p, ext):
    """Limit E -> 0- of the characteristic function (g1 > 0)."""
    rid = ext.range_id
    t = math.tan(ext.angle)
    t0 = math.tan(threshold_param(p))
    if rid == "R2":
        return t - t0
    if rid == "R3":
        return t0 - t
    if rid == "R5":
        return p.k0 * (t - t0)
    raise NotApplicable("zero_limit is defined for R2, R3, R5")


# R4 ----------------------------------------------------------------------------


def r4_theta(p, ext, E):
    return _theta_real(p, float(E), ext.angle)[0]


def r4_theta_zero(p, ext):
    """Theta(0-) for g1 > 0."""
    kappa = _mu(p).imag
    return ext.angle + _theta_gamma(kappa) + kappa * math.log(p.k0 / p.g1)


def r4_n_max(p, ext):
    """Largest label n with a negative level, g1 > 0 (levels need pi/2 + pi n < Theta(0-))."""
    if p.g1 < 0:
        return None
    y = (r4_theta_zero(p, ext) - math.pi / 2) / math.pi
    n = math.floor(y)
    return n - 1 if n == y else n


def r4_level(p, ext, n):
    """Solve Theta(E) = pi/2 + pi n by bisection in s = ln(-E)."""
    n_top = r4_n_max(p, ext)
    if n_top is not None and n > n_top:
        raise BracketFailure(f"R4 level {n} exceeds n_max = {n_top}")
    target = math.pi / 2 + math.pi * n
    th = lambda s: _theta_real(p, -math.exp(s), ext.angle)[0] - target
    # Theta decreases in s; find s_lo with th > 0 and s_hi with th < 0
    s = 2 * math.log(abs(p.g1) + p.k0)
    step = 1.0
    val = th(s)
    if val > 0:
        s_lo = s
        s_hi = s + step
        while th(s_hi) > 0:
            s_lo = s_hi
            step *= 2
            s_hi += step
            if s_hi > 1400:
                raise BracketFailure(f"R4 level {n} lies below E = -e^1400")
    else:
        s_hi = s
        s_lo = s - step
        while th(s_lo) <= 0:
            s_hi = s_lo
            step *= 2
            s_lo -= step
            if s_lo < -1400:
                raise BracketFailure(f"R4 level {n} not found above E = -e^-1400")
    for _ in range(200):
        mid = 0.5 * (s_lo + s_hi)
        if s_hi - s_lo < 1e-14:
            break
        if th(mid) > 0:
            s_lo = mid
        else:
            s_hi = mid
    e = -math.exp(0.5 * (s_lo + s_hi))
    cf = characteristic_fn(p, ext)
    return DiscreteLevel(n, e, _weight(cf, e), (-math.exp(s_hi), -math.exp(s_lo)))


def _levels_r4(p, ext, window, n_limit):
    e_min, e_max = window
    n_lo = math.ceil((r4_theta(p, ext, e_min) - math.pi / 2) / math.pi)
    n_top = r4_n_max(p, ext)
    out = []
    n = n_lo
    while len(out) < n_limit:
        if n_top is not None and n > n_top:
            break
        lv = r4_level(p, ext, n)
        if lv.energy > e_max:
            break
        if lv.energy >= e_min:
            out.append(lv)
        n += 1
    return out


def discrete_spectrum(p, ext=None, window=(-1e3, 0.0), n_limit=10):
    """Negative levels in window = (E_min, E_max), lowest first, at most n_limit."""
    ext = _check_ext(p, ext)
    e_min, e_max = float(window[0]), min(float(window[1]), 0.0)
    if not e_min < e_max:
        raise ValueError("window must satisfy E_min < E_max <= 0")
    rid = ext.range_id
    if rid == "R4":
        return _levels_r4(p, ext, (e_min, e_max), n_limit)
    if rid == "R1" or ext.is_endpoint:
        if p.g1 > 0:
            return []
        out = []
        n = 0
        while len(out) < n_limit:
            lv = closed_form_levels(p, _endpoint_variant(rid), n + 1)[n]
            if lv.energy > e_max:
                break
            if lv.energy >= e_min:
                out.append(lv)
            n += 1
        return out
    cf = characteristic_fn(p, ext)
    if p.g1 > 0:
        return _single_level(cf, (e_min, e_max))
    return _levels_pole_bracketed(cf, (e_min, e_max), n_limit)


# ---------------------------------------------------------------------------
# zero modes


def zero_mode_weight_formula(p, ext):
    """Displayed delta(E) weight at the threshold extension."""
    rid = ext.range_id
    g1, k0 = p.g1, p.k0
    mu = _mu(p)
    ang = threshold_param(p)
    if rid == "R2":
        m = mu.real
        psi = (g1 * (g1 / k0) ** (-m) / (m * math.cos(ang))
               * math.sqrt(3 * math.gamma(1 + 2 * m)
                           / (2 * k0 * (1 + 2 * m) * math.gamma(2 - 2 * m))))
        return psi * psi
    if rid == "R3":
        return 6 * g1 ** 2 / math.cos(ang) ** 2
    if rid == "R5":
        return 3 * g1 / math.cos(ang) ** 2
    kappa = mu.imag
    a = 3 * g1 ** 2 / (kappa * (1 + 4 * kappa ** 2))
    return a / (2 * kappa * k0)


def zero_mode_residue(p, ext, eta=None):
    """lim_{W->0} -W Omega_norm(W), taken along W = i eta with Richardson extrapolation."""
    ext = _check_ext(p, ext)
    if eta is None:
        eta = 1e-5 * p.g1 ** 2

    def w(h):
        W = complex(0.0, h)
        return -W * omega_norm(p, ext, W)

    return (2 * w(eta) - w(2 * eta)).real


def zero_energy_eigenvalue(p, ext):
    """Weight of the E = 0 eigenvalue, or None when E = 0 is not in the spectrum."""
    ext = _check_ext(p, ext)
    if p.g1 < 0:
        raise NotApplicable("E = 0 eigenvalues occur only for g1 > 0")
    if ext.range_id == "R1":
        return None
    if not at_threshold(p, ext):
        return None
    return zero_mode_weight_formula(p, ext)


# ---------------------------------------------------------------------------
# eigenfunctions


EIGEN_SWITCH_Z = 18.0


def eigenfunction(p, ext, level, xs):
    """U_n(x) = Q Principal(x; E_n), with the decaying solution used beyond z = 18."""
    ext = _check_ext(p, ext)
    E = level.energy
    tau = math.sqrt(-E)
    x_switch = EIGEN_SWITCH_Z / (2 * tau)
    q = level.weight_Q
    coef = None
    out = []
    for x in xs:
        x = float(x)
        if x <= x_switch:
            v = basis.solution_pair(basis.PRINCIPAL, p, ext, x, E)[0]
        else:
            if coef is None:
                ref = basis.solution_pair(basis.PRINCIPAL, p, ext, x_switch, E)[0]
                coef = ref / basis.solution_pair(basis.V1, p, ext, x_switch, E)[0]
            v = coef * basis.solution_pair(basis.V1, p, ext, x, E)[0]
        out.append(q * v.real)
    return out


# ---------------------------------------------------------------------------
# assembly


def assemble_spectrum(p, ext=None, window=(-1e3, 0.0), grid=(), n_limit=10):
    ext = _check_ext(p, ext)
    rid = ext.range_id
    notes = [f"k0 = {p.k0!r}"]
    energies, density = [], []
    for e in grid:
        e = float(e)
        try:
            density.append(continuum_density(p, ext, e))
            energies.append(e)
        except ThresholdCase:
            notes.append("E = 0 omitted from the density grid: delta weight in zero_mode")
    levels = discrete_spectrum(p, ext, window, n_limit)
    zero = None
    if p.g1 > 0 and rid != "R1":
        zero = zero_energy_eigenvalue(p, ext)
        notes.append(f"threshold angle = {threshold_param(p)!r}")
    if rid == "R4":
        notes.append("spectrum unbounded below")
        if p.g1 > 0:
            notes.append(f"n_max = {r4_n_max(p, ext)}")
    if p.g1 < 0:
        notes.append("accumulation point at E = 0")
    angle = None if rid == "R1" else ext.angle
    return SpectrumReport(p, rid, angle, {"energies": energies, "density": density},
                          levels, zero, notes)
