"""The eleven acceptance criteria, one test each; each prints a PASS/FAIL line."""

import cmath
import math
import random

import numpy as np
import pytest

from kratzer_spectra import basis, greens, oracle, spectral
from kratzer_spectra.model import CouplingParams, classify, extension, molecule_couplings, molecule_input

from conftest import ACCEPTANCE


def verdict(num, title, ok, detail):
    line = f"#{num} {'PASS' if ok else 'FAIL'} {title}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def _angle_levels(p, angle, n, window=(-50.0, 0.0)):
    return spectral.discrete_spectrum(p, extension(p, angle), window, n)


# 1 -------------------------------------------------------------------------


def test_01_closed_form_spectrum():
    p = CouplingParams(-1.0, 0.75)
    levels = spectral.discrete_spectrum(p, extension(p), (-1.0, 0.0), 10)
    err = max(abs(lv.energy * (3 + 2 * n) ** 2 + 1) for n, lv in enumerate(levels))
    shot = oracle.shoot_eigenvalues(p, extension(p), (-0.2, -0.01))
    shoot_err = max(abs(e * (3 + 2 * n) ** 2 + 1) for n, e in enumerate(shot[:4]))
    ok = len(levels) == 10 and err <= 1e-12 and len(shot) >= 4 and shoot_err <= 1e-6
    verdict(1, "closed-form R1 spectrum", ok,
            f"10 levels rel err {err:.2e}, shooting first 4 rel err {shoot_err:.2e}")


# 2 -------------------------------------------------------------------------


def test_02_endpoint_spectra():
    g1 = -1.0
    worst = 0.0
    runs = [(0.1, math.pi / 2), (0.1, -math.pi / 2), (-0.25, math.pi / 2), (-0.25, -math.pi / 2),
            (0.0, math.pi / 2), (0.0, -math.pi / 2)]
    count_ok = True
    for g2, angle in runs:
        p = CouplingParams(g1, g2, 1.3)
        mu = math.sqrt(g2 + 0.25)
        c = {"R2": 1 + 2 * mu, "R3": 1.0, "R5": 2.0}[classify(p).range_id]
        levels = _angle_levels(p, angle, 10, (-100.0, 0.0))
        count_ok &= len(levels) == 10
        for n, lv in enumerate(levels):
            ref = -g1 * g1 / (c + 2 * n) ** 2
            worst = max(worst, abs(lv.energy / ref - 1))
    verdict(2, "endpoint spectra R2/R3/R5", count_ok and worst <= 1e-12,
            f"60 levels, max rel err {worst:.2e}")


# 3 -------------------------------------------------------------------------


def test_03_wronskian_suite():
    rng = random.Random(3)
    worst = {}

    def draw():
        return (complex(rng.uniform(-2, 2), rng.uniform(-2, 2)), rng.uniform(0.1, 3.0),
                rng.choice([-1, 1]) * rng.uniform(0.1, 2.0))

    def record(name, err):
        worst[name] = max(worst.get(name, 0.0), err)

    for _ in range(30):
        W, x, g1 = draw()
        g2 = rng.uniform(-0.24, 0.74)
        p = CouplingParams(g1, g2)
        mu = math.sqrt(g2 + 0.25)
        record("u1,u2", abs(basis.wronskian(basis.U1, basis.U2, p, None, x, W) + 2 * mu))
    for _ in range(30):
        W, x, g1 = draw()
        p = CouplingParams(g1, -0.25, rng.uniform(0.3, 3))
        record("u1,u3", abs(basis.wronskian(basis.U1, basis.U3, p, None, x, W) - 1))
    for _ in range(30):
        W, x, g1 = draw()
        p = CouplingParams(g1, 0.0, rng.uniform(0.3, 3))
        record("u1,u5", abs(basis.wronskian(basis.U1, basis.U5, p, None, x, W) + 1))
    for _ in range(30):
        W, x, g1 = draw()
        p = CouplingParams(g1, rng.uniform(-3, 3))
        om = basis.omega(g1, basis.mu_of(p), basis.branch_lambda(W))
        record("u1,v1", abs(basis.wronskian(basis.U1, basis.V1, p, None, x, W) + om))
    ok = all(v <= 1e-8 for v in worst.values())
    verdict(3, "Wronskian identities", ok,
            ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (30 draws each)")


# 4 -------------------------------------------------------------------------


def test_04_density_positivity():
    grid = np.geomspace(1e-3, 30, 50)
    setups = {"R1": (0.75, [None]), "R2": (0.1, [-1.0, 0.2, 1.4]), "R3": (-0.25, [-1.0, 0.2, 1.4]),
              "R4": (-1.25, [0.3, 1.5, 2.8]), "R5": (0.0, [-1.0, 0.2, 1.4])}
    lowest = math.inf
    gap_min = math.inf   # 1 - |D|^2; |D|^2 itself rounds to 1.0 when g1 > 0 and E -> 0
    for rid, (g2, angles) in setups.items():
        for g1 in (-1.0, 1.0):
            p = CouplingParams(g1, g2, 1.3)
            for a in angles:
                ext = extension(p, a)
                for E in grid:
                    lowest = min(lowest, spectral.continuum_density(p, ext, E))
                    if rid == "R4":
                        gap_min = min(gap_min, spectral.r4_one_minus_d2(p, E))
    ok = lowest > 0 and gap_min > 0
    verdict(4, "density positivity", ok, f"min sigma' {lowest:.3e}, R4 min 1 - |D|^2 {gap_min:.3e}")


# 5 -------------------------------------------------------------------------


def _richardson(p, angle_of, n, d=1e-4):
    # E(offset) is linear in the offset near the endpoint
    def e(delta):
        return {lv.n: lv.energy for lv in _angle_levels(p, angle_of(delta), 8)}[n]
    return 2 * e(d / 2) - e(d)


def test_05_interlacing_monotonicity():
    problems = []
    lim_err = 0.0
    # (g2, sign of dE/dangle, label shift at +pi/2, label shift at -pi/2)
    for g2, sign, up, dn in [(0.1, 1, 0, 1), (-0.25, -1, 0, -1), (0.0, 1, -1, 0)]:
        p = CouplingParams(-1.0, g2, 1.3)
        for angle in (-1.2, 0.3, 1.2):
            lv = _angle_levels(p, angle, 8)
            for a, b in zip(lv, lv[1:]):
                if not (a.bracket[1] == b.bracket[0] and b.n == a.n + 1):
                    problems.append(f"g2={g2} brackets")
            for l in lv:
                if not l.bracket[0] < l.energy < l.bracket[1]:
                    problems.append(f"g2={g2} root outside bracket")
            moved = {l.n: l.energy for l in _angle_levels(p, angle + 0.01, 8)}
            for l in lv:
                if l.n in moved and not sign * (moved[l.n] - l.energy) > 0:
                    problems.append(f"g2={g2} monotonicity n={l.n}")
        for n in range(3):
            ref = spectral.endpoint_energy(p, n)
            lim_err = max(lim_err,
                          abs(_richardson(p, lambda d: math.pi / 2 - d, n + up) / ref - 1),
                          abs(_richardson(p, lambda d: -math.pi / 2 + d, n + dn) / ref - 1))
    ok = not problems and lim_err <= 1e-6
    verdict(5, "interlacing, monotonicity, endpoint limits", ok,
            f"{len(problems)} bracket/monotonicity problems, endpoint limit rel err {lim_err:.2e}")


# 6 -------------------------------------------------------------------------


def test_06_r4_accumulation():
    kappa = 2.0
    p = CouplingParams(-1.0, -kappa ** 2 - 0.25, 1.0)
    ext = extension(p, 1.0)
    top = spectral.discrete_spectrum(p, ext, (-1e6, -0.1), 1)[-1]
    chain = [spectral.r4_level(p, ext, top.n - k).energy for k in range(7)]
    ratio = chain[6] / chain[5]
    ratio_err = abs(ratio / math.exp(2 * math.pi / kappa) - 1)
    ns = np.arange(20, 81, 10)
    rem = [spectral.r4_level(p, ext, int(n)).energy + p.g1 ** 2 / (4 * n * n) for n in ns]
    slope = -np.polyfit(np.log(ns), np.log(np.abs(rem)), 1)[0]
    ok = ratio_err < 0.01 and slope >= 2.7
    verdict(6, "R4 accumulation laws", ok,
            f"6th ratio/e^pi - 1 = {ratio_err:.2e}, tail remainder exponent {slope:.2f}")


# 7 -------------------------------------------------------------------------


def test_07_zero_modes():
    worst = 0.0
    spurious = 0
    for g2 in (0.1, -0.25, -1.25, 0.0):
        for g1, k0 in ((1.0, 1.0), (0.7, 1.3)):
            p = CouplingParams(g1, g2, k0)
            t = spectral.threshold_param(p)
            ext = extension(p, t)
            w = spectral.zero_energy_eigenvalue(p, ext)
            worst = max(worst, abs(spectral.zero_mode_residue(p, ext) / w - 1))
            spurious += spectral.zero_energy_eigenvalue(p, extension(p, t + 1e-3)) is not None
    ok = worst <= 1e-6 and spurious == 0
    verdict(7, "zero-energy thresholds", ok,
            f"residue vs weight rel err {worst:.2e}, zero modes at offset 1e-3: {spurious}")


# 8 -------------------------------------------------------------------------


ORTHO_CASES = [(0.75, None), (0.1, 0.3), (-0.25, 0.4), (-1.25, 1.0), (0.0, 0.4)]


def test_08_orthonormality():
    worst = 0.0
    for g2, angle in ORTHO_CASES:
        p = CouplingParams(-1.0, g2, 1.3)
        ext = extension(p, angle)
        lv = spectral.discrete_spectrum(p, ext, (-50.0, 0.0), 3)
        for i, a in enumerate(lv):
            for b in lv[i:]:
                fa = lambda x, a=a: spectral.eigenfunction(p, ext, a, [x])[0]
                fb = lambda x, b=b: spectral.eigenfunction(p, ext, b, [x])[0]
                s = 1.0 / math.sqrt(-b.energy)
                ip = oracle.quad_inner_product(fa, fb, (0.0, 60 * s), 1e-9,
                                               breakpoints=[0.1 * s, s, 5 * s, 20 * s])
                worst = max(worst, abs(ip - (1.0 if a is b else 0.0)))
    verdict(8, "orthonormality", worst <= 1e-4, f"max |<U_n,U_m> - delta| {worst:.2e}")


# 9 -------------------------------------------------------------------------


def _ode_residual(p, ext, x, y, W):
    # second derivative from central differences of the exact x-derivative
    h = 1e-4 * x
    dp = greens.green(p, ext, x + h, y, W).dx
    dm = greens.green(p, ext, x - h, y, W).dx
    g = greens.green(p, ext, x, y, W).value
    rhs = (p.g1 / x + p.g2 / x ** 2 - W) * g
    return abs((dp - dm) / (2 * h) - rhs) / max(abs(rhs), abs(g) / x ** 2)


def test_09_green_defect():
    rng = random.Random(9)
    g2_of = {"R1": lambda: rng.uniform(0.75, 3), "R2": lambda: rng.uniform(-0.24, 0.74),
             "R3": lambda: -0.25, "R4": lambda: rng.uniform(-3, -0.3), "R5": lambda: 0.0}
    angle_of = {"R1": lambda: None, "R4": lambda: rng.uniform(0, math.pi)}
    cont = jump = ode = pole = 0.0
    for rid, g2f in g2_of.items():
        for _ in range(10):
            p = CouplingParams(rng.choice([-1, 1]) * rng.uniform(0.3, 2), g2f(), rng.uniform(0.5, 2))
            ext = extension(p, angle_of.get(rid, lambda: rng.uniform(-1.5, 1.5))())
            W = complex(rng.uniform(-2, 2), rng.choice([-1, 1]) * rng.uniform(0.05, 1))
            y = rng.uniform(0.2, 3)
            up = greens.green(p, ext, y, y, W, upper=True)
            dn = greens.green(p, ext, y, y, W, upper=False)
            cont = max(cont, abs(up.value - dn.value) / abs(up.value))
            jump = max(jump, abs(up.dx - dn.dx + 1))
            for x in (0.5 * y, 1.7 * y):
                ode = max(ode, _ode_residual(p, ext, x, y, W))
            levels = spectral.discrete_spectrum(p, ext, (-20.0, 0.0), 3)
            poles = greens.omega_poles(p, ext, (-20.0, 0.0), 3)
            for lv, e in zip(levels, poles):
                pole = max(pole, abs(e / lv.energy - 1))
    ok = cont <= 1e-6 and jump <= 1e-6 and ode <= 1e-6 and pole <= 1e-9
    verdict(9, "Green-function defect", ok,
            f"continuity {cont:.1e}, jump {jump:.1e}, ODE residual {ode:.1e}, poles {pole:.1e}")


# 10 ------------------------------------------------------------------------


def test_10_nu_zero_mirror():
    worst = 0.0
    for g2 in (0.1, -0.1875, 0.5):
        p = CouplingParams(-1.0, g2, 1.3)
        found = _angle_levels(p, 0.0, 8)
        mirror = spectral.closed_form_levels(p, "R2_nu0_mirror", 8)
        for a, b in zip(found, mirror):
            worst = max(worst, abs(a.energy / b.energy - 1))
    verdict(10, "nu = 0 mirror identity", worst <= 1e-9, f"max rel err {worst:.2e}")


# 11 ------------------------------------------------------------------------


def test_11_molecular_mapping():
    g2 = molecule_couplings(molecule_input("CO")).g2
    verdict(11, "CO coupling g2", 3e4 <= g2 <= 6e4, f"g2 = {g2:.6g}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
