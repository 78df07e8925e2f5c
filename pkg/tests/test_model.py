import math

import pytest
from hypothesis import given, strategies as st

from kratzer_spectra.errors import DomainError, InvalidCoupling
from kratzer_spectra.model import (ANGLE_INTERVALS, CouplingParams, ExtensionParam, MoleculeInput,
                                   canonical_angle, classify, extension, load_molecules,
                                   molecule_couplings, molecule_input, parse_molecule_table,
                                   potential_profile)


def test_classify_examples():
    rc = classify(CouplingParams(1, 1))
    assert rc.range_id == "R1" and rc.deficiency == (0, 0)
    assert abs(rc.mu.magnitude - math.sqrt(5) / 2) < 1e-15
    rc = classify(CouplingParams(1, 0))
    assert rc.range_id == "R5" and rc.mu.magnitude == 0.5 and rc.deficiency == (1, 1)
    rc = classify(CouplingParams(-1, -0.5))
    assert rc.range_id == "R4" and rc.mu.kind == "imaginary" and abs(rc.mu.magnitude - 0.5) < 1e-15
    assert classify(CouplingParams(1, -0.25)).range_id == "R3"
    assert classify(CouplingParams(1, 0.3)).range_id == "R2"
    assert classify(CouplingParams(1, 0.75)).range_id == "R1"


def test_invalid_couplings():
    with pytest.raises(InvalidCoupling):
        CouplingParams(0.0, 1.0)
    with pytest.raises(InvalidCoupling):
        CouplingParams(1.0, 1.0, 0.0)
    with pytest.raises(InvalidCoupling):
        CouplingParams(1.0, math.nan)
    with pytest.raises(InvalidCoupling):
        ExtensionParam("R1", 0.3)
    with pytest.raises(InvalidCoupling):
        ExtensionParam("R2")


@given(st.floats(-10, 10).filter(lambda v: v != 0), st.floats(-5, 5))
def test_classify_partitions_g2_axis(g1, g2):
    rc = classify(CouplingParams(g1, g2))
    expected = ("R1" if g2 >= 0.75 else "R5" if g2 == 0 else "R3" if g2 == -0.25
                else "R4" if g2 < -0.25 else "R2")
    assert rc.range_id == expected
    assert abs(rc.mu.squared - (g2 + 0.25)) <= 1e-12 * max(1.0, abs(g2))


@pytest.mark.parametrize("g2", [0.75, 0.0, -0.25, 0.7499999999, 1e-300, -0.2500000001])
def test_classify_boundaries(g2):
    rc = classify(CouplingParams(1.0, g2))
    assert abs(rc.mu.squared - (g2 + 0.25)) < 1e-12


@pytest.mark.parametrize("rid", ["R2", "R3", "R4", "R5"])
@given(angle=st.floats(-50, 50))
def test_canonical_angle(rid, angle):
    lo, hi = ANGLE_INTERVALS[rid]
    a = canonical_angle(rid, angle)
    if rid == "R4":
        assert lo <= a < hi
    else:
        assert lo < a <= hi
    assert abs(canonical_angle(rid, a) - a) < 1e-12
    # same point of the circle: the angle is defined modulo pi
    assert abs(math.sin(a - angle)) < 1e-9


def test_endpoint_identification():
    up = ExtensionParam("R2", math.pi / 2)
    down = ExtensionParam("R2", -math.pi / 2)
    assert up == down and up.is_endpoint
    assert not ExtensionParam("R3", 0.1).is_endpoint


def test_extension_builder():
    assert extension(CouplingParams(1, 1)).angle is None
    assert extension(CouplingParams(1, 0), 0.2).range_id == "R5"


def test_potential_profile():
    assert potential_profile(CouplingParams(1, 1), [1.0]) == [2.0]
    assert potential_profile(CouplingParams(1, -1), [1.0]) == [0.0]
    xs = [1.5 + 0.001 * k for k in range(1001)]
    v = potential_profile(CouplingParams(-1, 1), xs)
    i = min(range(len(v)), key=v.__getitem__)
    assert abs(xs[i] - 2.0) < 1e-9 and abs(v[i] + 0.25) < 1e-12
    with pytest.raises(DomainError):
        potential_profile(CouplingParams(1, 1), [0.0])


def test_molecule_mapping():
    m = MoleculeInput(mass=1.0, dissociation_energy=0.0, equilibrium_separation=1.0, l=2, hbar=1.0)
    with pytest.raises(InvalidCoupling):
        molecule_couplings(m)  # De = 0 gives g1 = 0
    base = MoleculeInput(1.0, 2.0, 1.0, 0, 1.0)
    twice = MoleculeInput(1.0, 2.0, 2.0, 0, 1.0)
    assert molecule_couplings(twice).g2 == pytest.approx(4 * molecule_couplings(base).g2)
    assert molecule_couplings(MoleculeInput(1.0, 2.0, 1.0, 2, 1.0)).g2 == pytest.approx(4.0 + 6.0)


def test_co_bundled():
    p = molecule_couplings(molecule_input("CO"))
    assert 3e4 <= p.g2 <= 6e4
    assert p.g1 < 0
    assert "CO" in load_molecules()


def test_parse_molecule_table_errors():
    assert parse_molecule_table("# only comments\n\n") == {}
    with pytest.raises(ValueError):
        parse_molecule_table("X 1 2\n")
    with pytest.raises(ValueError):
        parse_molecule_table("X 1 2 3\nX 1 2 3\n")
