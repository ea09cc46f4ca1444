import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phistab.bounds import gamma_bar, lambda_statement2
from phistab.cube import BooleanFunction, DimensionError, decode, subcube_indicator
from phistab.enumerate import group_permutations, orbits
from phistab.oracle import (max_stability, max_stability_long, reference_value, verify_dictator,
                            verify_dominance)
from phistab.phi import PhiSpec, dictator_stability, phi_stability

SYM1 = PhiSpec(1.0, symmetric=True)
RHO_GRID = [round(0.1 * k, 1) for k in range(1, 10)]


def test_n2_balanced_example():
    rep = max_stability(2, 0.5, SYM1, 0.5)
    assert rep.enumerated_max == pytest.approx(-0.562335, abs=1e-6)
    assert rep.gap == pytest.approx(0.0, abs=1e-15)
    assert sorted(rep.attaining) == ["n:2;table:3", "n:2;table:5", "n:2;table:a", "n:2;table:c"]
    assert rep.counts == {"functions": 6, "expected": 6, "evaluated": 2, "skipped": 4, "orbits": 2}


def test_quadratic_gap_zero_n3():
    spec = PhiSpec(2.0, symmetric=True)
    for rep in verify_dictator(3, spec, RHO_GRID):
        assert rep.passed and abs(rep.gap) <= 1e-12


def test_quarter_mean_feasible():
    spec = PhiSpec(1.5, kind="power")
    rep = max_stability(2, 0.25, spec, 0.6)
    assert rep.attaining
    assert rep.enumerated_max >= phi_stability(subcube_indicator(2, [(1, 1), (2, 1)]), spec, 0.6) - 1e-15


def test_reference_values():
    spec = PhiSpec(3.0, kind="power")
    assert reference_value(3, 0.5, spec, 0.4) == dictator_stability(spec, 0.4)
    assert reference_value(3, 0.25, spec, 0.4) == pytest.approx(
        phi_stability(subcube_indicator(3, [(1, 1), (2, 1)]), spec, 0.4))
    assert reference_value(3, 0.375, spec, 0.4) is None


@pytest.mark.parametrize("spec, rhos", [
    (PhiSpec(5.0, symmetric=True), RHO_GRID),
    (SYM1, [0.4]),
    (PhiSpec(3.0, kind="power"), [0.5]),
])
def test_verify_dictator_examples(spec, rhos):
    assert all(rep.passed for rep in verify_dictator(4, spec, rhos))


def test_alpha_ten_counterexample_n4():
    # balanced dictators are beaten at n = 4 for the symmetric alpha = 10 functional
    spec = PhiSpec(10.0, symmetric=True)
    rep, = verify_dictator(4, spec, [0.5])
    assert not rep.passed and rep.gap > 1e-5
    for enc in rep.attaining:
        f = decode(enc)
        assert phi_stability(f, spec, 0.5) == pytest.approx(rep.enumerated_max, abs=1e-12)
    assert verify_dictator(4, spec, [0.9])[0].passed


def test_dominance_examples():
    assert verify_dominance(4, 0.5, SYM1, 0.3, "gamma-bar").dominance_margin >= 0
    rep = verify_dominance(4, 0.25, PhiSpec(1.5, kind="power"), 0.3, "gamma-tilde")
    assert rep.dominance_margin >= 0
    spec = PhiSpec(2.5, symmetric=True)
    rep = verify_dominance(3, 0.5, spec, 0.6, lambda_statement2(0.5, 0.6, spec))
    assert rep.passed and rep.bound_value == pytest.approx(spec.scalar(0.2), abs=1e-12)
    assert rep.bound_value == pytest.approx(-0.2731187, abs=1e-7)


@pytest.mark.parametrize("kind, spec, means", [
    ("gamma-bar", SYM1, (0.25, 0.375, 0.5)),
    ("gamma-bar", PhiSpec(1.5, symmetric=True), (0.25, 0.5)),
    ("gamma-bar", PhiSpec(4.0, symmetric=True), (0.25, 0.5)),
    ("gamma-bar", PhiSpec(5.0, symmetric=True), (0.5,)),
    ("lambda2", PhiSpec(2.5, symmetric=True), (0.25, 0.5)),
    ("gamma-tilde", PhiSpec(1.5, kind="power"), (0.25, 0.5, 0.75)),
    ("gamma-tilde", PhiSpec(3.0, kind="power"), (0.25, 0.5)),
    ("upsilon", SYM1, (0.5,)),
])
def test_dominance_invariant_n4(kind, spec, means):
    for a in means:
        for rho in (0.3, 0.6, 0.9):
            rep = verify_dominance(4, a, spec, rho, kind)
            assert rep.passed, (a, rho, rep.dominance_margin)


def test_count_audit_and_modes_agree():
    for n in (2, 3, 4):
        for k in (1, (1 << n) // 4, (1 << n) // 2):
            a = k / (1 << n)
            fast = max_stability(n, a, SYM1, 0.7)
            slow = max_stability(n, a, SYM1, 0.7, canonicalize=False)
            assert fast.counts["functions"] == math.comb(1 << n, k)
            assert fast.enumerated_max == pytest.approx(slow.enumerated_max, abs=1e-12)
            assert fast.attaining == slow.attaining
            assert max_stability(n, a, SYM1, 0.7, workers=3).to_dict() == fast.to_dict()


def test_orbit_count_n4():
    _, _, _, reps = orbits(4, 8)
    assert len(reps) == 74


def test_attaining_set_closed_under_complement():
    rep = max_stability(4, 0.5, PhiSpec(3.0, symmetric=True), 0.6)
    codes = {decode(e).to_int() for e in rep.attaining}
    assert {0xFFFF ^ c for c in codes} == codes


@settings(max_examples=30, deadline=None)
@given(st.integers(0, (1 << 16) - 1), st.integers(0, 383), st.floats(0.05, 0.95))
def test_stability_invariances(code, g, rho):
    f = BooleanFunction.from_int(4, code)
    perm = group_permutations(4)[g]
    moved = BooleanFunction(4, f.table[perm])
    for spec in (SYM1, PhiSpec(2.0, kind="power")):
        assert phi_stability(moved, spec, rho) == pytest.approx(phi_stability(f, spec, rho), abs=1e-12)
    comp = BooleanFunction(4, 1 - f.table)
    if f.mean == 0.5:
        assert phi_stability(comp, SYM1, rho) == pytest.approx(phi_stability(f, SYM1, rho), abs=1e-12)


def test_exhaustive_dimension_limit():
    with pytest.raises(DimensionError, match="max_stability_long"):
        max_stability(5, 0.5, SYM1, 0.5)
    with pytest.raises(ValueError):
        max_stability(3, 0.3, SYM1, 0.5)


def test_long_run_gated():
    with pytest.raises(PermissionError):
        max_stability_long(5, 0.5, SYM1, 0.5, checkpoint="")


def test_long_run_resumes(tmp_path):
    ck = str(tmp_path / "ck.json")
    part = max_stability_long(3, 0.5, SYM1, 0.6, ck, allow_long=True, chunk=16, max_chunks=2)
    assert not part.passed and part.counts["functions"] == 32
    done = max_stability_long(3, 0.5, SYM1, 0.6, ck, allow_long=True, chunk=16)
    ref = max_stability(3, 0.5, SYM1, 0.6)
    assert done.passed and done.counts["functions"] == 70
    assert done.enumerated_max == pytest.approx(ref.enumerated_max, abs=1e-12)
    assert done.attaining == ref.attaining
    with pytest.raises(ValueError, match="different run"):
        max_stability_long(3, 0.5, SYM1, 0.7, ck, allow_long=True)


def test_bound_value_matches_gamma_bar():
    rep = verify_dominance(3, 0.5, SYM1, 0.4, "gamma-bar")
    assert rep.bound_value == gamma_bar(0.5, 0.4, SYM1).value
    assert rep.dominance_margin == pytest.approx(0.0, abs=1e-12)
    assert np.isfinite(rep.gap)
