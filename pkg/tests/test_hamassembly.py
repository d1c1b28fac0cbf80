import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twisted_sutherland.fockspin import invariant_basis, symmetrize
from twisted_sutherland.hamassembly import (
    HamiltonianSpec,
    PotentialTerm,
    SingularPointError,
    assemble_closed_form,
    assemble_generic,
    assemble_untwisted_scalar,
    cartan_basis,
    compare_specs,
    evaluate_potential,
    poschl_teller_spec,
    root_vectors,
    standard_sutherland_spec,
)
from twisted_sutherland.rootfold import LinearForm, alcove, family_for_su, sample_alcove

CASES = [(N, k) for N in range(3, 7) for k in range(0, 5) if not (N % 2 == 0 and k % 2 == 1)]


def grouped(spec):
    out = {}
    for t in spec.potential_terms:
        key = t.canonical_key()
        out[key] = out.get(key, 0) + t.coefficient
    return out


def as_list(m):
    return [[Fraction(x) for x in row] for row in m]


def cartan_element(N, q):
    mid = [0.0] if N % 2 else []
    return np.diag(list(q) + mid + [-x for x in reversed(q)])


@pytest.mark.parametrize("N", range(3, 9))
def test_root_vectors_are_ad_eigenvectors(N):
    n = N // 2
    q = np.random.default_rng(N).uniform(-1, 1, n)
    H = cartan_element(N, q)
    for rv in root_vectors(N):
        X = rv.matrix.astype(float)
        assert np.allclose(H @ X - X @ H, rv.form(q) * X, atol=1e-12), (rv.form, rv.sector)
        assert Fraction(int(np.trace(rv.matrix @ rv.matrix.T))) * rv.norm == 1


@pytest.mark.parametrize("N", range(3, 9))
def test_root_vectors_cover_the_folded_sets(N):
    from twisted_sutherland.rootfold import build_folded_roots

    data = build_folded_roots(*family_for_su(N))
    plus = sorted(str(rv.form) for rv in root_vectors(N) if rv.sector == "+")
    minus = sorted(str(rv.form) for rv in root_vectors(N) if rv.sector == "-")
    assert plus == sorted(str(f) for f in data.positive_roots)
    assert minus == sorted(str(f) for f in data.positive_weights)


@pytest.mark.parametrize("N", range(3, 9))
def test_cartan_bases_are_dual(N):
    triples = cartan_basis(N)
    assert len(triples) == (N // 2 if N % 2 else N // 2 - 1)
    for a, (P, _, c) in enumerate(triples):
        for b, (_, Q, _) in enumerate(triples):
            tr = sum(Fraction(P[i, i]) * Fraction(Q[i, i]) for i in range(N))
            assert c * tr == (1 if a == b else 0)


def test_n3_k1_generic_example():
    spec = assemble_generic(3, 1)
    assert as_list(spec.constant_term) == [[Fraction(11, 6)]]
    g = grouped(spec)
    quarter = Fraction(-1, 4)
    assert as_list(g["inv_sin_sq", (Fraction(1),)]) == [[quarter]]
    assert as_list(g["inv_cos_sq", (Fraction(1),)]) == [[quarter]]
    assert as_list(g["inv_cos_sq", (Fraction(2),)]) == [[0]]


def test_vacuum_spin_space_has_no_potential():
    spec = assemble_generic(3, 0)
    assert as_list(spec.constant_term) == [[2]]
    assert all(not t.coefficient.any() for t in spec.potential_terms)


def test_n4_k2_difference_term():
    spec = assemble_generic(4, 2)
    assert spec.dim == 2
    key = ("inv_sin_sq", (Fraction(1), Fraction(-1)))
    assert as_list(grouped(spec)[key]) == [[Fraction(-1, 4)] * 2] * 2


def test_n4_k2_scalar_terms():
    # kappa = 1, n = 2: 1/4 - (n1^2 + n2^2)/2 on each basis state, plus <rho, rho> = 5
    spec = assemble_closed_form(4, 2)
    basis = invariant_basis(4, 2)
    for row, occ in enumerate(basis.occupations):
        assert spec.constant_term[row, row] == 5 + Fraction(1, 4) - Fraction(occ[0] ** 2 + occ[1] ** 2, 2)


@pytest.mark.parametrize("N,k", CASES)
def test_routes_agree_exactly(N, k):
    assert compare_specs(assemble_generic(N, k), assemble_closed_form(N, k)) == []


@pytest.mark.parametrize("N,k", [(3, 1), (3, 2), (5, 2), (5, 3), (7, 1)])
def test_printed_variant_shifts_only_the_square_term(N, k):
    derived, printed = assemble_closed_form(N, k), assemble_closed_form(N, k, variant="printed")
    assert grouped(derived).keys() == grouped(printed).keys()
    assert all(np.array_equal(grouped(derived)[key], grouped(printed)[key]) for key in grouped(derived))
    n = N // 2
    extra = Fraction(1, 2 * n) - Fraction(1, 2 * n + 1)
    for row, occ in enumerate(invariant_basis(N, k).occupations):
        s = sum(occ[i] - occ[n] for i in range(n))
        assert printed.constant_term[row, row] - derived.constant_term[row, row] == extra * s * s
    assert compare_specs(derived, printed)


def test_printed_constant_for_smallest_case():
    assert as_list(assemble_closed_form(3, 1, variant="printed").constant_term) == [[2]]


@pytest.mark.parametrize("N,k", [(N, k) for N, k in CASES if k > 0])
def test_coefficients_negative_semidefinite(N, k):
    spec = assemble_generic(N, k)
    for t in spec.potential_terms:
        assert np.linalg.eigvalsh(symmetrize(t.coefficient, spec.norms_sq)).max() < 1e-12


def test_n3_k1_is_a_single_inverse_square():
    spec = assemble_closed_form(3, 1)
    for q in np.linspace(0.05, math.pi / 2 - 0.05, 17):
        expected = 11 / 6 - 1 / math.sin(q) ** 2
        assert evaluate_potential(spec, [q])[0, 0] == pytest.approx(expected, rel=1e-12)
    assert evaluate_potential(spec, [math.pi / 4])[0, 0] == pytest.approx(11 / 6 - 2, abs=1e-12)


@given(st.sampled_from(CASES), st.integers(0, 1000))
def test_potential_is_symmetric(case, seed):
    N, k = case
    spec = assemble_closed_form(N, k)
    family, n = family_for_su(N)
    q = sample_alcove(family, n, 1, np.random.default_rng(seed), margin=0.05)[0]
    V = evaluate_potential(spec, q)
    assert np.array_equal(V, V.T)


def test_vacuum_potential_is_constant():
    spec = assemble_closed_form(5, 0)
    pts = sample_alcove(*family_for_su(5), 5, np.random.default_rng(0), margin=0.05)
    assert all(np.array_equal(evaluate_potential(spec, q), [[float(spec.constant_term[0, 0])]]) for q in pts)


def test_singular_points_are_refused():
    spec = assemble_closed_form(3, 1)
    for q in (0.0, 1e-9, math.pi / 2 - 1e-10):
        with pytest.raises(SingularPointError):
            evaluate_potential(spec, [q])
    evaluate_potential(spec, [1e-6])
    with pytest.raises(ValueError):
        evaluate_potential(spec, [0.3, 0.2])


def test_empty_invariant_space():
    with pytest.raises(ValueError, match="no reduced system at this"):
        assemble_generic(4, 1)
    with pytest.raises(ValueError):
        assemble_closed_form(3, 1, variant="literal")


def test_untwisted_rank_one_rho():
    spec = assemble_untwisted_scalar(2, 0)
    assert as_list(spec.constant_term) == [[Fraction(1, 2)]]
    assert all(not t.coefficient.any() for t in spec.potential_terms)


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_standard_sutherland_is_poschl_teller_for_two_particles(g):
    std, pt = standard_sutherland_spec(2, g), poschl_teller_spec(g)
    assert compare_specs(std, pt) == []
    assert std.domain.interval() == pt.domain.interval() == (0.0, math.pi)


@pytest.mark.parametrize("N", [3, 4])
def test_untwisted_couplings(N):
    spec = assemble_untwisted_scalar(N, 2)
    assert len(spec.potential_terms) == N * (N - 1) // 2
    assert all(t.coefficient[0, 0] == -3 for t in spec.potential_terms)


def test_potential_term_json_roundtrip():
    for t in assemble_generic(5, 2).potential_terms:
        back = PotentialTerm.from_json(json.loads(json.dumps(t.to_json())))
        assert back.canonical_key() == t.canonical_key()
        assert np.array_equal(back.coefficient, t.coefficient)


def test_spec_json_is_exact_text():
    doc = json.loads(json.dumps(assemble_generic(3, 1).to_json()))
    assert doc["constant_term"] == [["11/6"]]
    assert doc["kinetic"] == [["1/2"]]


def test_shape_validation():
    spec = assemble_generic(3, 1)
    with pytest.raises(ValueError):
        HamiltonianSpec(None, None, None, spec.kinetic, spec.constant_term, (), spec.domain, (1, 1))
    with pytest.raises(ValueError):
        PotentialTerm(spec.constant_term, "inv_tan_sq", LinearForm((Fraction(1),)))


def test_kinetic_coefficient():
    assert assemble_generic(5, 1).kinetic_coefficient == Fraction(1, 2)
    with pytest.raises(ValueError):
        assemble_untwisted_scalar(3, 1).kinetic_coefficient
    assert alcove(*family_for_su(5)).n == 2
