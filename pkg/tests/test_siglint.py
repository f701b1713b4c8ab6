from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dnullsim import siglint
from dnullsim.siglint import (BIANCHI_PAIRS, TABLE_ENTRIES, check_bianchi_pair,
                              check_homogeneous, default_registry, load_corpus,
                              parse_equation, print_equation, signature_of)

HALF = Fraction(1, 2)


@pytest.fixture(scope="module")
def registry():
    return default_registry()


@pytest.fixture(scope="module")
def corpus():
    return load_corpus()


class TestSignatureOf:
    def test_incoming_derivative_of_maxwell_flux(self, registry):
        term = parse_equation("x: D3(beta_F) = beta_F").lhs[0]
        assert signature_of(term, registry) == 1

    def test_coupling_weighted_scalar_product(self, registry):
        term = parse_equation("x: 2 ef*Im(psi*Psislash^dag) = psi").lhs[0]
        assert signature_of(term, registry) == 1

    def test_expansion_times_flux(self, registry):
        term = parse_equation("x: trchib*beta_F = psi").lhs[0]
        assert signature_of(term, registry) == 1

    def test_derivative_ladder(self, registry):
        for op, inc in (("D3", 1), ("D4", 0), ("Ds", HALF), ("d1", HALF),
                        ("d2s", HALF)):
            term = parse_equation(f"x: {op}(psi) = psi").lhs[0]
            assert signature_of(term, registry) == inc

    def test_powers_multiply(self, registry):
        term = parse_equation("x: rho_F^2 = psi").lhs[0]
        assert signature_of(term, registry) == 1

    def test_unknown_symbol(self, registry):
        term = parse_equation("x: nosuch = psi").lhs[0]
        with pytest.raises(KeyError, match="nosuch"):
            signature_of(term, registry)

    def test_family_term_reports_a_range(self, registry):
        term = parse_equation("x: Gamma_b*Gamma_b = psi").lhs[0]
        lo, hi = signature_of(term, registry)
        assert (lo, hi) == (0, 2)


class TestParser:
    def test_round_trip_on_corpus(self, corpus):
        for eq in corpus:
            text = print_equation(eq)
            again = parse_equation(text)
            assert again == eq, eq.label
            assert print_equation(again) == text

    def test_rational_coefficients(self):
        eq = parse_equation("x: 3/2 trchi*rho = rho")
        assert eq.lhs[0].coeff == Fraction(3, 2)

    def test_term_weight_powers(self):
        eq = parse_equation("x: u^2*a^-2*ef*psi = psi")
        t = eq.lhs[0]
        assert t.u_power == 2
        assert t.a_power == -2
        assert t.e_power == 1

    def test_signs(self):
        eq = parse_equation("x: - psi + 2 psi - 1/2 psi = psi")
        assert [t.coeff for t in eq.lhs] == [-1, 2, Fraction(-1, 2)]

    def test_paired_operator(self):
        eq = parse_equation("x: d1s(K, sigmat) = rho")
        assert eq.lhs[0].factors[0].func == "d1s"
        assert len(eq.lhs[0].factors[0].args) == 2

    @pytest.mark.parametrize("bad", [
        "x: psi +",
        "x: psi",
        "x: = psi",
        "x: psi = D3(psi",
        "x: psi = psi) ",
        "x: psi = psi ^",
    ])
    def test_bad_input_raises(self, bad):
        with pytest.raises(siglint.ParseError):
            parse_equation(bad)

    def test_empty_equation_rejected(self):
        with pytest.raises(siglint.ParseError):
            parse_equation("x:  = ")


class TestHomogeneity:
    def test_full_corpus_passes(self, registry, corpus):
        results = [check_homogeneous(eq, registry) for eq in corpus]
        failed = [r.label for r in results if not r.passed]
        assert failed == []

    def test_corpus_covers_all_equation_classes(self, corpus):
        categories = {eq.category for eq in corpus}
        assert {"null", "maxwell", "wave", "bianchi", "schematic"} <= categories

    def test_charge_transport_weight_frozen(self, registry, corpus):
        # golden value computed from the registry: every term of the outgoing
        # charge transport carries weight 1/2
        eq = next(e for e in corpus if e.label == "maxwell-e4-rhoF")
        res = check_homogeneous(eq, registry)
        assert res.passed
        assert res.target == HALF

    def test_incoming_flux_equation_weight(self, registry, corpus):
        eq = next(e for e in corpus if e.label == "maxwell-e3-betaF")
        res = check_homogeneous(eq, registry)
        assert res.passed
        assert res.target == 1

    def test_uncharging_the_coupling_breaks_maxwell(self, registry, corpus):
        # setting the coupling weight to zero must fail both sourced Maxwell
        # equations with a deficit of exactly 1/2
        mutated = registry.mutated("ef", -HALF)
        bad = {r.label: r for r in siglint.lint_corpus(mutated, corpus)
               if not r.passed}
        assert "maxwell-e4-rhoF" in bad and "maxwell-e3-rhoF" in bad
        for label in ("maxwell-e4-rhoF", "maxwell-e3-rhoF"):
            deficits = {m.deficit for m in bad[label].mismatches}
            assert deficits == {HALF}

    def test_mismatch_report_names_the_term(self, registry):
        eq = parse_equation("x: D3(psi) = rho_F")
        res = check_homogeneous(eq, registry)
        assert not res.passed
        assert res.mismatches[0].term == "rho_F"
        assert res.mismatches[0].expected == 1


class TestBianchiPairs:
    def test_all_eight_pairs_pass(self, registry):
        assert len(BIANCHI_PAIRS) == 8
        for pid in BIANCHI_PAIRS:
            result = check_bianchi_pair(pid, registry)
            assert result.passed, (pid, result.details)

    def test_alpha_pair_coefficient(self, registry):
        res = check_bianchi_pair("alpha-betat", registry)
        assert res.s2_psi1 == 0
        assert res.s2_psi2 == HALF
        assert res.coeff == HALF

    def test_maxwell_pair(self, registry):
        res = check_bianchi_pair("betaF-rhoF-sigmaF", registry)
        assert res.s2_psi1 == 0 and res.s2_psi2 == HALF

    def test_corrupted_registry_fails_pair(self, registry):
        bad = registry.mutated("sigma_F", HALF)
        res = check_bianchi_pair("betaF-rhoF-sigmaF", bad)
        assert not res.passed

    def test_unknown_pair(self, registry):
        with pytest.raises(KeyError, match="unknown pair"):
            check_bianchi_pair("no-such-pair", registry)


class TestMutationRigidity:
    def test_every_table_entry_is_pinned(self, registry, corpus):
        report = siglint.mutation_sweep(registry, corpus)
        assert len(report["entries"]) == len(TABLE_ENTRIES) == 33
        undetected = {name: per for name, per in report["entries"].items()
                      if min(per.values()) == 0}
        assert undetected == {}
        assert report["all_detected"]


class TestRuleConsistency:
    def test_declared_frame_indices_match_the_rule(self, registry):
        assert siglint.rule_consistency(registry) == []

    def test_rule_violation_is_reported(self, registry):
        bad = registry.mutated("beta", HALF)
        violations = siglint.rule_consistency(bad)
        assert any("beta" in v for v in violations)


class TestExpectedBounds:
    @pytest.mark.parametrize("symbol,want", [
        ("psi", (0.5, -1.0)),
        ("rho_F", (1.0, -2.0)),
        ("betab", (1.5, -4.0)),
        ("Psit3", (1.5, -3.0)),
        ("Ub", (1.0, -2.0)),
        ("alphab", (2.0, -5.0)),
    ])
    def test_tabulated(self, symbol, want):
        assert siglint.expected_bounds(symbol) == want

    def test_default_from_weight(self, registry):
        # untabulated symbols fall back to (s2, -(2 s2 + 1))
        assert siglint.expected_bounds("S34") == (1.0, -3.0)

    def test_family_has_no_bound(self):
        with pytest.raises(ValueError, match="family"):
            siglint.expected_bounds("Gamma_b")

    def test_unknown_symbol(self):
        with pytest.raises(KeyError):
            siglint.expected_bounds("nosuch")


def test_full_report_shape():
    report = siglint.lint_report(with_mutations=False)
    assert report["all_pass"]
    assert report["n_failed"] == 0
    assert report["rule_violations"] == []
    assert len(report["pairs"]) == 8
    assert report["notes"]


@given(st.sampled_from(sorted(TABLE_ENTRIES)),
       st.sampled_from([HALF, -HALF]))
def test_single_mutations_always_detected(entry, delta):
    registry = default_registry()
    for name in TABLE_ENTRIES[entry]:
        registry = registry.mutated(name, delta)
    corpus = load_corpus()
    n_eq_fails = sum(1 for r in siglint.lint_corpus(registry, corpus)
                     if not r.passed)
    n_pair_fails = sum(1 for pid in BIANCHI_PAIRS
                       if not check_bianchi_pair(pid, registry).passed)
    assert n_eq_fails + n_pair_fails > 0
