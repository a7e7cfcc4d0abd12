from __future__ import annotations

from fractions import Fraction

import pytest

from qcbounds.enumerators import macwilliams_transform, stabilizer_weight_distribution
from qcbounds.lpbound import (
    LPInstance,
    LPRow,
    build_lp,
    lp_verdict,
    max_k,
    solve_feasibility,
)

from conftest import CORPUS_SMALL, load_code


def test_toy_infeasible_with_multipliers():
    lp = LPInstance(
        ["x"],
        [
            LPRow("x>=1", [Fraction(1)], Fraction(1), ">="),
            LPRow("-x>=0", [Fraction(-1)], Fraction(0), ">="),
        ],
    )
    verdict = solve_feasibility(lp)
    assert verdict.status == "infeasible"
    assert dict(verdict.farkas) == {"x>=1": 1, "-x>=0": 1}


def test_toy_feasible_witness():
    lp = LPInstance(
        ["x"],
        [
            LPRow("x>=0", [Fraction(1)], Fraction(0), ">="),
            LPRow("x=3", [Fraction(1)], Fraction(3), "=="),
        ],
    )
    verdict = solve_feasibility(lp)
    assert verdict.status == "feasible"
    assert verdict.witness == [3]


def test_toy_negative_rhs_equality():
    lp = LPInstance(["x"], [LPRow("x=-2", [Fraction(1)], Fraction(-2), "==")])
    assert solve_feasibility(lp).status == "feasible"
    lp2 = LPInstance(
        ["x"],
        [
            LPRow("x=-2", [Fraction(1)], Fraction(-2), "=="),
            LPRow("x>=0", [Fraction(1)], Fraction(0), ">="),
        ],
    )
    assert solve_feasibility(lp2).status == "infeasible"


def test_invalid_parameters():
    with pytest.raises(ValueError):
        build_lp(5, 2, 7, "general")
    with pytest.raises(ValueError):
        build_lp(5, 2, 3, "selfdual")
    with pytest.raises(ValueError):
        build_lp(5, 3, 2, "additive_I")
    with pytest.raises(ValueError):
        build_lp(5, 2, 3, "bogus")


def test_corpus_enumerators_are_witnesses():
    """Every real code's enumerator satisfies the LP at the code's own
    parameters; for stabilizer codes the typed additive program fits too."""
    for name, n, k, delta in CORPUS_SMALL:
        code = load_code(name)
        a = stabilizer_weight_distribution(code)
        variant = "selfdual" if code.K == 1 else "general"
        lp = build_lp(n, code.K, delta, variant)
        for row in lp.rows:
            res = row.residual(list(a))
            if row.sense == "==":
                assert res == 0, (name, row.label, res)
            else:
                assert res >= 0, (name, row.label, res)


def test_additive_type_rows_on_codes():
    # all-even-weight stabilizer groups are type II
    for name, K, delta in [("four_two_two", 4, 2), ("five_qubit", 2, 3)]:
        code = load_code(name)
        a = stabilizer_weight_distribution(code)
        lp = build_lp(code.n, K, delta, "additive_II")
        row = next(r for r in lp.rows if r.label == "additive.even_sum")
        assert row.residual(list(a)) == 0, name
    # Z-stabilized single qubit has an odd-weight element: type I
    code = load_code("single_z")
    a = stabilizer_weight_distribution(code)
    lp = build_lp(1, 1, 1, "additive_I")
    row = next(r for r in lp.rows if r.label == "additive.even_sum")
    assert row.residual(list(a)) == 0


def test_lp_examples_from_known_codes():
    assert solve_feasibility(build_lp(5, 2, 3, "general")).is_feasible
    assert solve_feasibility(build_lp(2, 1, 2, "selfdual")).is_feasible
    # the LP alone does not exclude a ((7,1,4)) code
    assert solve_feasibility(build_lp(7, 1, 4, "selfdual")).is_feasible


def test_prior_bound_boundary_n8():
    assert solve_feasibility(build_lp(8, 9, 3, "general")).is_feasible
    assert not solve_feasibility(build_lp(8, 10, 3, "general")).is_feasible


def test_farkas_multipliers_recombine_exactly():
    lp = build_lp(8, 10, 3, "general")
    verdict = solve_feasibility(lp)
    assert verdict.status == "infeasible"
    label_to_row = {r.label: r for r in lp.rows}
    combo = [Fraction(0)] * len(lp.variables)
    rhs = Fraction(0)
    for label, mult in verdict.farkas:
        row = label_to_row[label]
        if row.sense == ">=":
            assert mult >= 0
        for v in range(len(combo)):
            combo[v] += mult * row.coeffs[v]
        rhs += mult * row.rhs
    assert all(c == 0 for c in combo)
    assert rhs > 0


def test_monotone_feasibility_small_n():
    for n, delta in [(4, 2), (5, 3), (6, 4)]:
        feas = [solve_feasibility(build_lp(n, K, delta, "general")).is_feasible for K in range(2, 2**n + 1)]
        # once infeasible, stays infeasible
        seen_infeasible = False
        for ok in feas:
            if seen_infeasible:
                assert not ok
            seen_infeasible = seen_infeasible or not ok


def test_max_k_small_cells():
    assert max_k(6, 5, "general") == 0
    assert max_k(7, 4, "general") == 1  # the SDP certificate, not the LP, kills K=1
    assert max_k(6, 3, "general") == 2
    assert max_k(8, 3, "general") == 9  # prior published LP bound at (8, 3)
    assert max_k(5, 3, "general") >= 2


def test_max_k_degenerate_delta():
    # delta = n+1 leaves only the trivial-code cap; K >= 2 is excluded
    assert max_k(3, 4, "general") in (0, 1)


def test_max_k_selfdual_and_additive():
    assert max_k(2, 2, "selfdual") == 1
    assert max_k(7, 4, "selfdual") == 1  # LP-level: relaxation cannot exclude it
    assert max_k(4, 2, "additive_any") >= 4  # the [[4,2,2]] code exists
    assert max_k(5, 3, "additive_any") == 2  # the five-qubit code is extremal


def test_k1_uses_selfdual_convention():
    # (6,1,5): even the K=1 (pure) program is infeasible, hence the table zero
    assert not lp_verdict(6, 1, 5, "general").is_feasible
    assert lp_verdict(7, 1, 4, "general").is_feasible
