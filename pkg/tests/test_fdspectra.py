import json
import math
from fractions import Fraction

import numpy as np
import pytest

from twisted_sutherland.fdspectra import (
    FDProblem,
    compare,
    fd_eigenvalues,
    fd_operator,
    richardson,
    verify_variants,
)
from twisted_sutherland.hamassembly import (
    assemble_closed_form,
    free_particle_spec,
    poschl_teller_spec,
    standard_sutherland_spec,
)
from twisted_sutherland.repcalc import spectrum_standard, spectrum_twisted

BOX = [0.5, 2.0, 4.5]


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.abs(np.asarray(b)))


def test_particle_in_a_box():
    vals = fd_eigenvalues(FDProblem(free_particle_spec(), 10_000, levels=3))
    assert rel(vals, BOX) <= 1e-5


def test_poschl_teller_levels():
    vals = fd_eigenvalues(FDProblem(poschl_teller_spec(2), 4096, levels=3))
    assert rel(vals, [4, 9, 16]) <= 1e-4


def test_twisted_rank_one_levels():
    report = compare(assemble_closed_form(3, 1), spectrum_twisted(1, 3, 40), 4096, 3, 1e-4)
    assert [lv.predicted for lv in report.levels] == [Fraction(8, 3), Fraction(32, 3), Fraction(68, 3)]
    assert report.passed


def test_twisted_levels_map_to_poschl_teller_odd_modes():
    # 2E + 11/3 on (0, pi/2) equals the g=2 well on (0, pi) restricted to odd modes: 9, 25, 49
    vals = fd_eigenvalues(FDProblem(assemble_closed_form(3, 1), 4096, levels=3))
    assert rel(2 * vals + 11 / 3, [9, 25, 49]) <= 1e-4


def test_richardson_on_the_box():
    problem = FDProblem(free_particle_spec(), 1000, levels=3)
    res = richardson(problem)
    assert np.max(np.abs(res.extrapolated - BOX)) <= 1e-8
    fine_error = np.max(np.abs(res.raw[-1] - BOX))
    assert fine_error >= 10 * np.max(np.abs(res.extrapolated - BOX))
    assert res.monotone and res.warning == ""
    assert np.all(res.error_estimate > 0)


def test_richardson_on_poschl_teller():
    res = richardson(FDProblem(poschl_teller_spec(2), 4096, levels=3))
    assert np.max(np.abs(res.extrapolated - [4, 9, 16])) <= 1e-6


def test_richardson_grid_validation():
    problem = FDProblem(free_particle_spec(), 200, levels=2)
    with pytest.raises(ValueError):
        richardson(problem, grids=(200,))
    with pytest.raises(ValueError):
        richardson(problem, grids=(200, 300))


def test_second_order_convergence():
    grids = [500, 1000, 2000]
    errors = [np.max(np.abs(fd_eigenvalues(FDProblem(free_particle_spec(), g, 3)) - BOX)) for g in grids]
    slope = -np.polyfit(np.log(grids), np.log(errors), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize(
    "problem",
    [
        FDProblem(poschl_teller_spec(3), 300),
        FDProblem(assemble_closed_form(3, 2), 300),
        FDProblem(assemble_closed_form(3, 3), 300),
        FDProblem(assemble_closed_form(4, 2), 16, allow_higher_rank=True),
    ],
    ids=["poschl-teller", "su3-k2", "su3-k3", "su4-k2-rank2"],
)
def test_operator_is_exactly_symmetric(problem):
    H, _ = fd_operator(problem)
    assert (H - H.T).nnz == 0


def test_shrinking_the_box_raises_every_level():
    wide = fd_eigenvalues(FDProblem(free_particle_spec(1), 1000, 4))
    narrow = fd_eigenvalues(FDProblem(free_particle_spec(Fraction(3, 4)), 1000, 4))
    assert np.all(narrow > wide)
    assert rel(narrow, np.array(BOX + [8.0]) * 16 / 9) <= 1e-4


def test_matrix_valued_case():
    report = compare(assemble_closed_form(3, 2), spectrum_twisted(2, 3, 60), 4096, 6, 1e-3)
    assert report.passed, report.table()


def test_dual_variant_verdict():
    dual = verify_variants(3, 1, 2048, 5, 1e-3)
    assert dual.derived.passed and not dual.printed.passed
    assert dual.printed_offset == pytest.approx(-1 / 6, abs=1e-3)
    assert dual.printed_offset_spread < 1e-3
    assert dual.verdict.startswith("1/(2n+1) convention reproduces")
    assert json.loads(json.dumps(dual.to_json()))["derived"]["passed"] is True


def test_standard_sutherland_pass():
    report = compare(standard_sutherland_spec(2, 2), spectrum_standard(1, 2, 100), 2048, 5, 1e-3)
    assert report.passed
    assert [int(lv.predicted) for lv in report.levels] == [4, 9, 16, 25, 36]


def test_report_serialization():
    report = compare(poschl_teller_spec(2), spectrum_standard(1, 2, 100), 512, 3, 1e-2, extrapolate=True)
    doc = json.loads(report.dumps())
    assert doc["method"] == "fd+richardson" and doc["passed"]
    assert [lv["predicted"] for lv in doc["levels"]] == ["4", "9", "16"]
    assert all(lv["relative_error"] >= 0 for lv in doc["levels"])
    assert "PASS" in report.table()


def test_too_few_predicted_levels():
    with pytest.raises(ValueError, match="levels below its cutoff"):
        compare(assemble_closed_form(3, 1), spectrum_twisted(1, 3, 10), 512, 5, 1e-3)


def test_rank_two_needs_the_flag():
    with pytest.raises(ValueError, match="allow_higher_rank"):
        FDProblem(assemble_closed_form(4, 2), 64)


def test_rank_two_ground_state_is_close():
    lowest = float(spectrum_twisted(2, 4, 30).expanded()[0])
    vals = fd_eigenvalues(FDProblem(assemble_closed_form(4, 2), 48, levels=1, allow_higher_rank=True))
    assert vals[0] == pytest.approx(lowest, rel=2e-2)


def test_problem_validation():
    with pytest.raises(ValueError):
        FDProblem(free_particle_spec(), 50)
    with pytest.raises(ValueError):
        FDProblem(free_particle_spec(), 500, levels=0)
    with pytest.raises(ValueError):
        fd_eigenvalues(FDProblem(free_particle_spec(), 100, levels=200))
    assert FDProblem(free_particle_spec(), 400).h == pytest.approx(math.pi / 400)
