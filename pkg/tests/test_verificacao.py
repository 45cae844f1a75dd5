import pytest

from funcoes.verificacao import SuiteReport, VerificationRunner, format_reports


def test_report_counts_violations():
    report = SuiteReport(suite="teste")
    report.add("bom", 1.0, 1.0, 0.0, True)
    report.add("ruim", 2.0, 1.0, 1.0, False)
    assert report.violations == 1
    text = format_reports([report])
    assert "[FAIL] ruim" in text
    assert text.endswith("violations: 1")


def test_unknown_suite():
    with pytest.raises(ValueError):
        VerificationRunner().run("nenhuma")


def test_suite_names():
    assert VerificationRunner().suite_names == ["exactness", "bounds", "sr", "critical", "perturb"]


def test_exactness_suite():
    (report,) = VerificationRunner().run("exactness")
    assert report.violations == 0
    assert len(report.checks) == 16 + 3 * 16


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["bounds", "sr", "critical", "perturb"])
def test_numeric_suites_have_no_violations(suite):
    (report,) = VerificationRunner().run(suite)
    assert report.checks
    assert report.violations == 0


@pytest.mark.slow
def test_perturb_suite_reports_every_mean_value_pair():
    (report,) = VerificationRunner().run("perturb")
    means = [c for c in report.checks if c.label.startswith("valor médio")]
    assert len(means) == 2 * 3
    assert len(report.checks) == 2 * 3 * 2 + len(means)
    exact = next(c for c in means if c.label == "valor médio harmonic + eps r^2")
    assert exact.margin <= 1e-6
    assert format_reports([report]).endswith("violations: 0")
