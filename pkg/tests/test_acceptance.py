"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``criterion N [PASS|FAIL]`` line; the lines are
repeated in the ``acceptance criteria`` section of the pytest summary. The
suites are the same ones ``dfo-kit verify --suite <name>`` runs.
"""
import pytest

from dfo_kit.harness.verify import verify_suite

CRITERIA = [
    (1, "fd-bound", "forward-difference fully-linear bound"),
    (2, "lemma-success", "small radius implies a successful step"),
    (3, "progress", "decrease on successful iterations"),
    (4, "radius-floor", "radius floor for the geometry-correcting method"),
    (5, "geometry-runs", "geometry-correcting blocks and the unit dynamic"),
    (6, "kappa-eg", "interpolation gradient error bound"),
    (7, "lower-bound", "tightness instance"),
    (8, "haar", "Haar alignment probability and Beta law"),
    (9, "complexity", "oracle counts within the complexity bounds"),
    (10, "scaling", "oracle count scaling in n and q"),
    (11, "noisy", "noisy-regime tolerance guarantee"),
]

TIME_LIMITS = {"haar": 30.0, "scaling": 300.0}


@pytest.mark.slow
@pytest.mark.parametrize("number,suite,title", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, suite, title, acceptance):
    report = verify_suite(suite)
    for line in report.lines():
        print(line)
    limit = TIME_LIMITS.get(suite)
    in_time = limit is None or report.seconds < limit
    detail = report.summary + f" ({report.seconds:.1f} s" + (f", limit {limit:.0f} s)" if limit else ")")
    acceptance(number, title, report.passed and in_time, detail)
    assert report.passed, "\n".join(report.lines())
    assert in_time, f"{suite} took {report.seconds:.1f} s, limit {limit} s"
