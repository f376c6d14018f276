import pytest

from eisgen import verify
from eisgen.errors import CheckFailed
from eisgen.exact import parse_expr


class TestCorpus:
    def test_size(self):
        corpus = verify.expression_corpus()
        assert len(corpus) == 50
        assert len(set(corpus)) == 50

    def test_parses(self):
        for text in verify.expression_corpus():
            parse_expr(text)


class TestSuites:
    def test_names(self):
        names = [suite.__name__ for suite in verify.SUITES]
        assert len(names) == 13
        assert names[0] == "suite_section_counts"
        assert names[-1] == "suite_round_trip"

    @pytest.mark.parametrize(
        ("index", "name"), [(2, "hecke"), (4, "projector"), (7, "scissor"), (8, "q-gamma")]
    )
    def test_cheap_suites(self, index, name):
        result = verify.run_suite(index)
        assert result.passed
        assert result.name == name
        assert result.checks > 0

    def test_failure_becomes_a_result(self, monkeypatch):
        def suite_always_fails(budget, jobs):
            raise CheckFailed("nope", 3)

        monkeypatch.setattr(verify, "SUITES", (suite_always_fails,))
        result = verify.run_suite(0)
        assert not result.passed
        assert result.to_json() == {
            "name": "always-fails",
            "passed": False,
            "checks": 0,
            "details": {"error": "CheckFailed", "message": "nope", "witness": "3"},
        }

    def test_budget_shrinks_the_table(self):
        result = verify.suite_section_counts(100, 1)
        assert result.passed
        assert result.details["counts"]["q=2,k=0"]

    @pytest.mark.slow
    def test_verify_all(self):
        results = verify.verify_all()
        assert [r.name for r in results][:3] == ["section-counts", "quasisections", "hecke"]
        assert all(r.passed for r in results)
