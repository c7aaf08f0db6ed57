from fractions import Fraction

import pytest

from fracdelay.model import (
    DelaySystem,
    PolyMatrix,
    ProblemFormatError,
    ProblemValidationError,
    SolverConfig,
    format_polynomial,
    parse_polynomial,
    parse_problem,
    serialize_problem,
    validate,
)
from fracdelay.series import Polynomial

EXAMPLE = """\
nu = 1/2
state_dim = 2
control_dim = 1
delays = 1/3, 2/3
horizon = 2/3
[A0]            # entries are polynomials in t, comma-separated
0, 0
0, 0
[A1]
t, 1
t, 2*t
[A2]
2, t
t^2, 0
[B]
0
1
[u]
2*t + 1
[phi]           # components of the history on [-tau, 0]
0
0
[solver]
K = 40
sample_step = 1/30
"""


class TestPolynomialText:
    @pytest.mark.parametrize(
        "text,coeffs",
        [
            ("0", []),
            ("1", [1.0]),
            ("2*t + 1", [1.0, 2.0]),
            ("t^2", [0.0, 0.0, 1.0]),
            ("t", [0.0, 1.0]),
            ("-t + 1/2", [0.5, -1.0]),
            ("1/3*t^2 - 2", [-2.0, 0.0, 1 / 3]),
            ("2.5*t - 0.5", [-0.5, 2.5]),
            ("1e-2*t", [0.0, 0.01]),
            ("3*t - t", [0.0, 2.0]),
        ],
    )
    def test_parse(self, text, coeffs):
        assert parse_polynomial(text) == Polynomial(coeffs)

    @pytest.mark.parametrize("bad", ["", "t + ", "2 3", "t^", "x", "1//2"])
    def test_parse_errors(self, bad):
        with pytest.raises(ValueError):
            parse_polynomial(bad)

    def test_format_round_trip(self):
        for p in (Polynomial(), Polynomial([1.5, -2.0, 0.0, 1 / 3]), Polynomial([0, 1])):
            assert parse_polynomial(format_polynomial(p)) == p


class TestParseProblem:
    def test_worked_example(self):
        system, cfg = parse_problem(EXAMPLE)
        assert system.nu == Fraction(1, 2)
        assert (system.n, system.m, system.r) == (2, 1, 2)
        assert system.delays == (Fraction(1, 3), Fraction(2, 3))
        assert system.horizon == Fraction(2, 3)
        assert system.A[1].entry(1, 1) == Polynomial([0, 2])
        assert system.A[2].entry(1, 0) == Polynomial([0, 0, 1])
        assert system.B.entry(0, 0) == Polynomial()
        assert system.u[0] == Polynomial([1, 2])
        assert system.phi == (Polynomial(), Polynomial())
        assert cfg == SolverConfig(K=40, sample_step=Fraction(1, 30))

    def test_accepts_bytes(self):
        system, _ = parse_problem(EXAMPLE.encode("utf-8"))
        assert system.n == 2

    def test_nu_canonicalized(self):
        system, _ = parse_problem(EXAMPLE.replace("nu = 1/2", "nu = 2/4"))
        assert system.nu == Fraction(1, 2)

    def test_decreasing_delays_rejected(self):
        text = EXAMPLE.replace("delays = 1/3, 2/3", "delays = 2/3, 1/3")
        with pytest.raises(ProblemValidationError, match="delays not increasing"):
            parse_problem(text)

    def test_nu_out_of_range(self):
        with pytest.raises(ProblemValidationError, match=r"nu out of \(0,1\]"):
            parse_problem(EXAMPLE.replace("nu = 1/2", "nu = 3/2"))

    def test_syntax_error_carries_line(self):
        text = EXAMPLE.replace("t, 2*t", "t, 2*x")
        with pytest.raises(ProblemFormatError, match="line 11, column 6"):
            parse_problem(text)

    def test_missing_section(self):
        text = EXAMPLE.replace("[phi]", "[misc]")
        with pytest.raises(ProblemFormatError, match=r"missing section \[phi\]"):
            parse_problem(text)

    def test_wrong_row_count(self):
        text = EXAMPLE.replace("[A0]            # entries are polynomials in t, comma-separated\n0, 0\n0, 0", "[A0]\n0, 0")
        with pytest.raises(ProblemFormatError, match="expected 2 rows"):
            parse_problem(text)

    def test_wrong_entry_count(self):
        text = EXAMPLE.replace("t, 2*t", "t")
        with pytest.raises(ProblemFormatError, match="expected 2 entries"):
            parse_problem(text)

    def test_missing_key(self):
        text = EXAMPLE.replace("horizon = 2/3\n", "")
        with pytest.raises(ProblemFormatError, match="missing required key 'horizon'"):
            parse_problem(text)

    def test_solver_defaults(self):
        text = EXAMPLE[: EXAMPLE.index("[solver]")]
        system, cfg = parse_problem(text)
        assert cfg.K == 40
        assert cfg.sample_step == system.horizon / 100

    def test_round_trip(self):
        system, cfg = parse_problem(EXAMPLE)
        system2, cfg2 = parse_problem(serialize_problem(system, cfg))
        assert system2 == system
        assert cfg2 == cfg
        # and a second round trip is textually stable
        assert serialize_problem(system2, cfg2) == serialize_problem(system, cfg)


class TestValidate:
    def good_system(self):
        system, _ = parse_problem(EXAMPLE)
        return system

    def test_worked_example_ok(self):
        assert validate(self.good_system()) == []

    def test_reports_all_violations(self):
        good = self.good_system()
        bad = DelaySystem(
            nu=Fraction(3, 2),
            n=good.n,
            m=good.m,
            delays=(Fraction(2, 3), Fraction(1, 3)),
            A=(PolyMatrix.zeros(3, 3),) + good.A[1:],
            B=good.B,
            u=good.u,
            phi=good.phi,
            horizon=Fraction(-1),
        )
        problems = validate(bad)
        assert any("nu out of (0,1]" in v for v in problems)
        assert any("delays not increasing" in v for v in problems)
        assert any("dimension mismatch: A0 is 3x3" in v for v in problems)
        assert any("horizon" in v for v in problems)

    def test_never_raises(self):
        good = self.good_system()
        weird = DelaySystem(
            nu=Fraction(0),
            n=good.n,
            m=good.m,
            delays=(),
            A=good.A,
            B=good.B,
            u=good.u,
            phi=good.phi,
            horizon=Fraction(1),
        )
        assert isinstance(validate(weird), list)

    def test_max_degree(self):
        assert self.good_system().max_degree() == 2
