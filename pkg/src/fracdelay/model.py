"""Problem statement data model and its text file format.

A problem file is line-oriented UTF-8: scalar keys first (nu, state_dim,
control_dim, delays, horizon), then one section per matrix/vector, then an
optional [solver] section.  ``#`` starts a comment anywhere on a line.
Polynomial entries use terms ``c``, ``c*t``, ``c*t^k`` joined by + or -,
with rational ("2/3") or decimal coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .numeric import format_rational, parse_rational
from .series import Polynomial


class ProblemFormatError(ValueError):
    """Syntax error in a problem file, with 1-based line (and column) info."""

    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


class ProblemValidationError(ValueError):
    """A structurally parsed problem violates model invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("invalid problem: " + "; ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class PolyMatrix:
    """Matrix of polynomials, row-major."""

    rows: int
    cols: int
    entries: tuple[Polynomial, ...]

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: list[list[Polynomial]]) -> "PolyMatrix":
        ncols = len(rows[0])
        flat = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged matrix rows")
            flat.extend(row)
        return cls(len(rows), ncols, tuple(flat))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PolyMatrix":
        return cls(rows, cols, tuple(Polynomial() for _ in range(rows * cols)))

    def entry(self, i: int, j: int) -> Polynomial:
        return self.entries[i * self.cols + j]

    def max_degree(self) -> int:
        return max((p.degree for p in self.entries), default=-1)


@dataclass(frozen=True)
class DelaySystem:
    """Linear Caputo-order system with constant state delays and a polynomial control.

    Represents  D^nu x(t) = A[0](t) x(t) + sum_i A[i](t) x(t - delays[i-1]) + B(t) u(t)
    with prescribed history phi on [-max(delays), 0] and solve horizon > 0.
    """

    nu: Fraction
    n: int
    m: int
    delays: tuple[Fraction, ...]
    A: tuple[PolyMatrix, ...]
    B: PolyMatrix
    u: tuple[Polynomial, ...]
    phi: tuple[Polynomial, ...]
    horizon: Fraction

    @property
    def r(self) -> int:
        return len(self.delays)

    def max_degree(self) -> int:
        """Highest polynomial degree appearing anywhere in the problem data."""
        degs = [m.max_degree() for m in self.A] + [self.B.max_degree()]
        degs += [p.degree for p in self.u] + [p.degree for p in self.phi]
        return max(degs, default=-1)


@dataclass(frozen=True)
class SolverConfig:
    K: int = 40
    sample_step: Fraction = Fraction(1, 100)


def validate(sys: DelaySystem) -> list[str]:
    """Return the complete list of invariant violations (empty when valid).

    Pure and total: reports every problem found, never raises.  Delay
    commensurability needs no check -- delays are exact rationals, so all
    pairwise ratios are rational by construction.
    """
    bad: list[str] = []
    if not (0 < sys.nu <= 1):
        bad.append(f"nu out of (0,1]: {format_rational(sys.nu)}")
    if sys.n <= 0:
        bad.append(f"state_dim must be positive: {sys.n}")
    if sys.m <= 0:
        bad.append(f"control_dim must be positive: {sys.m}")
    if any(d <= 0 for d in sys.delays):
        bad.append("delays must be positive")
    if any(b <= a for a, b in zip(sys.delays, sys.delays[1:])):
        bad.append("delays not increasing")
    if len(sys.A) != sys.r + 1:
        bad.append(f"expected {sys.r + 1} coefficient matrices, got {len(sys.A)}")
    for i, mat in enumerate(sys.A):
        if (mat.rows, mat.cols) != (sys.n, sys.n):
            bad.append(f"dimension mismatch: A{i} is {mat.rows}x{mat.cols}, expected {sys.n}x{sys.n}")
    if (sys.B.rows, sys.B.cols) != (sys.n, sys.m):
        bad.append(f"dimension mismatch: B is {sys.B.rows}x{sys.B.cols}, expected {sys.n}x{sys.m}")
    if len(sys.u) != sys.m:
        bad.append(f"dimension mismatch: control has {len(sys.u)} components, expected {sys.m}")
    if len(sys.phi) != sys.n:
        bad.append(f"dimension mismatch: initial state has {len(sys.phi)} components, expected {sys.n}")
    if sys.horizon <= 0:
        bad.append("horizon must be positive")
    return bad


# ---------------------------------------------------------------------------
# polynomial text


_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:
            (?P<coef>\d+/\d+
                    |(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
            \s*(?:\*\s*)?(?P<tpart1>t(?:\^(?P<pow1>\d+))?)?
          | (?P<tpart2>t(?:\^(?P<pow2>\d+))?)
        )\s*""",
    re.VERBOSE,
)


def parse_polynomial(text: str) -> Polynomial:
    """Parse polynomial text like "2*t + 1" or "t^2 - 1/3".

    Raises ValueError with a ``column`` attribute (0-based offset) on bad input.
    """
    s = text.replace("−", "-")
    if not s.strip():
        err = ValueError("empty polynomial")
        err.column = 0
        raise err
    coeffs: dict[int, float] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if m is None or m.end() == pos:
            err = ValueError(f"bad polynomial term at {s[pos:].strip()!r}")
            err.column = pos
            raise err
        if not first and m.group("sign") is None:
            err = ValueError("missing + or - between terms")
            err.column = pos
            raise err
        sign = -1.0 if m.group("sign") == "-" else 1.0
        coef_text = m.group("coef")
        if coef_text is None:
            value = 1.0
        elif "/" in coef_text:
            value = float(parse_rational(coef_text))
        else:
            value = float(coef_text)
        tpart = m.group("tpart1") or m.group("tpart2")
        if tpart is None:
            power = 0
        else:
            pow_text = m.group("pow1") or m.group("pow2")
            power = int(pow_text) if pow_text else 1
        coeffs[power] = coeffs.get(power, 0.0) + sign * value
        pos = m.end()
        first = False
    out = [0.0] * (max(coeffs) + 1)
    for power, value in coeffs.items():
        out[power] = value
    return Polynomial(out)


def format_polynomial(p: Polynomial) -> str:
    """Render a polynomial in the file-format term syntax (ascending powers)."""
    if not p:
        return "0"
    parts: list[str] = []
    for power in range(p.coeff.size):
        c = float(p.coeff[power])
        if c == 0.0:
            continue
        mag = repr(abs(c))
        if power == 0:
            body = mag
        elif power == 1:
            body = f"{mag}*t"
        else:
            body = f"{mag}*t^{power}"
        if not parts:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f"{'-' if c < 0 else '+'} {body}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# problem files


_SCALAR_KEYS = ("nu", "state_dim", "control_dim", "delays", "horizon")


def parse_problem(text: str | bytes) -> tuple[DelaySystem, SolverConfig]:
    """Parse and fully validate a problem file.

    Raises ProblemFormatError on syntax problems and ProblemValidationError
    when the parsed system violates model invariants.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    scalars: dict[str, str] = {}
    sections: dict[str, list[tuple[int, str]]] = {}
    section_order: list[str] = []
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ProblemFormatError("unterminated section header", lineno)
            name = line[1:-1].strip()
            if name in sections:
                raise ProblemFormatError(f"duplicate section [{name}]", lineno)
            sections[name] = []
            section_order.append(name)
            current = name
        elif current is None:
            if "=" not in line:
                raise ProblemFormatError("expected key = value", lineno)
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _SCALAR_KEYS:
                raise ProblemFormatError(f"unknown key {key!r}", lineno)
            if key in scalars:
                raise ProblemFormatError(f"duplicate key {key!r}", lineno)
            scalars[key] = value.strip()
        else:
            sections[current].append((lineno, line))

    for key in _SCALAR_KEYS:
        if key not in scalars:
            raise ProblemFormatError(f"missing required key {key!r}", 1)

    def scalar_rational(key: str) -> Fraction:
        try:
            return parse_rational(scalars[key])
        except ValueError as exc:
            raise ProblemFormatError(f"{key}: {exc}", 1) from None

    def scalar_int(key: str) -> int:
        try:
            return int(scalars[key])
        except ValueError:
            raise ProblemFormatError(f"{key}: expected an integer, got {scalars[key]!r}", 1) from None

    nu = scalar_rational("nu")
    n = scalar_int("state_dim")
    m = scalar_int("control_dim")
    horizon = scalar_rational("horizon")
    delay_text = scalars["delays"].strip()
    try:
        delays = tuple(parse_rational(part) for part in delay_text.split(",")) if delay_text else ()
    except ValueError as exc:
        raise ProblemFormatError(f"delays: {exc}", 1) from None
    r = len(delays)

    def parse_matrix(name: str, rows: int, cols: int) -> PolyMatrix:
        if name not in sections:
            raise ProblemFormatError(f"missing section [{name}]", 1)
        lines = sections[name]
        if len(lines) != rows:
            lineno = lines[0][0] if lines else 1
            raise ProblemFormatError(f"[{name}] expected {rows} rows, got {len(lines)}", lineno)
        out_rows = []
        for lineno, line in lines:
            cells = line.split(",")
            if len(cells) != cols:
                raise ProblemFormatError(f"[{name}] expected {cols} entries per row, got {len(cells)}", lineno)
            row = []
            offset = 0
            for cell in cells:
                try:
                    row.append(parse_polynomial(cell))
                except ValueError as exc:
                    col = offset + getattr(exc, "column", 0) + 1
                    raise ProblemFormatError(f"[{name}]: {exc}", lineno, col) from None
                offset += len(cell) + 1
            out_rows.append(row)
        return PolyMatrix.from_rows(out_rows)

    def parse_vector(name: str, length: int) -> tuple[Polynomial, ...]:
        mat = parse_matrix(name, length, 1)
        return tuple(mat.entries)

    A = tuple(parse_matrix(f"A{i}", n, n) for i in range(r + 1))
    B = parse_matrix("B", n, m)
    u = parse_vector("u", m)
    phi = parse_vector("phi", n)

    K = SolverConfig.K
    sample_step = horizon / 100 if horizon > 0 else SolverConfig.sample_step
    if "solver" in sections:
        for lineno, line in sections["solver"]:
            if "=" not in line:
                raise ProblemFormatError("[solver] expected key = value", lineno)
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "K":
                try:
                    K = int(value)
                except ValueError:
                    raise ProblemFormatError(f"K: expected an integer, got {value!r}", lineno) from None
            elif key == "sample_step":
                try:
                    sample_step = parse_rational(value)
                except ValueError as exc:
                    raise ProblemFormatError(f"sample_step: {exc}", lineno) from None
            else:
                raise ProblemFormatError(f"unknown solver key {key!r}", lineno)

    known = {f"A{i}" for i in range(r + 1)} | {"B", "u", "phi", "solver"}
    for name in section_order:
        if name not in known:
            raise ProblemFormatError(f"unexpected section [{name}]", sections[name][0][0] if sections[name] else 1)

    system = DelaySystem(nu=nu, n=n, m=m, delays=delays, A=A, B=B, u=u, phi=phi, horizon=horizon)
    cfg = SolverConfig(K=K, sample_step=sample_step)
    violations = validate(system)
    if K <= 0:
        violations.append(f"solver K must be positive: {K}")
    if sample_step <= 0:
        violations.append("sample_step must be positive")
    if violations:
        raise ProblemValidationError(violations)
    return system, cfg


def serialize_problem(sys: DelaySystem, cfg: SolverConfig) -> str:
    """Render a problem back to file text; parse(serialize(parse(x))) round-trips."""
    lines = [
        f"nu = {format_rational(sys.nu)}",
        f"state_dim = {sys.n}",
        f"control_dim = {sys.m}",
        "delays = " + ", ".join(format_rational(d) for d in sys.delays),
        f"horizon = {format_rational(sys.horizon)}",
    ]

    def emit_matrix(name: str, mat: PolyMatrix) -> None:
        lines.append(f"[{name}]")
        for i in range(mat.rows):
            lines.append(", ".join(format_polynomial(mat.entry(i, j)) for j in range(mat.cols)))

    for i, mat in enumerate(sys.A):
        emit_matrix(f"A{i}", mat)
    emit_matrix("B", sys.B)
    lines.append("[u]")
    lines.extend(format_polynomial(p) for p in sys.u)
    lines.append("[phi]")
    lines.extend(format_polynomial(p) for p in sys.phi)
    lines.append("[solver]")
    lines.append(f"K = {cfg.K}")
    lines.append(f"sample_step = {format_rational(cfg.sample_step)}")
    return "\n".join(lines) + "\n"
