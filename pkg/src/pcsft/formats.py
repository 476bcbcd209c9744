"""
Text formats read and written by the command-line tools.

Complex literals are written ``re:im`` (``1.5:-0.25``); a bare real number
is accepted as a literal with zero imaginary part.  Blank lines and
everything after ``#`` are ignored in input files.

Variable file::

    dim 2
    quadratic
    1:0 0:0
    0:0 2:0
    quartic 0.5          # zero or more blocks
    1:0 0:0
    0:0 0:0

Boolean function file::

    2 1                  # n_in n_out
    0 1 1 0              # 2**n_in values, x ascending; may span lines

Ensemble dump: one sample per line, entries ``re:im`` separated by commas.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .gaussian_fields import FieldEnsemble
from .prequantum_variables import PrequantumVariable
from .quantum_register import BooleanFunction


def parse_complex(token: str, line: int | None = None) -> complex:
    try:
        if ":" in token:
            re, im = token.split(":", 1)
            return complex(float(re), float(im))
        return complex(float(token), 0.0)
    except ValueError:
        raise ParseError(f"bad complex literal {token!r} (expected re:im)", line) from None


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r}:{z.imag!r}"


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path=path) from None


def parse_variable(text: str) -> PrequantumVariable:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty variable file")
    lineno, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "dim":
        raise ParseError(f"expected 'dim N', got {head!r}", lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"dimension must be an integer, got {parts[1]!r}", lineno) from None
    if n < 1:
        raise ParseError(f"dimension must be >= 1, got {n}", lineno)

    pos = 1

    def read_matrix(header_line):
        nonlocal pos
        rows = []
        for _ in range(n):
            if pos >= len(lines):
                raise ParseError(f"matrix started here needs {n} rows, file ended after {len(rows)}", header_line)
            ln, body = lines[pos]
            tokens = body.split()
            if len(tokens) != n:
                raise ParseError(f"matrix row needs {n} entries, got {len(tokens)}", ln)
            rows.append([parse_complex(t, ln) for t in tokens])
            pos += 1
        return np.array(rows, dtype=complex)

    if pos >= len(lines) or lines[pos][1] != "quadratic":
        where = lines[pos][0] if pos < len(lines) else lineno
        raise ParseError("expected 'quadratic' block", where)
    quad_line = lines[pos][0]
    pos += 1
    A = read_matrix(quad_line)
    quartic = []
    while pos < len(lines):
        ln, body = lines[pos]
        parts = body.split()
        if len(parts) != 2 or parts[0] != "quartic":
            raise ParseError(f"expected 'quartic LAMBDA', got {body!r}", ln)
        try:
            lam = float(parts[1])
        except ValueError:
            raise ParseError(f"quartic coefficient must be a number, got {parts[1]!r}", ln) from None
        pos += 1
        quartic.append((lam, read_matrix(ln)))
    try:
        return PrequantumVariable(A, tuple(quartic))
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def format_variable(v: PrequantumVariable) -> str:
    def rows(M):
        return ["  ".join(format_complex(z) for z in row) for row in M]

    out = [f"dim {v.dimension}", "quadratic", *rows(v.quadratic)]
    for lam, Ai in v.quartic_terms:
        out += [f"quartic {lam!r}", *rows(Ai)]
    return "\n".join(out) + "\n"


def parse_boolean_function(text: str) -> BooleanFunction:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty function file")
    lineno, head = lines[0]
    try:
        n_in, n_out = (int(t) for t in head.split())
    except ValueError:
        raise ParseError(f"expected header 'n_in n_out', got {head!r}", lineno) from None
    if n_in < 1 or n_out < 1:
        raise ParseError(f"n_in and n_out must be >= 1, got {n_in} {n_out}", lineno)
    expected = 2**n_in
    values = []
    last = lineno
    for ln, body in lines[1:]:
        last = ln
        for tok in body.split():
            try:
                val = int(tok)
            except ValueError:
                raise ParseError(f"truth-table value must be an integer, got {tok!r}", ln) from None
            if not 0 <= val < 2**n_out:
                raise ParseError(f"truth-table value {val} out of range [0, {2**n_out})", ln)
            values.append(val)
            if len(values) > expected:
                raise ParseError(f"truth table has more than {expected} values for n_in={n_in}", ln)
    if len(values) != expected:
        raise ParseError(f"truth table has {len(values)} values, expected {expected} for n_in={n_in}", last)
    return BooleanFunction(n_in, n_out, tuple(values))


def format_boolean_function(f: BooleanFunction) -> str:
    return f"{f.n_in} {f.n_out}\n" + " ".join(str(t) for t in f.table) + "\n"


def load_variable(path) -> PrequantumVariable:
    try:
        return parse_variable(_read(path))
    except ParseError as exc:
        if exc.path is None:
            raise ParseError(exc.message, exc.line, path) from None
        raise


def load_boolean_function(path) -> BooleanFunction:
    try:
        return parse_boolean_function(_read(path))
    except ParseError as exc:
        if exc.path is None:
            raise ParseError(exc.message, exc.line, path) from None
        raise


def dump_ensemble(e: FieldEnsemble) -> str:
    return "".join(",".join(format_complex(z) for z in row) + "\n" for row in e.samples)


def parse_ensemble_dump(text: str) -> np.ndarray:
    rows = []
    width = None
    for ln, body in _content_lines(text):
        row = [parse_complex(tok.strip(), ln) for tok in body.split(",")]
        width = len(row) if width is None else width
        if len(row) != width:
            raise ParseError(f"sample has {len(row)} entries, expected {width}", ln)
        rows.append(row)
    if not rows:
        raise ParseError("empty ensemble dump")
    return np.array(rows, dtype=complex)
