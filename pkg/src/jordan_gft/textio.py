"""Plain-text matrix, signal and edge-list formats.

Matrix file: the first line holds ``N``; the next ``N`` lines hold ``N``
whitespace-separated entries.  Entries are written ``a``, ``a+bi``,
``a-bi``, ``bi`` or ``i`` where each component is a decimal (``-0.25``,
``1e-3``) or a rational ``p/q``.  Blank lines and ``#`` comments are
ignored.  Rational entries round-trip exactly through
:func:`format_matrix` and :func:`parse_matrix`.
"""

from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

from .errors import MatrixParseError
from .matcore import ExactMatrix, GaussianRational, exact_scalar

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COMPLEX = re.compile(
    rf"^(?P<re>[+-]?{_NUM})?(?:(?P<isign>[+-])?(?P<im>{_NUM})?i)?$")


def _number(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ZeroDivisionError("zero denominator")
        return Fraction(num) / int(den)
    return Fraction(text)


def parse_scalar(token: str):
    """Exact value of one entry: ``Fraction`` if real, else ``GaussianRational``.

    Raises
    ------
    ValueError
        On malformed syntax or a zero denominator.
    """
    m = _COMPLEX.match(token)
    if not token or m is None or (m.group("re") is None and "i" not in token):
        raise ValueError(f"malformed entry {token!r}")
    re_part = _number(m.group("re")) if m.group("re") else Fraction(0)
    im_part = Fraction(0)
    if token.endswith("i"):
        sign = -1 if m.group("isign") == "-" else 1
        if m.group("im") is None and m.group("isign") is None and m.group("re") is not None:
            # "2i": the regex assigned the magnitude to the real group
            im_part, re_part = re_part, Fraction(0)
        else:
            im_part = sign * (_number(m.group("im")) if m.group("im") else Fraction(1))
    return exact_scalar(GaussianRational(re_part, im_part))


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_exact(x) -> str:
    """Inverse of :func:`parse_scalar` for exact values."""
    if isinstance(x, (int, Fraction)):
        return _fmt_fraction(Fraction(x))
    re_part, im_part = x.re, x.im
    if im_part == 0:
        return _fmt_fraction(re_part)
    mag = abs(im_part)
    im_txt = "" if mag == 1 else _fmt_fraction(mag)
    if re_part == 0:
        return ("-" if im_part < 0 else "") + im_txt + "i"
    return f"{_fmt_fraction(re_part)}{'-' if im_part < 0 else '+'}{im_txt}i"


def _fmt_float(x: float, digits) -> str:
    if x == 0:
        return "0"
    if digits is None:
        return str(int(x)) if x.is_integer() and abs(x) < 2 ** 53 else repr(x)
    return f"{x:.{digits}g}"


def format_complex(z, digits=12) -> str:
    """Compact text for a float complex value.

    With an integer ``digits`` the value is rounded for display and parts
    below ``10**-digits * max(1, |z|)`` are dropped.  ``digits=None`` is
    lossless: the shortest round-tripping text of each nonzero part.
    """
    z = complex(z)
    re_part, im_part = z.real, z.imag
    tiny = 0.0 if digits is None else 10.0 ** (-digits) * max(1.0, abs(z))
    if abs(im_part) <= tiny:
        return _fmt_float(re_part if abs(re_part) > tiny else 0.0, digits)
    im_txt = _fmt_float(abs(im_part), digits)
    if abs(re_part) <= tiny:
        return ("-" if im_part < 0 else "") + im_txt + "i"
    return f"{_fmt_float(re_part, digits)}{'-' if im_part < 0 else '+'}{im_txt}i"


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield lineno, body


def _tokens(lineno, body):
    for m in re.finditer(r"\S+", body):
        yield m.start() + 1, m.group()


def _entry(lineno, col, tok):
    try:
        return parse_scalar(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise MatrixParseError(str(exc), lineno, col) from None


def parse_matrix(text: str) -> ExactMatrix:
    """Parse the matrix text format into an exact matrix."""
    lines = list(_lines(text))
    if not lines:
        raise MatrixParseError("empty input", 1)
    lineno, body = lines[0]
    toks = list(_tokens(lineno, body))
    if len(toks) != 1 or not toks[0][1].isdigit():
        raise MatrixParseError("first line must be the dimension N", lineno, 1)
    n = int(toks[0][1])
    rows = []
    for lineno, body in lines[1:]:
        toks = list(_tokens(lineno, body))
        if len(toks) != n:
            col = toks[n][0] if len(toks) > n else len(body.rstrip()) + 1
            raise MatrixParseError(f"expected {n} entries, found {len(toks)}", lineno, col)
        rows.append([_entry(lineno, c, t) for c, t in toks])
    if len(rows) != n:
        last = lines[-1][0] if lines else 1
        raise MatrixParseError(f"expected {n} rows, found {len(rows)}", last + 1 if len(rows) < n else last)
    return ExactMatrix(rows)


def format_matrix(m, digits=None) -> str:
    """Matrix text format.  Exact matrices are written exactly."""
    if isinstance(m, ExactMatrix):
        rows = [[format_exact(x) for x in row] for row in m.entries]
    else:
        m = np.asarray(m, dtype=complex)
        rows = [[format_complex(x, digits) for x in row] for row in m]
    lines = [str(len(rows))] + [" ".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def parse_signal(text: str, n: int = None) -> np.ndarray:
    """One complex entry per line."""
    vals = []
    for lineno, body in _lines(text):
        toks = list(_tokens(lineno, body))
        if len(toks) != 1:
            raise MatrixParseError("expected one entry per line", lineno,
                                   toks[1][0] if len(toks) > 1 else 1)
        col, tok = toks[0]
        vals.append(complex(_entry(lineno, col, tok)))
    if n is not None and len(vals) != n:
        raise MatrixParseError(f"signal has {len(vals)} entries, expected {n}")
    return np.array(vals, dtype=complex)


def format_signal(s, digits=None) -> str:
    return "".join(format_complex(x, digits) + "\n" for x in np.asarray(s, dtype=complex))


def parse_edgelist(text: str, n: int = None) -> ExactMatrix:
    """Weighted edge list ``u v w`` per line (0-based), giving ``A[u, v] = w``.

    ``N`` defaults to one more than the largest node index.
    """
    edges = []
    for lineno, body in _lines(text):
        toks = list(_tokens(lineno, body))
        if len(toks) not in (2, 3):
            raise MatrixParseError("expected 'u v [w]'", lineno, 1)
        ends = []
        for col, tok in toks[:2]:
            if not tok.isdigit():
                raise MatrixParseError(f"bad node index {tok!r}", lineno, col)
            ends.append(int(tok))
        w = _entry(lineno, *toks[2]) if len(toks) == 3 else Fraction(1)
        edges.append((ends[0], ends[1], w))
    size = n if n is not None else 1 + max((max(u, v) for u, v, _ in edges), default=-1)
    rows = [[Fraction(0)] * size for _ in range(size)]
    for u, v, w in edges:
        if u >= size or v >= size:
            raise MatrixParseError(f"node index out of range for N={size}")
        rows[u][v] = w
    return ExactMatrix(rows)


def parse_columns(text: str) -> np.ndarray:
    """Rectangular block of complex entries, one row per line, no header.

    Used for chain matrices (``N`` rows, ``r`` columns).
    """
    rows = []
    for lineno, body in _lines(text):
        toks = list(_tokens(lineno, body))
        if rows and len(toks) != len(rows[0]):
            raise MatrixParseError(f"expected {len(rows[0])} entries, found {len(toks)}", lineno)
        rows.append([complex(_entry(lineno, c, t)) for c, t in toks])
    if not rows:
        raise MatrixParseError("empty input", 1)
    return np.array(rows, dtype=complex)


def format_columns(m) -> str:
    """Inverse of :func:`parse_columns`; exact matrices stay exact."""
    if isinstance(m, ExactMatrix):
        return "".join(" ".join(format_exact(x) for x in row) + "\n" for row in m.entries)
    return "".join(" ".join(format_complex(x, None) for x in row) + "\n"
                   for row in np.asarray(m, dtype=complex))
