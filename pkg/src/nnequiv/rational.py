"""Exact rational arithmetic backend.

Every weight, bound, constraint coefficient and evaluation result in this
package is an exact rational: the emitted solver queries and the in-process
replay evaluator must agree bit for bit, which binary floats cannot provide.

The heavy consumer is the exhaustive oracle, which performs millions of
rational operations per run.  When gmpy2 is importable its GMP-backed ``mpq``
type is used as the compiled fast path; otherwise the stdlib
``fractions.Fraction`` serves as the pure-Python fallback.  The choice is made
once at import and can be forced with ``NNEQUIV_RATIONAL=gmpy2`` or
``NNEQUIV_RATIONAL=fraction`` (``benchmarks/bench_rational_backends.py``
compares the two).
"""

from __future__ import annotations

import os
import re

_requested = os.environ.get("NNEQUIV_RATIONAL", "").strip().lower()

if _requested in ("fraction", "fractions", "python"):
    from fractions import Fraction as Rational

    BACKEND = "fraction"
elif _requested in ("", "gmpy2", "mpq"):
    try:
        from gmpy2 import mpq as Rational  # type: ignore[no-redef]

        BACKEND = "gmpy2"
    except ImportError:
        if _requested:
            raise RuntimeError("NNEQUIV_RATIONAL=gmpy2 requested but gmpy2 is not importable")
        from fractions import Fraction as Rational  # type: ignore[no-redef]

        BACKEND = "fraction"
else:
    raise RuntimeError(f"unrecognized NNEQUIV_RATIONAL value {_requested!r}")

ZERO = Rational(0)
ONE = Rational(1)

_DECIMAL_RE = re.compile(r"^([+-]?)(\d+)?(?:\.(\d*))?(?:[eE]([+-]?\d+))?$")
_QUOTIENT_RE = re.compile(r"^([+-]?\d+)\s*/\s*([+-]?\d+)$")


def rat(value, den=None):
    """Build an exact rational from an int, a decimal string, a ``p/q``
    string, or an existing rational.

    Decimal text is converted digit-exactly (``rat("0.1") == 1/10``); floats
    are rejected outright so no binary rounding can leak in.
    """
    if den is not None:
        return rat(value) / rat(den)
    if isinstance(value, bool):
        raise TypeError("cannot build a rational from a bool")
    if isinstance(value, int):
        return Rational(value)
    if isinstance(value, Rational):
        return value
    if isinstance(value, float):
        raise TypeError(
            f"refusing to build a rational from float {value!r}; pass its decimal text instead"
        )
    if isinstance(value, str):
        return _rat_from_str(value)
    # Foreign rational types (Fraction under the gmpy2 backend and vice versa).
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Rational(value.numerator) / Rational(value.denominator)
    raise TypeError(f"cannot build a rational from {type(value).__name__}")


def _rat_from_str(text: str):
    s = text.strip()
    m = _QUOTIENT_RE.match(s)
    if m:
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator in rational literal {text!r}")
        return Rational(num) / Rational(den)
    m = _DECIMAL_RE.match(s)
    if not m or (m.group(2) is None and not m.group(3)):
        raise ValueError(f"not a decimal or rational literal: {text!r}")
    sign, intpart, fracpart, exp = m.groups()
    intpart = intpart or "0"
    fracpart = fracpart or ""
    num = int(intpart + fracpart) if (intpart + fracpart) else 0
    if sign == "-":
        num = -num
    result = Rational(num) / Rational(10 ** len(fracpart))
    if exp:
        e = int(exp)
        if e >= 0:
            result = result * Rational(10**e)
        else:
            result = result / Rational(10**-e)
    return result


def is_rational(value) -> bool:
    return isinstance(value, Rational)


def format_exact(r) -> str:
    """Shortest exact text form: an integer, a terminating decimal when the
    denominator divides a power of ten, otherwise ``p/q``."""
    num, den = r.numerator, r.denominator
    if den == 1:
        return str(num)
    d, twos, fives = den, 0, 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{num}/{den}"
    k = max(twos, fives)
    scaled = abs(num) * 10**k // den
    digits = str(scaled).rjust(k + 1, "0")
    sign = "-" if num < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


def decimal_approx(r, significant: int = 12) -> str:
    """Inexact decimal rendering for human-facing report columns."""
    try:
        return f"{float(r):.{significant}g}"
    except OverflowError:
        return format_exact(r)
