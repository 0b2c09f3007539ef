"""Validation and normalization of classification codes."""

from __future__ import annotations

import re

from .errors import BadCode

SOC_RE = re.compile(r"^[0-9]{2}-[0-9]{4}$")
ISCO4_RE = re.compile(r"^[0-9]{4}$")
COUNTRY_RE = re.compile(r"^[A-Z]{2}$")
MONTH_RE = re.compile(r"^\d{4}-(0[1-9]|1[0-2])$")

#: Sentinel country key for the all-countries marginal. Real codes are
#: exactly two uppercase letters, so this can never collide.
TOTAL = "TOTAL"


def normalize_soc(raw: str) -> str:
    """Normalize a SOC code to ``DD-DDDD``, stripping O*NET suffixes.

    ``"53-3032.00"`` becomes ``"53-3032"``. Idempotent: normalizing an
    already-normalized code returns it unchanged.
    """
    code = raw.strip()
    if "." in code:
        code = code.split(".", 1)[0]
    if not SOC_RE.match(code):
        raise BadCode(f"not a SOC code: {raw!r}")
    return code


def validate_isco4(raw: str) -> str:
    code = raw.strip()
    if not ISCO4_RE.match(code):
        raise BadCode(f"not a 4-digit ISCO code: {raw!r}")
    return code


def normalize_country(raw: str) -> str:
    """Uppercase a 2-letter country code; unknown codes pass through."""
    code = raw.strip().upper()
    if not COUNTRY_RE.match(code):
        raise BadCode(f"not a 2-letter country code: {raw!r}")
    return code


def validate_month(raw: str) -> str:
    value = raw.strip()
    if not MONTH_RE.match(value):
        raise BadCode(f"not a YYYY-MM month: {raw!r}")
    return value
