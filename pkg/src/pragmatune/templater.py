"""Code-mold token extraction and instantiation.

A mold is ordinary source text whose tunable sites are `#P<name>` tokens.
Instantiation replaces every token with its configured value in a single
pass, so values containing token-like text are never re-expanded.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .space import INACTIVE, Configuration

log = logging.getLogger(__name__)

# '#' then a maximal alphanumeric run starting with uppercase P; case-sensitive,
# so C's "#pragma" never matches
_TOKEN_RE = re.compile(r"#(P[0-9A-Za-z]*)")


class TemplateError(Exception):
    """Base class for mold errors."""


class MissingToken(TemplateError):
    """The mold uses a token the configuration does not supply."""


@dataclass(frozen=True)
class CodeMold:
    """Source text plus the distinct token names it contains."""

    text: str
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        actual = extract_tokens(self.text)
        if self.tokens != actual:
            raise TemplateError(f"token list {self.tokens!r} does not match text ({actual!r})")

    @classmethod
    def from_text(cls, text: str) -> CodeMold:
        return cls(text=text, tokens=extract_tokens(text))


def extract_tokens(text: str) -> tuple[str, ...]:
    """Distinct `#P<name>` token names in first-occurrence order, maximal munch."""
    seen: dict[str, None] = {}
    for match in _TOKEN_RE.finditer(text):
        seen.setdefault(match.group(1))
    return tuple(seen)


def instantiate(mold: CodeMold, config: Configuration) -> str:
    """Replace every token occurrence with its configured value.

    INACTIVE assignments substitute the empty string.  Replacement is a
    single longest-token-first pass; non-token text is untouched.
    """
    subs: dict[str, str] = {}
    for token in mold.tokens:
        try:
            value = config[token]
        except KeyError:
            raise MissingToken(f"mold token {token!r} has no configured value") from None
        subs["#" + token] = "" if value is INACTIVE else value
    for name, _ in config:
        if name not in mold.tokens:
            log.warning("parameter %r has no occurrence in the mold", name)
    if not subs:
        return mold.text
    pattern = re.compile(
        "|".join(re.escape(key) for key in sorted(subs, key=len, reverse=True))
    )
    return pattern.sub(lambda m: subs[m.group(0)], mold.text)
