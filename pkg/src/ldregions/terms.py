"""RDF term tokens and triples.

Terms are kept in canonical N-Triples token form throughout the package:
IRIs as ``<...>`` with the raw bytes preserved between the brackets, and
literals as ``"escaped"`` with an optional ``@lang`` or ``^^<datatype>``
suffix.  Token strings compare and hash cheaply, which makes the set
algebra of diffing and aggregation straightforward.
"""

from __future__ import annotations

import re
from typing import NamedTuple

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

# Reserved vocabulary.  UNTYPED_CONCEPT groups subjects without an rdf:type;
# SELF_TOKEN replaces self-referential objects so a rename does not perturb
# representation similarity; BNODE_PREFIX scopes blank node objects to the
# version they were read from (they are never matched across versions).
UNTYPED_CONCEPT = "urn:deltald:untyped"
SELF_TOKEN = "<urn:deltald:self>"
BNODE_PREFIX = "urn:deltald:bnode:"

# IRIREF character set: no control chars, whitespace or <>"{}|^`\ except
# as \u/\U escape sequences, which are preserved verbatim.
_IRI_BODY = re.compile(
    r'(?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})+'
)

_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}

_UNESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.DOTALL)

# Canonical string escapes on output; remaining C0 controls become \uXXXX.
_ESCAPE_MAP = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}
_NEEDS_ESCAPE = re.compile(r'[\x00-\x1f"\\\x7f]')


class Triple(NamedTuple):
    """One statement: subject/predicate as raw IRI values, object as a token."""

    subject: str
    predicate: str
    object: str

    def nt_line(self) -> str:
        return f"<{self.subject}> <{self.predicate}> {self.object} ."

    def sort_key(self) -> str:
        return self.nt_line()


def is_valid_iri(value: str) -> bool:
    """True if the string may appear between angle brackets in N-Triples."""
    return bool(value) and _IRI_BODY.fullmatch(value) is not None


def iri_token(value: str) -> str:
    return f"<{value}>"


def is_iri_token(token: str) -> bool:
    return token.startswith("<")


def token_iri_value(token: str) -> str:
    """The raw IRI inside an ``<...>`` token."""
    return token[1:-1]


def _escape_char(match: re.Match) -> str:
    ch = match.group(0)
    mapped = _ESCAPE_MAP.get(ch)
    if mapped is not None:
        return mapped
    return f"\\u{ord(ch):04X}"


def escape_literal(lexical: str) -> str:
    return _NEEDS_ESCAPE.sub(_escape_char, lexical)


def unescape_literal(raw: str) -> str:
    """Decode ECHAR and \\u/\\U sequences; raises ValueError on bad escapes."""

    def repl(match: re.Match) -> str:
        body = match.group(1)
        if body[0] == "u" or body[0] == "U":
            return chr(int(body[1:], 16))
        try:
            return _ESCAPES[body]
        except KeyError:
            raise ValueError(f"invalid escape sequence \\{body}") from None

    return _UNESCAPE_RE.sub(repl, raw)


def literal_token(lexical: str, lang: str | None = None, datatype: str | None = None) -> str:
    """Canonical literal token; language tag and datatype are kept verbatim."""
    token = f'"{escape_literal(lexical)}"'
    if lang is not None:
        return f"{token}@{lang}"
    if datatype is not None:
        return f"{token}^^<{datatype}>"
    return token


def bnode_object_token(version_id: str, label: str) -> str:
    """Opaque per-version token for a blank node object."""
    return iri_token(f"{BNODE_PREFIX}{version_id}:{label}")
