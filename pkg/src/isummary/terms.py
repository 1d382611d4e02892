"""RDF term model for the SPARQL BGP subset: terms, triple patterns, serialization."""

from __future__ import annotations

import re
from dataclasses import dataclass

IRI = "iri"
LITERAL = "literal"
BLANK = "blank"
VARIABLE = "variable"

RDF_TYPE_IRI = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_KINDS = frozenset((IRI, LITERAL, BLANK, VARIABLE))
_VARNAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_BLANK_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*\Z")
_WHITESPACE_RE = re.compile(r"\s")

_LITERAL_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


@dataclass(frozen=True, eq=False)
class Term:
    """A single RDF term or query variable.

    ``lexical`` holds the IRI without angle brackets, the literal's lexical
    form, the blank node label, or the variable name without the leading
    ``?``.  ``datatype_or_lang`` applies to literals only: a datatype IRI, or
    a language tag stored with its leading ``@``.

    Equality is structural; the hash is precomputed because terms are used as
    index and adjacency keys throughout.
    """

    kind: str
    lexical: str
    datatype_or_lang: str | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown term kind: {self.kind!r}")
        if self.kind == IRI:
            if not self.lexical or _WHITESPACE_RE.search(self.lexical):
                raise ValueError(f"malformed IRI: {self.lexical!r}")
        elif self.kind == VARIABLE:
            if not _VARNAME_RE.match(self.lexical):
                raise ValueError(f"malformed variable name: {self.lexical!r}")
        elif self.kind == BLANK:
            if not _BLANK_RE.match(self.lexical):
                raise ValueError(f"malformed blank node label: {self.lexical!r}")
        if self.kind != LITERAL and self.datatype_or_lang is not None:
            raise ValueError("datatype_or_lang is only valid for literals")
        if self.datatype_or_lang == "":
            raise ValueError("datatype_or_lang must be None or non-empty")
        object.__setattr__(
            self, "_hash", hash((self.kind, self.lexical, self.datatype_or_lang))
        )

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return (
            self.lexical == other.lexical
            and self.kind == other.kind
            and self.datatype_or_lang == other.datatype_or_lang
        )

    @property
    def concrete(self) -> bool:
        return self.kind != VARIABLE

    def sort_key(self) -> tuple[str, str, str]:
        return (self.kind, self.lexical, self.datatype_or_lang or "")

    def to_sparql(self) -> str:
        """Render in SPARQL surface syntax (variables as ``?name``)."""
        if self.kind == IRI:
            return f"<{self.lexical}>"
        if self.kind == VARIABLE:
            return f"?{self.lexical}"
        if self.kind == BLANK:
            return f"_:{self.lexical}"
        body = "".join(_LITERAL_ESCAPES.get(c, c) for c in self.lexical)
        if self.datatype_or_lang is None:
            return f'"{body}"'
        if self.datatype_or_lang.startswith("@"):
            return f'"{body}"{self.datatype_or_lang}'
        return f'"{body}"^^<{self.datatype_or_lang}>'

    def to_ntriples(self) -> str:
        if self.kind == VARIABLE:
            raise ValueError("variables cannot appear in N-Triples output")
        return self.to_sparql()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "lexical": self.lexical,
            "datatypeOrLang": self.datatype_or_lang,
        }


def iri(lexical: str) -> Term:
    return Term(IRI, lexical)


def literal(lexical: str, datatype_or_lang: str | None = None) -> Term:
    return Term(LITERAL, lexical, datatype_or_lang)


def blank(label: str) -> Term:
    return Term(BLANK, label)


def variable(name: str) -> Term:
    return Term(VARIABLE, name)


def term_from_json(obj: dict) -> Term:
    return Term(obj["kind"], obj["lexical"], obj.get("datatypeOrLang"))


RDF_TYPE = Term(IRI, RDF_TYPE_IRI)


@dataclass(frozen=True)
class TriplePattern:
    """One triple pattern; membership mirrors well-formed RDF with variables."""

    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if self.subject.kind == LITERAL:
            raise ValueError("triple subject cannot be a literal")
        if self.predicate.kind not in (IRI, VARIABLE):
            raise ValueError("triple predicate must be an IRI or a variable")

    def terms(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)

    def sort_key(self):
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())

    def to_sparql(self) -> str:
        return f"{self.subject.to_sparql()} {self.predicate.to_sparql()} {self.object.to_sparql()}"

    def to_ntriples(self) -> str:
        return f"{self.subject.to_ntriples()} {self.predicate.to_ntriples()} {self.object.to_ntriples()} ."

    def to_json(self) -> dict:
        return {
            "subject": self.subject.to_json(),
            "predicate": self.predicate.to_json(),
            "object": self.object.to_json(),
        }
