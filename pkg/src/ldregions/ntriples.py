"""Line-oriented N-Triples reading and writing.

Input may be a path, bytes, or a binary stream, optionally gzip-compressed
(detected from the magic bytes).  Parsing is lenient by default: bad lines
are skipped and counted in the attached report.  Blank node subjects are
rejected; blank node objects become opaque per-version IRI tokens.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Union

from .errors import BlankNodeSubjectError, ParseError
from .model import DatasetVersion
from .terms import (
    Triple,
    bnode_object_token,
    iri_token,
    is_valid_iri,
    literal_token,
    unescape_literal,
)

Source = Union[str, Path, bytes, IO[bytes]]

_MAX_REPORTED_LINES = 50


@dataclass
class ParseReport:
    """Counts of what the parser consumed and skipped."""

    total_lines: int = 0
    triple_lines: int = 0
    blank_lines: int = 0
    comment_lines: int = 0
    malformed_count: int = 0
    blank_subject_count: int = 0
    malformed_lines: list[int] = field(default_factory=list)
    blank_subject_lines: list[int] = field(default_factory=list)

    def note_malformed(self, line_no: int) -> None:
        self.malformed_count += 1
        if len(self.malformed_lines) < _MAX_REPORTED_LINES:
            self.malformed_lines.append(line_no)

    def note_blank_subject(self, line_no: int) -> None:
        self.blank_subject_count += 1
        if len(self.blank_subject_lines) < _MAX_REPORTED_LINES:
            self.blank_subject_lines.append(line_no)

    def skipped(self) -> int:
        return self.malformed_count + self.blank_subject_count


class _LineParser:
    """Cursor-based scanner for a single statement line."""

    def __init__(self, line: str):
        self.line = line
        self.pos = 0

    def error(self, reason: str) -> ValueError:
        return ValueError(reason)

    def skip_ws(self) -> None:
        line = self.line
        pos = self.pos
        while pos < len(line) and line[pos] in " \t":
            pos += 1
        self.pos = pos

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def expect(self, ch: str, what: str) -> None:
        if self.at_end() or self.line[self.pos] != ch:
            raise self.error(f"expected {what}")
        self.pos += 1

    def read_iri(self) -> str:
        self.expect("<", "'<'")
        end = self.line.find(">", self.pos)
        if end < 0:
            raise self.error("unterminated IRI")
        body = self.line[self.pos : end]
        if not is_valid_iri(body):
            raise self.error(f"invalid IRI <{body}>")
        self.pos = end + 1
        return body

    def read_bnode_label(self) -> str:
        # after '_:'
        self.pos += 2
        start = self.pos
        line = self.line
        while self.pos < len(line) and (line[self.pos].isalnum() or line[self.pos] in "_.-"):
            self.pos += 1
        label = line[start : self.pos]
        if not label or label.endswith("."):
            # a trailing dot belongs to the statement terminator
            if label.endswith("."):
                label = label[:-1]
                self.pos -= 1
            if not label:
                raise self.error("invalid blank node label")
        return label

    def read_literal(self) -> str:
        self.expect('"', "'\"'")
        line = self.line
        chars: list[str] = []
        while True:
            if self.pos >= len(line):
                raise self.error("unterminated literal")
            ch = line[self.pos]
            if ch == '"':
                self.pos += 1
                break
            if ch == "\\":
                if self.pos + 1 >= len(line):
                    raise self.error("dangling escape")
                chars.append(line[self.pos : self.pos + 2])
                self.pos += 2
            else:
                chars.append(ch)
                self.pos += 1
        lexical = unescape_literal("".join(chars))

        lang = None
        datatype = None
        if self.pos < len(line) and line[self.pos] == "@":
            self.pos += 1
            start = self.pos
            while self.pos < len(line) and (line[self.pos].isalnum() or line[self.pos] == "-"):
                self.pos += 1
            lang = line[start : self.pos]
            if not lang or lang.startswith("-") or lang.endswith("-"):
                raise self.error("invalid language tag")
        elif line.startswith("^^", self.pos):
            self.pos += 2
            datatype = self.read_iri()
        return literal_token(lexical, lang, datatype)


def _parse_statement(line: str, line_no: int, version_id: str) -> Triple | None:
    """One line to one Triple; None for blank/comment lines.

    Raises BlankNodeSubjectError for blank subjects and ValueError for any
    other malformation.
    """
    scanner = _LineParser(line)
    scanner.skip_ws()
    if scanner.at_end() or scanner.line[scanner.pos] == "#":
        return None

    head = scanner.line[scanner.pos]
    if head == "_":
        raise BlankNodeSubjectError(line_no)
    subject = scanner.read_iri()

    scanner.skip_ws()
    predicate = scanner.read_iri()

    scanner.skip_ws()
    if scanner.at_end():
        raise scanner.error("missing object")
    head = scanner.line[scanner.pos]
    if head == "<":
        obj = iri_token(scanner.read_iri())
    elif head == '"':
        obj = scanner.read_literal()
    elif scanner.line.startswith("_:", scanner.pos):
        obj = bnode_object_token(version_id, scanner.read_bnode_label())
    else:
        raise scanner.error("invalid object term")

    scanner.skip_ws()
    scanner.expect(".", "statement terminator '.'")
    scanner.skip_ws()
    if not scanner.at_end() and scanner.line[scanner.pos] != "#":
        raise scanner.error("trailing content after '.'")

    return Triple(subject, predicate, obj)


def _open_binary(source: Source) -> IO[bytes]:
    if isinstance(source, (str, Path)):
        return open(source, "rb")
    if isinstance(source, bytes):
        return io.BytesIO(source)
    return source


def _maybe_gunzip(stream: IO[bytes]) -> IO[bytes]:
    # sniff two bytes without losing them for non-seekable streams
    if stream.seekable():
        pos = stream.tell()
        head = stream.read(2)
        stream.seek(pos)
    else:
        head = stream.read(2)
        stream = io.BufferedReader(_Chained(head, stream))  # type: ignore[arg-type]
    if head == b"\x1f\x8b":
        return gzip.GzipFile(fileobj=stream)  # type: ignore[return-value]
    return stream


class _Chained(io.RawIOBase):
    """Re-prepends consumed header bytes to a non-seekable stream."""

    def __init__(self, head: bytes, rest: IO[bytes]):
        self._head = head
        self._rest = rest

    def readable(self) -> bool:
        return True

    def readinto(self, buffer) -> int:
        if self._head:
            n = min(len(buffer), len(self._head))
            buffer[:n] = self._head[:n]
            self._head = self._head[n:]
            return n
        data = self._rest.read(len(buffer))
        if not data:
            return 0
        buffer[: len(data)] = data
        return len(data)


def iter_triples(
    source: Source, version_id: str, strict: bool = False, report: ParseReport | None = None
) -> Iterator[Triple]:
    """Stream well-formed triples from the source, one line at a time."""
    rep = report if report is not None else ParseReport()
    close_after = isinstance(source, (str, Path))
    stream = _maybe_gunzip(_open_binary(source))
    try:
        for line_no, raw in enumerate(stream, 1):
            rep.total_lines += 1
            try:
                line = raw.decode("utf-8").rstrip("\r\n")
            except UnicodeDecodeError:
                if strict:
                    raise ParseError(line_no, "invalid UTF-8") from None
                rep.note_malformed(line_no)
                continue
            try:
                triple = _parse_statement(line, line_no, version_id)
            except BlankNodeSubjectError:
                if strict:
                    raise
                rep.note_blank_subject(line_no)
                continue
            except ValueError as exc:
                if strict:
                    raise ParseError(line_no, str(exc)) from None
                rep.note_malformed(line_no)
                continue
            if triple is None:
                if line.lstrip().startswith("#"):
                    rep.comment_lines += 1
                else:
                    rep.blank_lines += 1
                continue
            rep.triple_lines += 1
            yield triple
    finally:
        if close_after:
            stream.close()


def parse_ntriples(source: Source, version_id: str, strict: bool = False) -> DatasetVersion:
    """Parse a snapshot into a DatasetVersion; duplicates collapse to one."""
    report = ParseReport()
    triples = list(iter_triples(source, version_id, strict=strict, report=report))
    return DatasetVersion(version_id, triples, parse_report=report)


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    """Canonical text: one statement per line, sorted for determinism."""
    lines = sorted(t.nt_line() for t in triples)
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def write_ntriples(dataset: DatasetVersion, path: str | Path) -> None:
    Path(path).write_text(serialize_ntriples(dataset.triples), encoding="utf-8")
