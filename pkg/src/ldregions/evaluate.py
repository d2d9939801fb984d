"""Precision/recall/F-measure scoring against gold standards.

The empty-set conventions are explicit: precision is 1 with no detections,
recall is 1 with no true changes, and F follows from the harmonic mean
(0 only when P + R = 0).  Correct silence on a static corpus therefore
scores a perfect 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .diff import CHANGE_TYPES, ChangeSet
from .errors import DuplicateMappingError, MalformedGoldLineError


@dataclass(frozen=True)
class EvaluationReport:
    true_positive: int = 0
    false_positive: int = 0
    false_negative: int = 0

    @property
    def precision(self) -> float:
        denominator = self.true_positive + self.false_positive
        return self.true_positive / denominator if denominator else 1.0

    @property
    def recall(self) -> float:
        denominator = self.true_positive + self.false_negative
        return self.true_positive / denominator if denominator else 1.0

    @property
    def f_measure(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    def __add__(self, other: "EvaluationReport") -> "EvaluationReport":
        return EvaluationReport(
            self.true_positive + other.true_positive,
            self.false_positive + other.false_positive,
            self.false_negative + other.false_negative,
        )

    def to_dict(self) -> dict:
        return {
            "tp": self.true_positive,
            "fp": self.false_positive,
            "fn": self.false_negative,
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
        }


def report_from_sets(detected: Iterable, gold: Iterable) -> EvaluationReport:
    detected = set(detected)
    gold = set(gold)
    tp = len(detected & gold)
    return EvaluationReport(
        true_positive=tp,
        false_positive=len(detected) - tp,
        false_negative=len(gold) - tp,
    )


@dataclass(frozen=True)
class ReportSet:
    """Per change type reports plus their sum."""

    per_type: dict[str, EvaluationReport]

    @property
    def overall(self) -> EvaluationReport:
        total = EvaluationReport()
        for report in self.per_type.values():
            total = total + report
        return total

    def __add__(self, other: "ReportSet") -> "ReportSet":
        keys = set(self.per_type) | set(other.per_type)
        return ReportSet(
            {
                key: self.per_type.get(key, EvaluationReport())
                + other.per_type.get(key, EvaluationReport())
                for key in keys
            }
        )

    def to_dict(self) -> dict:
        out = {
            ct.value: self.per_type.get(ct.value, EvaluationReport()).to_dict()
            for ct in CHANGE_TYPES
            if ct.value in self.per_type
        }
        out["overall"] = self.overall.to_dict()
        return out

    @classmethod
    def empty(cls) -> "ReportSet":
        return cls({ct.value: EvaluationReport() for ct in CHANGE_TYPES})


@dataclass(frozen=True)
class GoldStandard:
    """True old->new IRI mappings, one-to-one in both coordinates."""

    move_pairs: frozenset[tuple[str, str]]


def _check_iri(raw: str, line_no: int) -> str:
    value = raw.strip()
    if value.startswith("<") and value.endswith(">"):
        value = value[1:-1]
    if not value or any(ch.isspace() for ch in value) or ":" not in value:
        raise MalformedGoldLineError(line_no, f"not an absolute IRI: {raw!r}")
    return value


def load_gold_standard(path: str | Path) -> GoldStandard:
    """Read the two-column TSV of old/new IRIs; '#' starts a comment line."""
    pairs: set[tuple[str, str]] = set()
    seen_old: set[str] = set()
    seen_new: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedGoldLineError(
                    line_no, f"expected two tab-separated IRIs, got {len(fields)} field(s)"
                )
            old = _check_iri(fields[0], line_no)
            new = _check_iri(fields[1], line_no)
            if old in seen_old:
                raise DuplicateMappingError(old)
            if new in seen_new:
                raise DuplicateMappingError(new)
            seen_old.add(old)
            seen_new.add(new)
            pairs.add((old, new))
    return GoldStandard(move_pairs=frozenset(pairs))


def evaluate_moves(detected: ChangeSet | Iterable[tuple[str, str]], gold: GoldStandard) -> EvaluationReport:
    """Score detected move+renew pairs (the merged move type) against gold."""
    if isinstance(detected, ChangeSet):
        detected_pairs = detected.move_like_pairs()
    else:
        detected_pairs = set(detected)
    return report_from_sets(detected_pairs, gold.move_pairs)
