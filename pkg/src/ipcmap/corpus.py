"""Patent records: loading, applicant/date filtering and corpus statistics."""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import re
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .ipc import IpcCode, IpcLevel, MalformedCode, parse_ipc_code, truncate_to_level

__all__ = [
    "PatentRecord",
    "Corpus",
    "IngestReport",
    "CorpusError",
    "UnreadableFile",
    "UnknownFormat",
    "EmptyCorpus",
    "InvalidRange",
    "FORMATS",
    "PATENTSCOPE_COLUMNS",
    "load_corpus",
    "filter_by_applicant",
    "filter_by_publication_year",
    "annual_counts",
    "group_counts",
    "codes_at_level",
    "write_ingest_report",
]

log = logging.getLogger(__name__)

FORMATS = ("canonical-csv", "canonical-jsonl", "patentscope-csv")
CANONICAL_FIELDS = ("patent_id", "office", "publication_date", "applicants", "ipc_codes")

# Column names of a Patentscope result-list export; override per call when the export drifts.
PATENTSCOPE_COLUMNS = {
    "patent_id": "Publication Number",
    "office": "Country",
    "publication_date": "Publication Date",
    "applicants": "Applicants",
    "ipc_codes": "I P C",
}

_LIST_SPLIT = re.compile(r"[;\n]")


class CorpusError(Exception):
    pass


class UnreadableFile(CorpusError, OSError):
    pass


class UnknownFormat(CorpusError, ValueError):
    pass


class EmptyCorpus(CorpusError):
    pass


class InvalidRange(CorpusError, ValueError):
    pass


@dataclass(frozen=True)
class PatentRecord:
    patent_id: str
    office: str
    publication_date: dt.date
    applicants: tuple[str, ...] = ()
    ipc_codes: tuple[IpcCode, ...] = ()

    @property
    def year(self) -> int:
        return self.publication_date.year


@dataclass
class IngestReport:
    source: str
    format: str
    rows_read: int = 0
    records: int = 0
    duplicate_ids: int = 0
    skipped_codes: int = 0
    bad_rows: int = 0
    row_errors: list[dict] = field(default_factory=list)
    code_errors: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Corpus:
    records: tuple[PatentRecord, ...]
    provenance: str = ""
    report: IngestReport | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        seen = set()
        for r in self.records:
            if r.patent_id in seen:
                raise ValueError(f"duplicate patent_id {r.patent_id!r} in corpus")
            seen.add(r.patent_id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PatentRecord]:
        return iter(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.patent_id for r in self.records]

    def _derive(self, records: Iterable[PatentRecord], note: str) -> Corpus:
        prov = f"{self.provenance} | {note}" if self.provenance else note
        return replace(self, records=tuple(records), provenance=prov)


def _parse_date(text: str) -> dt.date:
    text = text.strip()
    for fmt in ("%Y-%m-%d", "%d.%m.%Y", "%Y%m%d", "%d/%m/%Y"):
        try:
            return dt.datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    try:
        return dt.date.fromisoformat(text[:10])
    except ValueError:
        raise ValueError(f"unparseable date {text!r}") from None


def _split_cell(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        items = [str(v) for v in value]
    else:
        items = _LIST_SPLIT.split(str(value))
    return [s.strip() for s in items if s and s.strip()]


def _office_from_id(patent_id: str) -> str:
    m = re.match(r"[A-Za-z]{2}", patent_id)
    return m.group(0).upper() if m else ""


def _rows(path: Path, fmt: str) -> Iterator[Mapping]:
    if fmt == "canonical-jsonl":
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    yield {"__error__": f"line {lineno}: invalid JSON ({exc.msg})"}
                    continue
                if not isinstance(row, dict):
                    yield {"__error__": f"line {lineno}: not a JSON object"}
                    continue
                yield row
    else:
        with path.open(encoding="utf-8-sig", newline="") as fh:
            yield from csv.DictReader(fh)


def load_corpus(
    path: str | Path,
    format: str = "canonical-csv",
    *,
    columns: Mapping[str, str] | None = None,
) -> Corpus:
    """Read a corpus file.

    Malformed IPC codes are dropped one by one and counted; a bad row (no id,
    unparseable date) is recorded and skipped; repeated ids keep the first
    occurrence. The counts are available on ``corpus.report``.
    """
    if format not in FORMATS:
        raise UnknownFormat(f"unknown corpus format {format!r}; expected one of {', '.join(FORMATS)}")
    path = Path(path)
    if not path.is_file():
        raise UnreadableFile(f"cannot read corpus file {str(path)!r}: no such file")
    colmap = dict(zip(CANONICAL_FIELDS, CANONICAL_FIELDS))
    if format == "patentscope-csv":
        colmap.update(PATENTSCOPE_COLUMNS)
    if columns:
        colmap.update(columns)

    report = IngestReport(source=str(path), format=format)
    records: list[PatentRecord] = []
    seen: set[str] = set()
    try:
        for rowno, row in enumerate(_rows(path, format), 1):
            report.rows_read += 1
            if "__error__" in row:
                report.bad_rows += 1
                report.row_errors.append({"row": rowno, "error": row["__error__"]})
                continue
            try:
                rec = _record_from_row(row, colmap, rowno, report)
            except (KeyError, ValueError, TypeError) as exc:
                report.bad_rows += 1
                report.row_errors.append({"row": rowno, "error": str(exc)})
                continue
            if rec.patent_id in seen:
                report.duplicate_ids += 1
                continue
            seen.add(rec.patent_id)
            records.append(rec)
    except (OSError, UnicodeDecodeError) as exc:
        raise UnreadableFile(f"cannot read corpus file {str(path)!r}: {exc}") from exc

    report.records = len(records)
    if report.skipped_codes or report.duplicate_ids or report.bad_rows:
        log.warning(
            "%s: %d skipped codes, %d duplicate ids, %d bad rows",
            path, report.skipped_codes, report.duplicate_ids, report.bad_rows,
        )
    if not records:
        raise EmptyCorpus(f"no valid records in {str(path)!r}")
    return Corpus(tuple(records), provenance=f"{format}:{path.name}", report=report)


def _record_from_row(row: Mapping, colmap: Mapping[str, str], rowno: int, report: IngestReport) -> PatentRecord:
    def get(name):
        value = row.get(colmap[name])
        return "" if value is None else value

    patent_id = str(get("patent_id")).strip()
    if not patent_id:
        raise ValueError("missing patent_id")
    date = _parse_date(str(get("publication_date")))
    office = str(get("office")).strip().upper() or _office_from_id(patent_id)
    codes = []
    for text in _split_cell(get("ipc_codes")):
        try:
            codes.append(parse_ipc_code(text))
        except MalformedCode as exc:
            report.skipped_codes += 1
            report.code_errors.append({"row": rowno, "patent_id": patent_id, "code": text, "error": str(exc)})
    return PatentRecord(patent_id, office, date, tuple(_split_cell(get("applicants"))), tuple(codes))


def write_ingest_report(report: IngestReport, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _matches(record: PatentRecord, patterns: Sequence[str]) -> bool:
    names = [a.casefold() for a in record.applicants]
    return any(p in name for p in patterns for name in names)


def filter_by_applicant(corpus: Corpus, patterns: Sequence[str]) -> Corpus:
    """Keep records where any applicant contains any pattern (case-insensitive)."""
    if not patterns:
        raise ValueError("at least one applicant pattern is required")
    folded = [p.casefold() for p in patterns]
    kept = [r for r in corpus.records if _matches(r, folded)]
    return corpus._derive(kept, "applicant~(" + " OR ".join(patterns) + ")")


def filter_by_publication_year(corpus: Corpus, from_year: int, to_year: int) -> Corpus:
    if from_year > to_year:
        raise InvalidRange(f"from_year {from_year} is after to_year {to_year}")
    kept = [r for r in corpus.records if from_year <= r.year <= to_year]
    return corpus._derive(kept, f"published {from_year}-{to_year}")


def annual_counts(corpus: Corpus) -> dict[int, int]:
    """Records per publication year, zero-filled between the first and last year."""
    counts = Counter(r.year for r in corpus.records)
    if not counts:
        return {}
    return {y: counts.get(y, 0) for y in range(min(counts), max(counts) + 1)}


UNMATCHED = "unmatched"


def group_counts(
    corpus: Corpus,
    key: str,
    rules: Sequence[tuple[str, Sequence[str]]] | None = None,
) -> dict[str, int]:
    """Count records per applicant rule label or per office.

    With ``key="applicant-pattern"`` each record goes to the first rule whose
    patterns match (same matching as :func:`filter_by_applicant`), otherwise
    to ``"unmatched"``. With ``key="office"`` records without an office code
    are counted as ``"unmatched"``. The unmatched bucket is always present.
    """
    counts: dict[str, int] = {}
    if key == "applicant-pattern":
        if rules is None:
            raise ValueError("applicant-pattern counting needs rules")
        folded = [(label, [p.casefold() for p in pats]) for label, pats in rules]
        for label, _ in folded:
            counts.setdefault(label, 0)
        counts[UNMATCHED] = 0
        for rec in corpus.records:
            label = next((lab for lab, pats in folded if _matches(rec, pats)), UNMATCHED)
            counts[label] += 1
    elif key == "office":
        office = Counter(r.office or UNMATCHED for r in corpus.records)
        counts = {k: office[k] for k in sorted(office, key=lambda k: (-office[k], k)) if k != UNMATCHED}
        counts[UNMATCHED] = office.get(UNMATCHED, 0)
    else:
        raise ValueError(f"unknown grouping key {key!r}")
    return counts


def codes_at_level(record: PatentRecord, level: IpcLevel) -> frozenset[IpcCode]:
    """Distinct codes of a record truncated to ``level``; shallower codes are dropped."""
    out = set()
    for code in record.ipc_codes:
        if code.level >= level:
            out.add(truncate_to_level(code, level))
    return frozenset(out)
