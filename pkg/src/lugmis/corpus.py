"""Labeled misinformation dataset: loading, validation, summary statistics.

The canonical on-disk schema is a JSON array, or newline-delimited JSON, of
records with ``text``, ``label`` and ``source`` fields and an optional ``id``::

    {"id": "0007", "text": "...", "label": "misinformation", "source": "twitter"}

Files in other layouts are normalized once with :func:`convert_records`.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Source",
    "Label",
    "LABEL_NAMES",
    "Document",
    "LabeledDataset",
    "DatasetStats",
    "DatasetError",
    "DatasetParseError",
    "load_dataset",
    "save_dataset",
    "compute_stats",
    "convert_records",
    "read_raw_records",
    "dataset_from_records",
]


class Source(str, Enum):
    TWITTER = "twitter"
    FACEBOOK = "facebook"


class Label(str, Enum):
    MISINFORMATION = "misinformation"
    NO_MISINFORMATION = "no-misinformation"


# index 0 is the positive class for AUROC
LABEL_NAMES: tuple[str, str] = (Label.MISINFORMATION.value, Label.NO_MISINFORMATION.value)


class DatasetError(ValueError):
    """A record failed validation."""


class DatasetParseError(DatasetError):
    """The file is not valid JSON / NDJSON."""


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    source: Source
    label: Label | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise DatasetError(f"document {self.id!r}: empty text")
        object.__setattr__(self, "source", Source(self.source))
        if self.label is not None:
            object.__setattr__(self, "label", Label(self.label))


@dataclass(frozen=True)
class LabeledDataset:
    documents: tuple[Document, ...]
    label_names: tuple[str, str] = LABEL_NAMES

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        seen = set()
        for doc in self.documents:
            if doc.label is None:
                raise DatasetError(f"document {doc.id!r}: missing label")
            if doc.id in seen:
                raise DatasetError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    @property
    def ids(self) -> list[str]:
        return [d.id for d in self.documents]

    @property
    def texts(self) -> list[str]:
        return [d.text for d in self.documents]

    def labels(self) -> np.ndarray:
        """Label indices into ``label_names`` as an int64 array."""
        index = {name: i for i, name in enumerate(self.label_names)}
        return np.array([index[d.label.value] for d in self.documents], dtype=np.int64)

    def subset(self, indices: Iterable[int]) -> "LabeledDataset":
        return LabeledDataset(tuple(self.documents[i] for i in indices), self.label_names)

    def filter_source(self, source: str | Source | None) -> "LabeledDataset":
        """Documents from one platform; ``None`` or ``"all"`` keeps everything."""
        if source is None or source == "all":
            return self
        src = Source(source)
        return LabeledDataset(tuple(d for d in self.documents if d.source is src), self.label_names)


@dataclass(frozen=True)
class DatasetStats:
    by_source: dict[str, int]
    by_label: dict[str, int]
    cross: dict[tuple[str, str], int] = field(repr=False)
    total: int

    def rows(self) -> list[tuple[str, str, int]]:
        """``(source, label, count)`` triples in fixed source/label order."""
        return [(s.value, l.value, self.cross[(s.value, l.value)]) for s in Source for l in Label]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["source", "label", "count"])
        writer.writerows(self.rows())
        return buf.getvalue()

    def to_table(self) -> str:
        sources = [s.value for s in Source]
        head = f"{'':<20}" + "".join(f"{s:>10}" for s in sources) + f"{'total':>10}"
        lines = [head]
        for lab in Label:
            cells = "".join(f"{self.cross[(s, lab.value)]:>10}" for s in sources)
            lines.append(f"{lab.value:<20}{cells}{self.by_label[lab.value]:>10}")
        cells = "".join(f"{self.by_source[s]:>10}" for s in sources)
        lines.append(f"{'total':<20}{cells}{self.total:>10}")
        return "\n".join(lines) + "\n"


def compute_stats(ds: LabeledDataset) -> DatasetStats:
    """Source x label cross-tabulation with marginals."""
    if len(ds) == 0:
        raise DatasetError("cannot compute statistics of an empty dataset")
    cross_counts = Counter((d.source.value, d.label.value) for d in ds)
    cross = {(s.value, l.value): cross_counts.get((s.value, l.value), 0) for s in Source for l in Label}
    by_source = {s.value: sum(cross[(s.value, l.value)] for l in Label) for s in Source}
    by_label = {l.value: sum(cross[(s.value, l.value)] for s in Source) for l in Label}
    return DatasetStats(by_source=by_source, by_label=by_label, cross=cross, total=len(ds))


def read_raw_records(path: str | Path) -> list[dict]:
    """Read a JSON array or NDJSON file into a list of dicts.

    Column-oriented objects (``{"text": [...], "label": [...]}`` or the pandas
    ``{"text": {"0": ...}}`` layout) are transposed into records.
    """
    raw = Path(path).read_text(encoding="utf-8")
    stripped = raw.lstrip()
    if not stripped:
        return []
    if stripped[0] in "[{":
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            if stripped[0] == "{":
                return _read_ndjson(raw)
            raise DatasetParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        if isinstance(data, list):
            for i, rec in enumerate(data):
                if not isinstance(rec, dict):
                    raise DatasetParseError(f"{path}: record {i} is not an object")
            return data
        if isinstance(data, dict):
            return _columns_to_records(data, path)
    return _read_ndjson(raw)


def _read_ndjson(raw: str) -> list[dict]:
    records = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetParseError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(rec, dict):
            raise DatasetParseError(f"line {lineno}: record is not an object")
        records.append(rec)
    return records


def _columns_to_records(data: dict, path) -> list[dict]:
    columns = {}
    for key, col in data.items():
        if isinstance(col, dict):
            columns[key] = [col[k] for k in sorted(col, key=_index_key)]
        elif isinstance(col, list):
            columns[key] = col
        else:
            # a single record stored as an object
            return [data]
    lengths = {len(c) for c in columns.values()}
    if len(lengths) != 1:
        raise DatasetParseError(f"{path}: columns have different lengths")
    n = lengths.pop()
    return [{k: columns[k][i] for k in columns} for i in range(n)]


def _index_key(k):
    return (0, int(k)) if str(k).isdigit() else (1, str(k))


def _make_id(index: int) -> str:
    return f"{index:06d}"


def load_dataset(path: str | Path, schema: str = "canonical") -> LabeledDataset:
    """Load a canonical-schema dataset, preserving file order.

    Raises
    ------
    DatasetParseError
        Malformed JSON; the message carries the line or record index.
    DatasetError
        A record lacks text or label, or uses a label/source outside the
        closed sets.
    """
    if schema != "canonical":
        raise ValueError(f"unknown dataset schema {schema!r}; convert the file first")
    records = read_raw_records(path)
    docs = []
    for i, rec in enumerate(records):
        text = rec.get("text")
        if not isinstance(text, str) or not text.strip():
            raise DatasetError(f"record {i}: missing or empty text")
        label = rec.get("label")
        if label is None:
            raise DatasetError(f"record {i}: missing label")
        try:
            label = Label(label)
        except ValueError:
            raise DatasetError(f"record {i}: unknown label {label!r}") from None
        try:
            source = Source(rec.get("source"))
        except ValueError:
            raise DatasetError(f"record {i}: unknown source {rec.get('source')!r}") from None
        doc_id = rec.get("id")
        doc_id = _make_id(i) if doc_id is None else str(doc_id)
        docs.append(Document(id=doc_id, text=text, source=source, label=label))
    return LabeledDataset(tuple(docs))


def save_dataset(ds: LabeledDataset, path: str | Path) -> None:
    records = [{"id": d.id, "text": d.text, "label": d.label.value, "source": d.source.value} for d in ds]
    Path(path).write_text(json.dumps(records, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


_TEXT_FIELDS = ("text", "tweet", "post", "message", "content", "comment", "body")
_LABEL_FIELDS = ("label", "labels", "class", "annotation", "category")
_SOURCE_FIELDS = ("source", "platform", "origin", "media")
_ID_FIELDS = ("id", "_id", "tweet_id", "post_id")


def _pick_field(records, explicit, candidates, what, required=True):
    if explicit:
        return explicit
    keys = set().union(*(r.keys() for r in records)) if records else set()
    lowered = {k.lower(): k for k in keys}
    for cand in candidates:
        if cand in lowered:
            return lowered[cand]
    if required:
        raise DatasetError(f"cannot find a {what} field among {sorted(keys)}; pass it explicitly")
    return None


def _norm_label(value, label_map: Mapping[str, str] | None):
    key = str(value).strip()
    if label_map and key in label_map:
        key = label_map[key]
    key = key.lower().replace("_", "-").replace(" ", "-")
    if key in ("no-misinformation", "not-misinformation", "non-misinformation"):
        return Label.NO_MISINFORMATION
    if key == "misinformation":
        return Label.MISINFORMATION
    raise DatasetError(f"unknown label {value!r}")


def convert_records(
    records: Sequence[Mapping],
    *,
    text_field: str | None = None,
    label_field: str | None = None,
    source_field: str | None = None,
    id_field: str | None = None,
    label_map: Mapping[str, str] | None = None,
    default_source: str | None = None,
) -> list[dict]:
    """Normalize arbitrary dataset records into the canonical schema.

    Field names are auto-detected from common spellings unless given.
    ``label_map`` maps raw label values (as strings) to canonical labels,
    e.g. ``{"1": "misinformation", "0": "no-misinformation"}``.
    """
    records = list(records)
    tf = _pick_field(records, text_field, _TEXT_FIELDS, "text")
    lf = _pick_field(records, label_field, _LABEL_FIELDS, "label")
    sf = _pick_field(records, source_field, _SOURCE_FIELDS, "source", required=default_source is None)
    idf = _pick_field(records, id_field, _ID_FIELDS, "id", required=False)
    out = []
    for i, rec in enumerate(records):
        try:
            label = _norm_label(rec.get(lf), label_map)
            raw_source = rec.get(sf) if sf else None
            source = Source(str(raw_source if raw_source is not None else default_source).strip().lower())
        except (DatasetError, ValueError) as exc:
            raise DatasetError(f"record {i}: {exc}") from None
        text = rec.get(tf)
        if not isinstance(text, str) or not text.strip():
            raise DatasetError(f"record {i}: missing or empty text")
        doc_id = rec.get(idf) if idf else None
        out.append({
            "id": _make_id(i) if doc_id is None else str(doc_id),
            "text": text,
            "label": label.value,
            "source": source.value,
        })
    return out


def dataset_from_records(records: Sequence[Mapping]) -> LabeledDataset:
    """Build a dataset from canonical records held in memory."""
    docs = []
    for i, rec in enumerate(records):
        doc_id = rec.get("id")
        docs.append(Document(
            id=_make_id(i) if doc_id is None else str(doc_id),
            text=rec["text"],
            source=Source(rec["source"]),
            label=Label(rec["label"]),
        ))
    return LabeledDataset(tuple(docs))
