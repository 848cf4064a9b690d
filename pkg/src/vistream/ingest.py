"""Loading, balancing and splitting of labelled comment datasets.

The on-disk format is a UTF-8 CSV with a header row. Only ``text`` is
required; ``id``, ``label`` and ``source`` are optional.
"""

from __future__ import annotations

import csv
import enum
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ._rng import SplitMix64

CSV_COLUMNS = ("id", "text", "label", "source")


class DatasetError(ValueError):
    """Base class for dataset problems."""


class SchemaError(DatasetError):
    pass


class RowError(DatasetError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class EmptyDatasetError(DatasetError):
    pass


class MissingClassError(DatasetError):
    pass


class DegenerateSplitError(DatasetError):
    pass


class Label(enum.IntEnum):
    OTHER = 0
    DISCRIMINATION = 1
    SUPPORTIVE = 2

    @classmethod
    def parse(cls, value: str | int | float) -> "Label":
        """Accept ``0``/``1``/``2`` and the decimal spellings ``0.0``/``1.0``/``2.0``."""
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            if float(value) in (0.0, 1.0, 2.0):
                return cls(int(value))
            raise ValueError(f"invalid label {value!r}")
        s = str(value).strip()
        if s in ("0", "1", "2"):
            return cls(int(s))
        if s in ("0.0", "1.0", "2.0"):
            return cls(int(s[0]))
        raise ValueError(f"invalid label {value!r}")

    def to_csv(self) -> str:
        return f"{int(self)}.0"


N_CLASSES = len(Label)


@dataclass(frozen=True)
class RawComment:
    id: str
    text: str
    label: Label | None = None
    source: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"comment {self.id!r} has empty text")


@dataclass(frozen=True)
class Dataset:
    records: tuple[RawComment, ...]
    all_labeled: bool = field(init=False)

    def __post_init__(self):
        records = tuple(self.records)
        if not records:
            raise EmptyDatasetError("dataset has no records")
        seen = set()
        for r in records:
            if r.id in seen:
                raise DatasetError(f"duplicate id {r.id!r}")
            seen.add(r.id)
        object.__setattr__(self, "records", records)
        object.__setattr__(self, "all_labeled", all(r.label is not None for r in records))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def texts(self) -> list[str]:
        return [r.text for r in self.records]

    @property
    def labels(self) -> list[int]:
        self._require_labels()
        return [int(r.label) for r in self.records]

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def class_counts(self) -> list[int]:
        self._require_labels()
        counts = [0] * N_CLASSES
        for r in self.records:
            counts[r.label] += 1
        return counts

    def _require_labels(self):
        if not self.all_labeled:
            raise DatasetError("operation requires every record to carry a label")


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.70
    val_fraction: float = 0.15
    test_fraction: float = 0.15
    seed: int = 42

    def __post_init__(self):
        fracs = (self.train_fraction, self.val_fraction, self.test_fraction)
        if any(not 0 < f < 1 for f in fracs):
            raise ValueError("split fractions must lie in (0, 1)")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError(f"split fractions sum to {sum(fracs)}, expected 1")


def load_dataset(path: str | os.PathLike) -> Dataset:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyDatasetError(f"{path}: empty file")
        if "text" not in reader.fieldnames:
            raise SchemaError(f"{path}: header lacks a 'text' column")
        has_id = "id" in reader.fieldnames
        has_label = "label" in reader.fieldnames
        has_source = "source" in reader.fieldnames
        records = []
        # row numbers count the header as row 1, like a spreadsheet
        for i, row in enumerate(reader):
            rownum = i + 2
            text = row["text"]
            if text is None or not text.strip():
                raise RowError(rownum, "empty text")
            label = None
            if has_label and row["label"] not in (None, ""):
                try:
                    label = Label.parse(row["label"])
                except ValueError:
                    raise RowError(rownum, f"unparseable label {row['label']!r}") from None
            rid = row["id"] if has_id and row["id"] else f"r{i}"
            source = row["source"] if has_source and row["source"] != "" else None
            records.append(RawComment(rid, text, label, source))
    if not records:
        raise EmptyDatasetError(f"{path}: no data rows")
    return Dataset(tuple(records))


def save_dataset(d: Dataset | Iterable[RawComment], path: str | os.PathLike) -> None:
    """Write records with the full ``id,text,label,source`` header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in d:
            writer.writerow(
                [r.id, r.text, "" if r.label is None else r.label.to_csv(), r.source or ""]
            )


def _by_class(d: Dataset) -> list[list[int]]:
    d._require_labels()
    groups: list[list[int]] = [[] for _ in range(N_CLASSES)]
    for i, r in enumerate(d.records):
        groups[r.label].append(i)
    return groups


def balance_labels(d: Dataset, seed: int) -> Dataset:
    """Undersample every class to the minority count.

    Output is laid out class by class (0, 1, 2), each block keeping the
    original relative order.
    """
    groups = _by_class(d)
    missing = [Label(c).name for c, g in enumerate(groups) if not g]
    if missing:
        raise MissingClassError(f"classes absent: {', '.join(missing)}")
    m = min(len(g) for g in groups)
    rng = SplitMix64(seed)
    out = []
    for g in groups:
        picked = list(range(len(g)))
        rng.shuffle(picked)
        out.extend(d.records[g[k]] for k in sorted(picked[:m]))
    return Dataset(tuple(out))


def split(d: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Stratified three-way split.

    Each class is shuffled and cut at ``floor(n*train)`` and
    ``floor(n*(train+val))``. Every output keeps the input's record order.
    """
    groups = _by_class(d)
    rng = SplitMix64(spec.seed)
    parts: list[list[int]] = [[], [], []]
    # decimal fractions as exact rationals so 0.7 * 10 cuts at 7, not 6
    cut_a = Fraction(repr(spec.train_fraction))
    cut_b = cut_a + Fraction(repr(spec.val_fraction))
    for c, g in enumerate(groups):
        if not g:
            continue
        shuffled = list(g)
        rng.shuffle(shuffled)
        n = len(shuffled)
        a, b = math.floor(n * cut_a), math.floor(n * cut_b)
        chunks = (shuffled[:a], shuffled[a:b], shuffled[b:])
        for name, part, chunk in zip(("train", "val", "test"), parts, chunks):
            if not chunk:
                raise DegenerateSplitError(
                    f"{name} split receives no records of class {Label(c).name} (n={n})"
                )
            part.extend(chunk)
    return tuple(Dataset(tuple(d.records[i] for i in sorted(p))) for p in parts)


def subset(d: Dataset, ids: Sequence[str]) -> Dataset:
    """Records of ``d`` whose id is in ``ids``, in ``d`` order."""
    wanted = set(ids)
    return Dataset(tuple(r for r in d.records if r.id in wanted))
