"""Manifest files: which image belongs to which class, group and split."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable

from app.data.imageio import read_any
from app.data.labels import LABEL_MAP_HEADER, ClassLabel
from app.data.samples import ROTATIONS, Sample
from app.data.transforms import to_8bit
from app.errors import LabelError, LeakageError, ManifestError

logger = logging.getLogger(__name__)


class SplitTag(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True, slots=True)
class ManifestRecord:
    path: str
    label: ClassLabel
    group_id: str
    split: SplitTag = SplitTag.UNASSIGNED
    rotation: int = 0
    sharpened: bool = False

    def to_line(self) -> str:
        fields = [self.path, self.label.value, self.group_id, self.split.value]
        if self.rotation or self.sharpened:
            fields += [str(self.rotation), "1" if self.sharpened else "0"]
        return "\t".join(fields)


@dataclass(slots=True)
class Manifest:
    """Ordered records; relative paths resolve against ``base_dir``."""

    records: list[ManifestRecord] = field(default_factory=list)
    base_dir: Path = Path(".")

    def sorted(self) -> Manifest:
        """Lexicographic path order, the input order of every split and fold operation."""

        return Manifest(records=sorted(self.records, key=lambda record: record.path), base_dir=self.base_dir)

    def tagged(self, *splits: SplitTag) -> Manifest:
        wanted = set(splits)
        return Manifest(records=[r for r in self.records if r.split in wanted], base_dir=self.base_dir)

    def retag(self, split: SplitTag) -> Manifest:
        return Manifest(records=[replace(r, split=split) for r in self.records], base_dir=self.base_dir)

    def resolve(self, record: ManifestRecord) -> Path:
        path = Path(record.path)
        return path if path.is_absolute() else self.base_dir / path

    def __len__(self) -> int:
        return len(self.records)


def _parse_line(raw: str, lineno: int, source: str) -> ManifestRecord:
    fields = raw.split("\t")
    if len(fields) not in (4, 6):
        raise ManifestError(f"{source}:{lineno}: expected 4 or 6 tab-separated fields, got {len(fields)}")
    path, label_raw, group_id, split_raw = fields[:4]
    if not path or not group_id:
        raise ManifestError(f"{source}:{lineno}: path and group_id must be non-empty")
    try:
        label = ClassLabel.parse(label_raw)
    except LabelError as exc:
        raise ManifestError(f"{source}:{lineno}: {exc}") from exc
    try:
        split = SplitTag(split_raw.strip())
    except ValueError as exc:
        raise ManifestError(f"{source}:{lineno}: unknown split tag {split_raw!r}") from exc

    rotation, sharpened = 0, False
    if len(fields) == 6:
        rotation_raw, sharpened_raw = fields[4].strip(), fields[5].strip()
        if not rotation_raw.isdigit() or int(rotation_raw) not in ROTATIONS:
            raise ManifestError(f"{source}:{lineno}: rotation must be one of {ROTATIONS}, got {rotation_raw!r}")
        if sharpened_raw not in ("0", "1"):
            raise ManifestError(f"{source}:{lineno}: sharpened flag must be 0 or 1, got {sharpened_raw!r}")
        rotation, sharpened = int(rotation_raw), sharpened_raw == "1"
    return ManifestRecord(path, label, group_id, split, rotation, sharpened)


def parse_manifest(text: str, *, source: str = "<manifest>", base_dir: Path = Path(".")) -> Manifest:
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("#"):
            continue
        records.append(_parse_line(raw.rstrip("\r\n"), lineno, source))
    return Manifest(records=records, base_dir=base_dir)


def read_manifest(path: Path) -> Manifest:
    path = Path(path)
    manifest = parse_manifest(path.read_text(encoding="utf-8"), source=str(path), base_dir=path.parent)
    logger.debug("Read %d manifest records from %s", len(manifest), path)
    return manifest


def write_manifest(manifest: Manifest, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [LABEL_MAP_HEADER, "# path\tlabel\tgroup_id\tsplit[\trotation\tsharpened]"]
    lines += [record.to_line() for record in manifest.records]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def validate_records(records: Iterable[ManifestRecord]) -> None:
    """Raise unless labels agree within groups, test holds no rotations and no group crosses splits."""

    labels: dict[str, ClassLabel] = {}
    splits: dict[str, set[SplitTag]] = defaultdict(set)
    for record in records:
        known = labels.setdefault(record.group_id, record.label)
        if known is not record.label:
            raise ManifestError(f"group {record.group_id} mixes labels {known.value} and {record.label.value}")
        if record.split is SplitTag.TEST and record.rotation != 0:
            raise ManifestError(f"{record.path}: rotated image ({record.rotation} degrees) in the test split")
        splits[record.group_id].add(record.split)

    for group_id, tags in splits.items():
        if SplitTag.TEST in tags and tags & {SplitTag.TRAIN, SplitTag.VAL}:
            raise LeakageError(f"group {group_id} appears in both test and training/validation")
        if {SplitTag.TRAIN, SplitTag.VAL} <= tags:
            raise LeakageError(f"group {group_id} appears in both training and validation")


def validate_manifest(manifest: Manifest) -> None:
    validate_records(manifest.records)


def load_samples(manifest: Manifest) -> list[Sample]:
    """Decode every record's image; 16-bit inputs are reduced to 8 bits."""

    samples = []
    for record in manifest.records:
        image = read_any(manifest.resolve(record))
        pixels = to_8bit(image.pixels) if image.is_16bit else image.pixels
        samples.append(
            Sample(
                image=pixels,
                label=record.label,
                group_id=record.group_id,
                rotation=record.rotation,
                sharpened=record.sharpened,
                path=record.path,
            )
        )
    return samples


def records_for(samples: Iterable[Sample], split: SplitTag) -> list[ManifestRecord]:
    return [
        ManifestRecord(
            path=sample.path or sample.group_id,
            label=sample.label,
            group_id=sample.group_id,
            split=split,
            rotation=sample.rotation,
            sharpened=sample.sharpened,
        )
        for sample in samples
    ]
