"""Image ingestion, preprocessing, augmentation, manifests and splits."""

from .imageio import GrayImage, decode_pgm, encode_pgm, load_image, load_with_pillow, read_any, save_image
from .labels import LABEL_MAP_HEADER, ClassLabel
from .manifest import (
    Manifest,
    ManifestRecord,
    SplitTag,
    load_samples,
    parse_manifest,
    read_manifest,
    records_for,
    validate_manifest,
    validate_records,
    write_manifest,
)
from .samples import ROTATIONS, Sample, augment_rotations, conform, groups_of, stack_inputs
from .splits import group_split, kfold, split_test
from .synth import synth_generate
from .transforms import pad_square, resize_square, rotate90, sharpen, to_8bit, to_input

__all__ = [
    "LABEL_MAP_HEADER",
    "ROTATIONS",
    "ClassLabel",
    "GrayImage",
    "Manifest",
    "ManifestRecord",
    "Sample",
    "SplitTag",
    "augment_rotations",
    "conform",
    "decode_pgm",
    "encode_pgm",
    "group_split",
    "groups_of",
    "kfold",
    "load_image",
    "load_samples",
    "load_with_pillow",
    "pad_square",
    "parse_manifest",
    "read_any",
    "read_manifest",
    "records_for",
    "resize_square",
    "rotate90",
    "save_image",
    "sharpen",
    "split_test",
    "stack_inputs",
    "synth_generate",
    "to_8bit",
    "to_input",
    "validate_manifest",
    "validate_records",
    "write_manifest",
]
