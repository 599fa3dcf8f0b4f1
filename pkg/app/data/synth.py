"""Synthetic microtubule textures standing in for the fluorescence micrographs.

Untreated cells show a fine radial network; growing paclitaxel doses bend the
filaments and gather them into thick, tangled bundles.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageDraw, ImageFilter

from app.data.labels import ClassLabel
from app.data.samples import Sample
from app.errors import ImageSizeError
from app.tensor import Prng, Stream

MIN_SIZE = 64
BACKGROUND = 18
CYTOPLASM = 34
BLUR_RADIUS = 1.0
NOISE_SIGMA = 6.0


def _strand(
    rng: Prng,
    origin: tuple[float, float],
    heading: float,
    length: float,
    curl: float,
    segments: int = 12,
) -> list[tuple[float, float]]:
    """Polyline whose heading random-walks with step deviation ``curl`` (radians)."""

    x, y = origin
    points = [(x, y)]
    step = length / segments
    for turn in rng.normal(0.0, curl, segments) if curl > 0 else np.zeros(segments):
        heading += float(turn)
        x += step * np.cos(heading)
        y += step * np.sin(heading)
        points.append((x, y))
    return points


def _draw_radial(draw: ImageDraw.ImageDraw, rng: Prng, size: int, center: tuple[float, float]) -> None:
    for _ in range(rng.integers(24, 36)):
        heading = rng.uniform(0.0, 2 * np.pi)
        length = size * rng.uniform(0.30, 0.45)
        end = (center[0] + length * np.cos(heading), center[1] + length * np.sin(heading))
        draw.line([center, end], fill=rng.integers(140, 200), width=1)


def _draw_bent(draw: ImageDraw.ImageDraw, rng: Prng, size: int, center: tuple[float, float]) -> None:
    for _ in range(rng.integers(3, 4)):
        base = rng.uniform(0.0, 2 * np.pi)
        for _ in range(rng.integers(4, 6)):
            heading = base + rng.uniform(-0.25, 0.25)
            points = _strand(rng, center, heading, size * rng.uniform(0.30, 0.42), curl=0.15)
            draw.line(points, fill=rng.integers(150, 210), width=rng.integers(1, 2))


def _draw_bundled(draw: ImageDraw.ImageDraw, rng: Prng, size: int, center: tuple[float, float]) -> None:
    for _ in range(rng.integers(3, 5)):
        start = (center[0] + rng.uniform(-0.15, 0.15) * size, center[1] + rng.uniform(-0.15, 0.15) * size)
        spine = _strand(rng, start, rng.uniform(0.0, 2 * np.pi), size * rng.uniform(0.45, 0.7), curl=0.45, segments=16)
        for _ in range(rng.integers(4, 6)):
            dx, dy = rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)
            draw.line([(x + dx, y + dy) for x, y in spine], fill=rng.integers(170, 230), width=2)


_PAINTERS = {
    ClassLabel.C0: _draw_radial,
    ClassLabel.C01: _draw_bent,
    ClassLabel.C1: _draw_bundled,
}


def synth_generate(label: ClassLabel, seed: int, size: int) -> Sample:
    """Deterministic per ``(label, seed, size)`` single-cell image with its label and group."""

    if size < MIN_SIZE:
        raise ImageSizeError(f"synthetic images need size >= {MIN_SIZE}, got {size}")
    label = ClassLabel(label)
    rng = Prng(seed, Stream.SYNTH, label.index)

    canvas = Image.new("L", (size, size), color=BACKGROUND)
    draw = ImageDraw.Draw(canvas)
    center = (size * rng.uniform(0.4, 0.6), size * rng.uniform(0.4, 0.6))
    radius = size * rng.uniform(0.38, 0.46)
    draw.ellipse(
        [center[0] - radius, center[1] - radius, center[0] + radius, center[1] + radius],
        fill=CYTOPLASM,
    )
    _PAINTERS[label](draw, rng, size, center)

    blurred = np.asarray(canvas.filter(ImageFilter.GaussianBlur(radius=BLUR_RADIUS)), dtype=np.float64)
    noisy = blurred + rng.normal(0.0, NOISE_SIGMA, blurred.shape)
    pixels = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
    return Sample(image=pixels, label=label, group_id=f"synth-{label.value}-{seed}")
