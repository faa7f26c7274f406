"""Generator for the bundled desk-scale dataset and stub model registry.

Produces a small labeled image set (six categories: animals, people,
streets, food, statues, general) drawn deterministically with PIL, plus a
scripted-detector fixture whose boxes are the drawn motifs. Everything is a
pure function of the seed, so the repository copy can be regenerated
byte-for-byte.

Usage: python -m pixseek.sampledata --dataset-dir data/desk_dataset \
           --registry-dir data/stub_registry
"""

from __future__ import annotations

import argparse
import hashlib
import random
from pathlib import Path

from PIL import Image, ImageDraw

from .catalog import decode_bytes
from .models.registry import write_manifest
from .models.stub import (
    QUADRANT_FEATURE_DIM,
    write_quadrant_fixture,
    write_scripted_fixture,
)
from .models.types import DETECTOR, EXTRACTOR, PreprocessSpec

WIDTH, HEIGHT = 256, 192

# category -> (image count, prompt that should retrieve it)
CATEGORY_PLAN = {
    "animals": (8, "cat"),
    "food": (8, "food"),
    "streets": (8, "road"),
    "people": (4, "family"),
    "statues": (4, "statue"),
    "general": (4, "balloons"),
}

STUB_EXTRACTOR_ID = "quadrant-mean"
STUB_DETECTOR_ID = "scripted-detector"

Box = tuple[float, float, float, float]


def _jitter(rng: random.Random, value: int, spread: int) -> int:
    return value + rng.randint(-spread, spread)


def _draw_animal(draw: ImageDraw.ImageDraw, rng: random.Random) -> Box:
    draw.rectangle([0, 0, WIDTH, HEIGHT], fill=(88, _jitter(rng, 150, 20), 70))
    for _ in range(60):  # grass blades
        x = rng.randrange(0, WIDTH)
        y = rng.randrange(HEIGHT - 40, HEIGHT)
        draw.line([x, y, x + rng.randint(-2, 2), y - rng.randint(6, 14)],
                  fill=(60, 120, 55), width=1)
    cx, cy = _jitter(rng, 128, 40), _jitter(rng, 110, 20)
    body_w, body_h = _jitter(rng, 70, 12), _jitter(rng, 40, 8)
    coat = (rng.randint(180, 240), rng.randint(110, 150), rng.randint(40, 70))
    draw.ellipse([cx - body_w, cy - body_h, cx + body_w, cy + body_h], fill=coat)
    head_r = _jitter(rng, 26, 4)
    hx, hy = cx + body_w - 6, cy - body_h - 6
    draw.ellipse([hx - head_r, hy - head_r, hx + head_r, hy + head_r], fill=coat)
    for side in (-1, 1):  # ears
        ex = hx + side * head_r // 2
        draw.polygon([(ex - 8, hy - head_r + 6), (ex + 8, hy - head_r + 6),
                      (ex, hy - head_r - 12)], fill=coat)
    draw.arc([cx - body_w - 30, cy - 10, cx - body_w + 10, cy + 30],
             start=90, end=270, fill=coat, width=6)
    return (
        max(0, cx - body_w - 30), max(0, hy - head_r - 12),
        min(WIDTH, hx + head_r + 4), min(HEIGHT, cy + body_h + 4),
    )


def _draw_food(draw: ImageDraw.ImageDraw, rng: random.Random) -> Box:
    draw.rectangle([0, 0, WIDTH, HEIGHT], fill=(245, _jitter(rng, 225, 10), 200))
    cx, cy = _jitter(rng, 128, 25), _jitter(rng, 96, 15)
    radius = _jitter(rng, 70, 8)
    draw.ellipse([cx - radius, cy - radius, cx + radius, cy + radius],
                 fill=(250, 250, 250), outline=(200, 200, 205), width=3)
    draw.ellipse([cx - radius + 10, cy - radius + 10, cx + radius - 10, cy + radius - 10],
                 outline=(225, 225, 230), width=2)
    palette = [(205, 60, 50), (240, 170, 60), (110, 160, 60), (160, 80, 40)]
    for _ in range(rng.randint(5, 8)):
        r = rng.randint(10, 22)
        angle_x = rng.randint(-radius + r + 12, radius - r - 12)
        angle_y = rng.randint(-radius + r + 12, radius - r - 12)
        fx, fy = cx + angle_x, cy + angle_y
        draw.ellipse([fx - r, fy - r, fx + r, fy + r], fill=rng.choice(palette))
    return (cx - radius, cy - radius, cx + radius, cy + radius)


def _draw_street(draw: ImageDraw.ImageDraw, rng: random.Random,
                 with_person: bool) -> Box:
    horizon = _jitter(rng, 88, 10)
    draw.rectangle([0, 0, WIDTH, horizon], fill=(120, 170, _jitter(rng, 225, 15)))
    draw.rectangle([0, horizon, WIDTH, HEIGHT], fill=(70, 70, 78))
    for _ in range(260):  # asphalt speckle
        x = rng.randrange(0, WIDTH)
        y = rng.randrange(horizon, HEIGHT)
        shade = rng.randint(50, 105)
        draw.point((x, y), fill=(shade, shade, shade + 5))
    for x in range(8, WIDTH, 36):  # lane dashes
        y = (horizon + HEIGHT) // 2
        draw.rectangle([x, y - 3, x + 18, y + 3], fill=(250, 220, 80))
    for _ in range(rng.randint(1, 3)):
        cw, ch = rng.randint(34, 50), rng.randint(16, 24)
        cx = rng.randint(10, WIDTH - cw - 10)
        cy = rng.randint(horizon + 8, HEIGHT - ch - 12)
        color = rng.choice([(200, 50, 50), (50, 80, 190), (220, 200, 60)])
        draw.rectangle([cx, cy, cx + cw, cy + ch], fill=color)
        for wx in (cx + 7, cx + cw - 7):
            draw.ellipse([wx - 5, cy + ch - 4, wx + 5, cy + ch + 6], fill=(25, 25, 25))
    if with_person:
        px = rng.randint(20, WIDTH - 30)
        draw.ellipse([px - 5, horizon - 26, px + 5, horizon - 16], fill=(235, 200, 170))
        draw.rectangle([px - 6, horizon - 16, px + 6, horizon + 12], fill=(170, 60, 60))
    return (0.0, float(horizon), float(WIDTH), float(HEIGHT))


def _draw_people(draw: ImageDraw.ImageDraw, rng: random.Random) -> Box:
    draw.rectangle([0, 0, WIDTH, HEIGHT], fill=(230, 220, _jitter(rng, 205, 10)))
    draw.rectangle([0, HEIGHT - 30, WIDTH, HEIGHT], fill=(180, 160, 140))
    count = rng.randint(2, 4)
    left = WIDTH
    right = 0
    start = rng.randint(40, 70)
    for i in range(count):
        px = start + i * rng.randint(45, 60)
        scale = rng.uniform(0.8, 1.2)
        head_r = int(12 * scale)
        top = int(60 - 20 * scale) + rng.randint(-6, 6)
        shirt = rng.choice([(60, 110, 180), (190, 80, 70), (90, 150, 90), (150, 90, 160)])
        draw.ellipse([px - head_r, top, px + head_r, top + 2 * head_r],
                     fill=(235, 200, 170))
        torso_h = int(55 * scale)
        draw.rectangle([px - head_r - 2, top + 2 * head_r,
                        px + head_r + 2, top + 2 * head_r + torso_h], fill=shirt)
        left = min(left, px - head_r - 2)
        right = max(right, px + head_r + 2)
    return (max(0, left - 4), 20.0, min(WIDTH, right + 4), float(HEIGHT - 20))


def _draw_statue(draw: ImageDraw.ImageDraw, rng: random.Random) -> Box:
    # warm museum-interior backdrop so the gray stone stays the odd one out
    draw.rectangle([0, 0, WIDTH, HEIGHT], fill=(206, _jitter(rng, 186, 8), 158))
    cx = _jitter(rng, 128, 30)
    base_y = HEIGHT - 24
    draw.rectangle([cx - 50, base_y, cx + 50, HEIGHT], fill=(160, 148, 128))
    stone = (rng.randint(185, 210),) * 3
    body_top = _jitter(rng, 60, 10)
    draw.rectangle([cx - 22, body_top + 30, cx + 22, base_y], fill=stone)
    draw.ellipse([cx - 16, body_top, cx + 16, body_top + 32], fill=stone)
    for _ in range(12):  # marble streaks
        sx = rng.randint(cx - 20, cx + 20)
        sy = rng.randint(body_top + 34, base_y - 6)
        draw.line([sx, sy, sx + rng.randint(-6, 6), sy + rng.randint(8, 18)],
                  fill=(160, 160, 165), width=1)
    return (cx - 50, float(body_top), cx + 50, float(HEIGHT))


def _draw_general(draw: ImageDraw.ImageDraw, rng: random.Random) -> Box:
    draw.rectangle([0, 0, WIDTH, HEIGHT], fill=(170, 205, _jitter(rng, 235, 10)))
    for _ in range(3):  # clouds
        wx, wy = rng.randint(0, WIDTH - 60), rng.randint(6, 50)
        draw.ellipse([wx, wy, wx + 60, wy + 18], fill=(250, 250, 252))
    left, top, right = WIDTH, HEIGHT, 0
    for _ in range(rng.randint(4, 6)):
        r = rng.randint(14, 24)
        bx = rng.randint(r + 4, WIDTH - r - 4)
        by = rng.randint(r + 20, HEIGHT - 70)
        color = rng.choice([(220, 60, 60), (240, 180, 50), (70, 150, 220),
                            (120, 200, 90), (190, 90, 200)])
        draw.ellipse([bx - r, by - r, bx + r, by + r], fill=color)
        draw.line([bx, by + r, bx + rng.randint(-8, 8), by + r + 40],
                  fill=(80, 80, 80), width=1)
        left, top, right = min(left, bx - r), min(top, by - r), max(right, bx + r)
    return (max(0, left - 2), max(0, top - 2), min(WIDTH, right + 2), float(HEIGHT - 20))


def _render(category: str, ordinal: int, seed: int) -> tuple[Image.Image, Box, set[str]]:
    rng = random.Random(f"{seed}:{category}:{ordinal}")
    img = Image.new("RGB", (WIDTH, HEIGHT))
    draw = ImageDraw.Draw(img)
    labels = {category}
    if category == "animals":
        box = _draw_animal(draw, rng)
    elif category == "food":
        box = _draw_food(draw, rng)
    elif category == "streets":
        with_person = ordinal < 2  # a couple of multi-label images
        box = _draw_street(draw, rng, with_person)
        if with_person:
            labels.add("people")
    elif category == "people":
        box = _draw_people(draw, rng)
    elif category == "statues":
        box = _draw_statue(draw, rng)
    else:
        box = _draw_general(draw, rng)
    return img, box, labels


def _fixture_score(relative_path: str, prompt: str) -> float:
    """Deterministic detector confidence in [0.45, 0.95]."""
    digest = hashlib.sha256(f"{relative_path}|{prompt}".encode()).digest()
    return 0.45 + 0.5 * (digest[0] / 255.0)


def generate_dataset(dataset_dir: Path, registry_dir: Path, seed: int = 7) -> None:
    """Write the images, labels.tsv, prompts.tsv, and the stub registry."""
    dataset_dir = Path(dataset_dir)
    registry_dir = Path(registry_dir)
    dataset_dir.mkdir(parents=True, exist_ok=True)
    registry_dir.mkdir(parents=True, exist_ok=True)

    label_lines: list[str] = []
    prompt_lines: list[str] = []
    detections: dict[str, dict[str, list[list[float]]]] = {}

    for category, (count, prompt) in CATEGORY_PLAN.items():
        prompt_categories = {category}
        if prompt == "family":
            prompt_categories.add("people")
        prompt_lines.append(f"{prompt}\t{','.join(sorted(prompt_categories))}")
        for ordinal in range(count):
            name = f"{category}_{ordinal:02d}.png"
            img, box, labels = _render(category, ordinal, seed)
            img.save(dataset_dir / name, format="PNG")
            label_lines.append(f"{name}\t{','.join(sorted(labels))}")

            digest = decode_bytes(dataset_dir / name).digest()
            score = _fixture_score(name, prompt)
            x0, y0, x1, y1 = box
            per_prompt = detections.setdefault(digest, {})
            # best box on the motif plus a weaker decoy the selector must skip
            per_prompt[prompt] = [
                [float(x0), float(y0), float(x1), float(y1), round(score, 4)],
                [float(x0), float(y0), float((x0 + x1) / 2), float((y0 + y1) / 2),
                 round(score * 0.5, 4)],
            ]

    (dataset_dir / "labels.tsv").write_text(
        "\n".join(sorted(label_lines)) + "\n", encoding="utf-8"
    )
    (dataset_dir / "prompts.tsv").write_text(
        "\n".join(sorted(prompt_lines)) + "\n", encoding="utf-8"
    )

    write_quadrant_fixture(registry_dir / f"{STUB_EXTRACTOR_ID}.json")
    write_manifest(
        registry_dir / f"{STUB_EXTRACTOR_ID}.model",
        model_id=STUB_EXTRACTOR_ID,
        role=EXTRACTOR,
        file=f"{STUB_EXTRACTOR_ID}.json",
        preprocess=PreprocessSpec(),
        feature_dim=QUADRANT_FEATURE_DIM,
    )
    write_scripted_fixture(registry_dir / f"{STUB_DETECTOR_ID}.json", detections)
    write_manifest(
        registry_dir / f"{STUB_DETECTOR_ID}.model",
        model_id=STUB_DETECTOR_ID,
        role=DETECTOR,
        file=f"{STUB_DETECTOR_ID}.json",
        preprocess=PreprocessSpec(),
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dataset-dir", type=Path, required=True)
    parser.add_argument("--registry-dir", type=Path, required=True)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    generate_dataset(args.dataset_dir, args.registry_dir, seed=args.seed)
    print(f"wrote dataset to {args.dataset_dir} and stub registry to {args.registry_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
