"""File formats: sequences (JSON or CSV), measures, masks, partial matrices.

Rationals travel as "p/q" strings, floats as JSON numbers.  Every loader
has a dict-level counterpart so the formats are usable without touching
the filesystem.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Union

from .completion import PartialHankel
from .errors import ParseError
from .generators import make_generator
from .measures import DiscreteMeasure
from .rational import format_scalar, parse_scalar
from .sequence_core import MomentSequence
from .submoment import ExtractionMask

PathLike = Union[str, Path]


def _encode(value):
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    return value


def _read_json(path: PathLike) -> dict:
    text = Path(path).read_text()
    if not text.strip():
        raise ParseError(f"{path}: empty file")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return data


def sequence_from_dict(data: dict) -> MomentSequence:
    if "terms" not in data:
        raise ParseError('sequence object needs a "terms" array')
    terms = tuple(parse_scalar(t) for t in data["terms"])
    generator = None
    if data.get("generator") is not None:
        spec = dict(data["generator"])
        kind = spec.pop("kind", None)
        if kind is None:
            raise ParseError('generator object needs a "kind"')
        generator = make_generator(kind, spec)
    return MomentSequence(terms, generator)


def sequence_to_dict(seq: MomentSequence) -> dict:
    data = {"terms": [_encode(t) for t in seq.terms]}
    if seq.generator is not None:
        data["generator"] = {"kind": seq.generator.kind, **_encode(seq.generator.params())}
    return data


def load_sequence(path: PathLike) -> MomentSequence:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        lines = [ln.strip() for ln in path.read_text().splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise ParseError(f"{path}: no terms")
        return MomentSequence(tuple(parse_scalar(ln) for ln in lines))
    return sequence_from_dict(_read_json(path))


def dump_sequence(seq: MomentSequence, path: PathLike) -> None:
    Path(path).write_text(json.dumps(sequence_to_dict(seq), indent=2) + "\n")


def measure_from_dict(data: dict) -> DiscreteMeasure:
    if "atoms" not in data:
        raise ParseError('measure object needs an "atoms" array')
    return DiscreteMeasure.of(data["atoms"])


def measure_to_dict(measure: DiscreteMeasure) -> dict:
    return {"atoms": [[_encode(p), _encode(w)] for p, w in measure.atoms]}


def load_measure(path: PathLike) -> DiscreteMeasure:
    return measure_from_dict(_read_json(path))


def dump_measure(measure: DiscreteMeasure, path: PathLike) -> None:
    Path(path).write_text(json.dumps(measure_to_dict(measure), indent=2) + "\n")


def mask_from_dict(data: dict) -> ExtractionMask:
    if "affine" in data:
        spec = data["affine"]
        return ExtractionMask.affine(int(spec["d"]), int(spec["l0"]))
    if "explicit" in data:
        return ExtractionMask.explicit([int(x) for x in data["explicit"]])
    raise ParseError('mask object needs "affine" or "explicit"')


def mask_to_dict(mask: ExtractionMask) -> dict:
    if mask.is_affine:
        return {"affine": {"d": mask.d, "l0": mask.l0}}
    return {"explicit": list(mask.offsets)}


def load_mask(path: PathLike) -> ExtractionMask:
    return mask_from_dict(_read_json(path))


def dump_mask(mask: ExtractionMask, path: PathLike) -> None:
    Path(path).write_text(json.dumps(mask_to_dict(mask), indent=2) + "\n")


def partial_from_dict(data: dict) -> PartialHankel:
    if "specified" not in data:
        raise ParseError('partial Hankel object needs a "specified" map')
    spec = data["specified"]
    try:
        items = [(int(k), parse_scalar(v)) for k, v in spec.items()]
    except (TypeError, AttributeError):
        raise ParseError('"specified" must map indices to scalars') from None
    return PartialHankel(tuple(items))


def partial_to_dict(partial: PartialHankel) -> dict:
    return {"specified": {str(i): _encode(v) for i, v in partial.specified}}


def load_partial(path: PathLike) -> PartialHankel:
    return partial_from_dict(_read_json(path))


def dump_partial(partial: PartialHankel, path: PathLike) -> None:
    Path(path).write_text(json.dumps(partial_to_dict(partial), indent=2) + "\n")


def sha256_file(path: PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
