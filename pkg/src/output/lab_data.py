"""
Reader for externally measured (φ, Ozawa LHS, εη) points.

Expected layout: CSV with a header containing phi, ozawa_lhs and product;
lines starting with '#' are ignored.
"""

import csv
from pathlib import Path

import structlog
from pydantic import ValidationError

from ..errors import OutputError
from ..schemas.models import LabPoint

logger = structlog.get_logger()

REQUIRED_COLUMNS = ("phi", "ozawa_lhs", "product")


def load_lab_data(path: str | Path) -> list[LabPoint]:
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as f:
            lines = [line for line in f if line.strip() and not line.lstrip().startswith("#")]
    except OSError as e:
        raise OutputError(f"Cannot read lab data {path}: {e}") from e

    reader = csv.DictReader(lines)
    missing = [c for c in REQUIRED_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise OutputError(f"Lab data {path} lacks columns: {', '.join(missing)}")

    points = []
    for lineno, record in enumerate(reader, start=2):
        try:
            points.append(LabPoint(**{c: record[c] for c in REQUIRED_COLUMNS}))
        except ValidationError as e:
            raise OutputError(f"Lab data {path}, record {lineno}: {e.errors()[0]['msg']}") from e

    logger.info("Loaded lab data", path=str(path), points=len(points))
    return points
