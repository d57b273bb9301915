"""
Result persistence.

Files are written atomically: the text goes to a temporary file in the
target directory which then replaces the target. Outputs carry no
timestamps, so identical manifests give identical bytes.
"""

import csv
import io
import json
import os
import shlex
import tempfile
from pathlib import Path
from typing import Any, Sequence

import structlog
from pydantic import BaseModel

from ..config import get_settings
from ..errors import OutputError
from ..schemas.models import OutputFormat, RunManifest

logger = structlog.get_logger()


def format_value(value: Any) -> str:
    """Text form of one CSV cell; floats keep 17 significant digits."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def provenance(manifest: RunManifest) -> dict[str, Any]:
    settings = get_settings()
    return {
        "app": settings.app_name,
        "version": settings.app_version,
        "flags": shlex.join(manifest.to_argv()),
        "seed": manifest.seed,
    }


def provenance_lines(manifest: RunManifest) -> list[str]:
    info = provenance(manifest)
    return [
        f"# {info['app']} {info['version']}",
        f"# flags: {info['flags']}",
        f"# seed: {info['seed']}",
    ]


def render_table(manifest: RunManifest, header: Sequence[str], records: Sequence[Sequence[Any]]) -> str:
    """Provenance comment lines, a header and one line per record."""
    buffer = io.StringIO()
    for line in provenance_lines(manifest):
        buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for record in records:
        writer.writerow([format_value(v) for v in record])
    return buffer.getvalue()


def render_csv(manifest: RunManifest, rows: Sequence[BaseModel]) -> str:
    header = list(type(rows[0]).model_fields)
    return render_table(manifest, header, [[getattr(r, name) for name in header] for r in rows])


def render_json(manifest: RunManifest, rows: Sequence[BaseModel]) -> str:
    """Floats keep their shortest round-trip text; both formats read back to the same doubles."""
    document = {
        "provenance": provenance(manifest),
        "records": [r.model_dump(mode="json") for r in rows],
    }
    return json.dumps(document, indent=2) + "\n"


def atomic_write(path: Path, text: str) -> Path:
    """Write text to path; on failure nothing is left behind."""
    tmp_name = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", encoding="utf-8", newline="", dir=path.parent,
            prefix=f".{path.name}.", suffix=".tmp", delete=False,
        ) as tmp:
            tmp_name = tmp.name
            tmp.write(text)
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        logger.error("Write failed", path=str(path), error=str(e))
        raise OutputError(f"Cannot write {path}: {e}") from e

    logger.info("Wrote file", path=str(path), bytes=len(text.encode("utf-8")))
    return path


def write_results(manifest: RunManifest, rows: Sequence[BaseModel]) -> Path:
    """
    Persist rows in the manifest's format.

    Raises:
        OutputError: when rows are empty or the file cannot be written
    """
    if not rows:
        raise OutputError("No result rows to write")
    if manifest.output_format is OutputFormat.JSON:
        text = render_json(manifest, rows)
    else:
        text = render_csv(manifest, rows)
    return atomic_write(Path(manifest.output_path), text)
