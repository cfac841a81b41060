# ice_beamsim/formatting/exporter.py

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from ice_beamsim.core.exceptions import StorageError

logger = logging.getLogger(__name__)


class TableExporter:
    """
    Writes tabular results (list[dict]) with a fixed column order.

    Column order comes from `fieldnames`, or from the first row. An empty
    table still gets its header in CSV / Markdown.
    """

    SUPPORTED_FORMATS = {"csv", "json", "md"}

    def __init__(
        self,
        rows: List[Dict[str, Any]],
        fieldnames: Optional[Sequence[str]] = None,
    ) -> None:
        self.rows = rows
        if fieldnames is None:
            fieldnames = list(rows[0].keys()) if rows else []
        self.fieldnames = list(fieldnames)

    def export(self, path: str | Path, fmt: Optional[str] = None) -> Path:
        path = Path(path)
        fmt = (fmt or path.suffix.lstrip(".") or "csv").lower()
        if fmt not in self.SUPPORTED_FORMATS:
            raise StorageError(f"Unsupported export format: {fmt}")

        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            if fmt == "json":
                self._json(path)
            elif fmt == "csv":
                self._csv(path)
            elif fmt == "md":
                self._markdown(path)
        except OSError as exc:
            raise StorageError(f"Cannot write {path}: {exc}") from exc

        logger.debug("Table exported", extra={"path": str(path), "rows": len(self.rows)})
        return path

    def _json(self, path: Path) -> None:
        with path.open("w", encoding="utf-8") as f:
            json.dump(self.rows, f, indent=2, ensure_ascii=False)

    def _csv(self, path: Path) -> None:
        # fixed "\n" line endings
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=self.fieldnames, lineterminator="\n")
            writer.writeheader()
            writer.writerows(self.rows)

    def _markdown(self, path: Path) -> None:
        keys = self.fieldnames
        lines = [
            "| " + " | ".join(keys) + " |",
            "| " + " | ".join(["---"] * len(keys)) + " |",
        ]
        for row in self.rows:
            lines.append("| " + " | ".join(str(row.get(k, "")) for k in keys) + " |")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
