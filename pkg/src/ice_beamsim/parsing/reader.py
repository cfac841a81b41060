from __future__ import annotations

"""
Results Reader

Scope:
- read result tables written by the harness (CSV / JSON)
- detect format from the extension
- yield raw rows as dicts with their position, keeping read statistics

⚠️ NOT here:
- converting rows into records (see ice_beamsim.harness.io)
- any statistics over the results
"""

import csv
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Sequence, Tuple, Union

from ice_beamsim.core.exceptions import ParsingError

logger = logging.getLogger(__name__)


# =====================================================================
# FORMAT ENUM
# =====================================================================

class ResultsFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    UNKNOWN = "unknown"


# =====================================================================
# READER
# =====================================================================

class ResultsReader:
    """
    Reader for result tables.

    `required_columns`, when given, must all appear in the CSV header.
    """

    def __init__(
        self,
        path: Union[str, Path],
        required_columns: Optional[Sequence[str]] = None,
    ) -> None:
        self.path = Path(path)
        if not self.path.exists():
            raise ParsingError(f"File not found: {self.path}", source=str(self.path))

        self.format = self._detect_format()
        self.required_columns = tuple(required_columns or ())

        self.stats: Dict[str, int] = {
            "records_read": 0,
            "records_skipped": 0,
        }

        logger.debug(
            "ResultsReader initialized",
            extra={"path": str(self.path), "format": self.format},
        )

    # -----------------------------------------------------------------
    # FORMAT
    # -----------------------------------------------------------------

    def _detect_format(self) -> ResultsFormat:
        return {
            ".csv": ResultsFormat.CSV,
            ".json": ResultsFormat.JSON,
        }.get(self.path.suffix.lower(), ResultsFormat.UNKNOWN)

    # -----------------------------------------------------------------
    # PUBLIC API
    # -----------------------------------------------------------------

    def read(self) -> Iterator[Tuple[int, Dict[str, Any]]]:
        """
        Yield (position, row). Position is the CSV line the row ends on, or
        the 1-based index of the item in a JSON array.
        """
        if self.format == ResultsFormat.CSV:
            yield from self._read_csv()
        elif self.format == ResultsFormat.JSON:
            yield from self._read_json()
        else:
            raise ParsingError(
                f"Unsupported file format: {self.path.suffix}", source=str(self.path)
            )

    def _check_columns(
        self, columns: Sequence[str], where: str, line_number: Optional[int]
    ) -> None:
        missing = [c for c in self.required_columns if c not in columns]
        if missing:
            raise ParsingError(
                f"Missing column(s) {', '.join(missing)} in {where}",
                line_number=line_number,
                source=str(self.path),
            )

    # -----------------------------------------------------------------
    # CSV
    # -----------------------------------------------------------------

    def _read_csv(self) -> Iterator[Tuple[int, Dict[str, Any]]]:
        try:
            with self.path.open("r", encoding="utf-8", newline="") as f:
                reader = csv.DictReader(f)
                self._check_columns(reader.fieldnames or [], str(self.path), 1)
                for row in reader:
                    if not any(v for v in row.values() if v):
                        self.stats["records_skipped"] += 1
                        continue
                    self.stats["records_read"] += 1
                    yield reader.line_num, dict(row)

        except ParsingError:
            raise
        except (OSError, UnicodeDecodeError, csv.Error) as exc:
            raise ParsingError(
                f"Failed to read CSV file: {self.path}", source=str(self.path)
            ) from exc

    # -----------------------------------------------------------------
    # JSON
    # -----------------------------------------------------------------

    def _read_json(self) -> Iterator[Tuple[int, Dict[str, Any]]]:
        try:
            with self.path.open("r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ParsingError(
                f"Invalid JSON in {self.path}: {exc.msg}",
                line_number=exc.lineno,
                source=str(self.path),
            ) from exc
        except (OSError, UnicodeDecodeError) as exc:
            raise ParsingError(
                f"Failed to read JSON file: {self.path}", source=str(self.path)
            ) from exc

        if not isinstance(data, list):
            raise ParsingError(
                f"JSON results must be an array of objects: {self.path}", source=str(self.path)
            )

        for position, item in enumerate(data, 1):
            if not isinstance(item, dict):
                raise ParsingError(
                    f"JSON item {position} is not an object", source=str(self.path)
                )
            self._check_columns(list(item), f"JSON item {position}", None)
            self.stats["records_read"] += 1
            yield position, item

    # -----------------------------------------------------------------
    # STATS
    # -----------------------------------------------------------------

    def get_stats(self) -> Dict[str, int]:
        return dict(self.stats)
