# ice_beamsim/formatting/console.py

from typing import Any, Dict, Iterable, Optional, Sequence

from rich.console import Console
from rich.table import Table

_console = Console()
_err_console = Console(stderr=True)


def info(msg: Any) -> None:
    _console.print(f"[cyan]{msg}[/cyan]")


def warn(msg: Any) -> None:
    _err_console.print(f"[yellow]{msg}[/yellow]")


def error(msg: Any) -> None:
    _err_console.print(f"[red]{msg}[/red]")


def summary_table(
    rows: Iterable[Dict[str, Any]],
    columns: Sequence[str],
    title: Optional[str] = None,
    console: Optional[Console] = None,
) -> Table:
    """
    Render result rows as a rich table (numeric columns right-aligned).
    """
    table = Table(title=title, show_lines=False)
    rows = list(rows)
    for col in columns:
        numeric = bool(rows) and _is_number(rows[0].get(col))
        table.add_column(col, justify="right" if numeric else "left")
    for row in rows:
        table.add_row(*(str(row.get(col, "")) for col in columns))

    (console or _console).print(table)
    return table


def _is_number(value: Any) -> bool:
    try:
        float(value)
    except (TypeError, ValueError):
        return False
    return True
