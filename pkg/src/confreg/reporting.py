"""Report serialization: JSON for machines, aligned text for humans, CSV for tables.

JSON output renders every float as a decimal string with 17 significant
digits: enough to reconstruct the exact binary value, and byte-stable
across runs and platforms. Text output rounds to 6 significant digits.
CSV follows RFC 4180 (CRLF line endings, minimal quoting, header row).
"""

import csv
import dataclasses
import io
import json

import numpy as np


def _float_str(x, digits):
    return format(float(x), f".{digits}g")


def jsonable(value):
    """Convert a report tree to JSON-ready primitives.

    Floats (including numpy scalars) become 17-significant-digit decimal
    strings; dataclasses become objects keyed by field name; tuples become
    lists. Dict keys are coerced to str.
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _float_str(value, 17)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            field.name: jsonable(getattr(value, field.name))
            for field in dataclasses.fields(value)
        }
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}: {value!r}")


def dump_json(report, path=None):
    """Serialized report with sorted keys; written to `path` when given."""
    text = json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    return text


def _text_cell(value):
    if value is None:
        return "-"
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (float, np.floating)):
        return _float_str(value, 6)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _entry_mapping(entry):
    if dataclasses.is_dataclass(entry) and not isinstance(entry, type):
        return {
            field.name: getattr(entry, field.name)
            for field in dataclasses.fields(entry)
        }
    if isinstance(entry, dict):
        return entry
    return None


def render_table(entries):
    """Aligned columns for a list of uniform dataclasses or dicts."""
    mappings = [_entry_mapping(e) for e in entries]
    if not mappings or any(m is None for m in mappings):
        return [_text_cell(e) for e in entries]
    columns = list(mappings[0].keys())
    rows = [columns] + [[_text_cell(m.get(c)) for c in columns] for m in mappings]
    widths = [max(len(row[i]) for row in rows) for i in range(len(columns))]
    return [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
        for row in rows
    ]


def render_text(report, indent=0):
    """Human-readable rendering: nested key/value lines plus aligned tables."""
    pad = "  " * indent
    lines = []
    mapping = _entry_mapping(report)
    if mapping is None and not isinstance(report, (list, tuple)):
        return [pad + _text_cell(report)]
    if mapping is not None:
        for key, value in mapping.items():
            inner = _entry_mapping(value)
            if inner is not None or isinstance(value, (list, tuple)):
                lines.append(f"{pad}{key}:")
                lines.extend(render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_text_cell(value)}")
        return lines
    entries = list(report)
    if entries and all(_entry_mapping(e) is not None for e in entries):
        keys = [tuple(_entry_mapping(e).keys()) for e in entries]
        if len(set(keys)) == 1:
            return [pad + line for line in render_table(entries)]
    for item in entries:
        lines.extend(render_text(item, indent))
    return lines


def dump_text(report, path=None):
    text = "\n".join(render_text(report)) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    return text


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return _float_str(value, 17)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def dump_csv(rows, fieldnames, path=None):
    """RFC 4180 CSV with a mandatory header row.

    `rows` is a list of mappings; missing fields render empty.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([_csv_cell(row.get(name)) for name in fieldnames])
    text = buffer.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    return text
