# core/csv_utils.py
"""Deterministic CSV/JSON emission with all-or-nothing directory writes."""
import csv
import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from darkcool.core.errors import DimensionError, OutputError

logger = logging.getLogger(__name__)


def format_value(value):
    """Integers verbatim, floats with 17 significant digits, everything else as str."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


@dataclass
class Dataset:
    header: Sequence[str]
    rows: List[Sequence] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def to_csv(self):
        buffer = io.StringIO(newline="")
        writer = csv.writer(buffer, delimiter=",", lineterminator="\n")
        writer.writerow(self.header)
        for row in self.rows:
            if len(row) != len(self.header):
                raise DimensionError(f"row {row!r} does not match header {list(self.header)}")
            writer.writerow([format_value(v) for v in row])
        return buffer.getvalue()


@dataclass
class OutputBundle:
    """Datasets keyed by file name plus run metadata, written as one unit."""

    metadata: Dict
    datasets: Dict[str, Dataset] = field(default_factory=dict)

    def add(self, name, header, rows):
        self.datasets[name] = Dataset(list(header), [list(r) for r in rows])
        return self.datasets[name]

    def rendered(self):
        files = {name: dataset.to_csv() for name, dataset in self.datasets.items()}
        metadata = dict(self.metadata)
        metadata["datasets"] = {name: len(dataset) for name, dataset in self.datasets.items()}
        files["metadata.json"] = json.dumps(metadata, indent=2, sort_keys=True) + "\n"
        return files


def write_bundle(out_dir, bundle: OutputBundle):
    """Render every file first, stage them as temporaries, then rename all.

    A failure before the renames leaves the directory untouched.
    """
    out_dir = Path(out_dir)
    files = bundle.rendered()
    staged = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            handle, temp = tempfile.mkstemp(prefix=f".{name}.", suffix=".tmp", dir=out_dir)
            staged.append((temp, out_dir / name))
            with os.fdopen(handle, "w", encoding="ascii", newline="") as stream:
                stream.write(text)
        for temp, final in staged:
            os.replace(temp, final)
    except (OSError, UnicodeEncodeError) as exc:
        for temp, _ in staged:
            if os.path.exists(temp):
                os.remove(temp)
        raise OutputError(f"cannot write results to {out_dir}: {exc}") from exc
    logger.info("wrote %s to %s", ", ".join(sorted(files)), out_dir)
    return [out_dir / name for name in files]
