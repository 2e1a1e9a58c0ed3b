"""Versioned table of the multiplicative constants behind every bound.

The comparison theorems only pin bound *shapes*; the constants in front are
unnamed.  They are measured once per model preset (density sweeps against
the envelope, least-squares fits of Monte Carlo estimates against the bound
shapes), written to a plain-text key-value file with a content-hash
version, and then frozen: the acceptance suite re-tests against the stored
numbers rather than re-fitting, so a regression in any formula or sampler
shows up as a bound violation.

File format (one entry per line, sorted, stable across runs):

    # heatrates calibration v1
    # version: <sha256 prefix of the sorted body>
    <model_id>/<key> = <float repr>
"""

from __future__ import annotations

import hashlib
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CalibrationError

_HEADER = "# heatrates calibration v1"


@dataclass
class CalibrationTable:
    entries: dict[str, float] = field(default_factory=dict)

    @staticmethod
    def _key(model_id: str, key: str) -> str:
        return f"{model_id}/{key}"

    def get(self, model_id: str, key: str, default: Optional[float] = None):
        return self.entries.get(self._key(model_id, key), default)

    def require(self, model_id: str, key: str) -> float:
        k = self._key(model_id, key)
        if k not in self.entries:
            raise CalibrationError(f"calibration table lacks {k}")
        return self.entries[k]

    def set(self, model_id: str, key: str, value: float) -> None:
        if not math.isfinite(value):
            raise CalibrationError(f"refusing to store non-finite {model_id}/{key}")
        self.entries[self._key(model_id, key)] = float(value)

    def has_model(self, model_id: str) -> bool:
        prefix = model_id + "/"
        return any(k.startswith(prefix) for k in self.entries)

    # -- serialization --------------------------------------------------

    def body_lines(self) -> list[str]:
        return [f"{k} = {v!r}" for k, v in sorted(self.entries.items())]

    @property
    def version(self) -> str:
        digest = hashlib.sha256("\n".join(self.body_lines()).encode()).hexdigest()
        return digest[:16]

    def dumps(self) -> str:
        lines = [_HEADER, f"# version: {self.version}"]
        lines.extend(self.body_lines())
        return "\n".join(lines) + "\n"

    def save(self, path: str) -> None:
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(self.dumps())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def loads(cls, text: str) -> "CalibrationTable":
        table = cls()
        declared = None
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# version:"):
                    declared = line.split(":", 1)[1].strip()
                continue
            key, _, value = line.partition("=")
            table.entries[key.strip()] = float(value.strip())
        if declared is not None and declared != table.version:
            raise CalibrationError(
                f"calibration table is stale: declared version {declared}, "
                f"content hashes to {table.version}"
            )
        return table

    @classmethod
    def load(cls, path: str) -> "CalibrationTable":
        with open(path) as fh:
            return cls.loads(fh.read())


def default_table_path() -> str:
    return os.path.join(os.path.dirname(__file__), "data", "calibration.txt")


def load_default_table() -> CalibrationTable:
    path = default_table_path()
    if not os.path.exists(path):
        raise CalibrationError(
            f"no calibration table at {path}; run `heatrates calibrate` first"
        )
    return CalibrationTable.load(path)


# ---------------------------------------------------------------------------
# constant fitting
# ---------------------------------------------------------------------------


def bracket_from_samples(values, shapes, slack: float = 1.25):
    """Least-squares scale of values against shapes, widened into a bracket.

    Fits a single multiplier c minimizing ||values - c * shapes||, then
    returns (c_low, c_high) expanded so every sample ratio sits strictly
    inside; ``slack`` adds headroom for re-runs with fresh seeds.
    """
    values = np.asarray(values, dtype=float)
    shapes = np.asarray(shapes, dtype=float)
    if values.shape != shapes.shape or values.size == 0:
        raise CalibrationError("values and shapes must align and be nonempty")
    if np.any(shapes <= 0):
        raise CalibrationError("bound shapes must be positive")
    ratios = values / shapes
    c_fit = float(np.dot(values, shapes) / np.dot(shapes, shapes))
    lo = min(float(ratios.min()), c_fit) / slack
    hi = max(float(ratios.max()), c_fit) * slack
    return lo, hi
