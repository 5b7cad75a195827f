"""Experiment reports and their JSON / CSV encodings."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .dyadic import format_dyadic, is_dyadic
from .families import WindowSet

REPORT_VERSION = 1
VERDICTS = ("pass", "fail", "inconclusive")


def encode_value(v: Any) -> Any:
    """JSON-ready form: sets as ``elems@N``, dyadics as ``m/2^e``."""
    if isinstance(v, WindowSet):
        return str(v)
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, Fraction):
        return format_dyadic(v) if is_dyadic(v) else f"{v.numerator}/{v.denominator}"
    if hasattr(v, "to_json"):
        return encode_value(v.to_json())
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    if hasattr(v, "item"):  # numpy scalars
        return encode_value(v.item())
    return str(v)


@dataclass
class Report:
    experiment: str
    params: dict
    seed: int
    version: str
    observations: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    verdict: str = "inconclusive"
    ambiguity_count: int = 0
    runtime_ms: Optional[float] = None

    def observe(self, label: str, value: Any) -> None:
        self.observations.append({"label": label, "value": encode_value(value)})

    def check(self, name: str, ok: bool) -> bool:
        ok = bool(ok)
        self.checks[name] = ok
        self.observe(f"check:{name}", ok)
        return ok

    def finish(self, inconclusive: bool = False) -> "Report":
        if not all(self.checks.values()):
            self.verdict = "fail"
        elif inconclusive:
            self.verdict = "inconclusive"
        else:
            self.verdict = "pass"
        return self

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "experiment": self.experiment,
            "params": encode_value(self.params),
            "observations": self.observations,
            "verdict": self.verdict,
            "ambiguity_count": self.ambiguity_count,
            "seed": self.seed,
            "runtime_ms": None if not timing or self.runtime_ms is None else round(self.runtime_ms, 3),
            "version": self.version,
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2) + "\n"

    def to_csv(self, timing: bool = True) -> str:
        """``label,value`` rows; non-scalar values carry their JSON text."""
        d = self.to_dict(timing)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "value"])
        for key in ("report_version", "experiment", "verdict", "ambiguity_count", "seed", "runtime_ms", "version"):
            w.writerow([key, _cell(d[key])])
        for k, v in d["params"].items():
            w.writerow([f"param:{k}", _cell(v)])
        for obs in d["observations"]:
            w.writerow([obs["label"], _cell(obs["value"])])
        return buf.getvalue()


def _cell(v) -> str:
    return v if isinstance(v, str) else json.dumps(v)


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
