"""Run reports and CSV output.

Every number written to disk goes through a fixed 12-significant-digit
format, so reruns produce byte-identical files even if a threaded BLAS
reorders a reduction somewhere upstream. JSON reports use sorted keys.
"""

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

CSV_SCHEMA_VERSION = 1


def fmt(x) -> str:
    if isinstance(x, (int, bool)):
        return str(int(x))
    return f"{x:.12g}"


@dataclass(frozen=True)
class Metric:
    name: str
    value: float
    tolerance: float
    comparator: str = "<="  # value <=/>= tolerance means pass

    @property
    def passed(self) -> bool:
        if self.comparator == "<=":
            return self.value <= self.tolerance
        if self.comparator == ">=":
            return self.value >= self.tolerance
        raise ValueError(f"unknown comparator {self.comparator}")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": float(self.value),
            "tolerance": float(self.tolerance),
            "comparator": self.comparator,
            "pass": self.passed,
        }


@dataclass
class RunReport:
    scenario: str
    seed: int
    backend: str
    code_version: str
    config: dict
    metrics: list = field(default_factory=list)
    csv_files: list = field(default_factory=list)

    def add(self, name, value, tolerance, comparator="<=") -> Metric:
        m = Metric(name, float(value), float(tolerance), comparator)
        self.metrics.append(m)
        return m

    @property
    def all_pass(self) -> bool:
        return all(m.passed for m in self.metrics)

    def config_hash(self) -> str:
        canon = json.dumps(self.config, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def to_json(self) -> str:
        payload = {
            "schema_version": CSV_SCHEMA_VERSION,
            "scenario": self.scenario,
            "seed": self.seed,
            "backend": self.backend,
            "code_version": self.code_version,
            "config": self.config,
            "config_hash": self.config_hash(),
            "metrics": [m.as_dict() for m in self.metrics],
            "all_pass": self.all_pass,
            "csv_files": sorted(self.csv_files),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / "report.json"
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def write_csv(out_dir: Path, name: str, header: list[str], rows) -> Path:
    path = Path(out_dir) / name
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path
