"""Report objects pairing every empirical statistic with its reference and tolerance."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

SCHEMA_VERSION = 1
FORMATS = ("json", "csv")

# comparison rules; see Statistic.evaluate
KINDS = ("rel", "abs", "se", "max", "min", "exact", "info")
SE_FLOOR = 1e-12


def check_format(fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format {fmt!r}; choose one of {', '.join(FORMATS)}")
    return fmt


@dataclass
class Statistic:
    """One measured value against its reference.

    ``kind`` decides the pass rule:

    * ``rel``: ``|value - oracle| <= tolerance * |oracle|``
    * ``abs``: ``|value - oracle| <= tolerance``
    * ``se``: ``|value - oracle| <= tolerance * stderr`` (plus a 1e-12 round-off floor)
    * ``max`` / ``min``: ``value <= tolerance`` / ``value >= tolerance``
    * ``exact``: ``value == oracle``
    * ``info``: reported only, never gates the run

    A pass is *marginal* when the error uses more than half of the allowed
    slack, i.e. the value would fail at half the tolerance.
    """

    name: str
    value: float
    oracle: float | None = None
    tolerance: float | None = None
    kind: str = "rel"
    stderr: float | None = None
    passed: bool | None = None
    marginal: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown statistic kind {self.kind!r}")
        self.value = _num(self.value)
        self.oracle = _num(self.oracle)
        self.tolerance = _num(self.tolerance)
        self.stderr = _num(self.stderr)
        if self.passed is None:
            self.evaluate()

    def allowed(self) -> float | None:
        """Largest admissible error, or ``None`` for one-sided and info kinds."""
        if self.kind == "rel":
            return self.tolerance * abs(self.oracle)
        if self.kind == "abs":
            return self.tolerance
        if self.kind == "se":
            # floor for quantities that are zero up to round-off (e.g. exact traces)
            return self.tolerance * (self.stderr or 0.0) + SE_FLOOR * max(1.0, abs(self.oracle))
        if self.kind == "exact":
            return 0.0
        return None

    def evaluate(self):
        v = self.value
        if self.kind == "info":
            self.passed, self.marginal = None, False
            return self
        if v is None or (isinstance(v, float) and math.isnan(v)):
            self.passed, self.marginal = False, False
            return self
        if self.kind == "max":
            self.passed = v <= self.tolerance
            self.marginal = self.passed and v > self.tolerance / 2
        elif self.kind == "min":
            self.passed = v >= self.tolerance
            self.marginal = False
        else:
            err = abs(v - self.oracle)
            lim = self.allowed()
            self.passed = bool(err <= lim)
            self.marginal = bool(self.passed and err > lim / 2)
        self.passed = bool(self.passed)
        self.marginal = bool(self.marginal)
        return self

    @property
    def gating(self) -> bool:
        return self.kind != "info"


def _num(v):
    if v is None:
        return None
    if isinstance(v, bool):
        return float(v)
    v = float(v)
    return v


def _clean(obj):
    """JSON-safe copy: non-finite floats become ``None``."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


@dataclass
class Report:
    experiment: str
    config: dict
    statistics: list[Statistic] = field(default_factory=list)
    histograms: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    seed_provenance: dict = field(default_factory=dict)
    wall_clock_seconds: float = 0.0
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.statistics if s.gating)

    @property
    def failures(self) -> list[str]:
        return [s.name for s in self.statistics if s.gating and not s.passed]

    @property
    def marginals(self) -> list[str]:
        return [s.name for s in self.statistics if s.marginal]

    def stat(self, name: str) -> Statistic:
        for s in self.statistics:
            if s.name == name:
                return s
        raise KeyError(name)

    def add(self, *args, **kwargs) -> Statistic:
        s = Statistic(*args, **kwargs)
        self.statistics.append(s)
        return s

    def to_dict(self) -> dict:
        return _clean(
            {
                "schema_version": self.schema_version,
                "experiment": self.experiment,
                "config": self.config,
                "passed": self.passed,
                "statistics": [asdict(s) for s in self.statistics],
                "histograms": self.histograms,
                "extras": self.extras,
                "seed_provenance": self.seed_provenance,
                "wall_clock_seconds": self.wall_clock_seconds,
            }
        )

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        stats = [Statistic(**s) for s in d.get("statistics", [])]
        return cls(
            experiment=d["experiment"],
            config=d.get("config", {}),
            statistics=stats,
            histograms=d.get("histograms", {}),
            extras=d.get("extras", {}),
            seed_provenance=d.get("seed_provenance", {}),
            wall_clock_seconds=d.get("wall_clock_seconds", 0.0),
            schema_version=d.get("schema_version", SCHEMA_VERSION),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["name", "value", "stderr", "oracle", "tolerance", "kind", "passed", "marginal"]
        w.writerow(cols)
        for s in self.statistics:
            row = _clean(asdict(s))
            w.writerow(["" if row[c] is None else (repr(row[c]) if isinstance(row[c], float) else row[c]) for c in cols])
        return buf.getvalue()

    def summary_lines(self) -> list[str]:
        out = []
        for s in self.statistics:
            tag = "INFO" if not s.gating else ("PASS" if s.passed else "FAIL")
            if s.marginal:
                tag += " (marginal)"
            ref = "" if s.oracle is None else f" ref={s.oracle:.6g}"
            se = "" if s.stderr is None else f" se={s.stderr:.3g}"
            val = "nan" if s.value is None else f"{s.value:.6g}"
            tol = "" if s.tolerance is None else f" {s.tolerance:.4g}"
            out.append(f"{tag:18s} {s.name}: {val}{se}{ref} [{s.kind}{tol}]")
        return out


def persist_report(report: Report, path, fmt: str = "json") -> None:
    check_format(fmt)
    text = report.to_json() if fmt == "json" else report.to_csv()
    with open(path, "w", newline="") as fh:
        fh.write(text)
        if fmt == "json":
            fh.write("\n")


def load_report(path) -> Report:
    with open(path) as fh:
        return Report.from_dict(json.load(fh))
