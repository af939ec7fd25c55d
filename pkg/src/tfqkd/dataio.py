"""Experiment records and key-rate reports: loading, validation, serialization.

Canonical experiment document (JSON)::

    {
      "label": "38.0dB",
      "total_loss_db": 38.0,
      "fiber_inserted": false,
      "intensities": {"alpha2": {"center": 0.0256, "half_width": 0.0001},
                      "mu": {...}, "nu": {...}, "omega": {...}},
      "x_stats": {"00": {"d10": ..., "d01": ...}, "01": ..., "10": ..., "11": ...},
      "gains": {"mu,mu": {"d10": ..., "d01": ...}, ..., "omega,omega": {...}},
      "notes": "optional free text"
    }

The CSV variant carries the same content as ``section,key,field,value``
rows.  All text is UTF-8 with ``\\n`` line endings.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass
from importlib import resources
from typing import Dict, Optional, Sequence

import jsonschema

from .decoy_bounds import INTENSITY_NAMES, GainsTable, IntensityOrderError
from .fluctuation import BOX_AXES, FluctuationBox, IntensityInterval
from .key_rate import XBasisStats

__all__ = [
    "SchemaError",
    "ExperimentRecord",
    "DetectorSummary",
    "KeyRateReport",
    "FIXTURES",
    "validate_document",
    "load_experiment",
    "dump_experiment",
    "load_fixture",
    "emit_report",
    "load_report",
    "emit_curve",
]

FIXTURES = ("38dB", "46dB", "49dB", "55dB")

_PROB = {"type": "number", "minimum": 0, "maximum": 1}
_PAIR = {
    "type": "object",
    "properties": {"d10": _PROB, "d01": _PROB},
    "required": ["d10", "d01"],
    "additionalProperties": False,
}
_INTERVAL = {
    "type": "object",
    "properties": {"center": {"type": "number", "minimum": 0}, "half_width": {"type": "number", "minimum": 0}},
    "required": ["center", "half_width"],
    "additionalProperties": False,
}
_GAIN_KEYS = [f"{a},{b}" for a, b in itertools.product(INTENSITY_NAMES, repeat=2)]
_BIT_KEYS = ["00", "01", "10", "11"]

EXPERIMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "label": {"type": "string", "minLength": 1},
        "total_loss_db": {"type": "number", "exclusiveMinimum": 0},
        "fiber_inserted": {"type": "boolean"},
        "intensities": {
            "type": "object",
            "properties": {k: _INTERVAL for k in BOX_AXES},
            "required": list(BOX_AXES),
            "additionalProperties": False,
        },
        "x_stats": {
            "type": "object",
            "properties": {k: _PAIR for k in _BIT_KEYS},
            "required": _BIT_KEYS,
            "additionalProperties": False,
        },
        "gains": {
            "type": "object",
            "properties": {k: _PAIR for k in _GAIN_KEYS},
            "required": _GAIN_KEYS,
            "additionalProperties": False,
        },
        "notes": {"type": "string"},
    },
    "required": ["label", "total_loss_db", "fiber_inserted", "intensities", "x_stats", "gains"],
    "additionalProperties": False,
}


class SchemaError(ValueError):
    """Input document does not satisfy the experiment or report schema."""


@dataclass(frozen=True)
class ExperimentRecord:
    label: str
    total_loss_db: float
    fiber_inserted: bool
    intensities: FluctuationBox
    x_stats: XBasisStats
    gains: GainsTable
    notes: Optional[str] = None

    def __post_init__(self):
        if not self.total_loss_db > 0:
            raise SchemaError("total_loss_db: must be > 0")

    def to_dict(self) -> dict:
        d = {
            "label": self.label,
            "total_loss_db": self.total_loss_db,
            "fiber_inserted": self.fiber_inserted,
            "intensities": {
                k: {"center": self.intensities.interval(k).center, "half_width": self.intensities.interval(k).half_width}
                for k in BOX_AXES
            },
            "x_stats": self.x_stats.to_mapping(),
            "gains": self.gains.to_mapping(),
        }
        if self.notes is not None:
            d["notes"] = self.notes
        return d

    @classmethod
    def from_dict(cls, doc) -> "ExperimentRecord":
        _validate(doc, EXPERIMENT_SCHEMA)
        try:
            box = FluctuationBox(
                *(IntensityInterval(float(doc["intensities"][k]["center"]), float(doc["intensities"][k]["half_width"]))
                  for k in BOX_AXES)
            )
        except IntensityOrderError as exc:
            raise SchemaError(f"intensities: {exc}") from None
        try:
            x_stats = XBasisStats.from_mapping(doc["x_stats"])
        except ValueError as exc:
            raise SchemaError(f"x_stats: {exc}") from None
        try:
            gains = GainsTable.from_mapping(doc["gains"])
        except ValueError as exc:
            raise SchemaError(f"gains: {exc}") from None
        return cls(
            label=doc["label"],
            total_loss_db=float(doc["total_loss_db"]),
            fiber_inserted=bool(doc["fiber_inserted"]),
            intensities=box,
            x_stats=x_stats,
            gains=gains,
            notes=doc.get("notes"),
        )


def _schema_messages(doc, schema):
    if not isinstance(doc, dict) or not doc:
        return ["document: expected a non-empty JSON object"]
    validator = jsonschema.Draft7Validator(schema)
    out = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: [str(p) for p in e.absolute_path]):
        where = ".".join(str(p) for p in err.absolute_path) or "document"
        if err.validator in ("minimum", "maximum") and err.schema is _PROB:
            out.append(f"{where}: probability out of range ({err.message})")
        else:
            out.append(f"{where}: {err.message}")
    return out


def _validate(doc, schema):
    messages = _schema_messages(doc, schema)
    if messages:
        raise SchemaError(messages[0])


def validate_document(doc) -> list:
    """All problems with an experiment document, as human-readable strings.

    Beyond the schema and type invariants this checks that every gain grows
    with either party's intensity, as the Poisson model requires for
    non-negative yields.
    """
    messages = _schema_messages(doc, EXPERIMENT_SCHEMA)
    if messages:
        return messages
    try:
        record = ExperimentRecord.from_dict(doc)
    except SchemaError as exc:
        return [str(exc)]
    q = record.gains.values
    for o, oname in enumerate(("d10", "d01")):
        for j, other in enumerate(INTENSITY_NAMES):
            for (hi, a), (lo, b) in itertools.combinations(enumerate(INTENSITY_NAMES), 2):
                if q[hi, j, o] < q[lo, j, o]:
                    messages.append(f"gains: {oname} Q[{a},{other}] < Q[{b},{other}] (not increasing in Alice's intensity)")
                if q[j, hi, o] < q[j, lo, o]:
                    messages.append(f"gains: {oname} Q[{other},{a}] < Q[{other},{b}] (not increasing in Bob's intensity)")
    return messages


def _read_text(source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        source = source.decode("utf-8")
    return source


def load_experiment(source, format: str = "json") -> ExperimentRecord:
    """Parse and validate an experiment record from bytes, text or a binary/text stream."""
    text = _read_text(source)
    if format == "json":
        if not text.strip():
            raise SchemaError("document: empty input")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"document: invalid JSON ({exc})") from None
    elif format == "csv":
        doc = _doc_from_csv(text)
    else:
        raise ValueError(f"unknown format {format!r}")
    return ExperimentRecord.from_dict(doc)


def dump_experiment(record: ExperimentRecord, format: str = "json") -> bytes:
    doc = record.to_dict()
    if format == "json":
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if format == "csv":
        return _csv_from_doc(doc).encode("utf-8")
    raise ValueError(f"unknown format {format!r}")


def load_fixture(name: str) -> ExperimentRecord:
    """One of the bundled experiment records, e.g. ``"38dB"``."""
    name = name[:-5] if name.endswith(".json") else name
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    data = resources.files("tfqkd.data").joinpath(f"{name}.json").read_bytes()
    return load_experiment(data)


def _csv_from_doc(doc) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "key", "field", "value"])
    w.writerow(["meta", "label", "", doc["label"]])
    w.writerow(["meta", "total_loss_db", "", repr(doc["total_loss_db"])])
    w.writerow(["meta", "fiber_inserted", "", "true" if doc["fiber_inserted"] else "false"])
    if doc.get("notes") is not None:
        w.writerow(["meta", "notes", "", doc["notes"]])
    for k in BOX_AXES:
        for f in ("center", "half_width"):
            w.writerow(["intensity", k, f, repr(doc["intensities"][k][f])])
    for section, keys in (("x_stats", _BIT_KEYS), ("gains", _GAIN_KEYS)):
        for k in keys:
            for o in ("d10", "d01"):
                w.writerow([section, k, o, repr(doc[section][k][o])])
    return buf.getvalue()


def _doc_from_csv(text: str) -> dict:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise SchemaError("document: empty input")
    if rows[0] != ["section", "key", "field", "value"]:
        raise SchemaError("header: expected 'section,key,field,value'")
    doc: dict = {"intensities": {}, "x_stats": {}, "gains": {}}
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise SchemaError(f"line {n}: expected 4 columns, got {len(row)}")
        section, key, fld, value = row
        try:
            if section == "meta":
                if key == "label" or key == "notes":
                    doc[key] = value
                elif key == "total_loss_db":
                    doc[key] = float(value)
                elif key == "fiber_inserted":
                    if value not in ("true", "false"):
                        raise SchemaError(f"line {n}: fiber_inserted must be 'true' or 'false'")
                    doc[key] = value == "true"
                else:
                    raise SchemaError(f"line {n}: unknown meta key {key!r}")
            elif section == "intensity":
                doc["intensities"].setdefault(key, {})[fld] = float(value)
            elif section in ("x_stats", "gains"):
                doc[section].setdefault(key, {})[fld] = float(value)
            else:
                raise SchemaError(f"line {n}: unknown section {section!r}")
        except ValueError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"line {n}: {section}.{key}.{fld}: not a number ({value!r})") from None
    return doc


# ---------------------------------------------------------------------------
# reports

_DETECTOR_FIELDS = ("p", "e", "y00", "y11", "y02", "y20", "e_ph", "rate")
_TOTAL_FIELDS = ("r_mean", "r_min", "r_max", "plob")


@dataclass(frozen=True)
class DetectorSummary:
    p: float
    e: float
    y00: float
    y11: float
    y02: float
    y20: float
    e_ph: float
    rate: float

    def to_dict(self):
        return {f: getattr(self, f) for f in _DETECTOR_FIELDS}


@dataclass(frozen=True)
class KeyRateReport:
    """Per-outcome quantities and the rate totals for one experiment."""

    label: str
    total_loss_db: float
    detectors: Dict[str, DetectorSummary]
    r_mean: float
    r_min: Optional[float]
    r_max: Optional[float]
    plob: float

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "total_loss_db": self.total_loss_db,
            "detectors": {o: self.detectors[o].to_dict() for o in ("d10", "d01")},
            **{f: getattr(self, f) for f in _TOTAL_FIELDS},
        }

    @classmethod
    def from_dict(cls, doc) -> "KeyRateReport":
        try:
            detectors = {o: DetectorSummary(**{f: float(doc["detectors"][o][f]) for f in _DETECTOR_FIELDS})
                         for o in ("d10", "d01")}
            opt = lambda v: None if v is None else float(v)  # noqa: E731
            return cls(
                label=str(doc["label"]),
                total_loss_db=float(doc["total_loss_db"]),
                detectors=detectors,
                r_mean=float(doc["r_mean"]),
                r_min=opt(doc["r_min"]),
                r_max=opt(doc["r_max"]),
                plob=float(doc["plob"]),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"report: missing or malformed field {exc}") from None


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.4e}"


def emit_report(report: KeyRateReport, format: str = "json") -> bytes:
    """Serialize a report as ``json`` (lossless), ``table-text`` or ``csv``.

    Text and CSV print numbers with 5 significant digits.
    """
    if format == "json":
        return (json.dumps(report.to_dict(), indent=2) + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "outcome", *_DETECTOR_FIELDS])
        for o in ("d10", "d01"):
            d = report.detectors[o]
            w.writerow([report.label, o, *(_fmt(getattr(d, f)) for f in _DETECTOR_FIELDS)])
        w.writerow(["label", "total_loss_db", *_TOTAL_FIELDS])
        w.writerow([report.label, repr(report.total_loss_db), *(_fmt(getattr(report, f)) for f in _TOTAL_FIELDS)])
        return buf.getvalue().encode("utf-8")
    if format == "table-text":
        head = ["outcome", "p", "e", "Y00_U", "Y11_U", "Y02_U", "Y20_U", "e_ph", "R"]
        lines = [f"Loss: {report.total_loss_db} dB ({report.label})", "  ".join(f"{h:>11}" for h in head)]
        for o, name in (("d10", "D0=1,D1=0"), ("d01", "D0=0,D1=1")):
            d = report.detectors[o]
            lines.append("  ".join([f"{name:>11}"] + [f"{_fmt(getattr(d, f)):>11}" for f in _DETECTOR_FIELDS]))
        lines.append("")
        lines.append("  ".join(f"{h:>11}" for h in ("R_mean", "R_min", "R_max", "PLOB")))
        lines.append("  ".join(f"{_fmt(getattr(report, f)):>11}" for f in _TOTAL_FIELDS))
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def load_report(source) -> KeyRateReport:
    text = _read_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"report: invalid JSON ({exc})") from None
    return KeyRateReport.from_dict(doc)


def emit_curve(points: Sequence) -> bytes:
    """CSV with header ``loss_db,rate,plob`` and full double precision."""
    points = list(points)
    if not points:
        raise ValueError("cannot emit an empty curve")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["loss_db", "rate", "plob"])
    for loss, rate, plob in points:
        w.writerow([repr(float(loss)), repr(float(rate)), repr(float(plob))])
    return buf.getvalue().encode("utf-8")
