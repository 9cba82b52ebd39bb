"""Annotation file loading, per-item scoring, ranking, and report export.

Input files carry one annotation per row (JSONL objects or CSV rows with
an item_id / annotator_id / response header); responses are mapped to
category counts through an explicit schema, never guessed from the data.
Scoring turns each item's counts into plug-in and posterior summaries;
export writes reports whose numeric fields round-trip exactly, so a
pipeline can be re-run and diffed byte for byte.

Row numbers in errors refer to file lines (the CSV header is line 1).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .exceptions import (
    DataFileError,
    DomainError,
    EmptyFile,
    MalformedRow,
    MissingField,
    TooFewSamples,
    UnknownLabel,
)
from .frequentist import CountVector, plugin_estimate
from .measures import CategorySchema, MeasureKind, ambiguity_array
from .numerics import DirichletParams, _dirichlet_draws, make_generator
from .posterior_analytics import expected_amb, expected_amb_modified, posterior_update

__all__ = [
    "AnnotationRecord",
    "LoadResult",
    "ItemReport",
    "load_records",
    "score_items",
    "rank_and_filter",
    "export_reports",
    "import_reports",
]

_FORMATS = ("jsonl", "csv")
_RANK_KEYS = ("plugin", "posterior_mean")
_MIN_MC_SAMPLES = 1000


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotation: which item, optionally who, and the response label."""

    item_id: str
    response: str
    annotator_id: str | None = None


@dataclass(frozen=True)
class LoadResult:
    """Aggregated counts plus bookkeeping from one input file.

    items maps item_id to counts, ordered by item_id. n_duplicate_pairs
    counts rows repeating an already-seen (item, annotator) pair; such
    rows are kept, since re-rating may be legitimate, but the counter
    lets callers surface it. n_unknown_skipped is nonzero only when
    loading with skip_unknown.
    """

    items: Mapping[str, CountVector]
    schema: CategorySchema
    n_rows: int
    n_duplicate_pairs: int
    n_unknown_skipped: int


@dataclass(frozen=True)
class ItemReport:
    """Per-item scoring summary, one entry per requested measure.

    The per-measure mappings are keyed by measure name. plugin holds None
    for items that had no annotations (there is no frequency vector to
    plug in); those items carry prior_only=True and posterior columns
    computed from the prior alone.
    """

    item_id: str
    counts: CountVector
    n_total: int
    prior_only: bool
    credible_mass: float
    plugin: Mapping[str, float | None]
    posterior_mean: Mapping[str, float]
    posterior_sd: Mapping[str, float]
    credible_lo: Mapping[str, float]
    credible_hi: Mapping[str, float]

    def __post_init__(self):
        for name in self.posterior_mean:
            lo = self.credible_lo[name]
            hi = self.credible_hi[name]
            if lo > hi:
                raise DomainError(f"credible interval inverted for {name!r}")


def _record_from_json_line(line: str, line_no: int) -> AnnotationRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRow(line_no, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise MalformedRow(line_no, "expected a JSON object")
    if "item_id" not in obj or "response" not in obj:
        raise MalformedRow(line_no, "missing item_id or response")
    item_id, response = obj["item_id"], obj["response"]
    if not isinstance(item_id, (str, int)) or isinstance(item_id, bool):
        raise MalformedRow(line_no, "item_id must be a string or integer")
    if not isinstance(response, str) or not response:
        raise MalformedRow(line_no, "response must be a non-empty string")
    annotator = obj.get("annotator_id")
    if annotator is not None and not isinstance(annotator, (str, int)):
        raise MalformedRow(line_no, "annotator_id must be a string or integer")
    return AnnotationRecord(
        item_id=str(item_id),
        response=response,
        annotator_id=None if annotator is None else str(annotator),
    )


def _iter_jsonl(text: str):
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        yield line_no, _record_from_json_line(line, line_no)


def _iter_csv(text: str):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyFile("no rows in CSV input") from None
    header = [h.strip() for h in header]
    if "item_id" not in header or "response" not in header:
        raise MalformedRow(1, "CSV header must name item_id and response columns")
    idx_item = header.index("item_id")
    idx_response = header.index("response")
    idx_annotator = header.index("annotator_id") if "annotator_id" in header else None
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRow(line_no, f"expected {len(header)} fields, got {len(row)}")
        item_id = row[idx_item].strip()
        response = row[idx_response].strip()
        if not item_id:
            raise MalformedRow(line_no, "empty item_id")
        if not response:
            raise MalformedRow(line_no, "empty response")
        annotator = None
        if idx_annotator is not None:
            annotator = row[idx_annotator].strip() or None
        yield line_no, AnnotationRecord(item_id, response, annotator)


def load_records(
    path: str,
    format: str = "jsonl",
    schema: CategorySchema = CategorySchema(labels=("yes", "no")),
    skip_unknown: bool = False,
) -> LoadResult:
    """Read annotations and aggregate per-item counts.

    Raises:
        DataFileError: unreadable path.
        EmptyFile: no data rows.
        MalformedRow: structural problems, with the offending line number.
        UnknownLabel: a response outside the schema, unless skip_unknown
            downgrades those rows to a counter.
    """
    if format not in _FORMATS:
        raise DomainError(f"format must be one of {_FORMATS}, got {format!r}")
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise DataFileError(f"cannot read {path}: {exc}") from exc

    rows = _iter_jsonl(text) if format == "jsonl" else _iter_csv(text)
    label_index = {label: i for i, label in enumerate(schema.labels)}
    tallies: dict[str, list[int]] = {}
    seen_pairs: set[tuple[str, str]] = set()
    n_rows = 0
    n_duplicates = 0
    n_skipped = 0
    for line_no, record in rows:
        n_rows += 1
        if record.response != schema.cs_label and record.response not in label_index:
            if skip_unknown:
                n_skipped += 1
                continue
            raise UnknownLabel(line_no, record.response)
        if record.annotator_id is not None:
            pair = (record.item_id, record.annotator_id)
            if pair in seen_pairs:
                n_duplicates += 1
            seen_pairs.add(pair)
        tally = tallies.setdefault(record.item_id, [0] * (schema.n_proper + 1))
        if record.response == schema.cs_label:
            tally[-1] += 1
        else:
            tally[label_index[record.response]] += 1
    if n_rows == 0:
        raise EmptyFile("no data rows in input")

    items = {
        item_id: CountVector(proper=tuple(tally[:-1]), cs=tally[-1])
        for item_id, tally in sorted(tallies.items())
    }
    return LoadResult(
        items=items,
        schema=schema,
        n_rows=n_rows,
        n_duplicate_pairs=n_duplicates,
        n_unknown_skipped=n_skipped,
    )


def score_items(
    items: Mapping[str, CountVector],
    prior_beta: float = 1.0,
    measures: Sequence[MeasureKind] = (
        MeasureKind.NEW,
        MeasureKind.MODIFIED,
        MeasureKind.OLD,
    ),
    credible_mass: float = 0.95,
    mc_samples: int = 20_000,
    seed: int = 0,
) -> list[ItemReport]:
    """Score every item: plug-in point estimates plus posterior summaries.

    Posterior means are closed-form where available and Monte Carlo for
    total variation; spreads and equal-tailed intervals always come from
    one MC sample per item, shared across measures. Item i (in item_id
    order) draws from the stream (seed, spawn i), so results depend only
    on (input, seed), never on scoring order.

    Raises:
        TooFewSamples: mc_samples below 1000.
    """
    if mc_samples < _MIN_MC_SAMPLES:
        raise TooFewSamples(f"mc_samples must be at least {_MIN_MC_SAMPLES}")
    if not 0.0 < credible_mass < 1.0:
        raise DomainError(f"credible mass {credible_mass!r} outside (0, 1)")
    if prior_beta <= 0.0:
        raise DomainError(f"prior concentration must be positive, got {prior_beta!r}")
    measures = tuple(measures)
    if not measures:
        raise DomainError("need at least one measure")
    tail = 0.5 * (1.0 - credible_mass)

    reports = []
    for index, (item_id, counts) in enumerate(sorted(items.items())):
        posterior = posterior_update(
            DirichletParams.symmetric(counts.n_proper, prior_beta), counts
        )
        rng = make_generator(seed, (index,))
        proper, cs = _dirichlet_draws(posterior, mc_samples, rng)
        n_total = counts.total

        plugin: dict[str, float | None] = {}
        mean: dict[str, float] = {}
        sd: dict[str, float] = {}
        lo: dict[str, float] = {}
        hi: dict[str, float] = {}
        for measure in measures:
            name = measure.value
            values = ambiguity_array(proper, cs, measure)
            plugin[name] = None if n_total == 0 else plugin_estimate(counts, measure)
            if measure is MeasureKind.NEW:
                mean[name] = expected_amb(posterior)
            elif measure is MeasureKind.MODIFIED:
                mean[name] = expected_amb_modified(posterior)
            else:
                mean[name] = float(values.mean())
            sd[name] = float(values.std())
            q_lo, q_hi = np.quantile(values, [tail, 1.0 - tail])
            lo[name], hi[name] = float(q_lo), float(q_hi)

        reports.append(
            ItemReport(
                item_id=item_id,
                counts=counts,
                n_total=n_total,
                prior_only=n_total == 0,
                credible_mass=credible_mass,
                plugin=plugin,
                posterior_mean=mean,
                posterior_sd=sd,
                credible_lo=lo,
                credible_hi=hi,
            )
        )
    return reports


def rank_and_filter(
    reports: Sequence[ItemReport],
    key: str = "posterior_mean",
    measure: MeasureKind = MeasureKind.NEW,
    threshold: float | None = None,
    descending: bool = True,
) -> list[ItemReport]:
    """Order reports by a score and optionally keep one side of a cutoff.

    The sort is deterministic: by score in the requested direction, with
    ties broken by item_id ascending. A threshold keeps scores >= it when
    descending (the "most ambiguous" reading) and <= it when ascending.

    Raises:
        MissingField: a report lacks the requested key/measure value, or
            has a None plug-in (an item scored with no annotations).
    """
    if key not in _RANK_KEYS:
        raise DomainError(f"key must be one of {_RANK_KEYS}, got {key!r}")
    name = measure.value

    def value_of(report: ItemReport) -> float:
        table = getattr(report, key)
        if name not in table or table[name] is None:
            raise MissingField(
                f"report {report.item_id!r} has no {key} value for measure {name!r}"
            )
        return table[name]

    scored = [(value_of(r), r) for r in reports]
    if descending:
        ordered = sorted(scored, key=lambda pair: (-pair[0], pair[1].item_id))
        if threshold is not None:
            ordered = [pair for pair in ordered if pair[0] >= threshold]
    else:
        ordered = sorted(scored, key=lambda pair: (pair[0], pair[1].item_id))
        if threshold is not None:
            ordered = [pair for pair in ordered if pair[0] <= threshold]
    return [r for _, r in ordered]


def _format_float(value: float | None) -> str:
    if value is None:
        return ""
    return repr(float(value))


def _report_to_json_obj(report: ItemReport) -> dict:
    return {
        "item_id": report.item_id,
        "n_total": report.n_total,
        "prior_only": report.prior_only,
        "counts": {"proper": list(report.counts.proper), "cs": report.counts.cs},
        "credible_mass": report.credible_mass,
        "measures": {
            name: {
                "plugin": report.plugin[name],
                "posterior_mean": report.posterior_mean[name],
                "posterior_sd": report.posterior_sd[name],
                "credible_lo": report.credible_lo[name],
                "credible_hi": report.credible_hi[name],
            }
            for name in report.posterior_mean
        },
    }


_MEASURE_COLUMNS = ("plugin", "posterior_mean", "posterior_sd", "credible_lo", "credible_hi")


def _csv_header(reports: Sequence[ItemReport]) -> list[str]:
    first = reports[0]
    header = ["item_id", "n_total", "prior_only", "credible_mass"]
    header += [f"count_{i + 1}" for i in range(first.counts.n_proper)]
    header.append("count_cs")
    for name in first.posterior_mean:
        header += [f"{name}_{column}" for column in _MEASURE_COLUMNS]
    return header


def export_reports(reports: Sequence[ItemReport], path: str, format: str = "json") -> None:
    """Write reports sorted by item_id, with exact float round-tripping.

    JSON output is an array of one object per item; CSV uses a flat
    header (counts as count_1..count_C/count_cs, then one column block
    per measure). Floats are serialized in shortest round-trip form, and
    the None plug-in of a zero-annotation item becomes null (JSON) or an
    empty field (CSV).
    """
    if format not in ("json", "csv"):
        raise DomainError(f"format must be json or csv, got {format!r}")
    if not reports:
        raise DomainError("nothing to export")
    ordered = sorted(reports, key=lambda r: r.item_id)
    try:
        if format == "json":
            payload = [_report_to_json_obj(r) for r in ordered]
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, indent=2)
                handle.write("\n")
        else:
            header = _csv_header(ordered)
            with open(path, "w", encoding="utf-8", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(header)
                for report in ordered:
                    row = [
                        report.item_id,
                        str(report.n_total),
                        str(report.prior_only).lower(),
                        _format_float(report.credible_mass),
                    ]
                    row += [str(v) for v in report.counts.proper]
                    row.append(str(report.counts.cs))
                    for name in report.posterior_mean:
                        row += [
                            _format_float(report.plugin[name]),
                            _format_float(report.posterior_mean[name]),
                            _format_float(report.posterior_sd[name]),
                            _format_float(report.credible_lo[name]),
                            _format_float(report.credible_hi[name]),
                        ]
                    writer.writerow(row)
    except OSError as exc:
        raise DataFileError(f"cannot write {path}: {exc}") from exc


def import_reports(path: str, format: str = "json") -> list[ItemReport]:
    """Read back a file written by export_reports."""
    if format not in ("json", "csv"):
        raise DomainError(f"format must be json or csv, got {format!r}")
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise DataFileError(f"cannot read {path}: {exc}") from exc
    reports = []
    if format == "json":
        for obj in json.loads(text):
            measures = obj["measures"]
            reports.append(
                ItemReport(
                    item_id=obj["item_id"],
                    counts=CountVector(
                        proper=tuple(obj["counts"]["proper"]), cs=obj["counts"]["cs"]
                    ),
                    n_total=obj["n_total"],
                    prior_only=obj["prior_only"],
                    credible_mass=obj["credible_mass"],
                    plugin={k: v["plugin"] for k, v in measures.items()},
                    posterior_mean={k: v["posterior_mean"] for k, v in measures.items()},
                    posterior_sd={k: v["posterior_sd"] for k, v in measures.items()},
                    credible_lo={k: v["credible_lo"] for k, v in measures.items()},
                    credible_hi={k: v["credible_hi"] for k, v in measures.items()},
                )
            )
        return reports

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyFile("no rows in report CSV") from None
    count_cols = [h for h in header if h.startswith("count_") and h != "count_cs"]
    measure_names = []
    for column in header:
        if column.endswith("_plugin"):
            measure_names.append(column[: -len("_plugin")])
    index = {name: i for i, name in enumerate(header)}
    for row in reader:
        if not row:
            continue
        get = lambda col: row[index[col]]
        plugin = {}
        mean = {}
        sd = {}
        lo = {}
        hi = {}
        for name in measure_names:
            raw = get(f"{name}_plugin")
            plugin[name] = None if raw == "" else float(raw)
            mean[name] = float(get(f"{name}_posterior_mean"))
            sd[name] = float(get(f"{name}_posterior_sd"))
            lo[name] = float(get(f"{name}_credible_lo"))
            hi[name] = float(get(f"{name}_credible_hi"))
        reports.append(
            ItemReport(
                item_id=get("item_id"),
                counts=CountVector(
                    proper=tuple(int(get(c)) for c in count_cols), cs=int(get("count_cs"))
                ),
                n_total=int(get("n_total")),
                prior_only=get("prior_only") == "true",
                credible_mass=float(get("credible_mass")),
                plugin=plugin,
                posterior_mean=mean,
                posterior_sd=sd,
                credible_lo=lo,
                credible_hi=hi,
            )
        )
    return reports
