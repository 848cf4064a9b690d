"""Static HTML report with CSV side files, built from a sink or a dataset."""

from __future__ import annotations

import csv
import html
import os
from dataclasses import dataclass

from .eval import ConfusionMatrix, corpus_stats, length_histogram
from .ingest import Dataset, Label, RawComment
from .textprep import NormalizerConfig, preprocess


@dataclass
class ReportData:
    n_rows: int
    distribution: dict[Label, int]
    stats: dict
    histogram: list[tuple[int, int, int]]
    confusion: ConfusionMatrix | None = None


def sink_as_dataset(rows: list[dict]) -> Dataset | None:
    """Sink rows as a labelled dataset (predicted labels); duplicate ids keep the first row."""
    seen, records = set(), []
    for r in rows:
        if r["id"] in seen or not r["text"].strip():
            continue
        seen.add(r["id"])
        records.append(RawComment(r["id"], r["text"], Label.parse(r["label"]), r.get("source") or None))
    return Dataset(tuple(records)) if records else None


def build_report(
    d: Dataset | None,
    config: NormalizerConfig | None = None,
    top_k: int = 20,
    bins: int = 10,
    confusion: ConfusionMatrix | None = None,
) -> ReportData:
    if d is None or len(d) == 0:
        return ReportData(0, {lab: 0 for lab in Label}, {}, [], confusion)
    tokens = [preprocess(r.text, config).tokens for r in d.records]
    stats = corpus_stats(d, tokens=tokens, top_k=top_k)
    dist = {lab: (stats[lab].records if lab in stats else 0) for lab in Label}
    return ReportData(len(d), dist, stats, length_histogram([len(t) for t in tokens], bins), confusion)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _table(header, rows) -> str:
    head = "".join(f"<th>{html.escape(str(h))}</th>" for h in header)
    body = "".join("<tr>" + "".join(f"<td>{html.escape(str(c))}</td>" for c in row) + "</tr>" for row in rows)
    return f"<table><thead><tr>{head}</tr></thead><tbody>{body}</tbody></table>"


def _bars(hist) -> str:
    peak = max((n for _, _, n in hist), default=0) or 1
    rows = []
    for lo, hi, n in hist:
        width = round(300 * n / peak)
        rows.append(
            f'<div class="bar"><span class="lab">{lo}-{hi}</span>'
            f'<span class="fill" style="width:{width}px"></span><span>{n}</span></div>'
        )
    return "".join(rows)


_STYLE = (
    "body{font-family:sans-serif;margin:2em;max-width:60em}"
    "table{border-collapse:collapse;margin:.5em 0 1.5em}"
    "td,th{border:1px solid #bbb;padding:.2em .6em;text-align:left}"
    ".bar{display:flex;align-items:center;gap:.5em;font-size:90%}"
    ".lab{width:6em}.fill{display:inline-block;height:.9em;background:#4a78b0}"
)


def write_report(data: ReportData, out_dir: str | os.PathLike, title: str = "Comment report") -> dict[str, str]:
    """Write ``report.html`` and CSV summaries into ``out_dir``; returns name to path."""
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "html": os.path.join(out_dir, "report.html"),
        "distribution": os.path.join(out_dir, "label_distribution.csv"),
        "top_terms": os.path.join(out_dir, "top_terms.csv"),
        "lengths": os.path.join(out_dir, "length_histogram.csv"),
    }
    dist_rows = [(lab.name.lower(), n) for lab, n in data.distribution.items()]
    term_rows = [
        (lab.name.lower(), rank + 1, term, count)
        for lab, st in data.stats.items()
        for rank, (term, count) in enumerate(st.top_terms)
    ]
    _write_csv(paths["distribution"], ("label", "count"), dist_rows)
    _write_csv(paths["top_terms"], ("label", "rank", "term", "count"), term_rows)
    _write_csv(paths["lengths"], ("low", "high", "count"), data.histogram)

    parts = [f"<h1>{html.escape(title)}</h1>", f"<p>{data.n_rows} rows.</p>"]
    parts.append("<h2>Label distribution</h2>" + _table(("label", "count"), dist_rows))
    for lab, st in data.stats.items():
        parts.append(
            f"<h2>Top terms: {lab.name.lower()}</h2>"
            f"<p>{st.records} comments, {st.mean_tokens:.2f} tokens on average.</p>"
            + _table(("term", "count"), st.top_terms)
        )
    parts.append("<h2>Comment length (tokens)</h2>" + (_bars(data.histogram) or "<p>No comments.</p>"))
    if data.confusion is not None:
        paths["confusion"] = os.path.join(out_dir, "confusion.csv")
        with open(paths["confusion"], "w", encoding="utf-8", newline="") as fh:
            fh.write(data.confusion.to_csv())
        names = [lab.name.lower() for lab in Label][: data.confusion.n_classes]
        rows = [[names[i], *row] for i, row in enumerate(data.confusion.counts.tolist())]
        parts.append("<h2>Confusion matrix (rows: true)</h2>" + _table(("true\\pred", *names), rows))
    doc = (
        '<!DOCTYPE html>\n<html lang="vi"><head><meta charset="utf-8"/>'
        f"<title>{html.escape(title)}</title><style>{_STYLE}</style></head>"
        f"<body>{''.join(parts)}</body></html>\n"
    )
    with open(paths["html"], "w", encoding="utf-8") as fh:
        fh.write(doc)
    return paths
