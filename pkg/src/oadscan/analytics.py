"""Corpus statistics: monthly time series, hostname frequencies, reports.

All aggregates are plain counts and merge by addition, so a corpus can be
processed in shards and combined.  Percentages and shares are expressed
in percentage points (0..100).
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import DEFAULT_WINDOW, MonthWindow, validate_month
from .fileio import atomic_write_text
from .ghp import Category, CategoryPolicy
from .scope import host_of

__all__ = [
    "MonthlyStats",
    "HostnameStats",
    "HistogramSpec",
    "DispersionMetrics",
    "AggregateConfig",
    "CorpusAggregate",
    "MergeConfigError",
    "monthly_stats",
    "aggregate_yearly",
    "category_percentages",
    "ghp_share_of_oads",
    "merge",
    "hostname_frequency",
    "frequency_histogram",
    "top_hostnames",
    "dispersion_metrics",
    "write_reports",
]


class MergeConfigError(ValueError):
    """Aggregates built under different configs cannot be merged."""


@dataclass(frozen=True)
class MonthlyStats:
    """Per-month counts; identities: uri_total = oads + non_oads and
    oads = ghp + non_ghp_oads."""

    month: str
    publications: int = 0
    uri_total: int = 0
    oads: int = 0
    non_oads: int = 0
    ghp: int = 0
    non_ghp_oads: int = 0

    def check(self) -> None:
        counts = (self.publications, self.uri_total, self.oads, self.non_oads,
                  self.ghp, self.non_ghp_oads)
        if any(c < 0 for c in counts):
            raise ValueError(f"negative count in {self}")
        if self.uri_total != self.oads + self.non_oads:
            raise ValueError(f"uri_total != oads + non_oads in {self}")
        if self.oads != self.ghp + self.non_ghp_oads:
            raise ValueError(f"oads != ghp + non_ghp_oads in {self}")

    def add(self, other: "MonthlyStats") -> "MonthlyStats":
        if other.month != self.month:
            raise ValueError(f"month mismatch: {self.month} vs {other.month}")
        return MonthlyStats(
            self.month,
            self.publications + other.publications,
            self.uri_total + other.uri_total,
            self.oads + other.oads,
            self.non_oads + other.non_oads,
            self.ghp + other.ghp,
            self.non_ghp_oads + other.non_ghp_oads,
        )


def _tally(month: str, categories: Iterable[Category]) -> MonthlyStats:
    ghp = ngo = non = 0
    for c in categories:
        if c is Category.GHP:
            ghp += 1
        elif c is Category.NON_GHP_OADS:
            ngo += 1
        else:
            non += 1
    oads = ghp + ngo
    return MonthlyStats(month, 1, oads + non, oads, non, ghp, ngo)


def monthly_stats(
    documents: Iterable[tuple[str, Sequence[Category]]],
    window: MonthWindow = DEFAULT_WINDOW,
) -> list[MonthlyStats]:
    """Aggregate per-document category lists into one record per month.

    Input is (month, categories-of-in-scope-mentions) per document; a
    document with no mentions still counts toward publications.  A month
    outside the corpus window is an error: windowing belongs to ingest.
    """
    by_month: dict[str, MonthlyStats] = {}
    for month, categories in documents:
        validate_month(month)
        if not window.contains(month):
            raise ValueError(f"month {month} outside corpus window {window.start}..{window.end}")
        stats = _tally(month, categories)
        existing = by_month.get(month)
        by_month[month] = stats if existing is None else existing.add(stats)
    return [by_month[m] for m in sorted(by_month)]


def aggregate_yearly(monthly: Iterable[MonthlyStats]) -> list[MonthlyStats]:
    """Re-aggregate monthly records into per-year records (count-weighted).

    The ``month`` field of the result holds the 4-digit year.
    """
    by_year: dict[str, MonthlyStats] = {}
    for stats in monthly:
        year = stats.month[:4]
        rec = replace(stats, month=year)
        existing = by_year.get(year)
        by_year[year] = rec if existing is None else existing.add(rec)
    return [by_year[y] for y in sorted(by_year)]


def category_percentages(stats: MonthlyStats) -> tuple[float, float, float] | None:
    """(pct_ghp, pct_non_ghp_oads, pct_non_oads) over uri_total, or None
    when the month has no URIs."""
    if stats.uri_total == 0:
        return None
    total = float(stats.uri_total)
    return (
        100.0 * stats.ghp / total,
        100.0 * stats.non_ghp_oads / total,
        100.0 * stats.non_oads / total,
    )


def ghp_share_of_oads(stats: MonthlyStats) -> float | None:
    """Percentage of OADS URIs that point at a Git hosting platform."""
    if stats.oads == 0:
        return None
    return 100.0 * stats.ghp / stats.oads


@dataclass(frozen=True)
class HostnameStats:
    """Hostname frequency over non-GHP OADS mentions."""

    counts: dict[str, int]
    total: int

    def share(self, hostname: str) -> float | None:
        """This hostname's percentage of all counted mentions."""
        if self.total == 0:
            return None
        return 100.0 * self.counts.get(hostname, 0) / self.total

    @classmethod
    def empty(cls) -> "HostnameStats":
        return cls({}, 0)


def hostname_frequency(uris: Iterable[str]) -> HostnameStats:
    """Count lowercased hostnames across the given (non-GHP OADS) URIs."""
    counts: Counter[str] = Counter()
    total = 0
    for uri in uris:
        counts[host_of(uri)] += 1
        total += 1
    return HostnameStats(dict(counts), total)


@dataclass(frozen=True)
class HistogramSpec:
    """Hostnames bucketed by their frequency into half-open bins
    [k*w, (k+1)*w); bins are contiguous from zero and sum to the number
    of distinct hostnames."""

    bin_width: int
    bins: tuple[tuple[int, int, int], ...]  # (start, end, hostname count)


def frequency_histogram(stats: HostnameStats, bin_width: int = 50) -> HistogramSpec:
    if bin_width < 1:
        raise ValueError(f"bin_width must be >= 1, got {bin_width}")
    if not stats.counts:
        return HistogramSpec(bin_width, ())
    max_freq = max(stats.counts.values())
    n_bins = max_freq // bin_width + 1
    buckets = [0] * n_bins
    for freq in stats.counts.values():
        buckets[freq // bin_width] += 1
    bins = tuple(
        (k * bin_width, (k + 1) * bin_width, buckets[k]) for k in range(n_bins)
    )
    return HistogramSpec(bin_width, bins)


def top_hostnames(stats: HostnameStats, n: int) -> list[tuple[str, int]]:
    """The n most frequent hostnames, ties broken lexicographically."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ranked = sorted(stats.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]


@dataclass(frozen=True)
class DispersionMetrics:
    """How spread-out hostname usage is, in percentage points."""

    singleton_uri_share: float   # mentions whose hostname occurs exactly once
    gt5_uri_share: float         # mentions whose hostname occurs more than 5 times
    hostnames_over_1000: int


def dispersion_metrics(stats: HostnameStats) -> DispersionMetrics | None:
    if stats.total == 0:
        return None
    singleton = sum(c for c in stats.counts.values() if c == 1)
    gt5 = sum(c for c in stats.counts.values() if c > 5)
    over_1000 = sum(1 for c in stats.counts.values() if c > 1000)
    return DispersionMetrics(
        100.0 * singleton / stats.total,
        100.0 * gt5 / stats.total,
        over_1000,
    )


# --- mergeable corpus-level aggregate -------------------------------------


@dataclass(frozen=True)
class AggregateConfig:
    category_policy: CategoryPolicy = CategoryPolicy.GHP_FORCES_OADS
    histogram_bin_width: int = 50


@dataclass
class CorpusAggregate:
    """Everything the reports need, mergeable across corpus shards."""

    config: AggregateConfig = field(default_factory=AggregateConfig)
    monthly: dict[str, MonthlyStats] = field(default_factory=dict)
    hostnames: Counter = field(default_factory=Counter)
    hostname_total: int = 0

    def add_publications(self, month: str, count: int = 1) -> None:
        existing = self.monthly.get(month, MonthlyStats(month))
        self.monthly[month] = existing.add(MonthlyStats(month, publications=count))

    def add_mention(self, month: str, category: Category, hostname: str) -> None:
        if category is Category.GHP:
            stats = MonthlyStats(month, 0, 1, 1, 0, 1, 0)
        elif category is Category.NON_GHP_OADS:
            stats = MonthlyStats(month, 0, 1, 1, 0, 0, 1)
            self.hostnames[hostname] += 1
            self.hostname_total += 1
        else:
            stats = MonthlyStats(month, 0, 1, 0, 1, 0, 0)
        existing = self.monthly.get(month, MonthlyStats(month))
        self.monthly[month] = existing.add(stats)

    def hostname_stats(self) -> HostnameStats:
        return HostnameStats(dict(self.hostnames), self.hostname_total)

    def monthly_list(self) -> list[MonthlyStats]:
        return [self.monthly[m] for m in sorted(self.monthly)]

    def totals(self) -> MonthlyStats:
        total = MonthlyStats("total")
        for stats in self.monthly.values():
            total = total.add(replace(stats, month="total"))
        return total


def merge(a: CorpusAggregate, b: CorpusAggregate) -> CorpusAggregate:
    """Field-wise sum of two aggregates built under the same config."""
    if a.config != b.config:
        raise MergeConfigError(f"config mismatch: {a.config} vs {b.config}")
    monthly = dict(a.monthly)
    for month, stats in b.monthly.items():
        existing = monthly.get(month)
        monthly[month] = stats if existing is None else existing.add(stats)
    hostnames = Counter(a.hostnames)
    hostnames.update(b.hostnames)
    return CorpusAggregate(a.config, monthly, hostnames, a.hostname_total + b.hostname_total)


# --- CSV reports -----------------------------------------------------------
#
# Fixed precision: averages and shares at 4 decimal places, category
# percentages at 2.  Months without URIs leave percentage cells empty.


def _fmt(value: float | None, places: int) -> str:
    return "" if value is None else f"{value:.{places}f}"


def _csv_text(header: list[str], rows: Iterable[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_monthly_csv(path: str | Path, monthly: Sequence[MonthlyStats]) -> None:
    rows = []
    for s in monthly:
        pct = category_percentages(s)
        pubs = float(s.publications) if s.publications else None
        rows.append(
            [
                s.month,
                str(s.publications),
                str(s.uri_total),
                str(s.oads),
                str(s.non_oads),
                str(s.ghp),
                str(s.non_ghp_oads),
                _fmt(s.uri_total / pubs if pubs else None, 4),
                _fmt(s.oads / pubs if pubs else None, 4),
                _fmt(s.non_oads / pubs if pubs else None, 4),
                _fmt(pct[0] if pct else None, 2),
                _fmt(pct[1] if pct else None, 2),
                _fmt(pct[2] if pct else None, 2),
            ]
        )
    atomic_write_text(
        path,
        _csv_text(
            [
                "month", "publications", "uri_total", "oads", "non_oads",
                "ghp", "non_ghp_oads", "avg_total", "avg_oads",
                "avg_non_oads", "pct_ghp", "pct_non_ghp_oads", "pct_non_oads",
            ],
            rows,
        ),
    )


def write_hostnames_csv(path: str | Path, stats: HostnameStats) -> None:
    ranked = sorted(stats.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    rows = [
        [host, str(count), _fmt(stats.share(host), 4)]
        for host, count in ranked
    ]
    atomic_write_text(path, _csv_text(["hostname", "count", "share"], rows))


def write_histogram_csv(path: str | Path, histogram: HistogramSpec) -> None:
    rows = [[str(s), str(e), str(c)] for s, e, c in histogram.bins]
    atomic_write_text(path, _csv_text(["bin_start", "bin_end", "hostname_count"], rows))


def write_top_hostnames_csv(path: str | Path, stats: HostnameStats, n: int) -> None:
    rows = [[host, str(count)] for host, count in top_hostnames(stats, n)]
    atomic_write_text(path, _csv_text(["hostname", "count"], rows))


def write_reports(
    out_dir: str | Path,
    aggregate: CorpusAggregate,
    top_n: int = 15,
) -> dict[str, str]:
    """Write the four CSV reports; returns report name -> path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stats = aggregate.hostname_stats()
    paths = {
        "monthly": out_dir / "monthly.csv",
        "hostnames": out_dir / "hostnames.csv",
        "histogram": out_dir / "histogram.csv",
        "top_hostnames": out_dir / "top_hostnames.csv",
    }
    write_monthly_csv(paths["monthly"], aggregate.monthly_list())
    write_hostnames_csv(paths["hostnames"], stats)
    write_histogram_csv(
        paths["histogram"], frequency_histogram(stats, aggregate.config.histogram_bin_width)
    )
    write_top_hostnames_csv(paths["top_hostnames"], stats, top_n)
    return {name: str(p) for name, p in paths.items()}
