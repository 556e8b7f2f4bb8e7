"""Sentiment vote ingestion, majority voting, and agreement statistics.

Annotator files are 3-column CSVs (Text, Sentiments, Multi). A vote may
name several sentiments joined by dashes ("negative-positive"); such a
mixed vote competes as one ballot for the full combination, never as
fractional ballots for its parts.
"""

from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

logger = logging.getLogger(__name__)


class VoteParseError(ValueError):
    """Unreadable vote file content."""


class AlignmentError(ValueError):
    """Annotator files disagree on the segment list."""


class SentimentLabel(IntEnum):
    NEGATIVE = 0
    NEUTRAL = 1
    POSITIVE = 2

    @property
    def ordinal(self) -> int:
        """Valence on the -1/0/+1 axis used for correlation."""
        return int(self) - 1

    def __str__(self) -> str:
        return self.name.lower()


_LABEL_TOKENS = {label.name.lower(): label for label in SentimentLabel}

LABEL_NAMES = tuple(str(label) for label in SentimentLabel)


@dataclass(frozen=True)
class RawVote:
    """One annotator ballot: a deduplicated, order-normalized label set."""

    labels: tuple[SentimentLabel, ...]

    @property
    def multi(self) -> bool:
        return len(self.labels) > 1

    def category(self) -> str:
        """Nominal identity of the ballot, e.g. 'negative-positive'."""
        return "-".join(str(label) for label in self.labels)


@dataclass(frozen=True)
class GoldLabel:
    segment_id: str
    label: SentimentLabel | None  # None = no agreement

    @property
    def agreed(self) -> bool:
        return self.label is not None


@dataclass
class VoteTable:
    """segment x annotator votes; None marks a missing vote."""

    segment_ids: list[str]
    annotators: list[str]
    votes: list[list[RawVote | None]]  # [segment][annotator]


def parse_vote_string(text: str) -> RawVote:
    labels = []
    for token in text.split("-"):
        token = token.strip().lower()
        if token not in _LABEL_TOKENS:
            raise VoteParseError(f"unknown sentiment token {token!r}")
        labels.append(_LABEL_TOKENS[token])
    if not labels:
        raise VoteParseError("empty sentiment cell")
    return RawVote(tuple(sorted(set(labels))))


def parse_votes(path: str | Path) -> list[RawVote]:
    """Read one annotator CSV (Text, Sentiments, Multi) into ballots.

    The Multi column is cross-checked against the dash count; on mismatch
    the Sentiments column wins and a warning is logged.
    """
    path = Path(path)
    votes: list[RawVote] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 3:
            raise VoteParseError(f"{path}: expected 3 columns (Text, Sentiments, Multi)")
        for row_no, row in enumerate(reader):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 3:
                raise VoteParseError(f"{path}: row {row_no} has {len(row)} columns")
            try:
                vote = parse_vote_string(row[1])
            except VoteParseError as exc:
                raise VoteParseError(f"{path}: row {row_no}: {exc}") from None
            declared_multi = row[2].strip().lower() in ("yes", "true", "1")
            if declared_multi != vote.multi:
                logger.warning(
                    "%s: row %d: Multi column says %s but sentiments are %r; "
                    "trusting the sentiments",
                    path, row_no, row[2].strip(), vote.category(),
                )
            votes.append(vote)
    return votes


def build_vote_table(files: dict[str, str | Path], tale_id: str) -> VoteTable:
    """Combine per-annotator files for one tale into a VoteTable.

    Segment ids follow the shared naming convention <tale>__seg<i:03d>,
    with i the 0-based row position. All files must have equal row counts.
    """
    annotators = sorted(files)
    per_annotator = {a: parse_votes(files[a]) for a in annotators}
    counts = {a: len(v) for a, v in per_annotator.items()}
    if len(set(counts.values())) != 1:
        raise AlignmentError(f"tale {tale_id!r}: row counts differ per annotator: {counts}")
    n = counts[annotators[0]]
    segment_ids = [f"{tale_id}__seg{i:03d}" for i in range(n)]
    votes: list[list[RawVote | None]] = [
        [per_annotator[a][i] for a in annotators] for i in range(n)
    ]
    return VoteTable(segment_ids, annotators, votes)


def merge_tables(tables: list[VoteTable]) -> VoteTable:
    annotators = tables[0].annotators
    for t in tables[1:]:
        if t.annotators != annotators:
            raise AlignmentError(
                f"annotator sets differ across tales: {t.annotators} vs {annotators}"
            )
    merged = VoteTable([], list(annotators), [])
    for t in tables:
        merged.segment_ids.extend(t.segment_ids)
        merged.votes.extend(t.votes)
    return merged


def majority_vote(votes: list[RawVote | None], segment_id: str = "") -> GoldLabel:
    """Fuse ballots into a gold label or NoAgreement.

    Each ballot counts once for its full category. The segment is agreed
    only when a single category strictly outcounts every other AND that
    category is a pure label; top-count ties and mixed winners both yield
    NoAgreement.
    """
    present = [v for v in votes if v is not None]
    if not present:
        raise ValueError(f"segment {segment_id!r}: no votes to fuse")
    tally = Counter(v.category() for v in present)
    ranked = tally.most_common()
    top_cat, top_count = ranked[0]
    if len(ranked) > 1 and ranked[1][1] == top_count:
        return GoldLabel(segment_id, None)
    if "-" in top_cat:
        return GoldLabel(segment_id, None)
    return GoldLabel(segment_id, _LABEL_TOKENS[top_cat])


def gold_labels(table: VoteTable) -> list[GoldLabel]:
    return [
        majority_vote(row, seg) for seg, row in zip(table.segment_ids, table.votes)
    ]


def krippendorff_alpha(
    table: VoteTable, mixed_votes: str = "category"
) -> tuple[float, bool]:
    """Nominal-data alpha via the coincidence-matrix formulation.

    Units with fewer than 2 votes are excluded. Mixed ballots are their
    own nominal categories by default; mixed_votes="missing" drops them
    instead. Returns (alpha, degenerate) where degenerate flags the
    zero-expected-disagreement convention (alpha = 1.0).
    """
    if mixed_votes not in ("category", "missing"):
        raise ValueError(f"mixed_votes must be 'category' or 'missing', got {mixed_votes!r}")
    units: list[list[str]] = []
    for row in table.votes:
        cats = [
            v.category()
            for v in row
            if v is not None and (mixed_votes == "category" or not v.multi)
        ]
        if len(cats) >= 2:
            units.append(cats)
    if len(units) < 2:
        raise ValueError("alpha needs at least 2 units with at least 2 votes each")

    categories = sorted({c for unit in units for c in unit})
    index = {c: i for i, c in enumerate(categories)}
    k = len(categories)
    coincidence = [[0.0] * k for _ in range(k)]
    for unit in units:
        m = len(unit)
        for a in range(m):
            for b in range(m):
                if a != b:
                    coincidence[index[unit[a]]][index[unit[b]]] += 1.0 / (m - 1)
    n_c = [sum(coincidence[i]) for i in range(k)]
    n = sum(n_c)
    observed = sum(coincidence[i][j] for i in range(k) for j in range(k) if i != j)
    expected = sum(n_c[i] * n_c[j] for i in range(k) for j in range(k) if i != j) / (n - 1)
    if expected == 0.0:
        logger.warning("all votes share one category; alpha = 1.0 by convention")
        return 1.0, True
    return 1.0 - observed / expected, False


@dataclass(frozen=True)
class AgreementReport:
    alpha_raw: float
    alpha_filtered: float
    kept_count: int
    total_count: int
    distribution: dict[str, int]  # gold label name -> segment count


def agreement_report(table: VoteTable, mixed_votes: str = "category") -> AgreementReport:
    """Alpha before/after the majority filter plus the kept-label census."""
    alpha_raw, _ = krippendorff_alpha(table, mixed_votes)
    gold = gold_labels(table)
    keep = [g.agreed for g in gold]
    filtered = VoteTable(
        [s for s, k in zip(table.segment_ids, keep) if k],
        table.annotators,
        [v for v, k in zip(table.votes, keep) if k],
    )
    try:
        alpha_filtered, _ = krippendorff_alpha(filtered, mixed_votes)
    except ValueError:
        logger.warning("too few segments survive the filter; filtered alpha undefined")
        alpha_filtered = float("nan")
    distribution = {name: 0 for name in LABEL_NAMES}
    for g in gold:
        if g.label is not None:
            distribution[str(g.label)] += 1
    return AgreementReport(
        alpha_raw, alpha_filtered, sum(keep), len(gold), distribution
    )


def write_gold_csv(gold: list[GoldLabel], path: str | Path) -> None:
    """Gold-label CSV, NoAgreement segments omitted."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("segment_id,label\n")
        for g in gold:
            if g.label is not None:
                fh.write(f"{g.segment_id},{g.label}\n")


def read_gold_csv(path: str | Path) -> dict[str, SentimentLabel]:
    labels: dict[str, SentimentLabel] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != "segment_id,label":
            raise VoteParseError(f"{path}: expected header 'segment_id,label'")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            seg, _, token = line.partition(",")
            if token not in _LABEL_TOKENS:
                raise VoteParseError(f"{path}: unknown label {token!r} for {seg}")
            labels[seg] = _LABEL_TOKENS[token]
    return labels


def write_votes(table: VoteTable, directory: str | Path, tale_id: str) -> list[Path]:
    """Write a table back to per-annotator CSVs (round-trip counterpart)."""
    directory = Path(directory)
    paths = []
    for j, annotator in enumerate(table.annotators):
        path = directory / f"{tale_id}__{annotator}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["Text", "Sentiments", "Multi"])
            for seg, row in zip(table.segment_ids, table.votes):
                vote = row[j]
                if vote is None:
                    continue
                writer.writerow([seg, vote.category(), "yes" if vote.multi else "no"])
        paths.append(path)
    return paths
