"""Inter-annotator agreement over multiply-labeled pairs.

Escalated labels are abstentions and are dropped before anything is counted.
A pair is multi-labeled when two or more substantive labels remain; such a
pair *agrees* when all of its labels are identical (unanimity). Because that
reading is strict for pairs with three or more labels, the report also
carries a majority-consistency rate (a strict majority exists) so both
readings can be checked. Krippendorff's alpha uses the nominal-data
coincidence-matrix construction over the same multi-labeled subset.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .pooling import ESCALATED, LabelRecord, Pair

FORMAT_VERSION = 1


@dataclass(frozen=True)
class LabelCountStats:
    n_pairs: int
    agreement_rate: float


@dataclass(frozen=True)
class AgreementReport:
    n_multi: int
    agreement_rate: float | None
    majority_rate: float | None
    alpha: float | None
    by_label_count: Mapping[int, LabelCountStats]

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "report": "agreement",
            "n_multi": self.n_multi,
            "agreement_rate": self.agreement_rate,
            "majority_rate": self.majority_rate,
            "alpha": self.alpha,
            "by_label_count": {
                str(n): {"n_pairs": s.n_pairs, "agreement_rate": s.agreement_rate}
                for n, s in sorted(self.by_label_count.items())
            },
        }

    def to_csv(self) -> str:
        rows = ["stat,labels_per_pair,value"]
        rows.append(f"n_multi,,{self.n_multi}")
        rows.append(f"agreement_rate,,{_fmt(self.agreement_rate)}")
        rows.append(f"majority_rate,,{_fmt(self.majority_rate)}")
        rows.append(f"alpha,,{_fmt(self.alpha)}")
        for n, s in sorted(self.by_label_count.items()):
            rows.append(f"n_pairs,{n},{s.n_pairs}")
            rows.append(f"agreement_rate,{n},{s.agreement_rate!r}")
        return "\n".join(rows) + "\n"

    def format_table(self) -> str:
        lines = [
            f"pairs with multiple labels : {self.n_multi}",
            f"agreement rate (unanimous) : {_fmt3(self.agreement_rate)}",
            f"majority-consistent rate   : {_fmt3(self.majority_rate)}",
            f"krippendorff alpha         : {_fmt3(self.alpha)}",
        ]
        if self.by_label_count:
            lines.append("by label count:")
            for n, s in sorted(self.by_label_count.items()):
                lines.append(
                    f"  {n} labels: {s.n_pairs} pairs, rate {s.agreement_rate:.3f}"
                )
        return "\n".join(lines)


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(value)


def _fmt3(value: float | None) -> str:
    return "undefined" if value is None else f"{value:.3f}"


def _units(records: Iterable[LabelRecord]) -> dict[Pair, list[str]]:
    """Group substantive (non-escalated) labels by pair."""
    units: dict[Pair, list[str]] = {}
    for rec in records:
        if rec.label == ESCALATED:
            continue
        units.setdefault(rec.pair, []).append(rec.label)
    return units


def agreement_rate(records: Iterable[LabelRecord]) -> AgreementReport:
    """Raw agreement over multi-labeled pairs, disaggregated by label count.

    Returns rate None when no pair carries two or more substantive labels.
    The alpha field is left unset; see :func:`compute_agreement` for both.
    """
    units = {p: labels for p, labels in _units(records).items() if len(labels) >= 2}
    n_multi = len(units)
    if n_multi == 0:
        return AgreementReport(0, None, None, None, {})

    unanimous = 0
    majority = 0
    per_count: dict[int, list[int]] = {}
    for labels in units.values():
        agree = len(set(labels)) == 1
        unanimous += agree
        top = Counter(labels).most_common(1)[0][1]
        majority += top * 2 > len(labels)
        per_count.setdefault(len(labels), []).append(agree)
    by_count = {
        n: LabelCountStats(n_pairs=len(flags), agreement_rate=sum(flags) / len(flags))
        for n, flags in per_count.items()
    }
    return AgreementReport(
        n_multi=n_multi,
        agreement_rate=unanimous / n_multi,
        majority_rate=majority / n_multi,
        alpha=None,
        by_label_count=by_count,
    )


def krippendorff_alpha(records: Iterable[LabelRecord]) -> float | None:
    """Nominal-data alpha, 1 - D_o/D_e, over pairs with two or more labels.

    Each pair with m labels contributes its within-pair ordered label
    coincidences weighted by 1/(m-1). Returns None when the data are
    degenerate (fewer than two multi-labeled pairs' worth of coincidences, or
    a single observed label value, which makes expected disagreement zero).
    """
    units = [labels for labels in _units(records).values() if len(labels) >= 2]
    if not units:
        return None

    values = sorted({lb for labels in units for lb in labels})
    coincidence: dict[tuple[str, str], float] = {
        (c, k): 0.0 for c in values for k in values
    }
    for labels in units:
        m = len(labels)
        counts = Counter(labels)
        for c in sorted(counts):
            for k in sorted(counts):
                n_ck = counts[c] * (counts[c] - 1) if c == k else counts[c] * counts[k]
                coincidence[(c, k)] += n_ck / (m - 1)

    n_total = sum(coincidence.values())
    margins = {c: sum(coincidence[(c, k)] for k in values) for c in values}
    observed = sum(coincidence[(c, k)] for c in values for k in values if c != k)
    expected = sum(
        margins[c] * margins[k] for c in values for k in values if c != k
    )
    if expected == 0 or n_total < 2:
        return None
    d_o = observed / n_total
    d_e = expected / (n_total * (n_total - 1))
    return 1.0 - d_o / d_e


def compute_agreement(records: Iterable[LabelRecord]) -> AgreementReport:
    """Agreement rates plus alpha in one report."""
    records = list(records)
    report = agreement_rate(records)
    return AgreementReport(
        n_multi=report.n_multi,
        agreement_rate=report.agreement_rate,
        majority_rate=report.majority_rate,
        alpha=krippendorff_alpha(records),
        by_label_count=report.by_label_count,
    )
