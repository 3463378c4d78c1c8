"""JSON round-trips for preferences, mechanisms, instances, and reports.

Rationals are encoded as [numerator, denominator] pairs and accepted back as
ints, "p/q" strings, or such pairs.  Mechanism descriptors carry a "kind"
tag; serial-quota inputs are canonicalized on load, so a non-canonical (q, p)
loads as its unique canonical twin and an overflowing one raises.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .fairness import FairnessAudit
from .mechanisms import (
    CardinalInstance,
    CounterBossy,
    CounterNonNeutral,
    CounterNonTruthful,
    Mechanism,
    QuotaOrdering,
    RoundRobin,
    SerialQuota,
    TableMechanism,
    serial_quota,
)
from .prefs import (
    AdditiveStrict,
    Lexicographic,
    Preference,
    PreferenceClass,
    RankTable,
    class_from_tag,
    explicit_class,
)
from .properties import PropertyReport
from .search import CharacterizationReport


def fraction_to_json(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def fraction_from_json(x: Any) -> Fraction:
    if isinstance(x, bool):
        raise ValueError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, float):
        return Fraction(x)
    raise ValueError(f"not a rational: {x!r}")


def preference_to_json(pref: Preference) -> dict:
    if isinstance(pref, Lexicographic):
        return {"kind": "lex", "order": list(pref.order)}
    if isinstance(pref, RankTable):
        return {"kind": "rank", "rank": list(pref.rank)}
    if isinstance(pref, AdditiveStrict):
        return {"kind": "additive", "values": [fraction_to_json(v) for v in pref.values]}
    raise ValueError(f"unknown preference type {type(pref).__name__}")


def preference_from_json(obj: dict) -> Preference:
    kind = obj.get("kind")
    if kind == "lex":
        return Lexicographic(tuple(int(g) for g in obj["order"]))
    if kind == "rank":
        return RankTable(tuple(int(r) for r in obj["rank"]))
    if kind == "additive":
        return AdditiveStrict(tuple(fraction_from_json(v) for v in obj["values"]))
    raise ValueError(f"unknown preference kind {kind!r}")


def class_to_json(cls: PreferenceClass) -> dict:
    out: dict[str, Any] = {"tag": cls.tag, "m": cls.m}
    if cls.tag == "explicit":
        out["members"] = [preference_to_json(p) for p in cls.members]
    return out


def class_from_json(obj: Any, m: int | None = None) -> PreferenceClass:
    if isinstance(obj, str):
        if m is None:
            raise ValueError("class tag shorthand needs an explicit m")
        return class_from_tag(obj, m)
    tag = obj["tag"]
    m = int(obj.get("m", m if m is not None else -1))
    if m < 0:
        raise ValueError("class JSON needs m")
    if tag == "explicit":
        return explicit_class(
            m, tuple(preference_from_json(p) for p in obj["members"])
        )
    return class_from_tag(tag, m)


def quota_to_json(qo: QuotaOrdering) -> dict:
    return {"q": list(qo.q), "p": list(qo.p)}


def mechanism_to_json(mech: Mechanism) -> dict:
    cls_json = class_to_json(mech.domain)
    if isinstance(mech, SerialQuota):
        return {
            "kind": "serial_quota",
            "q": list(mech.quota.q),
            "p": list(mech.quota.p),
            "m": mech.m,
            "class": cls_json,
        }
    if isinstance(mech, TableMechanism):
        return {
            "kind": "table",
            "class": cls_json,
            "alloc": [list(row) for row in mech.table],
            "n": mech.n,
        }
    if isinstance(mech, RoundRobin):
        return {"kind": "round_robin", "n": mech.n, "m": mech.m, "class": cls_json}
    if isinstance(mech, CounterNonTruthful):
        return {"kind": "counter_non_truthful", "n": mech.n, "class": cls_json}
    if isinstance(mech, CounterBossy):
        return {"kind": "counter_bossy", "n": mech.n, "m": mech.m, "class": cls_json}
    if isinstance(mech, CounterNonNeutral):
        return {
            "kind": "counter_non_neutral",
            "n": mech.n,
            "m": mech.m,
            "a": mech.a,
            "b": mech.b,
            "class": cls_json,
        }
    raise ValueError(f"unknown mechanism type {type(mech).__name__}")


def mechanism_from_json(obj: dict) -> Mechanism:
    kind = obj.get("kind")
    if kind == "serial_quota":
        q = tuple(int(x) for x in obj["q"])
        p = tuple(int(x) for x in obj["p"])
        m = int(obj.get("m", sum(q)))
        cls = class_from_json(obj.get("class", "lex"), m)
        return serial_quota(q, p, cls)
    if kind == "table":
        cls = class_from_json(obj["class"])
        alloc = tuple(tuple(int(b) for b in row) for row in obj["alloc"])
        n = int(obj.get("n", len(alloc[0]) if alloc else 0))
        return TableMechanism(n, cls.m, cls, alloc)
    if kind == "round_robin":
        n, m = int(obj["n"]), int(obj["m"])
        return RoundRobin(n, m, class_from_json(obj.get("class", "lex"), m))
    if kind == "counter_non_truthful":
        n = int(obj.get("n", 2))
        return CounterNonTruthful(n, 2, class_from_json(obj.get("class", "lex"), 2))
    if kind == "counter_bossy":
        n = int(obj.get("n", 3))
        m = int(obj["m"])
        return CounterBossy(n, m, class_from_json(obj.get("class", "lex"), m))
    if kind == "counter_non_neutral":
        n = int(obj.get("n", 3))
        m = int(obj["m"])
        cls = class_from_json(obj.get("class", "lex"), m)
        return CounterNonNeutral(n, m, cls, int(obj["a"]), int(obj["b"]))
    raise ValueError(f"unknown mechanism kind {kind!r}")


def instance_to_json(inst: CardinalInstance) -> dict:
    return {
        "n": inst.n,
        "m": inst.m,
        "valuations": [
            [fraction_to_json(v) for v in row.values] for row in inst.valuations
        ],
    }


def instance_from_json(obj: dict) -> CardinalInstance:
    rows = [
        tuple(fraction_from_json(v) for v in row) for row in obj["valuations"]
    ]
    inst = CardinalInstance.from_values(rows)
    if "n" in obj and int(obj["n"]) != inst.n:
        raise ValueError("instance n disagrees with valuations")
    if "m" in obj and int(obj["m"]) != inst.m:
        raise ValueError("instance m disagrees with valuations")
    return inst


def report_to_json(report: PropertyReport) -> dict:
    return {
        "property": report.property,
        "holds": report.holds,
        "witness": report.witness,
        "profiles_checked": report.profiles_checked,
    }


def audit_to_json(audit: FairnessAudit) -> dict:
    ratio = audit.worst_ratio
    return {
        "mechanism": audit.mechanism,
        "instances_tested": audit.instances_tested,
        "worst_ratio": None if ratio is None else fraction_to_json(ratio),
        "worst_ratio_decimal": None if ratio is None else float(ratio),
        "ef1_violations": [
            {"instance": instance_to_json(inst), "envious": i, "envied": j}
            for inst, i, j in audit.ef1_violations
        ],
    }


def characterization_to_json(report: CharacterizationReport) -> dict:
    out: dict[str, Any] = {
        "n": report.n,
        "m": report.m,
        "class": report.class_tag,
        "partition_only": report.partition_only,
        "tables_enumerated": report.tables_enumerated,
        "satisfying_count": len(report.satisfying),
        "recognized": [quota_to_json(qo) for qo in report.recognized],
        "family": [quota_to_json(qo) for qo in report.family],
        "verdict": report.verdict,
    }
    if report.counterexample is not None:
        out["satisfying_tables"] = [
            [list(row) for row in mech.table] for mech in report.satisfying
        ]
        out["counterexample"] = mechanism_to_json(report.counterexample)
    return out
