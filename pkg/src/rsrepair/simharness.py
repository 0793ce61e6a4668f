"""Deterministic simulated storage cluster with on-the-wire metering.

The cluster is in-process: nodes are symbol vectors, the wire is an
accounting abstraction, and only payload sub-symbols of F_q are counted
(per-stripe helper messages for one failed node share one repair set and
one repair polynomial, so the codeword-independent setup is public code
state, not downloaded data).

Payload bytes enter as base-q digits, l digits per field element and k
elements per message, zero-padded; the inverse is exact given the
original byte length.  Reports are exact: every ratio is a rational, and
the CSV/JSON renderings are byte-deterministic for a fixed scenario.
"""

from __future__ import annotations

import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .construction import ConstructionPlan, build_code, plan_constant_overhead, plan_epsilon_msr, plan_manual
from .errors import AlreadyFailed, RepairSimError, TooManyFailures
from .field_tower import FieldElement
from .grs import GrsCode
from .repair import RepairScheme, cutset_bound

REPORT_SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "stripe_count",
    "node",
    "prime",
    "scheme",
    "subsymbols",
    "cutset_num",
    "cutset_den",
    "ratio_total",
    "ratio_helper",
)

POLICY_TRACE = "trace-scheme-with-naive-fallback"
POLICY_NAIVE = "naive-only"


# ---------------------------------------------------------------------------
# payload packing
# ---------------------------------------------------------------------------

def digits_per_byte(q: int) -> int:
    """Smallest d with q**d >= 256; each byte becomes d base-q digits."""
    d = 1
    while q ** d < 256:
        d += 1
    return d


def bytes_to_digits(data: bytes, q: int) -> np.ndarray:
    arr = np.frombuffer(data, dtype=np.uint8).astype(np.int64)
    d = digits_per_byte(q)
    out = np.empty(len(data) * d, dtype=np.int64)
    for i in range(d):
        out[i::d] = (arr // q ** i) % q
    return out


def digits_to_bytes(digits: np.ndarray, q: int, nbytes: int) -> bytes:
    d = digits_per_byte(q)
    digits = np.asarray(digits, dtype=np.int64)[: nbytes * d]
    vals = np.zeros(nbytes, dtype=np.int64)
    for i in range(d):
        vals += digits[i::d] * q ** i
    return vals.astype(np.uint8).tobytes()


def ingest(data: bytes, code: GrsCode) -> list[list[FieldElement]]:
    """Pack bytes into messages of k field elements (l digits each),
    zero-padding the tail."""
    tower = code.tower
    digits = bytes_to_digits(data, tower.q)
    per_message = code.k * tower.l
    if len(digits) % per_message:
        pad = per_message - len(digits) % per_message
        digits = np.concatenate([digits, np.zeros(pad, dtype=np.int64)])
    messages = []
    for off in range(0, len(digits), per_message):
        chunk = digits[off : off + per_message]
        messages.append(
            [tower.element(chunk[t * tower.l : (t + 1) * tower.l]) for t in range(code.k)]
        )
    return messages


def extract(messages: Sequence[Sequence[FieldElement]], code: GrsCode, nbytes: int) -> bytes:
    """Inverse of ingest, truncated to the original byte length."""
    tower = code.tower
    if not messages:
        return b""
    digits = np.concatenate(
        [sym.flat for message in messages for sym in message]
    )
    return digits_to_bytes(digits, tower.q, nbytes)


# ---------------------------------------------------------------------------
# report rows
# ---------------------------------------------------------------------------

def _frac_dict(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator, "decimal": float(x)}


def _decimal(x: Fraction) -> str:
    return format(float(x), ".12g")


@dataclass(frozen=True)
class ReportRow:
    stripe_count: int
    node: int
    prime: int
    scheme: str                # "trace" or "naive"
    subsymbols: int
    cutset: Fraction           # stripe_count * (n-1) * l / (n-k)
    ratio_total: Fraction
    ratio_helper: Fraction

    def to_dict(self) -> dict:
        return {
            "stripe_count": self.stripe_count,
            "node": self.node,
            "prime": self.prime,
            "scheme": self.scheme,
            "subsymbols": self.subsymbols,
            "cutset": {"num": self.cutset.numerator, "den": self.cutset.denominator},
            "ratio_total": _frac_dict(self.ratio_total),
            "ratio_helper": _frac_dict(self.ratio_helper),
        }

    def csv_fields(self) -> tuple:
        return (
            self.stripe_count,
            self.node,
            self.prime,
            self.scheme,
            self.subsymbols,
            self.cutset.numerator,
            self.cutset.denominator,
            _decimal(self.ratio_total),
            _decimal(self.ratio_helper),
        )


@dataclass
class RepairReport:
    rows: list[ReportRow] = field(default_factory=list)
    scenario: dict | None = None

    def aggregates(self) -> dict | None:
        if not self.rows:
            return None
        totals = [r.ratio_total for r in self.rows]
        helpers = [r.ratio_helper for r in self.rows]
        eps = max(max(t, h) for t, h in zip(totals, helpers)) - 1
        return {
            "max_ratio_total": max(totals),
            "mean_ratio_total": sum(totals, Fraction(0)) / len(totals),
            "max_ratio_helper": max(helpers),
            "epsilon_measured": eps,
        }

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            buf.write(",".join(str(f) for f in row.csv_fields()) + "\n")
        return buf.getvalue()

    def to_json_text(self) -> str:
        agg = self.aggregates()
        doc = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "scenario": self.scenario,
            "rows": [r.to_dict() for r in self.rows],
            "aggregates": None
            if agg is None
            else {key: _frac_dict(val) for key, val in agg.items()},
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, outdir, basename: str = "report", figures: bool = True) -> list:
        """Write report.csv and report.json (plus figures) under outdir."""
        from pathlib import Path

        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        csv_path = outdir / f"{basename}.csv"
        csv_path.write_text(self.to_csv_text(), encoding="utf-8")
        paths.append(csv_path)
        json_path = outdir / f"{basename}.json"
        json_path.write_text(self.to_json_text(), encoding="utf-8")
        paths.append(json_path)
        if figures and self.rows:
            from .figures import render_report_figures

            paths.extend(render_report_figures(self, outdir, basename=basename))
        return paths


# ---------------------------------------------------------------------------
# the cluster
# ---------------------------------------------------------------------------

class Cluster:
    """n storage nodes, one codeword symbol per node per stripe."""

    def __init__(self, tower, code: GrsCode, plan: ConstructionPlan, policy: str = POLICY_TRACE):
        if policy not in (POLICY_TRACE, POLICY_NAIVE):
            raise ValueError(f"unknown policy {policy!r}")
        self.tower = tower
        self.code = code
        self.plan = plan
        self.policy = policy
        self.nodes: list[list[FieldElement | None]] = [[] for _ in range(code.n)]
        self.alive = [True] * code.n
        self._scheme = RepairScheme(code, plan)
        self._shadow: list[tuple[FieldElement, ...]] = []  # pristine stripes
        self.rows: list[ReportRow] = []

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def stripe_count(self) -> int:
        return len(self._shadow)

    def encode_and_distribute(self, messages: Sequence[Sequence[FieldElement]]) -> None:
        """Append one stripe per message; node j receives symbol j."""
        for message in messages:
            word = self.code.encode(message)
            self._shadow.append(word)
            for j in range(self.n):
                self.nodes[j].append(word[j])

    def stripe(self, t: int) -> tuple[FieldElement, ...]:
        """Current stripe t across all nodes (None where failed)."""
        return tuple(self.nodes[j][t] for j in range(self.n))

    def fail_node(self, j: int, stripes: tuple[int, int] | None = None) -> None:
        """Erase node j's content (optionally only a [start, stop) stripe
        range) and mark it failed."""
        if not 0 <= j < self.n:
            raise ValueError(f"node {j} out of range")
        if not self.alive[j]:
            raise AlreadyFailed(f"node {j} is already failed")
        start, stop = (0, self.stripe_count) if stripes is None else stripes
        if not 0 <= start <= stop <= self.stripe_count:
            raise ValueError(f"stripe range [{start}, {stop}) out of bounds")
        for t in range(start, stop):
            self.nodes[j][t] = None
        self.alive[j] = False

    def _naive_stripe_repair(self, j: int, t: int) -> tuple[FieldElement, int]:
        k = self.code.k
        sources = [s for s in range(self.n) if self.alive[s]][:k]
        known = {s: self.nodes[s][t] for s in sources}
        word = self.code.erasure_decode(known)
        return word[j], k * self.tower.l

    def run_repair(self, j: int) -> ReportRow:
        """Repair all missing stripes of node j, meter the download, restore
        the node, and append a report row."""
        if not 0 <= j < self.n:
            raise ValueError(f"node {j} out of range")
        dead = [x for x in range(self.n) if not self.alive[x]]
        if len(dead) > 1:
            raise TooManyFailures(f"nodes {dead} are all failed")
        if dead != [j]:
            raise RepairSimError(f"node {j} is not the failed node")
        missing = [t for t in range(self.stripe_count) if self.nodes[j][t] is None]
        class_idx = self.plan.class_of(j)
        use_trace = (
            self.policy != POLICY_NAIVE and self.plan.is_repairable_class(class_idx)
        )
        total = 0
        for t in missing:
            if use_trace:
                word = self.stripe(t)
                transcript = self._scheme.repair(word, j)
                restored = transcript.reconstructed
                total += transcript.total_subsymbols
            else:
                restored, cost = self._naive_stripe_repair(j, t)
                total += cost
            if restored != self._shadow[t][j]:
                raise RepairSimError(
                    f"repair of node {j} stripe {t} produced a wrong symbol"
                )
            self.nodes[j][t] = restored
        self.alive[j] = True
        stripes = len(missing)
        per_stripe_cutset = cutset_bound(self.code.n, self.code.k, self.tower.l)
        cutset = per_stripe_cutset * stripes if stripes else per_stripe_cutset
        prime = self.plan.primes[class_idx]
        if use_trace:
            ratio_helper = Fraction(self.code.r, prime)
        else:
            ratio_helper = Fraction(self.code.r)  # full nodes: l vs l/r
        row = ReportRow(
            stripe_count=stripes,
            node=j,
            prime=prime,
            scheme="trace" if use_trace else "naive",
            subsymbols=total,
            cutset=cutset,
            ratio_total=Fraction(total) / cutset,
            ratio_helper=ratio_helper,
        )
        self.rows.append(row)
        return row

    def report(self) -> RepairReport:
        return RepairReport(rows=list(self.rows))


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    """A reproducible simulation: plan source, payload, failures, policy.

    Failures are node indices or {"node": j, "stripes": [start, stop]}.
    """

    plan: ConstructionPlan
    payload_seed: int | None = None
    payload_length: int = 0
    payload_path: str | None = None
    failures: list = field(default_factory=list)
    policy: str = POLICY_TRACE
    raw: dict | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        if "planner" in d:
            p = d["planner"]
            name = p.get("name", "manual")
            if name == "thm1":
                plan = plan_constant_overhead(
                    p["n"], p["k"], p.get("delta", Fraction(1, 10)), p.get("q", 2)
                )
            elif name == "thm2":
                plan = plan_epsilon_msr(
                    p["n"],
                    p["k"],
                    p["epsilon"],
                    p.get("delta", Fraction(1, 10)),
                    p.get("q", 2),
                )
            elif name == "manual":
                plan = plan_manual(
                    p.get("q", 2), p["primes"], p["subset_sizes"], p["n"], p["k"]
                )
            else:
                raise ValueError(f"unknown planner {name!r}")
        else:
            plan = plan_manual(
                d.get("q", 2), d["primes"], d["subset_sizes"], d["n"], d["k"]
            )
        payload = d.get("payload", {})
        policy = d.get("policy", POLICY_TRACE)
        if policy not in (POLICY_TRACE, POLICY_NAIVE):
            raise ValueError(f"unknown policy {policy!r}")
        return cls(
            plan=plan,
            payload_seed=payload.get("seed"),
            payload_length=payload.get("length", 0),
            payload_path=payload.get("path"),
            failures=list(d.get("failures", [])),
            policy=policy,
            raw=d,
        )

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def payload(self) -> bytes:
        if self.payload_path is not None:
            with open(self.payload_path, "rb") as fh:
                return fh.read()
        rng = random.Random(self.payload_seed)
        return rng.randbytes(self.payload_length)


def run_scenario(scenario: Scenario, outdir=None, figures: bool = True) -> RepairReport:
    """Build the scenario's code, ingest the payload, play the failure
    schedule, and return (optionally write) the repair report."""
    tower, code = build_code(scenario.plan)
    cluster = Cluster(tower, code, scenario.plan, policy=scenario.policy)
    cluster.encode_and_distribute(ingest(scenario.payload(), code))
    for event in scenario.failures:
        if isinstance(event, dict):
            node = event["node"]
            stripes = event.get("stripes")
            stripes = tuple(stripes) if stripes is not None else None
        else:
            node = int(event)
            stripes = None
        cluster.fail_node(node, stripes=stripes)
        cluster.run_repair(node)
    report = cluster.report()
    report.scenario = scenario.raw
    if outdir is not None:
        report.write(outdir, figures=figures)
    return report
