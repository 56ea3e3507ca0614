"""Circuit noise, lookup most-likely-fault decoding and Monte-Carlo accounting.

A fault location is an operation or an idle qubit at some level. A faulty
location contributes one elementary event: a non-identity Pauli on its
support right after its level and, for measurements, an optional outcome flip
(a weight-one Pauli anticommuting with the measured operator, just before and
just after the level).
"""

from __future__ import annotations

import itertools
import json
import math
import struct
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from . import gf2
from .circuit import Circuit, Measurement
from .outcome import OutcomeCode, OutputStabilizerGroup, syndrome_bits
from .pauli import ProjPauli
from .propagation import Effect, FaultOperator, effect, flip_partner
from .spacetime_code import SCHEMA_VERSION, SpacetimeCode, syndrome_Q_bits
from .symplectic import form

DEFAULT_CONFIG_BUDGET = 10**7
REL_TOL = 1e-12  # probabilities closer than this are treated as ties


class DecoderBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    p_unitary: float = 0.0
    p_measurement: float = 0.0
    p_idle: float = 0.0
    overrides: tuple[tuple[int, float], ...] = ()  # (operation position, probability)

    def __post_init__(self) -> None:
        for p in (self.p_unitary, self.p_measurement, self.p_idle, *(p for _, p in self.overrides)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")

    @classmethod
    def uniform(cls, p: float) -> NoiseModel:
        return cls(p, p, p)


@dataclass(frozen=True)
class Location:
    kind: str  # "unitary", "measurement" or "idle"
    level: int
    qubits: tuple[int, ...]
    p: float
    op_position: int | None = None
    meas_index: int | None = None


@dataclass(frozen=True)
class Event:
    location: int
    pauli: int  # packed n-qubit vector placed right after the level
    flip: bool
    p: float
    fault: FaultOperator

    def describe(self, n: int) -> str:
        text = str(ProjPauli.from_vec(n, self.pauli)) if self.pauli else "I"
        return text + ("+flip" if self.flip else "")


def fault_locations(c: Circuit, nm: NoiseModel) -> list[Location]:
    """Operations in circuit order, each level followed by its idle qubits."""
    overrides = dict(nm.overrides)
    by_level: dict[int, list[Location]] = {}
    for pos, op in enumerate(c.ops):
        if isinstance(op, Measurement):
            p = overrides.get(pos, nm.p_measurement)
            loc = Location("measurement", op.level, op.qubits, p, pos, op.index)
        else:
            p = overrides.get(pos, nm.p_unitary)
            loc = Location("unitary", op.level, op.qubits, p, pos)
        by_level.setdefault(op.level, []).append(loc)
    out = []
    for level in range(1, c.depth + 1):
        out += by_level.get(level, [])
        out += [Location("idle", level, (q,), nm.p_idle) for q in c.idle_qubits(level)]
    return out


def _support_paulis(qubits: Sequence[int], n: int) -> list[int]:
    out = []
    for letters in itertools.product(range(4), repeat=len(qubits)):
        x = z = 0
        for q, letter in zip(qubits, letters):
            x |= (letter & 1) << q
            z |= (letter >> 1) << q
        if x | z:
            out.append(x | (z << n))
    return out


def location_events(c: Circuit, locations: Sequence[Location]) -> list[list[Event]]:
    n, depth = c.n, c.depth
    out = []
    for i, loc in enumerate(locations):
        paulis = _support_paulis(loc.qubits, n)
        flips = (False, True) if loc.kind == "measurement" else (False,)
        share = loc.p / (len(paulis) * len(flips))
        q = 0
        if loc.kind == "measurement":
            q = flip_partner(c.measurements[loc.meas_index].pauli.proj).vec
        events = []
        for flip in flips:
            for pv in paulis:
                layers = [0] * (depth + 1)
                layers[loc.level] ^= pv
                if flip:
                    layers[loc.level - 1] ^= q
                    layers[loc.level] ^= q
                events.append(Event(i, pv, flip, share, FaultOperator(n, depth, tuple(layers))))
        out.append(events)
    return out


def sample_fault(
    c: Circuit,
    nm: NoiseModel,
    rng: np.random.Generator,
    events: list[list[Event]] | None = None,
) -> tuple[FaultOperator, list[Event]]:
    """Independent faults per location; returns the product fault and the events drawn."""
    if events is None:
        events = location_events(c, fault_locations(c, nm))
    acc = FaultOperator.identity(c.n, c.depth)
    drawn = []
    for evs in events:
        if not evs or evs[0].p == 0.0:
            continue
        p_loc = evs[0].p * len(evs)
        if rng.random() < p_loc:
            ev = evs[int(rng.integers(len(evs)))]
            acc = acc * ev.fault
            drawn.append(ev)
    return acc, drawn


def simulate_outcomes(
    c: Circuit, oc: OutcomeCode, fault: FaultOperator, rng: np.random.Generator
) -> int:
    """Uniform outcome-code word, shifted by the outcome flips of ``fault``."""
    o = oc.offset()
    for v in oc.codeword_basis():
        if rng.integers(2):
            o ^= v
    return o ^ effect(c, fault).f


@dataclass(frozen=True)
class TableEntry:
    probability: float
    events: tuple[tuple[int, int], ...]  # (location, event index), sorted
    f: int
    E: int  # packed residual Pauli on the output qubits


@dataclass
class LookupDecoder:
    n: int
    depth: int
    m: int
    r: int
    max_faults: int
    table: dict[int, TableEntry]
    locations: list[Location] = field(repr=False)
    configurations: int = 0

    def lookup(self, syndrome: int) -> TableEntry | None:
        return self.table.get(syndrome)


def _better(
    cand: tuple[float, int], best: tuple[float, int], cand_key, best_key
) -> bool:
    """Higher probability wins, then fewer events, then the smaller canonical key."""
    cw, ck = cand
    bw, bk = best
    if not math.isclose(cw, bw, rel_tol=REL_TOL, abs_tol=0.0):
        return cw > bw
    if ck != bk:
        return ck < bk
    return cand_key() < best_key()


def configuration_count(events: Sequence[Sequence[Event]], max_faults: int) -> int:
    sizes = [len(evs) for evs in events if evs and evs[0].p > 0.0]
    # Elementary symmetric polynomials of the event counts.
    e = [1] + [0] * max_faults
    for s in sizes:
        for j in range(max_faults, 0, -1):
            e[j] += e[j - 1] * s
    return sum(e)


def build_lookup_decoder(
    c: Circuit,
    code: SpacetimeCode,
    nm: NoiseModel,
    max_faults: int,
    budget: int = DEFAULT_CONFIG_BUDGET,
) -> LookupDecoder:
    """Most probable configuration of at most ``max_faults`` events for every reachable syndrome."""
    if max_faults < 0:
        raise ValueError("max_faults must be non-negative")
    locations = fault_locations(c, nm)
    events = location_events(c, locations)
    total = configuration_count(events, max_faults)
    if total > budget:
        raise DecoderBudgetError(
            f"{total} fault configurations over {len(locations)} locations exceed budget {budget}"
        )
    for loc in locations:
        if loc.p >= 1.0:
            raise ValueError("lookup decoding needs every location probability below 1")
    base = math.prod(1.0 - loc.p for loc in locations)
    active = [i for i, evs in enumerate(events) if evs and evs[0].p > 0.0]
    # Per event: relative weight, syndrome, outcome flips and residual error.
    pre: dict[tuple[int, int], tuple[float, int, int, int]] = {}
    for i in active:
        ratio_den = 1.0 - locations[i].p
        for k, ev in enumerate(events[i]):
            eff = effect(c, ev.fault)
            pre[(i, k)] = (
                ev.p / ratio_den,
                syndrome_Q_bits(code, ev.fault),
                eff.f,
                eff.E.vec,
            )

    def canonical(config: tuple[tuple[int, int], ...]) -> tuple[int, str]:
        acc = FaultOperator.identity(c.n, c.depth)
        for i, k in config:
            acc = acc * events[i][k].fault
        return acc.sort_key()

    best: dict[int, tuple[float, int, tuple[tuple[int, int], ...], int, int]] = {
        0: (1.0, 0, (), 0, 0)
    }
    for size in range(1, max_faults + 1):
        for locs in itertools.combinations(active, size):
            for ks in itertools.product(*(range(len(events[i])) for i in locs)):
                config = tuple(zip(locs, ks))
                w, s, f, E = 1.0, 0, 0, 0
                for key in config:
                    pw, ps, pf, pE = pre[key]
                    w *= pw
                    s ^= ps
                    f ^= pf
                    E ^= pE
                cur = best.get(s)
                if cur is None or _better(
                    (w, size), (cur[0], cur[1]),
                    lambda: canonical(config), lambda: canonical(cur[2]),
                ):
                    best[s] = (w, size, config, f, E)
    table = {
        s: TableEntry(w * base, config, f, E) for s, (w, _, config, f, E) in best.items()
    }
    return LookupDecoder(c.n, c.depth, c.m, code.r, max_faults, table, locations, total)


@dataclass(frozen=True)
class DecodeResult:
    effect: Effect
    miss: bool


def decode(d: LookupDecoder, oc: OutcomeCode, o: int, length: int | None = None) -> DecodeResult:
    if length is not None and length != d.m:
        raise ValueError(f"outcome length {length} != {d.m}")
    if o >> d.m:
        raise ValueError(f"outcome string has bits beyond length {d.m}")
    entry = d.lookup(syndrome_bits(oc, o))
    if entry is None:
        return DecodeResult(Effect(0, ProjPauli.identity(d.n)), True)
    return DecodeResult(Effect(entry.f, ProjPauli.from_vec(d.n, entry.E)), False)


class OutputDecoder:
    """Minimum-weight decoder of the output stabilizer code by enumeration in weight order."""

    MAX_QUBITS = 12

    def __init__(self, group: OutputStabilizerGroup) -> None:
        n = group.n
        if n > self.MAX_QUBITS:
            raise ValueError(f"brute-force output decoding limited to {self.MAX_QUBITS} qubits")
        self.n = n
        self.gens = [g.proj.vec for g in group.generators]
        self.elim = gf2.Eliminator()
        for g in self.gens:
            self.elim.add(g)
        self.table: dict[int, int] = {}
        target = 1 << gf2.rank(self.gens)
        for w in range(n + 1):
            for qubits in itertools.combinations(range(n), w):
                for v in _support_paulis(qubits, n) if w else [0]:
                    s = self.syndrome(v)
                    if s not in self.table:
                        self.table[s] = v
            if len(self.table) == target:
                break

    def syndrome(self, v: int) -> int:
        s = 0
        for i, g in enumerate(self.gens):
            if form(v, g, self.n):
                s |= 1 << i
        return s

    def correctable(self, residual: int) -> bool:
        correction = self.table[self.syndrome(residual)]
        return self.elim.contains(correction ^ residual)


def is_success(
    c: Circuit,
    out_group: OutputStabilizerGroup,
    fault: FaultOperator,
    est: Effect,
    output_decoder: OutputDecoder | None = None,
) -> bool:
    true = effect(c, fault)
    if est.f != true.f:
        return False
    dec = output_decoder if output_decoder is not None else OutputDecoder(out_group)
    return dec.correctable(est.E.vec ^ true.E.vec)


@dataclass
class TrialReport:
    trials: int
    successes: int
    outcome_failures: int
    residual_failures: int
    misses: int
    seed: int
    max_faults: int
    p: float | None = None

    @property
    def failures(self) -> int:
        return self.outcome_failures + self.residual_failures

    def to_json(self) -> dict:
        rate = self.failures / self.trials if self.trials else 0.0
        if self.trials:
            ci = binomtest(self.failures, self.trials).proportion_ci(0.95, method="wilson")
            ci95 = [float(ci.low), float(ci.high)]
        else:
            ci95 = [0.0, 1.0]
        return {
            "schema_version": SCHEMA_VERSION,
            "trials": self.trials,
            "failures": self.failures,
            "outcome_failures": self.outcome_failures,
            "residual_failures": self.residual_failures,
            "successes": self.successes,
            "misses": self.misses,
            "rate": rate,
            "ci95": ci95,
            "seed": self.seed,
            "M_f": self.max_faults,
            "p": self.p,
        }


def monte_carlo(
    c: Circuit,
    oc: OutcomeCode,
    out_group: OutputStabilizerGroup,
    nm: NoiseModel,
    d: LookupDecoder,
    trials: int,
    seed: int,
) -> TrialReport:
    """Sample, decode and score ``trials`` runs; trial ``t`` uses the stream ``(seed, t)``."""
    events = location_events(c, fault_locations(c, nm))
    out_dec = OutputDecoder(out_group)
    report = TrialReport(trials, 0, 0, 0, 0, seed, d.max_faults)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        fault, _ = sample_fault(c, nm, rng, events)
        o = simulate_outcomes(c, oc, fault, rng)
        res = decode(d, oc, o)
        report.misses += res.miss
        true = effect(c, fault)
        if res.effect.f != true.f:
            report.outcome_failures += 1
        elif out_dec.correctable(res.effect.E.vec ^ true.E.vec):
            report.successes += 1
        else:
            report.residual_failures += 1
    return report


_MAGIC = b"STLUT"
_TABLE_VERSION = 1


def dump_table(d: LookupDecoder) -> bytes:
    """Binary table: header, then per syndrome its bits, probability and event list."""
    nbytes = (d.r + 7) // 8
    out = [_MAGIC, struct.pack("<HIIII", _TABLE_VERSION, d.n, d.depth, d.r, len(d.table))]
    for s in sorted(d.table):
        e = d.table[s]
        out.append(s.to_bytes(nbytes, "little"))
        out.append(struct.pack("<dH", e.probability, len(e.events)))
        for loc, k in e.events:
            out.append(struct.pack("<II", loc, k))
    return b"".join(out)


def load_table(data: bytes) -> tuple[dict, dict[int, tuple[float, tuple[tuple[int, int], ...]]]]:
    if not data.startswith(_MAGIC):
        raise ValueError("not a lookup table dump")
    pos = len(_MAGIC)
    version, n, depth, r, count = struct.unpack_from("<HIIII", data, pos)
    if version != _TABLE_VERSION:
        raise ValueError(f"unsupported table version {version}")
    pos += struct.calcsize("<HIIII")
    nbytes = (r + 7) // 8
    entries = {}
    for _ in range(count):
        s = int.from_bytes(data[pos : pos + nbytes], "little")
        pos += nbytes
        prob, k = struct.unpack_from("<dH", data, pos)
        pos += struct.calcsize("<dH")
        evs = []
        for _ in range(k):
            evs.append(struct.unpack_from("<II", data, pos))
            pos += 8
        entries[s] = (prob, tuple(evs))
    header = {"version": version, "n": n, "depth": depth, "r": r}
    return header, entries


def decoder_json(d: LookupDecoder, events: list[list[Event]]) -> str:
    rows = []
    for s in sorted(d.table):
        e = d.table[s]
        rows.append({
            "syndrome": gf2.to_bitstring(s, d.r),
            "probability": e.probability,
            "events": [
                {"location": loc, "event": events[loc][k].describe(d.n)} for loc, k in e.events
            ],
        })
    return json.dumps({"schema_version": SCHEMA_VERSION, "entries": rows}, indent=2)
