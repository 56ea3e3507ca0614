"""Failure analysis of the lookup decoder on the two-round repetition-code circuit.

Lists every single elementary fault the decoder does not recover, grouped by
location and failure kind, and shows the competing table entry for each.
"""

import argparse
from collections import Counter

from spacetime.gf2 import to_bitstring
from spacetime.decode import (
    NoiseModel,
    OutputDecoder,
    build_lookup_decoder,
    location_events,
    monte_carlo,
)
from spacetime.families import repetition_code_circuit
from spacetime.outcome import compute_outcome_code, linearize
from spacetime.propagation import effect
from spacetime.spacetime_code import build_spacetime_code, syndrome_Q_bits


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=1e-3)
    ap.add_argument("--max-faults", type=int, default=2)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1234)
    ap.add_argument("--verbose", action="store_true", help="print every failing event")
    args = ap.parse_args()

    c = linearize(repetition_code_circuit())
    oc, group = compute_outcome_code(c)
    code = build_spacetime_code(c, oc)
    nm = NoiseModel.uniform(args.p)
    d = build_lookup_decoder(c, code, nm, args.max_faults)
    events = location_events(c, d.locations)
    dec = OutputDecoder(group)
    print(f"n={c.n} depth={c.depth} m={c.m} k={oc.k} r={code.r} locations={len(d.locations)}")
    print(f"table entries={len(d.table)} configurations={d.configurations}")

    kinds: Counter = Counter()
    total = 0
    for evs in events:
        for ev in evs:
            total += 1
            loc = d.locations[ev.location]
            true = effect(c, ev.fault)
            entry = d.table[syndrome_Q_bits(code, ev.fault)]
            if entry.f != true.f:
                kind = "outcome"
            elif not dec.correctable(entry.E ^ true.E.vec):
                kind = "residual"
            else:
                continue
            kinds[(loc.kind, loc.level, loc.qubits, kind)] += 1
            if args.verbose:
                guess = " ".join(events[i][k].describe(c.n) + f"@{i}" for i, k in entry.events) or "I"
                print(f"  {loc.kind} L{loc.level} {loc.qubits} {ev.describe(c.n)}: {kind} failure, "
                      f"f={to_bitstring(true.f, c.m)} decoded as {guess}")
    failed = sum(kinds.values())
    print(f"single events recovered: {total - failed}/{total}")
    for (kind, level, qubits, how), n in sorted(kinds.items()):
        print(f"  {kind:<11} level {level} qubits {qubits}: {n} {how} failures")

    rep = monte_carlo(c, oc, group, nm, d, args.trials, args.seed)
    print(f"monte carlo: {rep.to_json()}")


if __name__ == "__main__":
    main()
