"""Outcome counts for over-threshold and bounded adversaries across seeds."""

import argparse
from collections import Counter

from mpqc_sim.adversary import Hook, OverThreshold, PauliInjector
from mpqc_sim.engine import mpqc_run

HOOKS = tuple(h.value for h in Hook if h != Hook.PRE_BROADCAST)
ROLES = ("data", "check_x", "check_z", "plus")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--codes", default="steane_7,qrm_15")
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--circuit", default="CX 0 1;H 2", help="semicolon-separated gates")
    args = p.parse_args()

    circuit = [g.strip() for g in args.circuit.split(";") if g.strip()]
    adversaries = {
        "over_threshold": OverThreshold().to_json(),
        "bounded_random": PauliInjector(hooks=HOOKS, roles=ROLES, pauli="random", count=2, once=False).to_json(),
    }
    for name in args.codes.split(","):
        for label, adv in adversaries.items():
            counts, sizes = Counter(), Counter()
            for seed in range(args.seeds):
                tr = mpqc_run({"code": name, "seed": seed, "circuit": circuit, "adversary": adv})
                counts[tr.outcome] += 1
                sizes[len(tr.cheaters["B"])] += 1
            print(f"{name:9s} {label:15s} outcomes {dict(counts)}  |B| histogram {dict(sorted(sizes.items()))}")


if __name__ == "__main__":
    main()
