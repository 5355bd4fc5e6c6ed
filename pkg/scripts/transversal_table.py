"""Statevector table of transversal single- and two-qubit gates for the catalog codes."""

from mpqc_sim.css import CATALOG, GateId, get_code, transversal_gate_set
from mpqc_sim.statevector import check_transversal_action


def main() -> None:
    print(f"{'code':10s} {'gate':5s} {'advertised':10s} {'leakage':>10s}  induced  method")
    for name in CATALOG:
        code = get_code(name)
        adv = transversal_gate_set(code)
        for g in (GateId.H, GateId.P, GateId.T, GateId.CX):
            rep = check_transversal_action(code, g)
            print(f"{name:10s} {g.value:5s} {str(g in adv):10s} {rep.leakage:10.3e}  "
                  f"{str(rep.induced_logical):7s}  {rep.method}")


if __name__ == "__main__":
    main()
