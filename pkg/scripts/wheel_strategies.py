#!/usr/bin/env python3
"""Compare diversification policies on the bundled wheel instances.

For each wheel this prints the expected completion time of: the two natural
fixed orders (crawl the ring / grab the hub first), the myopic best-probability
policy, shallow lookahead, and the exact subset-DP optimum. On the 5-spoke
wheel greedy already finds the optimal plan; the 7-spoke wheel is the smallest
ring size where the myopic policy is strictly suboptimal — the optimal plan
enters the hub early at entry probability 2/7.

Usage: python scripts/wheel_strategies.py [instance.json ...]
"""
import argparse
import json
from fractions import Fraction
from pathlib import Path

from ecp import Policy, expected_completion, load_instance

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def ring_order(nodes: list[str], active: frozenset) -> tuple[str, ...]:
    """Ring spokes in id order, hub last — the pure related-first crawl."""
    spokes = [n for n in nodes if n != "hub" and n not in active]
    return tuple(sorted(spokes)) + ("hub",)


def hub_first(nodes: list[str], active: frozenset) -> tuple[str, ...]:
    spokes = [n for n in nodes if n != "hub" and n not in active]
    return ("hub",) + tuple(sorted(spokes))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("instances", nargs="*", type=Path,
                    default=[FIXTURES / "wheel5.json", FIXTURES / "wheel7.json"])
    args = ap.parse_args()

    for path in args.instances:
        g, active, _, _ = load_instance(path.read_text(encoding="utf-8"))
        print(f"\n{path.name}: {len(g.nodes)} nodes, active = {sorted(active)}")
        rows = []
        if "hub" in g.nodes:
            rows.append(("order: ring then hub",
                         Policy("order", order=ring_order(list(g.nodes), active))))
            rows.append(("order: hub first",
                         Policy("order", order=hub_first(list(g.nodes), active))))
        rows.append(("greedy", Policy("greedy")))
        rows.append(("lookahead:2", Policy("lookahead", depth=2)))
        rows.append(("optimal (exact DP)", Policy("optimal")))

        for label, policy in rows:
            ev = expected_completion(g, active, policy)
            frac = Fraction(ev.expected_time).limit_denominator(10**6)
            print(f"  {label:24s} E = {ev.expected_time:10.6f}  ({frac})  "
                  f"plan: {' -> '.join(ev.plan)}")


if __name__ == "__main__":
    main()
