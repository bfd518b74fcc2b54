#!/usr/bin/env python3
"""End-to-end cooling of the T = 3 circuit Hamiltonian via the CLI.

Runs the recorded descend scenario (``scripts/configs/clock_cooling_t3.json``)
from the maximally mixed state and reports the terminal ground overlap.
This is the long-running qualitative check; expect a few minutes.
"""

import argparse
import json
from pathlib import Path

from thermal_landscape import cli

CONFIG = Path(__file__).resolve().parent / "configs" / "clock_cooling_t3.json"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="clock_cooling_trace.json")
    args = parser.parse_args()
    code, result = cli.run("descend", str(CONFIG), output_override=args.output)
    if code != 0:
        raise SystemExit(code)
    terminal = result["terminal"]
    print(json.dumps({
        "steps": len(result["steps"]),
        "terminal_energy": terminal.get("energy"),
        "ground_overlap": terminal.get("ground_overlap"),
        "certificate": terminal.get("certificate", {}).get("kind"),
    }, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
