"""Write a synthetic input set and run configuration for the gnarx command.

    python3 scripts/make_demo.py demo && gnarx forecast --config demo/config.json --out demo/out
"""

import argparse
import json

from gnarx.experiments import write_demo_inputs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory")
    ap.add_argument("--T", type=int, default=160)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print(json.dumps(write_demo_inputs(args.directory, args.T, args.seed), indent=2))


if __name__ == "__main__":
    main()
