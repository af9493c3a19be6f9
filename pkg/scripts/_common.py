"""Shared helper for the experiment scripts: write a config, run the CLI."""

import argparse
import json
import sys
from pathlib import Path

from b4nls.cli import main as cli_main


def run(kind: str, config: dict, description: str) -> int:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--out", default=f"runs/{kind}", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override random seeds")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "input_config.json"
    cfg_path.write_text(json.dumps(config, indent=2) + "\n")

    argv = []
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    argv += [kind, "--config", str(cfg_path), "--out", str(out)]
    code = cli_main(argv)

    manifest = json.loads((out / "manifest.json").read_text())
    print(f"status: {manifest['status']}  wall time: {manifest['wall_time_s']}s")
    for name in sorted(manifest["files"]):
        print(f"  {out / name}")
    if manifest["error"]:
        print(f"  error: {manifest['error']}", file=sys.stderr)
    return code
