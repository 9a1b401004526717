"""
@file replay_manifest.py

Re-runs the command recorded in a manifest sidecar so its outputs are rewritten from the same
overrides and seed

Usage: python3 scripts/replay_manifest.py experiments/test/eval_meander-limit.csv.manifest.json
"""
import os
import sys
import shlex

sys.path.append(os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))
from utils.utils import RunManifest


if __name__ == '__main__':
    if len(sys.argv) != 2:
        print("=> usage: replay_manifest.py <file>.manifest.json")
        sys.exit(2)

    manifest = RunManifest.load(sys.argv[1])
    print(f"=> replaying {manifest.command} (seed {manifest.seed}, version {manifest.version})")
    for output in manifest.outputs:
        print(f"=> output: {output}")

    root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..")
    command = " ".join(shlex.quote(override) for override in manifest.overrides)
    sys.exit(os.WEXITSTATUS(os.system(f"cd {shlex.quote(root)} && python3 main.py {command}")))
