#!/usr/bin/env python3
# Copyright 2026 The allocdp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Runs the CLI on a few queries and validates its JSON against schemas/.

Usage: validate_json.py <allocdp binary> <schema dir>
"""

import json
import pathlib
import subprocess
import sys

import jsonschema

CASES = [
    ("query", ["epsilon", "--sigma", "1", "--t", "10000", "--k", "1",
               "--delta", "1e-8"]),
    ("query", ["epsilon", "--scheme", "poisson", "--sigma", "2", "--t", "100",
               "--delta", "1e-6", "--direction", "remove"]),
    ("query", ["epsilon", "--scheme", "local", "--sigma", "1", "--t", "1",
               "--delta", "1e-6"]),
    ("query", ["delta", "--sigma", "1", "--t", "100", "--epsilon", "1",
               "--methods", "decomposition,direct_rdp"]),
    ("query", ["delta", "--sigma", "2", "--t", "64", "--epochs", "4",
               "--epsilon", "0.5"]),
    ("mc", ["mc", "--sigma", "1", "--t", "1", "--epsilon", "1", "--n", "2000",
            "--seed", "3"]),
    ("mc", ["mc", "--sigma", "1", "--t", "8", "--epsilon", "1", "--n", "2000",
            "--direction", "add"]),
]


def main(argv):
  if len(argv) != 3:
    print(__doc__, file=sys.stderr)
    return 2
  binary, schema_dir = argv[1], pathlib.Path(argv[2])
  schemas = {}
  for name in ("query", "mc"):
    schema = json.loads((schema_dir / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    schemas[name] = jsonschema.Draft202012Validator(schema)

  failures = 0
  for name, args in CASES:
    proc = subprocess.run([binary, *args], capture_output=True, text=True,
                          check=False)
    label = " ".join(args)
    if proc.returncode != 0:
      print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
      failures += 1
      continue
    doc = json.loads(proc.stdout)
    errors = sorted(schemas[name].iter_errors(doc), key=str)
    # Round trip: re-serialising must give the same document.
    if json.loads(json.dumps(doc)) != doc:
      errors.append("round trip changed the document")
    if errors:
      failures += 1
      for e in errors:
        print(f"FAIL {label}: {getattr(e, 'message', e)}")
    else:
      print(f"ok   {label}")
  return 1 if failures else 0


if __name__ == "__main__":
  sys.exit(main(sys.argv))
