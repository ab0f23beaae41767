"""Validates every registry scenario and test fixture against the scenario schema."""

import json
import subprocess
import sys

import jsonschema

exe, schema_path, *fixtures = sys.argv[1:]
with open(schema_path) as f:
    schema = json.load(f)
validator = jsonschema.Draft202012Validator(schema)

names = [line.split()[0] for line in subprocess.run([exe, "scenario", "list"], check=True, capture_output=True,
                                                    text=True).stdout.splitlines() if line.strip()]
docs = {n: json.loads(subprocess.run([exe, "scenario", "show", n], check=True, capture_output=True,
                                     text=True).stdout) for n in names}
for path in fixtures:
    with open(path) as f:
        docs[path] = json.load(f)

bad = 0
for name, doc in docs.items():
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    for e in errors[:3]:
        print(f"{name}: {'/'.join(map(str, e.path))}: {e.message[:200]}")
    bad += bool(errors)
print(f"{len(docs) - bad}/{len(docs)} documents valid")
sys.exit(1 if bad else 0)
