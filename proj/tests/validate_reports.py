"""Run every seqeff subcommand with --format json and validate against the report schema."""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema

seqeff, schema_path, programs = str(Path(sys.argv[1]).resolve()), Path(sys.argv[2]), Path(sys.argv[3])
schema = json.loads(schema_path.read_text())
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

cases = [
    (["check", "checked_exception.seq", "--alphabet", "a,b,d,g", "--bind", "c=true"], 0),
    (["check", "self_loop.seq", "--alphabet", "a,b"], 0),
    (["check", "self_loop_extra_event.seq", "--alphabet", "a,b"], 1),
    (["check", "ill_typed_abort.seq", "--alphabet", "a,b,g"], 1),
    (["check", "broken.seq", "--alphabet", "a"], 2),
    (["check", "checked_exception.seq"], 3),
    (["expand", "loop.seq", "--alphabet", "a"], 0),
    (["run", "while.seq", "--alphabet", "c,e"], 0),
    (["run", "generator.seq", "--alphabet", "a"], 0),
    (["audit", "loop.seq", "--alphabet", "a", "--fuel", "50"], 0),
    (["audit", "--fuzz", "20", "--alphabet", "a,b,c", "--fuel", "200"], 0),
    (["derive", "while_derive.seq", "--alphabet", "c,e", "--assume", "b=bool"], 0),
    (["derive", "try.seq", "--alphabet", "a,b,c,g", "--assume", "b=bool"], 0),
    (["derive", "while.seq", "--alphabet", "c,e"], 1),
    (["laws", "--alphabet", "a,b", "--samples", "20", "--ce-samples", "10", "--iter-samples", "5"], 0),
    (["laws", "--quantale", "labels", "--labels", "x,y", "--samples", "20", "--ce-samples", "10",
      "--iter-samples", "5"], 0),
]

failures = 0
for args, want in cases:
    proc = subprocess.run([seqeff, *args, "--format", "json"], cwd=programs, capture_output=True, text=True)
    label = " ".join(args)
    if proc.returncode != want:
        print(f"FAIL {label}: exit {proc.returncode}, expected {want}\n{proc.stdout}{proc.stderr}")
        failures += 1
        continue
    if want == 3:
        print(f"ok   {label}")
        continue
    try:
        validator.validate(json.loads(proc.stdout))
        print(f"ok   {label}")
    except (json.JSONDecodeError, jsonschema.ValidationError) as e:
        print(f"FAIL {label}: {e}")
        failures += 1
sys.exit(1 if failures else 0)
