# Copyright 2026 The Tradeoff Forge Authors
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

"""Runs every CLI subcommand and validates its emissions against docs/schema.json."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

PREFIX = "# manifest: "


def run(cli, args, cwd, expect=0):
    proc = subprocess.run([cli, *args], cwd=cwd, capture_output=True, text=True)
    if proc.returncode != expect:
        sys.exit(f"{' '.join(args)}: exit {proc.returncode}, expected {expect}\n{proc.stderr}")
    return proc.stdout


def main():
    cli = sys.argv[1]
    root = pathlib.Path(sys.argv[2])
    schema = json.loads((root / "docs" / "schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    manifest_validator = jsonschema.Draft202012Validator({"$defs": schema["$defs"], "$ref": "#/$defs/manifest"})

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        cases = [
            ["curve", "--preset", "fig4"],
            ["curve", "--preset", "fig5", "--alpha", "0.3"],
            ["curve", "--config", "configs/small4.json"],
            ["query", "--preset", "fig4", "--pth", "3"],
            ["query", "--preset", "fig4", "--pth", "100"],
            ["query", "--config", "configs/fig4_query.json"],
            ["relax", "--preset", "fig4", "--eta", "3"],
            ["relax", "--preset", "fig4", "--eta", "3", "--mode", "backup"],
            ["lp", "--preset", "fig4", "--pth", "3", "--export", str(tmp / "fig4.lp")],
            ["enumerate", "--preset", "fig4", "--cloud", str(tmp / "cloud.csv")],
            ["simulate", "--config", "configs/fig4_simulate.json", "--slots", "20000"],
        ]
        emitted = 0
        for args in cases:
            doc = json.loads(run(cli, args, root))
            validator.validate(doc)
            emitted += 1
            out = tmp / "out.json"
            run(cli, [*args, "--out", str(out)], root)
            validator.validate(json.loads(out.read_text()))
            emitted += 1

        doc = json.loads(run(cli, ["lp", "--preset", "fig4", "--pth", "0"], root, expect=3))
        validator.validate(doc)
        emitted += 1

        csv_cases = [
            ["curve", "--preset", "fig4", "--format", "csv"],
            ["enumerate", "--preset", "fig4", "--format", "csv"],
            ["query", "--preset", "fig4", "--pth", "3", "--format", "csv"],
        ]
        for args in csv_cases:
            first = run(cli, args, root).splitlines()[0]
            if not first.startswith(PREFIX):
                sys.exit(f"{' '.join(args)}: missing manifest line")
            manifest_validator.validate(json.loads(first[len(PREFIX):]))
            emitted += 1
        for path in [tmp / "cloud.csv"]:
            first = path.read_text().splitlines()[0]
            manifest_validator.validate(json.loads(first[len(PREFIX):]))
            emitted += 1

    print(f"{emitted} emissions valid")


if __name__ == "__main__":
    main()
