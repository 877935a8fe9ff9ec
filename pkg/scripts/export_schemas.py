#!/usr/bin/env python3
"""Regenerate the JSON schema files in schemas/ from the pydantic models."""

import json
from pathlib import Path

from telewalk.config import ScenarioConfig
from telewalk.service.wire import WireStateSnapshot, command_json_schema


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "schemas"
    out.mkdir(exist_ok=True)
    targets = {
        "scenario_config.schema.json": ScenarioConfig.model_json_schema(),
        "wire_command.schema.json": command_json_schema(),
        "wire_snapshot.schema.json": WireStateSnapshot.model_json_schema(),
    }
    for name, schema in targets.items():
        path = out / name
        path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
