"""Validate a JSON document against one of the shipped schemas."""
import json
import pathlib
import sys

from jsonschema import Draft202012Validator
from referencing import Registry, Resource


def main() -> int:
    schema_dir = pathlib.Path(sys.argv[1])
    schema_name, document = sys.argv[2], pathlib.Path(sys.argv[3])
    registry = Registry()
    for path in schema_dir.glob("*.schema.json"):
        registry = registry.with_resource(path.name, Resource.from_contents(json.loads(path.read_text())))
    schema = json.loads((schema_dir / schema_name).read_text())
    validator = Draft202012Validator(schema, registry=registry)
    errors = sorted(validator.iter_errors(json.loads(document.read_text())), key=lambda e: list(e.path))
    for e in errors:
        print(f"{document}: {'/'.join(map(str, e.path))}: {e.message}")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
