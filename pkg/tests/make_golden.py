"""Regenerate the golden files: python tests/make_golden.py"""

import json
from pathlib import Path

from potent_split import FieldSpec
from potent_split.oracle import enumerate_p_potents, exhaustive_sweep, sharpness_scan

GOLDEN = Path(__file__).parent / "golden"


def p_potent_counts() -> dict:
    cases = [(FieldSpec(3), 1), (FieldSpec(3), 2), (FieldSpec(3), 3), (FieldSpec(5), 2), (FieldSpec(3, 2), 2)]
    return {
        "counts": [
            {"field": f.to_json(), "n": n, "count": sum(1 for _ in enumerate_p_potents(n, f))}
            for f, n in cases
        ]
    }


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    outputs = {
        "p_potent_counts.json": p_potent_counts(),
        "sharpness_f3.json": sharpness_scan().to_json(),
        "sweep_f3_n3.json": exhaustive_sweep(3, FieldSpec(3)).to_json(),
        "sweep_f9_n2.json": exhaustive_sweep(2, FieldSpec(3, 2)).to_json(),
    }
    for name, obj in outputs.items():
        (GOLDEN / name).write_text(json.dumps(obj, indent=2) + "\n")
        print("wrote", name)


if __name__ == "__main__":
    main()
