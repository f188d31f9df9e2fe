"""Named example graphs shipped as JSON documents.

``four_vertex`` is the four-vertex example with vertices u, v, w, x whose
dominant KMS_1 state is (3, 1, 12, 8)/24; ``uvw`` is its quotient by
the hereditary vertex x; ``critical_upstream`` has the same shape but a critical
upstream component.  Run ``python -m kgkms.fixtures`` to regenerate the
JSON files.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .skeleton import Skeleton, validate

FOUR_VERTEX = (
    [[2, 6, 1, 0], [0, 0, 0, 1], [0, 0, 0, 12], [0, 0, 0, 8]],
    [[6, 18, 0, 0], [0, 0, 1, 0], [0, 0, 0, 18], [0, 0, 0, 12]],
)
CRITICAL_UPSTREAM = (
    [[8, 12, 1, 0], [0, 0, 0, 1], [0, 0, 0, 6], [0, 0, 0, 2]],
    [[12, 18, 0, 0], [0, 0, 1, 0], [0, 0, 0, 18], [0, 0, 0, 6]],
)

SKELETONS = {
    "four_vertex": {"k": 2, "vertices": list("uvwx"), "matrices": [list(m) for m in FOUR_VERTEX]},
    "uvw": {"k": 2, "vertices": list("uvw"),
                "matrices": [[row[:3] for row in m[:3]] for m in FOUR_VERTEX]},
    "critical_upstream": {"k": 2, "vertices": list("uvwx"), "matrices": [list(m) for m in CRITICAL_UPSTREAM]},
    # upstream loop vertex a feeding a dominant hereditary loop vertex b
    "dumbbell": {"k": 2, "vertices": ["a", "b"], "matrices": [[[2, 1], [0, 3]], [[3, 1], [0, 4]]]},
    "single_vertex": {"k": 2, "vertices": ["v"], "matrices": [[[2]], [[3]]]},
    "three_component": {"k": 2, "vertices": ["a", "b", "c"],
                        "matrices": [[[2, 1, 0], [0, 3, 1], [0, 0, 4]], [[3, 1, 0], [0, 4, 1], [0, 0, 5]]]},
    "non_commuting": {"k": 2, "vertices": ["a", "b"], "matrices": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]},
}

CONCRETE = ("four_vertex", "uvw")


def skeleton(name: str) -> Skeleton:
    return validate(SKELETONS[name])


def _dir() -> Path:
    return Path(str(resources.files("kgkms") / "fixtures"))


def path(name: str) -> Path:
    """JSON file for ``name``; concrete graphs are ``<name>_concrete``."""
    return _dir() / f"{name}.json"


def load_raw(name: str) -> dict:
    with open(path(name), encoding="utf-8") as fh:
        return json.load(fh)


def concrete(name: str):
    from . import path2
    return path2.parse(load_raw(f"{name}_concrete"))


def write_all(directory: Path | None = None) -> list[Path]:
    from . import path2
    directory = Path(directory) if directory is not None else _dir()
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name, raw in SKELETONS.items():
        p = directory / f"{name}.json"
        p.write_text(json.dumps(raw, indent=1) + "\n", encoding="utf-8")
        out.append(p)
    for name in CONCRETE:
        g = path2.squares_from_skeleton(skeleton(name))
        doc = {"k": 2, "matrices": SKELETONS[name]["matrices"], **g.to_dict()}
        p = directory / f"{name}_concrete.json"
        p.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
        out.append(p)
    return out


if __name__ == "__main__":
    for p in write_all():
        print(p)
