"""Record real service responses as JSON fixtures for the workbench tests.

Run from the repository root:

    python3 frontend/scripts/record_fixtures.py

The script generates the benchmark dataset, trains the reference model with
the pinned seeds, then replays a handful of representative requests against
the live FastAPI app and freezes each request/response pair under
frontend/tests/fixtures/.  Every fixture is checked for the property the
workbench test that consumes it relies on, so a stale or broken recording
fails loudly here instead of silently weakening the UI suite.
"""

from __future__ import annotations

import json
import math
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from pointref.cli import main as cli_main
from pointref.reasoner import load_params
from pointref.service import create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

GEN_ARGS = [
    "gen", "--train", "500", "--val", "100", "--generalization", "100",
    "--seed", "42",
]
TRAIN_ARGS = ["train", "--epochs", "30", "--lr", "0.05", "--seed", "7"]


def train_reference_model(workdir: Path):
    data_dir = workdir / "data"
    params_path = workdir / "params.json"
    cli_main(GEN_ARGS + ["--out", str(data_dir)])
    cli_main(TRAIN_ARGS + ["--data", str(data_dir), "--out", str(params_path)])
    return load_params(params_path)


def record(client: TestClient, name: str, method: str, path: str, body=None):
    if method == "GET":
        http = client.get(path)
    else:
        http = client.post(path, json=body)
    fixture = {
        "name": name,
        "request": {"method": method, "path": path, "body": body},
        "status": http.status_code,
        "response": http.json(),
    }
    out = FIXTURE_DIR / f"{name}.json"
    out.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
    print(f"recorded {out.relative_to(FIXTURE_DIR.parent.parent)} (status {http.status_code})")
    return fixture


def obj(oid, x, y, name, color, shape, size):
    return {
        "id": oid,
        "position": [x, y, 0.0],
        "name": name,
        "color": color,
        "shape": shape,
        "size": size,
    }


USER = {"head_position": [0.0, 0.0, 1.6], "forward": [1.0, 0.0]}

# Two tool/clipper pairs plus a filler, so the demonstrative is the only
# signal that picks a pair.  Each clipper sits within the near threshold of
# its own tool and far from the other pair.
DEICTIC_SCENE = {
    "user": USER,
    "objects": [
        obj("tool-a", 1.2, 0.9, "tool", "red", "long", "small"),
        obj("clip-a", 1.5, 1.1, "clipper", "black", "flat", "small"),
        obj("tool-b", 2.8, -0.9, "tool", "blue", "long", "small"),
        obj("clip-b", 3.1, -0.7, "clipper", "black", "flat", "small"),
        obj("drill-c", 2.0, 0.1, "drill", "yellow", "angular", "big"),
    ],
}
DEICTIC_INSTRUCTION = "pick up the black clipper beside this tool"

RELATION_SCENE = {
    "user": USER,
    "objects": [
        obj("ball-anchor", 1.0, 0.0, "ball", "red", "round", "small"),
        obj("cube-goal", 1.2, 0.0, "cube", "blue", "square", "small"),
        obj("cube-decoy", 3.5, 0.0, "cube", "blue", "square", "small"),
    ],
}
RELATION_INSTRUCTION = "pick up the cube near the ball"


def check(cond: bool, message: str) -> None:
    if not cond:
        raise AssertionError(f"fixture check failed: {message}")


def main() -> int:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        params = train_reference_model(Path(tmp))
    client = TestClient(create_app(params=params))

    record(client, "health", "GET", "/api/health")
    vocab = record(client, "vocab", "GET", "/api/vocab")
    check(vocab["status"] == 200, "vocab should be 200")
    for key in ("name", "color", "shape", "size", "relation", "demonstrative"):
        check(key in vocab["response"], f"vocab is missing the {key} category")

    parse = record(client, "parse-flagship", "POST", "/api/parse",
                   {"instruction": DEICTIC_INSTRUCTION})
    check(parse["status"] == 200, "flagship parse should succeed")
    kinds = [s["kind"] for s in parse["response"]["steps"]]
    check(kinds == ["demonstrative", "name", "relation", "color", "name"],
          f"flagship program shape changed: {kinds}")

    error = record(client, "error-unparseable", "POST", "/api/parse",
                   {"instruction": "dance with the cube"})
    check(error["status"] == 422, "unparseable instruction should be 422")
    check(isinstance(error["response"]["detail"], str) and error["response"]["detail"],
          "error detail should be a human-readable string")

    # Blind first: with no gesture the two pairs are symmetric and the model
    # settles on one clipper; the click then points at the OTHER pair's tool,
    # so the two recorded predictions must differ.
    blind_body = {
        "scene": DEICTIC_SCENE,
        "instruction": DEICTIC_INSTRUCTION,
        "options": {"no_gesture": True, "trace": True},
    }
    blind = record(client, "reason-deictic-blind", "POST", "/api/reason", blind_body)
    check(blind["status"] == 200, "blind deictic request should succeed")
    blind_pred = blind["response"]["prediction"]
    check(blind_pred in ("clip-a", "clip-b"), f"blind pick should be a clipper, got {blind_pred}")
    check(blind["response"]["pointing"] is None, "no_gesture should null out pointing")

    other_pair = {"clip-a": ("tool-b", "clip-b"), "clip-b": ("tool-a", "clip-a")}
    click_tool, expect_clip = other_pair[blind_pred]
    tool_xy = next(o for o in DEICTIC_SCENE["objects"] if o["id"] == click_tool)["position"]
    pointed_body = {
        "scene": DEICTIC_SCENE,
        "instruction": DEICTIC_INSTRUCTION,
        "pointing": {"x": tool_xy[0], "y": tool_xy[1]},
        "options": {"trace": True},
    }
    pointed = record(client, "reason-deictic-pointed", "POST", "/api/reason", pointed_body)
    check(pointed["status"] == 200, "pointed deictic request should succeed")
    check(pointed["response"]["pointing"]["detected"], "click should register as detected")
    check(pointed["response"]["prediction"] == expect_clip,
          f"pointing at {click_tool} should select {expect_clip}, "
          f"got {pointed['response']['prediction']}")
    check(pointed["response"]["prediction"] != blind_pred,
          "gesture must change the prediction on the deictic scene")

    relation_body = {
        "scene": RELATION_SCENE,
        "instruction": RELATION_INSTRUCTION,
        "options": {"no_gesture": True, "trace": True},
    }
    relation = record(client, "reason-relation-trace", "POST", "/api/reason", relation_body)
    check(relation["status"] == 200, "relation request should succeed")
    resp = relation["response"]
    check(resp["prediction"] == "cube-goal",
          f"relation scene should resolve to cube-goal, got {resp['prediction']}")
    ids = resp["object_ids"]
    trace = resp["trace"]
    steps = [e["step"]["kind"] for e in trace]
    check("relation" in steps, f"trace should contain a relation step, got {steps}")
    k = steps.index("relation")
    before = trace[k - 1]["p"] if k > 0 else resp["initial_p"]
    after = trace[k]["p"]
    anchor = ids[max(range(len(ids)), key=lambda i: before[i])]
    check(anchor == "ball-anchor", f"mass should sit on the anchor before the hop, got {anchor}")
    ia, ig = ids.index("ball-anchor"), ids.index("cube-goal")
    check(after[ig] > before[ig] and after[ia] < before[ia],
          "the relation step should move mass from the anchor to the goal")
    pa = next(o["position"] for o in RELATION_SCENE["objects"] if o["id"] == "ball-anchor")
    pg = next(o["position"] for o in RELATION_SCENE["objects"] if o["id"] == "cube-goal")
    check(math.dist(pa[:2], pg[:2]) <= 3.0,
          "anchor and goal must be close enough to share a graph edge")

    print("all fixture checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
