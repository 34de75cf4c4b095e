"""Smoke test for the Python bindings.

Build the extension first:

    cargo build -p smoothbench-py --release --features extension-module

The module is loaded straight from target/release; set SMOOTHBENCH_PY_LIB
to use another build.
"""

import importlib.machinery
import importlib.util
import json
import os
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    default = ROOT / "target" / "release" / "libsmoothbench_py.so"
    path = pathlib.Path(os.environ.get("SMOOTHBENCH_PY_LIB", default))
    loader = importlib.machinery.ExtensionFileLoader("smoothbench_py", str(path))
    spec = importlib.util.spec_from_loader("smoothbench_py", loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def graph(universe, edges):
    return json.dumps({
        "signature": [{"name": "E", "arity": 2, "language": "L", "shape": "set"}],
        "universe": universe,
        "relations": {"E": edges},
    })


def main():
    sb = load()

    graphs = sb.ClassSpec("all_graphs")
    path = sb.Structure.from_json(graph([0, 1, 2], [[0, 1], [1, 2]]))
    assert graphs.contains(path) and path.size == 3
    assert path.holds("E", [1, 0]) and not path.holds("E", [0, 2])
    assert sb.Structure.from_json(path.to_json()) == path
    assert path.induced({0, 1}).is_isomorphic(sb.Structure.from_json(graph([5, 7], [[5, 7]])))

    half = sb.ClassSpec("shelah_spencer:1/2")
    report = half.check_property("fAP", 3)
    assert report["holds"] and report["instances"] > 0

    no_out = sb.ClassSpec("no_edges_out")
    assert no_out.closure(path, {0}) == [0, 1, 2]

    stages = graphs.grow(30, 2)
    assert graphs.probe_richness(stages[-1], 1, 2)["fraction"] == 1.0

    order = sb.ClassSpec("linear_orders")
    lt = lambda n: sb.Structure.from_json(json.dumps({
        "signature": [{"name": "<", "arity": 2, "language": "L", "shape": "injective"}],
        "universe": list(range(n)),
        "relations": {"<": [[i, j] for i in range(n) for j in range(i + 1, n)]},
    }))
    assert order.ramsey_check(lt(3), lt(2), lt(1))
    assert not order.ramsey_check(lt(2), lt(2), lt(1))
    try:
        order.ramsey_check(lt(6), lt(3), lt(2), cap=10)
        raise AssertionError("cap not enforced")
    except sb.CapExceeded:
        pass

    try:
        sb.ClassSpec("no_such_class")
        raise AssertionError("unknown id accepted")
    except ValueError:
        pass

    assert sb.verify_no_eppa(6)["holds"]
    (demo,) = sb.demo("ramsey-sanity")
    assert demo["verdict"] == "pass"

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
