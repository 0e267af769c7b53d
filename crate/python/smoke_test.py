"""Smoke test for the driftbag_py extension module.

Build and install first:

    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import math
import tempfile

import driftbag_py as db


def main():
    spec = db.parse_scenario("Split5+Rare40")
    assert spec["category"] == "Split+Rare", spec
    assert spec["subclusters_end"] == 5

    stream = db.Generator("StaticIm10", length=2000, seed=3).take(2000)
    assert len(stream) == 2000
    share = sum(1 for _, y, _ in stream if y == "min") / len(stream)
    assert abs(share - 0.10) < 0.03, share
    assert stream == db.Generator("StaticIm10", length=2000, seed=3).take(2000)

    # Driving a classifier from Python reproduces the native prequential run.
    clf = db.Classifier("noob", seed=3)
    seen = {"min": [0, 0], "maj": [0, 0]}
    for features, label, _ in stream:
        seen[label][0] += clf.process(features, label) == label
        seen[label][1] += 1
    native = db.prequential("noob", "StaticIm10", length=2000, seed=3)["final"]
    assert seen["min"][0] / seen["min"][1] == native["recall_min"]
    assert seen["maj"][0] / seen["maj"][1] == native["recall_maj"]
    assert clf.predict(stream[0][0]) in ("min", "maj")
    assert db.prequential("noob", "StaticIm10", length=20000, seed=3)["final"]["gmean"] > 0.8

    run = db.prequential("hnob", "Rare60", length=5000, seed=2)
    assert run["examples"] == 5000
    assert len(run["series"]) == 50
    assert 0.0 <= run["final"]["gmean"] <= 1.0

    assert db.lambda_noob(450, 50, 5, k=5, psi=2.0) == 54.0
    assert math.isclose(db.lambda_nuob(450, 50, 2, k=5, psi=2.0), 50 / 450 * 0.16, rel_tol=1e-12)
    assert db.lambda_oob(900, 100, "min") == 9.0
    assert math.isclose(db.lambda_uob(900, 100, "maj"), 1 / 9, rel_tol=1e-12)

    assert db.friedman_ranks([[0.9, 0.8], [0.7, 0.6]]) == [1.0, 2.0]
    assert db.friedman_statistic([1.0, 2.0], 10) == 10.0
    assert math.isclose(db.nemenyi_cd(5, 60), 2.728 * math.sqrt(30 / 360))

    report = db.validate_scenario("Borderline40")
    assert report["pass"], report

    sample = [([0.5 + 0.01 * (i + 1), 0.5], y) for i, y in enumerate(["min", "maj", "maj", "maj", "maj"])]
    sample.append(([0.0, 0.0], "min"))
    assert db.label_example_type([0.5, 0.5], "min", sample) == "rare"

    with tempfile.TemporaryDirectory() as out:
        summary = db.run_experiment(
            f'scenarios = ["StaticIm5"]\nclassifiers = ["ob", "oob"]\nseeds = [1]\n'
            f'stream_length = 2000\noutput_dir = "{out}"\n'
        )
    assert len(summary["runs"]) == 2

    for bad in (lambda: db.parse_scenario("Rare0"), lambda: db.Classifier("vfdt")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("driftbag_py smoke test passed")


if __name__ == "__main__":
    main()
