#!/usr/bin/env python3
"""Smoke test for the ncsuper_py extension module.

Builds the module with cargo if it is not already importable, then runs a
few end-to-end checks through the Python API. Exits nonzero on any failure.
"""

import glob
import json
import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def ensure_module():
    try:
        import ncsuper_py
        return ncsuper_py
    except ImportError:
        pass
    subprocess.run(["cargo", "build", "-p", "ncsuper-py"], cwd=ROOT, check=True)
    for profile in ("debug", "release"):
        hits = glob.glob(str(ROOT / "target" / profile / "libncsuper_py.*"))
        hits += glob.glob(str(ROOT / "target" / profile / "ncsuper_py.dll"))
        for built in hits:
            built = Path(built)
            if built.suffix not in (".so", ".dylib", ".dll"):
                continue
            dest = built.parent / "ncsuper_py.so"
            if built != dest:
                shutil.copy2(built, dest)
            sys.path.insert(0, str(built.parent))
            import ncsuper_py
            return ncsuper_py
    sys.exit("could not find the built extension module under target/")


def main():
    ns = ensure_module()
    eng = ns.Engine()

    # Rewriting in the superspace and in the differential calculus.
    assert eng.normalize("x*theta1") == "h*x*theta2 + theta1*x"
    assert eng.normalize("theta2*theta2") == "0"
    assert eng.normalize("theta1*theta1") == "-(1/2)*h*x*x + h*theta1*theta2"
    assert eng.normalize("theta1*x - x*theta1") == "-h*x*theta2"
    assert eng.normalize("dx*x", algebra="calculus") != "dx*x"

    # The generalized permutation fixes rho and squares to the identity.
    assert eng.normalize("rho /\\ rho") == "0"
    first = eng.sigma("xi1 ox eta")
    assert "ox" in first and first != "xi1 ox eta"

    # Curvature of the first basis one-form, symbolic parameters.
    curv = eng.curvature(1)
    assert "/\\" in curv and "c1" in curv

    # Verification: one suite green, the pinned metric check failing off
    # the compatible point.
    report = json.loads(eng.verify(["curvature"]))
    assert report["version"] == "1"
    assert report["summary"]["fail"] == 0
    assert all(r["status"] == "pass" and r["residual"] == "" for r in report["results"])

    pinned = json.loads(eng.verify(["metric"], c0="1", c1="0"))
    bad = [r for r in pinned["results"] if r["status"] == "fail"]
    assert [r["check_id"] for r in bad] == ["metric/metric-compatibility"]

    # Presentation introspection.
    rules = eng.rules("superspace")
    assert len(rules) == 5
    ids = {rid for rid, _, _ in rules}
    assert "theta1-theta1" in ids and "x-theta1" in ids

    # Errors surface as ValueError.
    for call in (
        lambda: eng.normalize("x*("),
        lambda: eng.normalize("x", algebra="bogus"),
        lambda: eng.sigma("x"),
        lambda: eng.curvature(0),
    ):
        try:
            call()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke test: OK")


if __name__ == "__main__":
    main()
