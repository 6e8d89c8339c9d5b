"""Smoke test for the adhm_lab extension module.

Build first with `cargo build -p adhm-py --release`; the script copies the
shared library next to a temporary import path, so no packaging tool is needed.
"""

import importlib
import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    for profile in ("release", "debug"):
        for name in ("libadhm_lab.so", "libadhm_lab.dylib", "adhm_lab.dll"):
            built = ROOT / "target" / profile / name
            if built.exists():
                suffix = ".pyd" if name.endswith(".dll") else ".so"
                tmp = Path(tempfile.mkdtemp())
                shutil.copy(built, tmp / f"adhm_lab{suffix}")
                sys.path.insert(0, str(tmp))
                return importlib.import_module("adhm_lab")
    sys.exit("adhm_lab library not found; run `cargo build -p adhm-py --release` first")


def main():
    lab = load_module()

    x = lab.generate((1, 2, 1), seed=7, style="diagonal")
    assert x.dims == (1, 2, 1)
    assert x.is_valid() and x.is_stable()
    assert max(v for _, v in x.residuals()) <= 1e-12
    assert x.stability()["verdict"] == "stable"
    assert x.cohomology()["h"] == [0, 4, 0, 0]
    assert x.stabilizer_dim() == 0
    assert len(x.matrix("A")) == 2 and isinstance(x.matrix("A")[0][0], complex)

    y = lab.Datum.from_json(x.to_json())
    assert y.to_json() == x.to_json()

    q = json.loads(x.quotient())
    assert q["dims"] == {"r": 1, "c": 1}
    z = lab.fiber_lift(x.quotient(), cprime=1, seed=3)
    assert z.dims == (1, 2, 1) and z.is_stable()
    assert len(z.support()) == 1

    balanced, summary = x.balance()
    assert summary["converged"] and summary["monotone"]
    assert balanced.moment_norms()[1] <= 1e-10

    value, expected = x.ambient_dim()
    assert value == expected == 8

    om = x.omega(samples=20)
    assert om["numerical_rank"] == 4 and om["well_defined"]
    jordan = lab.generate((1, 2, 1), seed=1, style="jordan")
    assert jordan.omega(samples=20)["numerical_rank"] < 4

    h = lab.nested_hilbert([(0j, 0j)], [(0j, 0j), (1 + 0j, 2 + 0j)])
    z1, z2 = h.nested_points()
    assert len(z1) == 1 and len(z2) == 2

    try:
        lab.generate((1, 2, 3))
    except lab.AdhmError:
        pass
    else:
        raise AssertionError("c' > c must be rejected")

    ok, table = lab.run_acceptance(seed=0, criteria=[3, 6])
    assert ok, table
    print(table, end="")
    print("python smoke test passed")


if __name__ == "__main__":
    main()
