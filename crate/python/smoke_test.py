"""Smoke test for the vortexwave_py extension.

Build it first, for example:
    cargo build --release -p vortexwave-py --features extension-module
    cp target/release/libvortexwave_py.so python/vortexwave_py.so
"""
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import vortexwave_py as vw


def main():
    n, half = 64, 2 * math.pi
    xs = [-half + 2 * half * i / n for i in range(n)]
    h = vw.flat_hilbert([(math.cos(x), 0.0) for x in xs], half)
    assert max(abs(re) + abs(im + math.sin(x)) for (re, im), x in zip(h, xs)) < 1e-12

    a1, label = vw.a1_single_vortex(1.0, -1.0)
    assert abs(a1 - (1 - 3 / (8 * math.pi**2))) < 1e-15 and label == "strong"

    assert abs(vw.a1_pair(-1.0, 1.0, -1.0) - (1 - 1 / (16 * math.pi**2))) < 1e-12

    re, im = vw.residue_integral(512, 16 * math.pi)
    assert abs(re - 2 * math.pi / 3) < 1e-8 and abs(im) < 1e-8

    rows, bracket = vw.taylor_sweep("pair")
    assert len(rows) == 100 and bracket[0] < 16 * math.pi**2 <= bracket[1]

    status, t, steps, min_e = vw.simulate("rest", 0.5)
    assert status == "completed" and steps > 0 and min_e >= 0

    status, _, steps, _ = vw.simulate("taylor-fail")
    assert status == "taylor_sign_failed" and steps == 0

    passed, line = vw.verify(1)
    assert passed, line
    print("smoke test passed")


if __name__ == "__main__":
    main()
