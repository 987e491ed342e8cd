"""Smoke test for the pcfbounds extension.

Build first with `cargo build -p pcf-py` (or --release); the script finds the
shared library under target/ and imports it under its module name.
"""

from decimal import Decimal
import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libpcfbounds.so"
        if lib.exists():
            break
    else:
        sys.exit("libpcfbounds.so not found; run `cargo build -p pcf-py` first")
    tmp = pathlib.Path(tempfile.mkdtemp())
    dst = tmp / "pcfbounds.so"
    shutil.copy(lib, dst)
    spec = importlib.util.spec_from_file_location("pcfbounds", dst)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    pb = load()

    u0 = pb.u(0.5, 0.0)
    assert abs(float(u0) - math.sqrt(math.pi / 2)) < 1e-15, u0
    assert u0.mantissa_re.startswith("1.253314137315500251207882642405522")

    # U(a, x) = D_{-a-1/2}(x); U(-1/2, x) = exp(-x^2/4)
    assert abs(float(pb.u(-0.5, 1.3)) - math.exp(-1.3**2 / 4)) < 1e-15

    r = pb.uniform(100, 50, n=3, branch="pos", oracle=True)
    assert f"{Decimal(r.exact_scaled[0]):.19e}" == "9.9999962523819834461e-1", r.exact_scaled
    assert f"{Decimal(r.partial_sum[0]):.19e}" == "9.9999962523819834799e-1", r.partial_sum
    assert 0 < r.ratio <= 1, r

    p = pb.poincare(0.5, 10, n=5, oracle=True)
    assert abs(p.ratio - 0.29) < 5e-3 and p.region == "R1", p
    c = pb.poincare(2, -3, zi=4, n=6, variation="hyp2f1", oracle=True)
    assert c.ratio <= 1 and c.partial_sum[1] != "0", c

    i = pb.ibp(3, 5, n=2, oracle=True)
    assert 0 < i.ratio <= 1, i

    assert pb.region(1, 3, 0) == "R1"
    assert pb.membership(1, 3, 0) == (True, False, True)
    assert pb.region(1, -2.5, 0.5, strict=True) == "R4"

    phi, psi = pb.coeffs(2)
    assert phi[1] == "(-5/3)*tau^3 + (-5/2)*tau^2 + (-3/4)*tau", phi
    assert len(psi) == 3
    f = pb.f_coeffs(0, 2)
    assert f[1].startswith("-3.75"), f

    cells = pb.table(3, digits=30)
    assert len(cells) == 35 and all(c[4] for c in cells)

    for bad in (lambda: pb.poincare(1, 0.5, zi=0.1), lambda: pb.uniform(-1, 2, branch="pos"),
                lambda: pb.poincare(1, 3, variation="nope")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("pcfbounds smoke test ok")


if __name__ == "__main__":
    main()
