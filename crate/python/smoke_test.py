"""Smoke test for the ins_eqf extension: simulate, filter, compare and check end to end."""

import math
import sys
import tempfile
from pathlib import Path

import ins_eqf


def main() -> int:
    assert ins_eqf.kinds() == ["mekf", "iekf", "tfg", "tg", "dp", "sd"]
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        counts = ins_eqf.simulate(str(root / "data"), seed=3, duration=5.0)
        assert counts == {"imu": 1001, "gnss": 50, "truth": 1001}, counts

        summaries = ins_eqf.run(str(root / "data"), str(root / "run"))
        assert [s["kind"] for s in summaries] == ins_eqf.kinds()
        for s in summaries:
            assert s["failure"] is None, s
            assert s["t"] == 5.0 and 0.0 < s["mean_nis"] < 10.0, s
        header = (root / "run" / "metrics.csv").read_text().splitlines()[0]
        assert header == "kind,t,runs,attitude_deg,velocity,position,gyro_bias,acc_bias,anees,nis", header

        table = ins_eqf.compare(str(root / "cmp"), runs=3, duration=4.0, kinds=["tg", "mekf"])
        assert set(table) == {"tg", "mekf"}
        assert all(math.isfinite(v) for pair in table.values() for v in pair), table

        try:
            ins_eqf.compare(str(root / "bad"), kinds=["ukf"])
        except ValueError as e:
            assert "mekf, iekf, tfg, tg, dp, sd" in str(e)
        else:
            raise AssertionError("unknown kind accepted")

    passed, report = ins_eqf.check_suite(samples=20)
    assert passed, report
    passed, report = ins_eqf.check_suite(samples=5, mutate_gravity=True)
    assert not passed and "(seed 7)" in report
    assert ins_eqf.main(["check", "--samples", "5", "--mutate-gravity"]) == 3
    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
