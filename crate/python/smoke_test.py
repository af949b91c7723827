"""Smoke test for the fdmimo_py extension.

Build first with
    cargo build --release -p fdmimo-py --features extension-module
then run
    python3 python/smoke_test.py [path/to/libfdmimo_py.so]
"""

import importlib.machinery
import importlib.util
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_extension():
    if len(sys.argv) > 1:
        candidates = [Path(sys.argv[1])]
    else:
        candidates = [
            ROOT / "target" / profile / "libfdmimo_py.so"
            for profile in ("release", "debug")
        ]
    for path in candidates:
        if path.is_file():
            loader = importlib.machinery.ExtensionFileLoader("fdmimo_py", str(path))
            spec = importlib.util.spec_from_file_location("fdmimo_py", path, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit(f"extension not found in {[str(c) for c in candidates]}")


def main():
    fd = load_extension()

    assert math.isclose(fd.dbm_to_mw(30.0), 1000.0)
    assert math.isclose(fd.mw_to_dbm(1.0), 0.0, abs_tol=1e-12)

    cfg = fd.SystemConfig()
    assert (cfg.m, cfg.n, cfg.n_tap) == (4, 4, 8)
    assert math.isclose(cfg.noise_mw(), 1e-11)
    try:
        fd.SystemConfig(n_tap=17)
    except ValueError:
        pass
    else:
        raise AssertionError("n_tap above M*N must be rejected")

    sol = fd.pf_solve([1.0, 1.0], [0.5, 0.5], [1.0, 1.0], 1.0)
    assert sol["feasible"]
    assert all(math.isclose(p, 2.0) for p in sol["p"])
    assert fd.pf_solve([2.0, 2.0], [1.0, 1.0], [1.0, 1.0], 1.0)["p"] is None

    gamma = 2.0**4 - 1.0
    for mode in ("MRT", "ZF_RQ", "RQ_RQ"):
        r = fd.solve_trial(cfg, 4.0, seed=3, trial=0, mode=mode)
        assert r["feasible"] and r["converged"], (mode, r)
        for s in r["achieved_sinr"]:
            assert abs(s / gamma - 1.0) < 1e-6
        for v in r["v_bar"]:
            assert math.isclose(math.sqrt(sum(abs(x) ** 2 for x in v)), 1.0)
        print(f"{mode:6} p = {[round(fd.mw_to_dbm(p), 2) for p in r['p_mw']]} dBm, "
              f"{r['iterations']} iterations")

    ch = fd.draw_channels(cfg, seed=3)
    assert len(ch["h_12"]) == 4 and len(ch["h_12"][0]) == 4
    assert isinstance(ch["h_11"][0][0], complex)

    rows = fd.run_experiment(cfg, [2.0, 6.0], n_trials=8, seed=5, modes=["MRT", "ZF_RQ"])
    assert len(rows) == 4
    assert {r["tx_mode"] for r in rows} == {"MRT", "ZF_RQ"}
    again = fd.run_experiment(cfg, [2.0, 6.0], n_trials=8, seed=5, modes=["MRT", "ZF_RQ"])
    key = lambda r: (r["tx_mode"], r["target_rate"], r["mean_tx_power_dbm"])
    assert [key(r) for r in rows] == [key(r) for r in again]

    print("smoke test passed")


if __name__ == "__main__":
    main()
