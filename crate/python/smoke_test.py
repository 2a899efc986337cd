"""Smoke test for the pgm_hsp extension module.

Build and copy the module next to this script first:

    cargo build -p pgm-hsp-py --release --features extension-module
    cp target/release/libpgm_hsp_py.so python/pgm_hsp.so
"""

import math
import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pgm_hsp  # noqa: E402


def main():
    g = pgm_hsp.Group("zn N=7 p=3 mu=2")
    assert g.order == 21 and g.p == 3 and g.order_a == 7
    assert g.mul((1, 1), (1, 0)) == (3, 1)
    assert g.subgroup_order(1) == 3

    sol = pgm_hsp.solve_msum(g, [1], 3)
    assert sol["solutions"] == [[2]] and sol["eta"] == 1, sol

    heis = "zpr p=3 r=2 mu=1,1;0,1"
    brute = pgm_hsp.solve_msum(heis, [[1, 2], [2, 2]], [1, 0], solver="brute-force")
    closed = pgm_hsp.solve_msum(heis, [[1, 2], [2, 2]], [1, 0], solver="heisenberg-closed-form")
    assert brute["solutions"] == closed["solutions"]

    value, exact = pgm_hsp.success_probability(g, 1)
    assert exact == "19/49" and abs(value - 19 / 49) < 1e-15

    report = pgm_hsp.pgm_report(g, 1)
    assert abs(report["pr_trace"] - 19 / 49) < 1e-10
    assert report["optimality"]["pass"] and report["lemma2"]["bracket_holds"]

    stats = pgm_hsp.eta_stats("zpr p=3 jordan=2", 2)
    total = sum(stats["counts"].values())
    mean = Fraction(sum(e * c for e, c in stats["counts"].items()), total)
    assert mean == 1 and stats["summary"]["variance_exact"] == "8/9"

    rho = pgm_hsp.hidden_subgroup_state(g, 1, 1)
    assert abs(sum(rho[i][i] for i in range(len(rho))) - 1) < 1e-12

    hsp = pgm_hsp.run_hsp(heis, {"d": [1, 2]}, k=2, seed=1)
    assert hsp["solution"]["subgroup"]["d"] == [1, 2], hsp["result"]
    assert pgm_hsp.run_hsp(g, "trivial", seed=1)["result"] == "trivial"

    exact_rate = pgm_hsp.stripped_exact(g)["exact_rate"]
    assert abs(exact_rate - 18 / 49) < 1e-12
    est = pgm_hsp.stripped_estimate(g, 2000, 7)
    low, high = est["wilson_99"]
    assert low <= exact_rate <= high and est["pass"]
    assert abs(pgm_hsp.perfect_state_overlap(g, 1, 2) - math.sqrt(3 / 7)) < 1e-12

    try:
        pgm_hsp.pgm_report(g, 6)
    except pgm_hsp.CapExceededError:
        pass
    else:
        raise AssertionError("cap not enforced")
    try:
        pgm_hsp.Group("zn N=7 p=4 mu=2")
    except ValueError:
        pass
    else:
        raise AssertionError("bad spec accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
