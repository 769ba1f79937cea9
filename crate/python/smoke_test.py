"""Smoke test for the mcmosaic extension."""
import math

import mcmosaic


def main():
    cfg = mcmosaic.WeightedConfig([2.0, 1.0, 0.5, 1.5])
    assert len(cfg) == 4
    assert math.isclose(mcmosaic.sigma(cfg, 2), 4 + 1 + 0.25 + 2.25)

    xi = mcmosaic.sample_clocks(cfg, seed=3)
    assert xi == mcmosaic.sample_clocks(cfg, seed=3)
    parents, y = mcmosaic.breadth_first_forest(cfg, xi, 1.0)
    assert math.isclose(sum(y), 5.0)
    assert sum(p is None for p in parents) == len(y)

    traj = mcmosaic.run_trajectory(cfg, q_max=4.0, seed=3)
    assert len(traj.partition_at(0.0)) == 4
    for (t0, *_), (t1, *_) in zip(traj.events(), traj.events()[1:]):
        assert t0 <= t1
    edges = mcmosaic.dynamic_surplus(traj, 4.0, seed=3, variant="multigraph")
    assert all(k in ("spanning", "multi", "loop") for *_, k in edges), edges

    static = mcmosaic.static_surplus(cfg, xi, 1.0, seed=3)
    assert sum(k == "spanning" for *_, k in static) == 4 - len(y)

    mosaic = mcmosaic.build_mosaic(traj, 2.0)
    assert math.isclose(sum(sum(e["masses"]) for e in mosaic), 5.0)

    law = mcmosaic.exact_partition_law(3, 0.5)
    assert math.isclose(sum(law.values()), 1.0)
    assert math.isclose(law[(1, 1, 1)], 0.125)
    print("ok")


if __name__ == "__main__":
    main()
