"""Print the channel-count and throughput arithmetic next to the reported figures."""

from cvqkd_mcf import planner
from cvqkd_mcf.planner import ClassicalGrid, QkdGrid

REPORTED = {
    "bands": 31,
    "channels": 341,
    "skr_per_core_gbps": 15.7,
    "skr_six_cores_gbps": 94.2,
    "classical_3_cores_tbps": 17.0,
    "classical_12_cores_tbps": 70.0,
}


def main() -> None:
    cg, qg = ClassicalGrid(), QkdGrid()
    plan = planner.allocate_qkd_slots(cg, qg)
    ours = {
        "bands": plan.bands,
        "channels": plan.channels,
        "skr_per_core_gbps": planner.aggregate_skr(plan, 46e6, 1) / 1e9,
        "skr_six_cores_gbps": planner.aggregate_skr(plan, 46e6, 6) / 1e9,
        "classical_3_cores_tbps": planner.classical_throughput(cg, 3) / 1e12,
        "classical_12_cores_tbps": planner.classical_throughput(cg, 12) / 1e12,
    }
    print(f"guard band {cg.guard_band_ghz} GHz: {plan.slots_per_band_raw} slots fit, "
          f"{plan.slots_per_band} used")
    print(f"{'quantity':<26}{'computed':>12}{'reported':>12}{'rel. diff':>11}")
    for key, ref in REPORTED.items():
        val = ours[key]
        print(f"{key:<26}{val:>12.4g}{ref:>12.4g}{(val - ref) / ref:>11.2%}")


if __name__ == "__main__":
    main()
