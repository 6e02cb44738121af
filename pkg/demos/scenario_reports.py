"""Run benchmark scenarios programmatically and inspect their reports.

Every scenario embeds its config and seed, splits deterministic results from
wall-clock observations, and re-runs a sample of its queries to verify
byte-level reproducibility.  The same scenarios are reachable from the CLI
via ``lcpsearch bench <config-file>``.
"""

from lcpsearch import ScenarioConfig, run_scenario

# A sustained query loop: latency percentiles are wall-clock (informational),
# the work counters and the determinism check are exact.
sustained = run_scenario(
    ScenarioConfig(
        scenario="sustained",
        seed=3,
        n_items=50_000,
        seq_len=32,
        alphabet=4,
        k=10,
        query_count=2_000,
        prefix_len=16,
    )
)
print(sustained.to_text())

# A control-loop style run: one top-k query per simulation step against a
# static history of patterns.
gnc = run_scenario(
    ScenarioConfig(
        scenario="gnc",
        seed=4,
        n_items=10_000,
        seq_len=64,
        alphabet=4,
        k=5,
        steps=1_000,
        prefix_len=32,
    )
)
results = gnc.to_machine()["results"]
wall = gnc.to_machine()["wall_clock"]
print(f"gnc: {results['steps']} steps, "
      f"{results['energy_work_units_per_step']:.2f} work units/step, "
      f"{wall['steps_per_second']:.0f} steps/s, "
      f"deterministic={results['determinism']['byte_identical']}")
