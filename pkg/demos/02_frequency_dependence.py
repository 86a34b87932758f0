"""Faster qubits anneal more faithfully.

Counter-rotating terms oscillate at twice the qubit frequency, so their
influence falls off as the base frequency grows. Four qubits, three
frequencies, lab frame throughout.
"""

from spinlock_qa.experiments import ExperimentConfig, run_fig1

cfg = ExperimentConfig(experiment="fig1", omega_list_ghz=[2.4, 3.6, 4.8])
table = run_fig1(cfg)

for om, infid in table.metadata["final_infidelity"].items():
    print(f"omega/2pi = {om} GHz   final infidelity {infid:.5f}")

# The long-format table keeps the whole curve; pull one of them back out.
rows = table.where(run_id="omega=2.4")
peak = max(rows, key=lambda r: r["infidelity"])
print(f"\nworst point at 2.4 GHz: t = {peak['t_ns']:.0f} ns, 1-F = {peak['infidelity']:.3f}")

for name, ok in table.metadata["checks"].items():
    print(f"{'ok ' if ok else 'NO '} {name}")
