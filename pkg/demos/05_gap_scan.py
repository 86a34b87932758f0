"""Instantaneous spectrum of the conventional annealing Hamiltonian.

The sweep is adiabatic when gamma is small against the minimum gap. For two
qubits the gap starts at the drive strength and ends at the Ising gap 2h.
"""

import numpy as np

from spinlock_qa.experiments import ExperimentConfig, run_gap_scan

table = run_gap_scan(ExperimentConfig(experiment="gap_scan", gap_scan_points=201))
meta = table.metadata

gaps = np.array([r["gap_rad_per_ns"] for r in table.rows])
times = np.array([r["t_ns"] for r in table.rows])
for t in (0, 50, 100, 150, 200, 300, 500):
    k = int(np.argmin(np.abs(times - t)))
    print(f"t = {t:3d} ns   gap = {gaps[k]:.4f} rad/ns   |<11|ground>|^2 = {table.rows[k]['fidelity']:.4f}")

print(f"\nminimum gap {meta['min_gap']:.4f} rad/ns at t = {meta['t_min_gap']:.1f} ns")
print(f"gamma = {meta['resolved_spec']['gamma_per_ns']} /ns; adiabaticity warning: {meta['adiabaticity_warning']}")
