"""How the final fidelity degrades with chain length.

Each extra qubit adds another counter-rotating channel and another detuned
flip-flop pair, each costing a roughly fixed slice of fidelity. The slope of
a straight-line fit is that per-qubit cost. Takes about half a minute.
"""

from spinlock_qa.experiments import ExperimentConfig, run_fig2

table = run_fig2(ExperimentConfig(experiment="fig2", L_range=[2, 7]))

for row in table.rows:
    bar = "#" * int(round((row["fidelity"] - 0.98) * 2000))
    print(f"L = {row['L']}   F = {row['fidelity']:.5f}  {bar}")

fit = table.metadata["fit"]
print(f"\nlinear fit: F = {fit['intercept']:.5f} + ({fit['slope']:.5f}) L,  R^2 = {fit['r2']:.4f}")
