"""Cross-validated native vs augmented comparison on the bundled airfoil data.

Runs linear regression and a tuned decision tree with S = 32 and prints the
per-regressor outcome of the paired t-test. Takes about a minute.
"""

from threshaug.dataset import AIRFOIL_TARGET, bundled_path
from threshaug.harness import DatasetSpec, ExperimentConfig, run_experiment
from threshaug.regressors import RegressorSpec
from threshaug.report import build_summary_table

config = ExperimentConfig(
    datasets=(DatasetSpec(str(bundled_path("airfoil")), AIRFOIL_TARGET, "airfoil"),),
    s_values=(32,),
    regressors=(RegressorSpec.default("linear"), RegressorSpec.default("tree")),
)
result = run_experiment(config)
row = build_summary_table(result, 32).rows[0]
for reg, cell in row.cells.items():
    print(f"{reg:7s} native {cell.native_rmse_mean:.4f}  augmented {cell.aug_rmse_mean:.4f}  "
          f"p = {cell.p_value:.2g}  -> {cell.outcome}")
