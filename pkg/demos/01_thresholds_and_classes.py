"""Cut a target into equal-frequency bins and turn it into inferiority labels."""

import numpy as np

from threshaug.discretizer import compute_thresholds, encode_classes

y = np.array([3.1, 0.4, 7.7, 2.2, 5.0, 9.3, 1.8, 6.4, 4.6, 8.1])
ts = compute_thresholds(y, 4)
print("thresholds:", ts.thresholds)

# Row i is 1 in column j when y_i sits at or below threshold j, so every row
# reads 0...0 1...1 from left to right.
labels = encode_classes(y, ts)
for value, row in sorted(zip(y, labels.tolist())):
    print(f"{value:5.1f}  {row}")

# Ties can collapse neighbouring thresholds; the set then reports a warning.
tied = compute_thresholds([1, 1, 1, 1, 1, 1, 1, 1, 9, 10], 4)
print("tied target ->", tied.thresholds, "|", tied.warning)
