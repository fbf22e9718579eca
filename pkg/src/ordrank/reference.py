"""Published benchmark numbers, kept for side-by-side reporting.

Zero-one errors are fractions (0.1268 == 12.68%).  Each entry is
``(zero_one_mean, zero_one_std, mae_mean, mae_std)``; ``None`` where a
table does not report the quantity.
"""

DATASETS = (
    "stocks",
    "pyrimidines",
    "auto_mpg",
    "machine",
    "abalone",
    "triazines",
    "boston",
    "diabetes",
)

DISPLAY_NAMES = {
    "stocks": "Stocks",
    "pyrimidines": "Pyrimidines",
    "auto_mpg": "Auto MPG",
    "machine": "Machine",
    "abalone": "Abalone",
    "triazines": "Triazines",
    "boston": "Boston",
    "diabetes": "Diabetes",
}

# NNRank vs NNClass, 20 trials each.
NN_TABLE = {
    "rank": {
        "stocks": (0.1268, 0.018, 0.127, 0.01),
        "pyrimidines": (0.3771, 0.081, 0.450, 0.09),
        "auto_mpg": (0.2713, 0.020, 0.281, 0.02),
        "machine": (0.1703, 0.042, 0.186, 0.04),
        "abalone": (0.2139, 0.003, 0.226, 0.01),
        "triazines": (0.5255, 0.050, 0.730, 0.06),
        "boston": (0.2638, 0.030, 0.295, 0.03),
        "diabetes": (0.4490, 0.125, 0.546, 0.15),
    },
    "class": {
        "stocks": (0.1697, 0.023, 0.173, 0.02),
        "pyrimidines": (0.4187, 0.079, 0.508, 0.11),
        "auto_mpg": (0.2882, 0.027, 0.307, 0.03),
        "machine": (0.1780, 0.044, 0.192, 0.06),
        "abalone": (0.2174, 0.004, 0.232, 0.01),
        "triazines": (0.5284, 0.059, 0.790, 0.09),
        "boston": (0.2662, 0.027, 0.297, 0.03),
        "diabetes": (0.4384, 0.100, 0.592, 0.09),
    },
}

# Kernel/GP methods, quoted for context only (never run here).
OTHER_METHODS = {
    "SVM": {
        "triazines": (0.5419, 0.015, 0.698, 0.03),
        "pyrimidines": (0.4146, 0.085, 0.450, 0.11),
        "diabetes": (0.5731, 0.121, 0.746, 0.14),
        "machine": (0.1737, 0.036, 0.192, 0.04),
        "auto_mpg": (0.2573, 0.022, 0.260, 0.02),
        "boston": (0.2556, 0.020, 0.267, 0.02),
        "stocks": (0.1081, 0.017, 0.108, 0.02),
        "abalone": (0.2158, 0.003, 0.229, 0.01),
    },
    "GP-MAP": {
        "triazines": (0.5291, 0.022, 0.687, 0.02),
        "pyrimidines": (0.3979, 0.072, 0.427, 0.09),
        "diabetes": (0.5423, 0.138, 0.662, 0.14),
        "machine": (0.1653, 0.036, 0.185, 0.04),
        "auto_mpg": (0.2378, 0.019, 0.241, 0.02),
        "boston": (0.2488, 0.020, 0.260, 0.02),
        "stocks": (0.1199, 0.023, 0.120, 0.02),
        "abalone": (0.2150, 0.002, 0.232, 0.01),
    },
    "GP-EP": {
        "triazines": (0.5262, 0.027, 0.688, 0.03),
        "pyrimidines": (0.3646, 0.065, 0.392, 0.07),
        "diabetes": (0.5423, 0.138, 0.665, 0.14),
        "machine": (0.1678, 0.039, 0.186, 0.04),
        "auto_mpg": (0.2375, 0.017, 0.241, 0.02),
        "boston": (0.2449, 0.019, 0.259, 0.02),
        "stocks": (0.1200, 0.021, 0.120, 0.02),
        "abalone": (0.2156, 0.004, 0.234, 0.01),
    },
}

# Train/test sizes of the standard 20-partition benchmark for these datasets.
# They are shipped as manifest defaults; change them freely.
TRAIN_COUNTS = {
    "diabetes": 30,
    "pyrimidines": 50,
    "triazines": 100,
    "machine": 150,
    "auto_mpg": 200,
    "boston": 300,
    "stocks": 600,
    "abalone": 1000,
}
