"""Differences of the published Gini rows against the published
redistribution table, to the table's rounding.
"""
import sys

GINI = {  # market, gross, disposable, adjusted
    "Before Crisis": (0.490, 0.363, 0.290, 0.308),
    "May 5th": (0.609, 0.349, 0.276, 0.290),
    "June 6th": (0.594, 0.354, 0.279, 0.294),
    "August 28th": (0.548, 0.361, 0.291, 0.304),
    "November 15th": (0.572, 0.356, 0.282, 0.296),
    "December 22nd": (0.582, 0.362, 0.287, 0.301),
    "January 26th": (0.578, 0.361, 0.287, 0.301),
}
REDISTRIBUTION = {  # benefits, taxes, work expenses and housing costs
    "Before Crisis": (-0.127, -0.073, 0.018),
    "May 5th": (-0.260, -0.073, 0.014),
    "June 6th": (-0.240, -0.075, 0.016),
    "August 28th": (-0.187, -0.070, 0.014),
    "November 15th": (-0.216, -0.074, 0.014),
    "December 22nd": (-0.220, -0.075, 0.014),
    "January 26th": (-0.217, -0.074, 0.014),
}
ok = True
for label, (m, g, d, a) in GINI.items():
    got = (g - m, d - g, a - d)
    for x, y in zip(got, REDISTRIBUTION[label]):
        if abs(x - y) > 0.001 + 1e-12:
            ok = False
    print(label, [f"{x:+.3f}" for x in got], REDISTRIBUTION[label])
sys.exit(0 if ok else 1)
