"""Closed-form values for the regression-model tests.

Each printed constant is asserted against the literal used in
tests/unit/test_igm.cpp and tests/unit/test_metrics.cpp.
"""
import math
import sys


def logistic(x):
    return 1.0 / (1.0 + math.exp(-x))


checks = []

# Transport logit at the reference person and with the regional dummy.
p_ref = logistic(-2.839)
p_bmw = logistic(-2.839 - 1.457)
checks.append(("public transport, reference", p_ref, 0.0552527))
checks.append(("public transport, BMW region", p_bmw, 0.0134399))

# Softmax over indices (0, ln 2, ln 3).
idx = [0.0, math.log(2.0), math.log(3.0)]
z = sum(math.exp(v) for v in idx)
for k, v in enumerate(idx):
    checks.append((f"softmax[{k}]", math.exp(v) / z, (k + 1) / 6))

# Childcare expenditure: one child aged 0-4, one child, income 0, two workers.
checks.append(("childcare expenditure", -15.5 + 28.0 * 1 + 0.0 * 1 + 0.1 * 0 + 54.0 * 1, 66.5))

# Modified OECD scale: two adults and two children under 14.
scale = 1.0 + 0.5 * 1 + 0.3 * 2
checks.append(("equivalised 2100", 2100 / scale, 1000.0))

ok = True
for name, got, want in checks:
    good = abs(got - want) < 5e-7
    ok &= good
    print(f"{name:32s} {got:.8f} expected {want:.7f} {'ok' if good else 'MISMATCH'}")
sys.exit(0 if ok else 1)
