"""Weekly amounts that follow from the shipped schedule decisions rather
than being printed verbatim: the TWSS taper above 960.01 and the 70% and
85% rates.
"""
import sys
from decimal import Decimal, ROUND_HALF_UP

CENT = Decimal("0.01")


def taper(amount, lower, end, x):
    v = Decimal(amount) * (Decimal(end) - Decimal(x)) / (Decimal(end) - Decimal(lower))
    return v.quantize(CENT, rounding=ROUND_HALF_UP)


checks = [
    ("twss 0.70 x 500", (Decimal("0.70") * 500).quantize(CENT), Decimal("350.00")),
    ("twss 0.70 x 123.45", (Decimal("0.70") * Decimal("123.45")).quantize(CENT, rounding=ROUND_HALF_UP), Decimal("86.42")),
    ("twss 0.85 x 400", (Decimal("0.85") * 400).quantize(CENT), Decimal("340.00")),
    ("twss taper at 1211", taper(350, "960.01", 1462, 1211), Decimal("175.00")),
    ("twss taper at 1000", taper(350, "960.01", 1462, 1000), Decimal("322.12")),
    ("twss taper at 1462", taper(350, "960.01", 1462, 1462), Decimal("0.00")),
]
ok = True
for name, got, want in checks:
    ok &= got == want
    print(f"{name:24s} {got} expected {want}")
sys.exit(0 if ok else 1)
