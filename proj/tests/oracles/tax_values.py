"""Annual income tax under the shipped two-band system, by hand."""
import sys
from decimal import Decimal

BANDS = [(Decimal(0), Decimal("0.20")), (Decimal(35300), Decimal("0.40"))]
CREDITS = Decimal(3300)
SI_RATE, SI_FLOOR = Decimal("0.04"), Decimal(18304)


def tax(x):
    x = Decimal(x)
    band = Decimal(0)
    for i, (lo, rate) in enumerate(BANDS):
        hi = BANDS[i + 1][0] if i + 1 < len(BANDS) else x
        if x > lo:
            band += (min(x, hi) - lo) * rate
    return max(Decimal(0), band - CREDITS) + max(Decimal(0), x - SI_FLOOR) * SI_RATE


checks = [(0, "0.00"), (10000, "0.00"), (16500, "0.00"), (30000, "3167.84"), (50000, "10907.84")]
ok = True
for x, want in checks:
    got = tax(x).quantize(Decimal("0.01"))
    ok &= got == Decimal(want)
    print(f"taxable {x:>6} -> {got} expected {want}")
sys.exit(0 if ok else 1)
