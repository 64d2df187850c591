"""Tabulate r_B(n), r_C(n) and a_n = (r_B(n) - r_C(n)) / 2 for the level-37 forms.

    python3 scripts/theta_table.py --upto 200 --out theta37.csv
"""

from __future__ import annotations

import argparse
import sys

from higherfermi.forms import deligne_violations, gamma37_form, hecke_audit
from higherfermi.qform import GRAM_B, GRAM_C, QuadraticForm, theta_coefficients


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--upto", type=int, default=100)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    args = p.parse_args(argv)

    rb = theta_coefficients(QuadraticForm(GRAM_B), args.upto).r
    rc = theta_coefficients(QuadraticForm(GRAM_C), args.upto).r
    rows = ["n,r_B,r_C,a_n"] + [f"{n},{rb[n]},{rc[n]},{(rb[n] - rc[n]) // 2}" for n in range(1, args.upto + 1)]
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    f = gamma37_form(args.upto)
    audit = hecke_audit(f)
    print(
        f"Hecke relations: {audit.coprime_pairs} coprime pairs, {audit.prime_power_checks} prime powers, "
        f"{len(audit.violations)} violations; Ramanujan bound violations: {deligne_violations(f, args.upto)}",
        file=sys.stderr,
    )
    return 0 if audit.ok else 1


if __name__ == "__main__":
    sys.exit(main())
