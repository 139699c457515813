"""Regenerate the six oscillator tables and compare with the stored values.

Run from the repository root::

    python demos/reproduce_tables.py [--f-source fhat]

Each row shows the smallest sufficient dimension m next to the reference
value and the relative difference. Cells off by more than 5% are flagged.
"""

import argparse
import time

from ecdim.dimbounds import generate_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f-source", choices=["exact", "fhat"], default="exact")
    args = ap.parse_args()

    for tid in range(1, 7):
        t0 = time.perf_counter()
        table = generate_table(tid, f_source=args.f_source)
        dt = time.perf_counter() - t0
        head = f"table {tid}  eps = {table.cells[0].epsilon_fraction:g} F"
        if table.alpha is not None:
            head += f"  alpha = {table.alpha:g}  Ec = {table.Ec:g}"
        print(f"{head}  ({dt:.1f} s)")
        for c in table.cells:
            flag = "  <-- off by more than 5%" if abs(c.rel_error) > 0.05 else ""
            print(f"  E={c.E_over_hbar_omega:>4g}  {c.capacity:<5} m={c.m:9.3e}  ref={c.ref_m:8.2e}  "
                  f"{c.rel_error:+7.2%}{flag}")
        print()


if __name__ == "__main__":
    main()
