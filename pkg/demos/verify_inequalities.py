"""Run the randomized inequality suites and print a one-line summary each.

The number of trials per suite can be scaled with a single argument,
e.g. ``python demos/verify_inequalities.py 0.1`` for a quick pass.
"""

import sys

from ecdim.verifier import DEFAULT_TRIALS, SUITES, run_suite

scale = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
for name in sorted(SUITES):
    trials = max(1, int(DEFAULT_TRIALS[name] * scale))
    rep = run_suite(name, trials=trials)
    worst = max(rep.by_inequality.items(), key=lambda kv: kv[1]["max_margin"], default=(None, None))[0]
    print(f"{name:15s} trials={rep.trials:6d} skipped={rep.skipped:4d} violations={len(rep.violations)} "
          f"max lhs-rhs={rep.max_margin_used:+.2e} (tightest: {worst})")
