#!/usr/bin/env python3
"""Adapter between dersizer's external backend protocol and HiGHS (highspy).

usage: highs_solve.py --gap G --time-limit S model.lp solution.txt
"""

import argparse
import math
import sys


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--gap", type=float, default=1e-4)
    parser.add_argument("--time-limit", type=float, default=600.0)
    parser.add_argument("lp")
    parser.add_argument("solution")
    args = parser.parse_args()

    try:
        import highspy
    except ImportError:
        print("highspy is not installed", file=sys.stderr)
        return 2

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.lp) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.lp}", file=sys.stderr)
        return 2
    h.run()

    ms = h.getModelStatus()
    status = {
        highspy.HighsModelStatus.kOptimal: "optimal",
        highspy.HighsModelStatus.kInfeasible: "infeasible",
        highspy.HighsModelStatus.kUnbounded: "unbounded",
        highspy.HighsModelStatus.kTimeLimit: "time-limit",
    }.get(ms, "error")

    info = h.getInfo()
    with open(args.solution, "w") as out:
        out.write(f"status {status}\n")
        if status in ("optimal", "time-limit") and info.primal_solution_status > 0:
            out.write(f"objective {info.objective_function_value!r}\n")
            bound = getattr(info, "mip_dual_bound", info.objective_function_value)
            if not math.isfinite(bound):  # pure LP: no MIP bound
                bound = info.objective_function_value
            out.write(f"bound {bound!r}\n")
            lp = h.getLp()
            values = h.getSolution().col_value
            for name, value in zip(lp.col_names_, values):
                out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
