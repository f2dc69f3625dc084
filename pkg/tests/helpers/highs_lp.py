"""LP-file solver wrapper around HiGHS (highspy), used as an external backend in tests."""

import sys

import highspy

h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.readModel(sys.argv[1])
h.run()
status = h.getModelStatus()
print("infeasible" if status == highspy.HighsModelStatus.kInfeasible else h.modelStatusToString(status).lower())
