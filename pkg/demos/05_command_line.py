"""Drive the command-line tool on a generated data set.

The generator writes a CSV, the tool reads it back, runs both solvers and
prints the report.  The same can be done from a shell:

    exactlts --gen 7,12,2,0.2 --save-gen data.csv
    exactlts data.csv --h 0.75 --algorithm both --report text
"""
import os
import tempfile

from exactlts.cli import main

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "data.csv")
    main(["--gen", "7,12,2,0.2", "--save-gen", path, "--report", "text"])
    print(open(path).read().splitlines()[:3], "...\n")
    code = main([path, "--h", "0.75", "--algorithm", "both", "--report", "text"])
    print("exit code", code)
