"""Drive the command-line harness programmatically.

Writes an experiment config, runs a time-step sweep, and prints the
resulting accuracy/cost table.  The same config works with the installed
`morrow` executable:

    morrow sweep --config exp.ini --out out --dt 0.008,0.004,0.002
"""

import os
import tempfile

from morrow import analysis, cli

CONFIG = """\
[model]
name = burgers
n = 64
viscosity = 0.01

[time]
scheme = backward_euler
dt = 0.002
T = 0.04

[pod]
nu = 0.9999

[rom]
kind = lspg

[output]
probe = 20
"""

with tempfile.TemporaryDirectory() as work:
    cfg = os.path.join(work, "exp.ini")
    with open(cfg, "w") as fh:
        fh.write(CONFIG)
    out = os.path.join(work, "out")
    code = cli.main(["sweep", "--config", cfg, "--out", out,
                     "--dt", "0.008,0.004,0.002,0.001", "--parallel", "2"])
    assert code == 0, f"sweep exited with {code}"

    sweep = analysis.read_sweep_csv(os.path.join(out, "sweep.csv"))
    print(f"{'dt':>8s} {'probe error':>12s} {'wall [s]':>9s} {'stable':>7s}")
    for i in range(len(sweep.dt)):
        print(f"{sweep.dt[i]:8g} {sweep.error[i]:12.4e} "
              f"{sweep.walltime_s[i]:9.3f} {str(bool(sweep.stable[i])):>7s}")
    print("\nartifacts:", ", ".join(sorted(os.listdir(out))))
