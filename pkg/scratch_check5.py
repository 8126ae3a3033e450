"""Scratch: runner end-to-end on a shrunken decay config + wellposed run + CLI."""
import shutil
import subprocess
import time

SMALL = """
format_version = 1
output_dir = "out/scratch_small"
seed = 7

[grid]
n = 16

[scheme]
kind = "etdrk2"
dt = 2e-3

[run]
t_end = 2.0
sample_every = 0.02
snapshot_stride = 50

[initial_data]
kind = "taylor_green"
scale_to_xm1 = 0.3

[decay]
sigmas = [-1.25]
deltas = [1.5]
checks = ["gronwall", "eq2", "gevrey", "lowpass", "highpass", "split", "sigma_case1", "sigma_case2"]
gevrey_eps0 = 0.45
fit_window = [0.5, 2.0]
"""

from torusns.config import parse_config
from torusns.runner import run, wellposed_run, decay_checks_from_dir

shutil.rmtree("out/scratch_small", ignore_errors=True)
cfg = parse_config(SMALL)
t0 = time.time()
manifest = run(cfg)
print(f"run took {time.time()-t0:.1f}s")
print("verdicts:", manifest.verdicts)
print("files:", manifest.files[:8], "...")

# decay from stored dir
reports, fits = decay_checks_from_dir("out/scratch_small", ["gronwall", "split", "lowpass", "highpass", "sigma_case2"])
print("stored-run verdicts:", {k: r.all_hold for k, r in reports.items()})

# determinism
shutil.rmtree("out/scratch_small2", ignore_errors=True)
cfg2 = parse_config(SMALL.replace("out/scratch_small", "out/scratch_small2"))
run(cfg2)
import filecmp, os
same = True
for name in manifest.files:
    a, b = os.path.join("out/scratch_small", name), os.path.join("out/scratch_small2", name)
    if not filecmp.cmp(a, b, shallow=False):
        same = False
        print("MISMATCH:", name)
print("byte-identical outputs:", same)

# wellposed via runner
from torusns.config import load_config
t0 = time.time()
res = wellposed_run(load_config("configs/acceptance_wellposed.toml"))
print(f"wellposed took {time.time()-t0:.1f}s")
print("conditions all_hold:", res["conditions"].all_hold, "eps:", res["conditions"].epsilon,
      "T:", res["conditions"].T)
print("contraction:", res["contraction"].converged, res["contraction"].observed_ratio)
print("crosscheck:", res["crosscheck_x0_error"], "succeeded:", res["succeeded"])

# CLI smoke
print(subprocess.run(["torusns", "lemmas", "--trials", "20", "--seed", "3"],
                     capture_output=True, text=True).stdout)
print(subprocess.run(["torusns", "surrogate", "--profile", "plateau:1:0:1", "--nu", "1",
                      "--times", "0.1,1,10"], capture_output=True, text=True).stdout)
r = subprocess.run(["torusns", "decay", "out/scratch_small", "--check", "all"],
                   capture_output=True, text=True)
print(r.stdout, "exit:", r.returncode)
