"""
Timing the engines
==================

dFIF and htFIF replace the FIF loop with one spectral multiplication, and
FIF replaces the time-domain convolutions of IF with FFTs. On a
five-component signal the ordering shows up clearly even though absolute
numbers depend on the machine.
"""
#%%
import modefir
from modefir.bench import generate, load_fixture, run_timing

spec = load_fixture("example2")
s, truths = generate(spec)
print(f"{spec.n} samples, {len(truths)} components")

rows = run_timing(s, ["FIF", "dFIF", "htFIF"], repeats=3)
for r in rows:
    print(f"{r.method:>6}: {r.seconds:.3f} s, {r.imf_count} IMFs, iterations {r.iterations}")

#%%
# Plain IF is far slower, so compare it on a shorter copy of the same signal.
small, _ = generate(spec.rescaled(2**14))
cfg = modefir.DecompositionConfig(max_imfs=3)
for r in run_timing(small, ["IF", "FIF"], cfg, repeats=3):
    print(f"{r.method:>6} (n=2^14, 3 IMFs): {r.seconds:.4f} s")

#%%
# Accuracy against the known components, pairing IMFs by correlation.
from modefir.bench import matched_error

for method in ("FIF", "dFIF", "htFIF"):
    d = modefir.decompose(s, method=method)
    print(f"{method:>6}: matched error {matched_error(d.imfs, truths):.2e}")
