"""N-1 and N-2 screening joined with the graphlet census.

Run with ``python demos/03_contingency_and_report.py [OUT_DIR]``.
"""

# %% [markdown]
# Rank single outages by the largest |LODF| they cause on a surviving line.
# Island-causing lines have no LODF and sit at the end.

# %%
import sys
import tempfile

from gridlet import load_bundled, n1_scan, n2_scan
from gridlet.report import bubble_records, emit_report, multi_case_bubble_data, n1_report, write_outputs

net = load_bundled("case_ieee30")
records = n1_scan(net)
for r in records[:5]:
    print(f"{net.label(r.outage):>6}  max|LODF| = {r.max_abs_lodf:.4f}  on {net.label(r.argmax)}")
print("island-causing:", [net.label(r.outage) for r in records if r.island_causing])

# %% [markdown]
# Double outages: for every first outage the network is rebuilt without it and
# the worst second outage is found.

# %%
res = n2_scan(net)
b = res.best
print(f"worst pair: {net.label(b.first)} then {net.label(b.second)}, max|LODF| = {b.max_abs_lodf:.4f}")

# %% [markdown]
# The report pairs each ranked line with its graphlet counts.

# %%
rep = n1_report(net, k=10, n2=True, records=records, n2_result=res)
print(emit_report(rep, "csv", table="top"))
print(emit_report(rep, "csv", table="bottom"))
for rec in bubble_records(rep, "n1"):
    print(rec)

# %% [markdown]
# Several cases at once; the outputs feed a bubble chart of graphlet share
# against max |LODF|.

# %%
out_dir = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="gridlet-")
recs, reports, failures = multi_case_bubble_data(["case_ieee30", "case57", "case118"], n2=True)
for p in write_outputs(reports, recs, out_dir):
    print("wrote", p)
