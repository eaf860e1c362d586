"""DC sensitivities on a three-bus ring and on the IEEE 30-bus case.

Run with ``python demos/01_sensitivities.py``.
"""

# %% [markdown]
# A triangle of equal reactances is the smallest meshed network. Pushing one
# unit from bus 1 to bus 2 sends two thirds over the direct line and one third
# around the other side.

# %%
import numpy as np

from gridlet import Network, dc_flow, load_bundled, sensitivities
from gridlet.oracle import outage_oracle

tri = Network.from_edges([(1, 2), (2, 3), (1, 3)], slack=3, reactance=0.1, name="triangle")
print("flows for a 1->2 transfer:", dc_flow(tri, {1: 1.0, 2: -1.0}).round(4))

# %% [markdown]
# When any one line trips, the whole of its flow lands on each of the other two,
# so every off-diagonal LODF is +-1.

# %%
s = sensitivities(tri)
print("ISF (rows = lines, cols = buses):\n", s.isf.values.round(4))
print("LODF:\n", s.lodf.values.round(4))

# %% [markdown]
# On a real case, compare predicted post-outage flows against a fresh solve of
# the network with the line removed.

# %%
net = load_bundled("case_ieee30")
rng = np.random.default_rng(0)
p = rng.uniform(-1, 1, net.n_bus)
p -= p.mean()
stack = sensitivities(net)
pre = dc_flow(net, p)
worst = 0.0
for lo in range(net.n_branch):
    if stack.lodf.island[lo]:
        continue
    post = pre + stack.lodf.values[:, lo] * pre[lo]
    post[lo] = 0.0
    worst = max(worst, np.abs(post - outage_oracle(net, p, lo)).max())
print(f"largest prediction error over {net.n_branch} outages: {worst:.1e} p.u.")
print("island-causing lines:", [net.label(i) for i in np.flatnonzero(stack.lodf.island)])

# %% [markdown]
# The slack bus only fixes the angle reference, so the LODF matrix does not
# depend on it.

# %%
other = sensitivities(net.with_slack(17)).lodf.values
ok = ~np.isnan(other)
print("max LODF change when moving the slack:", np.abs(other[ok] - stack.lodf.values[ok]).max())
