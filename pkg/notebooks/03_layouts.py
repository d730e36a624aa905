"""
Mapping onto hardware layouts
=============================

Place the qubit chain of an n-level circuit on triangular, square and
heavy-hex patches and count the SWAPs each SWAT block needs.
"""

from collections import Counter

from davio_synth import map_to_heavy_hex, map_to_square, map_to_triangular, route_swat, symmetric_lattice
from davio_synth import synthesize_from_lattice
from davio_synth.layout import heavy_hex_layout, layout_to_dot
from davio_synth.mapper import predicted_swaps, sweep, sweep_to_csv

n = 4
c = synthesize_from_lattice(symmetric_lattice(n, [0, 1, 1, 0, 1]))

for mapper in (map_to_triangular, map_to_square, map_to_heavy_hex):
    r = mapper(c, n)
    print(f"{r.layout.value:10s} swaps={r.total_swaps:3d} cnots={r.total_extra_cnots:3d}",
          dict(Counter(x.value for x in r.connectivity)))

# %%
# Routing wraps the offending blocks with SWAPs on the physical qubits.
r = map_to_square(c, n)
routed = route_swat(c, r)
print(c.count("SWAP"), "->", routed.count("SWAP"))

# %%
# The measured totals against the closed forms.
rows = sweep(range(1, 11))
print(sweep_to_csv(rows))
print(all(row[k] == predicted_swaps(k, row["n"]) for row in rows for k in row if k != "n"))

# %%
# A two-by-two heavy-hex patch in graphviz form (neato honours pos).
print(layout_to_dot(heavy_hex_layout(2, 2))[:300], "...")
