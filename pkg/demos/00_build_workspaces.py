"""Write the two ready-made workspace files next to this script.

travel.json   -- booking vocabulary, five productions, the client-move rule
failover.json -- the broken cluster the recovery demos and the console use

Afterwards try:
    adr --workspace demos/failover.json validate
    adr --workspace demos/failover.json recover --auto
    adr --workspace demos/failover.json serve --port 8722
"""
from pathlib import Path

from adr.scenarios import build_failover_workspace, build_travel_workspace
from adr.workspace import save_workspace

here = Path(__file__).parent
for name, ws in (("travel.json", build_travel_workspace()),
                 ("failover.json", build_failover_workspace())):
    save_workspace(ws, here / name)
    systems = ", ".join(f"{sid} ({len(s.graph)} edges)" for sid, s in ws.systems.items())
    print(f"wrote {here / name}: {len(ws.asserted)} productions, "
          f"{len(ws.rules)} rules, systems: {systems}")
