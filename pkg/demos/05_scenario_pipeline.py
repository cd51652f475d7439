# %% [markdown]
# # The full scenario pipeline
#
# A scenario JSON file describes graph, dynamics, policy and requested
# artifacts; the runner produces deterministic CSV/JSON files that the
# plotting frontend consumes. This script runs the bundled reference
# scenario into a temporary directory and peeks at each artifact.

# %%
import json
import pathlib
import tempfile

from opinionfield.cli import run
from opinionfield.scenario import load_scenario

here = pathlib.Path(__file__).resolve().parent
scenario = load_scenario(here / "scenarios" / "reference.json")
out_dir = pathlib.Path(tempfile.mkdtemp(prefix="opinionfield_"))
artifacts = run(scenario, out_dir)

# %%
print("\nper-agent cost summaries (first three):")
for row in json.loads(artifacts["costs"].read_text())[:3]:
    print(f"  agent {row['agent']}: total={row['total']:.4f} "
          f"(disagreement {row['disagreement']:.4f}, stubbornness "
          f"{row['stubbornness']:.4f}, effort {row['effort']:.6f})")

picard = json.loads(artifacts["picard"].read_text())
print(f"\nlaw iteration: converged={picard['converged']} "
      f"terminal W2 per sweep {['%.2e' % d for d in picard['terminal_w2']]}")

sens_lines = artifacts["sensitivity"].read_text().strip().split("\n")
print(f"\nsensitivity sweep rows: {len(sens_lines) - 1} (header: {sens_lines[0]})")
print("re-run with a different --workers to confirm byte-identical artifacts")
