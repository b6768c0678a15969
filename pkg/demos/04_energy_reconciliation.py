"""
Estimated vs. actual mission energy
===================================

Flown missions use more energy than planned because drones spend time
calibrating after takeoff. Recording that time and charging it at
maneuvering power closes the gap; what remains is power noise.
"""

from swarmsense import pipeline
from swarmsense.config import load_config
from swarmsense.missionsim import SimConfig, execute_mission, reconcile_energy

cfg = load_config("paper.cfg").override(seed=2)
result = pipeline.run(cfg)
model = cfg.energy_model()

sim = SimConfig(calibration_s=20.0, noise_sigma=0.02, seed=2)
logs = execute_mission(result.selection, result.plan_sets, cfg.smap, model, cfg.spec, sim)

print("UAV  estimated  +calibration    actual    error (J)")
for r in reconcile_energy(logs, model):
    print(f"{r.uav_index:3d}  {r.estimated:9.1f}  {r.corrected:12.1f}  {r.actual:8.1f}  {r.error:+8.1f}")
