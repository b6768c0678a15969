"""
Energy model of a small quadcopter
==================================

Calibrate the momentum-theory hover model to 31.80 W, check the endurance
that the battery allows and cost a few sensing routes on the 4x4 map.
"""

from swarmsense.energetics import (DroneSpec, battery_energy, calibrate, hover_endurance,
                                   induced_hover_power)
from swarmsense.plangen import make_plan
from swarmsense.sensemap import build_map

spec = DroneSpec()  # 100 g, 72.6 mm props, 1100 mAh
print("rotor disk area     %.5f m^2" % spec.disk_area)
print("induced hover power %.3f W" % induced_hover_power(spec))

# fit the propulsive efficiency so the model reproduces the measured hover power
model = calibrate(spec, target_hover_power=31.80, avionics_power=2.0)
print("efficiency eta      %.5f" % model.efficiency)
print("hover / maneuver    %.2f W / %.2f W" % (model.hover_power, model.maneuver_power))

print("battery             %.0f J total, %.1f J usable" % (battery_energy(spec),
                                                           battery_energy(spec, usable=True)))
print("hover endurance     %.1f s (%.2f min)" % (hover_endurance(spec, model),
                                                 hover_endurance(spec, model) / 60))

smap = build_map(4, 4, 1.68, 1.18, departure_cell=0)
for route in ([1], [0, 7, 10, 12, 14, 15], [4, 8, 12, 13, 14, 15]):
    plan = make_plan(route, smap, model, spec)
    print("route %-22s time %6.1f s  energy %7.1f J" % (plan.route, plan.total_time, plan.cost))
