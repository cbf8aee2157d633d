#!/usr/bin/env python3
# Walk through one hand-checkable sample path of the actuator, slot by slot.
#
# The scenario: a data packet arrives in slots 2 and 6, a single energy
# packet is harvestable in slot 4, nothing else happens.  The packet cached
# at t=2 waits two slots for energy and is actuated at t=4 at age 3, which
# is exactly where the actuated-information age lands while the actuation
# age resets to 1.

from aoa_lab import SlotEvents, run_trace

events = [SlotEvents(d, e) for d, e in [
    (0, 0), (1, 0), (0, 0), (0, 1), (0, 0), (1, 0), (0, 0)]]

print("t  data energy | cache battery actuated | aoi aoa aoai")
for ev, (state, actuated) in zip(events, run_trace(events)):
    print(f"{state.slot}  {int(ev.data_arrived)}    {int(ev.energy_arrived)}      |"
          f"   {state.system.cache}      {state.system.battery}        {int(actuated)}     |"
          f"  {state.ages.aoi}   {state.ages.aoa}   {state.ages.aoai}")

print()
print("Things to notice:")
print(" * t=2: the fresh packet resets aoi to 1 but cannot actuate (no energy),")
print("   so it sits in the cache and aoa/aoai keep climbing.")
print(" * t=4: the harvest actuates the cached packet. aoa resets to 1; aoai")
print("   resets to the packet's age, which is the current aoi = 3.")
print(" * aoai always dominates the other two ages; aoi and aoa cross each")
print("   other freely (compare t=4 and t=7).")
