"""
@file ablation_steps.py

Holds the cmd calls to validate the limit meander and the excursion across doubling time-step counts,
showing the discretization bias of the occupation functional shrinking as the grid refines.
acceptance_checks.py compares the sample means of consecutive step counts.
"""
import os

paths = 50000

for steps in [256, 512, 1024, 2048, 4096]:
    os.system(f"python3 main.py command=validate law=meander-limit law.l=1 law.t=2 sim.paths={paths} sim.steps={steps} expname=ablation_steps_meander_{steps}")
    os.system(f"python3 main.py command=validate law=excursion law.l=1 law.t=2 sim.paths={paths} sim.steps={steps} expname=ablation_steps_excursion_{steps}")
