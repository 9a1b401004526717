"""
@file acceptance.py

Holds the cmd calls for the full-size acceptance campaigns (10^5 paths, 4096 steps) and the
Feynman-Kac sweep, each into its own experiment folder
"""
import os

paths = 100000
steps = 4096
seed = 125125125

# Closed-form tables with their law sidecars
os.system("python3 main.py command=eval law=meander-limit law.l=1 law.t=4 expname=acceptance_eval grid=200")
os.system("python3 main.py command=eval law=excursion law.l=1 law.t=2 expname=acceptance_eval grid=200")

# Atom mass sqrt(l/t) = 0.5 and the arcsine-with-weight continuous part
os.system(f"python3 main.py command=validate law=meander-limit law.l=1 law.t=4 sim.paths={paths} sim.steps={steps} seed={seed} expname=acceptance_meander_limit")
os.system(f"python3 main.py command=validate law=meander-limit law.l=1 law.t=2 sim.paths={paths} sim.steps={steps} seed={seed} expname=acceptance_meander_limit")

# Excursion law and mean, through the limit and through rejection from u with opposite drifts
os.system(f"python3 main.py command=validate law=excursion law.l=1 law.t=2 sim.paths={paths} sim.steps={steps} seed={seed} expname=acceptance_excursion")
os.system(f"python3 main.py command=sample law=excursion-u law.mu=0.5 law.u=0.05 sim.paths=50000 sim.steps={steps} seed={seed} expname=acceptance_excursion_plus")
os.system(f"python3 main.py command=sample law=excursion-u law.mu=-0.5 law.u=0.05 sim.paths=50000 sim.steps={steps} seed={seed + 1} expname=acceptance_excursion_minus")

# Negative control, expected to exit with code 1
os.system(f"python3 main.py command=validate law=excursion reference_law=free sim.paths={paths} sim.steps={steps} seed={seed} expname=acceptance_negative")

# Weak limit of the finite-u meander
for u in [0.4, 0.2, 0.1, 0.05]:
    os.system(f"python3 main.py command=validate law=meander-u law.mu=0 law.u={u} reference_law=meander-limit sim.paths=20000 sim.steps=1024 seed={seed} expname=acceptance_weak_limit_u{u}")

# Feynman-Kac cross-check over drift, start and potential level
for mu in [-0.3, 0.0, 0.3]:
    for x in [-0.5, 0.0, 0.5]:
        for beta in [0.5, 1.0, 2.0]:
            os.system(f"python3 main.py command=fk_check law=free law.mu={mu} law.x={x} law.t=1 fk.beta={beta} expname=acceptance_fk_mu{mu}_x{x}_beta{beta}")

# Asymptotic uniformity and the density/CDF families
os.system("python3 main.py command=sweep sweep.kind=asymptotic law=excursion law.l=1 expname=acceptance_sweep")
os.system("python3 main.py command=sweep sweep.kind=ratios law=excursion law.t=2 expname=acceptance_sweep")
os.system("python3 main.py command=sweep sweep.kind=half law=excursion law.t=2 expname=acceptance_sweep")

# Comparisons across the runs above (the step-doubling checks also need ablation_steps.py)
os.system("python3 scripts/ablation_steps.py")
os.system("python3 scripts/acceptance_checks.py experiments")
