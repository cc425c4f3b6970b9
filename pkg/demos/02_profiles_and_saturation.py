#!/usr/bin/env python3
"""Curried profile metrics and where extra assignments stop refining.

Run: python demos/02_profiles_and_saturation.py
"""

from portalis.cli import default_schema_path
from portalis.dsl import load_file

engine = load_file(default_schema_path()).engine

print("== generalized value sets under assignment chains ==")
for name in ("z", "r", "q"):
    metric = engine.metrics[name]
    base = metric.apply_assignment([])
    settings = metric.apply_assignment([("s", "mmedia")])
    both = metric.apply_assignment([("s", "mmedia"), ("p", "corporate")])
    print(f"metric {name}:")
    print(f"  base                      {sorted(base)}")
    print(f"  (s=mmedia)                {sorted(settings)}")
    print(f"  (s=mmedia)(p=corporate)   {sorted(both)}")
    print(f"  saturation level          {metric.saturation_level()}")

print("\nsegmentation and costs saturate after the settings assignment;")
print("overheads keep refining through the registration status.")

print("\n== session-scoped access profiles ==")
for persona in ("visitor", "manager", "admin"):
    session = engine.open_session(persona)
    access = engine.access_profile(session.token)
    print(f"{persona:8s} rank={session.profile.rank.label:13s} "
          f"pages={sorted(access.visible_pages)} "
          f"metadata={access.metadata_access}")
    engine.close_session(session.token)
