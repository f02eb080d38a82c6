from hypothesis import settings

# exact arithmetic has uneven per-example cost; first calls also fill memo tables
settings.register_profile("exact", deadline=None)
settings.load_profile("exact")
