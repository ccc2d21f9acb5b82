from hypothesis import settings

settings.register_profile("fast", max_examples=25, deadline=None)
settings.load_profile("fast")
