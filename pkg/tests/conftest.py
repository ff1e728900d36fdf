import hypothesis

hypothesis.settings.register_profile(
    "suite", derandomize=True, deadline=None, max_examples=25
)
hypothesis.settings.load_profile("suite")
