import pytest

from lsestop.config import from_dict


@pytest.fixture
def small_config():
    def make(**over):
        raw = {"benchmark": {"function": "sphere", "resolution": 6, "noise_std": 0.5},
               "budget": 12, "n_seeds": 2, "monitors": ["proposed", "fc", "fs"],
               "fit": {"restarts": 2, "maxiter": 60}, "fs": {"n_samples": 200}}
        for k, v in over.items():
            if isinstance(v, dict) and isinstance(raw.get(k), dict):
                raw[k] = {**raw[k], **v}
            else:
                raw[k] = v
        return from_dict(raw)
    return make
