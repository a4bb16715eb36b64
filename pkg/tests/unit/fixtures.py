# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

import numpy as np
import pytest

from laguerre_calculus.series import PRECISION_ENV_VAR, ScalarMode

SEED = 20240607


class CalculusUnitTestFixtures:
    @pytest.fixture(autouse=True)
    def setup(self, monkeypatch: pytest.MonkeyPatch):
        monkeypatch.delenv(PRECISION_ENV_VAR, raising=False)
        self.rng = np.random.default_rng(SEED)
        yield

    @pytest.fixture(autouse=True)
    def context(self):
        self.exact = ScalarMode.exact()
        self.floating = ScalarMode.floating()
