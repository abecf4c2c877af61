import struct

import numpy as np
import pytest

from sentopic.core.errors import DataError
from sentopic.models.persistence import MAGIC, dumps_params, load_params_with_metadata, loads_params, save_params
from sentopic.schemas.model import ModelMode


class TestModelFile:
    @pytest.mark.parametrize("S", [0, 2])
    def test_bit_exact_round_trip(self, tmp_path, rng, oracle, S):
        params = oracle.random_params(rng, 7, 4, S)
        params.W[0, 0] = np.nextafter(1.0, 2.0)
        save_params(params, tmp_path / "model.rbm", {"seed": "3"})
        loaded, metadata = load_params_with_metadata(tmp_path / "model.rbm")
        assert loaded.mode is params.mode
        for name, block in params.blocks().items():
            assert loaded.blocks()[name].tobytes() == block.tobytes()
        assert metadata == {"seed": "3"}

    def test_header_layout(self):
        from sentopic.schemas.model import ModelParams

        data = dumps_params(ModelParams.zeros(3, 2, 2))
        assert data[:8] == MAGIC
        assert struct.unpack_from("<IIIIB", data, 8) == (1, 3, 2, 2, 1)
        # 28-byte header, 6 + 4 + 3 + 2 + 2 doubles, empty metadata object
        assert len(data) == 28 + 17 * 8 + 4 + 2

    def test_rs_mode_flag(self, rng, oracle):
        params, _ = loads_params(dumps_params(oracle.random_params(rng, 3, 2)))
        assert params.mode is ModelMode.RS and params.U is None

    def test_bad_magic(self):
        with pytest.raises(DataError, match="magic"):
            loads_params(b"NOTAMODEL" + bytes(40))

    def test_truncated(self, rng, oracle):
        data = dumps_params(oracle.random_params(rng, 3, 2, 2))
        with pytest.raises(DataError, match="truncated"):
            loads_params(data[:40])
