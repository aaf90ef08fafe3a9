import pytest

from rl_baselines import BridgeClient, BridgeError


class TestHandshake:
    def test_hello_fields(self, client):
        assert client.obs_len == 26
        assert client.action_count == 7
        assert client.server_config["task"]["k_nearest"] == 5

    def test_reset_and_step_shapes(self, client):
        state = client.reset(seed=0)
        assert state["type"] == "state"
        assert len(state["obs"]) == client.obs_len
        assert state["step_index"] == 0
        nxt = client.step(1)
        assert nxt["step_index"] == 1
        assert 0.0 <= nxt["reward"] <= 1.0

    def test_same_seed_same_stream(self, client):
        first = [client.reset(seed=4)] + [client.step(a) for a in (1, 3, 5, 0)]
        second = [client.reset(seed=4)] + [client.step(a) for a in (1, 3, 5, 0)]
        assert first == second


class TestErrors:
    def test_protocol_error_aborts_with_transcript(self):
        c = BridgeClient()
        c.hello()
        try:
            with pytest.raises(BridgeError) as err:
                c.step(0)  # before any reset
            assert "transcript tail" in str(err.value)
            assert '"type": "step"' in str(err.value)
        finally:
            c.close()

    def test_bad_action_raises(self, client):
        client.reset(seed=0)
        with pytest.raises(BridgeError):
            client.step(99)
        # session survives a rejected action
        assert client.step(0)["type"] == "state"

    def test_dead_server_detected(self):
        c = BridgeClient()
        c.hello()
        c._proc.kill()
        c._proc.wait()
        with pytest.raises(BridgeError):
            c.reset(seed=0)
