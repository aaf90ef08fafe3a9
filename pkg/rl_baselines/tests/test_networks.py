import torch

from rl_baselines import DuelingQNetwork, PolicyValueNet, QNetwork


class TestDueling:
    def test_aggregation_identity(self):
        torch.manual_seed(0)
        net = DuelingQNetwork(26, 7)
        obs = torch.randn(32, 26)
        with torch.no_grad():
            q = net(obs)
            z = net.trunk(obs)
            v = net.value_head(z)
            a = net.adv_head(z)
        assert torch.allclose(q, v + a - a.mean(dim=-1, keepdim=True))
        # the advantage term that survives aggregation is zero-mean over actions
        assert torch.all((q - v).mean(dim=-1).abs() < 1e-6)

    def test_single_observation(self):
        net = DuelingQNetwork(26, 7)
        assert net(torch.zeros(26)).shape == (7,)


def test_q_network_shape():
    net = QNetwork(26, 7)
    assert net(torch.zeros(5, 26)).shape == (5, 7)


def test_policy_value_shapes():
    net = PolicyValueNet(26, 7)
    logits, value = net(torch.zeros(5, 26))
    assert logits.shape == (5, 7)
    assert value.shape == (5,)


def test_seeded_init_reproducible():
    torch.manual_seed(3)
    a = QNetwork(26, 7)
    torch.manual_seed(3)
    b = QNetwork(26, 7)
    for pa, pb in zip(a.parameters(), b.parameters()):
        assert torch.equal(pa, pb)
