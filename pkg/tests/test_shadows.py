import numpy as np

from qssprep import shadows
from qssprep.analysis import offdiag_region_block, reduced_density_matrix


def random_vec(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def test_exact_channel_on_single_qubit_states():
    zero = np.array([1.0, 0.0], dtype=complex)
    got = shadows.shadow_expectation_exact(zero, [0])
    assert np.max(np.abs(got - np.array([[1.0, 0.0], [0.0, 0.0]]))) < 1e-12
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    assert np.max(np.abs(shadows.shadow_expectation_exact(plus, [0]) - 0.5)) < 1e-12


def test_channel_inverts_to_reduced_density_matrix():
    rng = np.random.default_rng(20)
    for n, region in ((2, [0]), (2, [1]), (3, [0, 2]), (3, [1])):
        psi = random_vec(rng, 1 << n)
        got = shadows.shadow_expectation_exact(psi, region, n_qubits=n)
        want = reduced_density_matrix(psi, region, n)
        assert np.max(np.abs(got - want)) < 1e-12


def test_register_variant_estimates_offdiagonal_block():
    rng = np.random.default_rng(21)
    n = 2
    for region in ([0], [1]):
        u = random_vec(rng, 1 << n)
        v = random_vec(rng, 1 << n)
        stacked = np.concatenate([u, v]) / np.sqrt(2.0)
        got = shadows.shadow_expectation_exact(stacked, region, n_qubits=n, with_register=True)
        want = offdiag_region_block(u, v, region, n)
        assert np.max(np.abs(got - want)) < 1e-12


def test_sampled_estimate_stays_within_five_sigma():
    rng = np.random.default_rng(22)
    psi = random_vec(rng, 8)
    batch = shadows.sample_shadow_batch(psi, [0, 2], 20000, rng)
    exact = shadows.shadow_expectation_exact(psi, [0, 2])
    est = shadows.shadow_reconstruct(batch)
    se = shadows.shadow_stderr(batch)
    assert np.all(np.abs(est - exact) <= 5.0 * se)
    assert np.all(se >= 1e-12)


def test_register_sampling_is_unbiased_enough():
    rng = np.random.default_rng(23)
    u = random_vec(rng, 4)
    v = random_vec(rng, 4)
    stacked = np.concatenate([u, v]) / np.sqrt(2.0)
    batch = shadows.sample_shadow_batch(stacked, [1], 30000, rng, n_qubits=2, with_register=True)
    est = shadows.shadow_reconstruct(batch)
    se = shadows.shadow_stderr(batch)
    want = offdiag_region_block(u, v, [1], 2)
    assert np.all(np.abs(est - want) <= 5.0 * se)


def test_counts_bookkeeping_and_determinism():
    psi = random_vec(np.random.default_rng(7), 8)
    one = shadows.sample_shadow_batch(psi, [1], 500, np.random.default_rng(99))
    two = shadows.sample_shadow_batch(psi, [1], 500, np.random.default_rng(99))
    assert int(one.counts.sum()) == 500
    assert one.combos == two.combos
    assert np.array_equal(one.counts, two.counts)
    other = shadows.sample_shadow_batch(psi, [1], 500, np.random.default_rng(100))
    assert not np.array_equal(one.counts, other.counts)


def test_expand_records_matches_counts():
    psi = random_vec(np.random.default_rng(8), 8)
    rng = np.random.default_rng(41)
    batch = shadows.sample_shadow_batch(psi, [0, 1], 300, rng, with_register=False)
    records = shadows.expand_records(batch)
    assert len(records) == 300
    # rebuild the grouped counts from the flat records
    rebuilt = np.zeros_like(batch.counts)
    index = {combo: i for i, combo in enumerate(batch.combos)}
    for rec in records:
        bits = [(1 - o) // 2 for o in rec.outcomes]
        pattern = 0
        for bit in bits:
            pattern = (pattern << 1) | bit
        rebuilt[index[rec.bases], pattern] += 1
    assert np.array_equal(rebuilt, batch.counts)
    assert records[0].register_axis is None


def test_register_records_carry_the_coin():
    u = random_vec(np.random.default_rng(9), 4)
    stacked = np.concatenate([u, u]) / np.sqrt(2.0)
    batch = shadows.sample_shadow_batch(stacked, [0], 200, np.random.default_rng(10), n_qubits=2, with_register=True)
    for rec in shadows.expand_records(batch):
        assert rec.register_axis in (0, 1)
        assert rec.register_outcome in (-1, 1)
        assert all(basis in ("X", "Y", "Z") for basis in rec.bases)
