import itertools

import numpy as np
import pytest
from scipy import stats

from linkspectra import (
    GraphBasis,
    aggregate,
    analyze,
    graph_edit,
    motif_counts,
)
from linkspectra import synth
from linkspectra.synth import LemmaSizes, StructuralClass, sample_structurally_equal


# ---------------------------------------------------------------------------
# fixtures

def test_oscillating_rows():
    stream = synth.gen_oscillating(2)
    space = stream.space
    claw = set(synth.claw_indices(space).tolist())
    tri = set(synth.triangle_indices(space).tolist())
    assert claw.isdisjoint(tri) and len(claw | tri) == 16
    assert stream.slice_at(0).edge_set == claw
    assert stream.slice_at(1).edge_set == tri
    assert graph_edit(stream.slice_at(0), stream.slice_at(1)) == 16


def test_oscillating_aggregate_clique():
    stream = synth.gen_oscillating(8)
    assert np.array_equal(aggregate(stream, 2).values, np.ones((8, 16)))


def test_fig_partition_motifs():
    tree = synth.fig_partition()
    space = synth.oscillating_space()
    sets3 = tree.sets(3)
    assert set(sets3[0].tolist()) == set(synth.claw_indices(space).tolist())
    assert set(sets3[1].tolist()) == set(synth.triangle_indices(space).tolist())


def test_sbm_pair_degenerate_parameters():
    g1, g2, tree = synth.gen_sbm_pair(2, 4, 1.0, 0.0, seed=0)
    assert graph_edit(g1, g2) == 0
    basis = GraphBasis(tree, synth.block_level(4))
    counts = motif_counts(g1, basis)
    # full within-block groups, empty cross blocks
    assert counts.tolist() == [16, 0, 0, 16]


def test_sbm_tree_aligned_with_blocks():
    g1, _, tree = synth.gen_sbm_pair(2, 16, 0.5, 0.01, seed=1)
    level = synth.block_level(16)
    sets = tree.sets(level)
    assert len(sets) == 4
    within_a = {u * 32 + v for u in range(16) for v in range(16)}
    within_b = {u * 32 + v for u in range(16, 32) for v in range(16, 32)}
    assert set(sets[0].tolist()) == within_a
    assert set(sets[3].tolist()) == within_b


def test_sbm_expected_overlap_paper_parameters():
    # per relation the overlap indicator is Bernoulli(p^2) with p by block pair,
    # so E|E1 n E2| = 2*256*p_in^2 + 2*256*p_out^2 for 2 blocks of 16
    trials = 60
    p_in, p_out = 0.5, 0.01
    overlaps = []
    for seed in range(trials):
        g1, g2, _ = synth.gen_sbm_pair(2, 16, p_in, p_out, seed=seed)
        overlaps.append(len(g1.edge_set & g2.edge_set))
    expected = 2 * 256 * p_in ** 2 + 2 * 256 * p_out ** 2
    observed = np.mean(overlaps)
    se = np.std(overlaps, ddof=1) / np.sqrt(trials)
    assert abs(observed - expected) < 4 * se


def test_sbm_equal_probabilities_statistically_flat():
    # p_in == p_out removes the community signal from the coarse coefficients
    diffs = []
    for seed in range(30):
        g1, _, tree = synth.gen_sbm_pair(2, 8, 0.3, 0.3, seed=seed)
        basis = GraphBasis(tree, synth.block_level(8))
        s = analyze(g1, basis).scaling
        diffs.append(s[0] - s[3])
    mean = np.mean(diffs)
    se = np.std(diffs, ddof=1) / np.sqrt(len(diffs))
    assert abs(mean) < 4 * max(se, 1e-9)


def test_daynight_extremes():
    const = synth.gen_daynight(duty=1.0, p_active=1.0, num_times=12, seed=0)
    tmpl = synth.daynight_template(duty=1.0, num_times=12)
    assert np.array_equal(const.values, tmpl.values)
    assert const.slice_at(0).edge_count == 2 * 16 * 16
    silent = synth.gen_daynight(p_active=0.0, num_times=12, seed=0)
    assert np.all(silent.values == 0.0)


def test_sbm_deterministic_per_seed():
    a1, a2, _ = synth.gen_sbm_pair(2, 8, 0.4, 0.05, seed=3)
    b1, b2, _ = synth.gen_sbm_pair(2, 8, 0.4, 0.05, seed=3)
    assert np.array_equal(a1.weights, b1.weights)
    assert np.array_equal(a2.weights, b2.weights)


def test_daynight_deterministic():
    a = synth.gen_daynight(seed=5, num_times=40)
    b = synth.gen_daynight(seed=5, num_times=40)
    c = synth.gen_daynight(seed=6, num_times=40)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_daynight_phase_structure():
    stream = synth.gen_daynight(duty=0.5, p_active=1.0, period=20, num_times=40, seed=0)
    assert stream.slice_at(0).edge_count > 0
    assert stream.slice_at(10).edge_count == 0  # night
    assert stream.slice_at(35).edge_count == 0
    assert stream.slice_at(25).edge_count == 512  # next day phase


# ---------------------------------------------------------------------------
# structural classes

def test_sample_preserves_profile(rng):
    tree = synth.fig_partition()
    basis = GraphBasis(tree, 3)
    profile = np.array([5, 2])
    cls = StructuralClass(synth.oscillating_space(), tree, 3, profile)
    for seed in range(5):
        g = sample_structurally_equal(cls, seed)
        assert motif_counts(g, basis).tolist() == [5, 2]


def test_sample_deterministic_extremes():
    tree = synth.fig_partition()
    cls = StructuralClass(synth.oscillating_space(), tree, 3, np.array([0, 8]))
    g = sample_structurally_equal(cls, 0)
    tri = set(synth.triangle_indices().tolist())
    assert g.edge_set == tri


def test_sample_uniform_chi_square():
    # motif width 4, m = 2: six possible subsets, 10^4 draws
    tree = synth.fig_partition()
    space = synth.oscillating_space()
    cls = StructuralClass(space, tree, 2, np.array([2, 0, 0, 0]))
    members = tree.sets(2)[0]
    subsets = {frozenset(c): 0 for c in itertools.combinations(members.tolist(), 2)}
    rng = np.random.default_rng(77)
    draws = 10_000
    for _ in range(draws):
        g = sample_structurally_equal(cls, rng)
        subsets[frozenset(g.edge_set)] += 1
    counts = np.array(list(subsets.values()))
    assert counts.sum() == draws
    _, p = stats.chisquare(counts)
    assert p > 1e-4


def test_profile_bounds_validated():
    tree = synth.fig_partition()
    with pytest.raises(ValueError):
        StructuralClass(synth.oscillating_space(), tree, 3, np.array([9, 0]))
    with pytest.raises(ValueError):
        StructuralClass(synth.oscillating_space(), tree, 3, np.array([1, 2, 3]))


# ---------------------------------------------------------------------------
# lemma verification

@pytest.mark.parametrize("lemma", [1, 2, 3, 4])
def test_verify_lemma_passes(lemma):
    checks = synth.verify_lemma(lemma, trials=4000, seed=13)
    assert checks, "no checks emitted"
    for c in checks:
        assert c.passed, f"{c.statistic}: expected {c.expected}, got {c.observed}"
        assert c.lemma == lemma


def test_verify_lemma_report_schema():
    checks = synth.verify_lemma(2, trials=500, seed=3)
    doc = checks[2].as_dict()
    assert set(doc) == {"lemma", "statistic", "expected", "observed", "stderr",
                        "trials", "pass"}
    mc = [c for c in checks if c.stderr > 0]
    assert mc, "lemma 2 must include Monte-Carlo statistics"
    assert all(c.trials >= 500 for c in mc)


def test_verify_lemma_rejects_tiny_trials():
    with pytest.raises(ValueError):
        synth.verify_lemma(1, trials=10, seed=0)
    with pytest.raises(ValueError):
        synth.verify_lemma(7, trials=1000, seed=0)


def test_verify_all_deterministic():
    a = synth.verify_all(trials=500, seed=21)
    b = synth.verify_all(trials=500, seed=21)
    assert [c.observed for c in a] == [c.observed for c in b]


def test_mc_respects_thread_cap(monkeypatch):
    monkeypatch.setenv("LINKSPECTRA_THREADS", "1")
    seq = synth.verify_lemma(3, trials=2000, seed=5, sizes=LemmaSizes())
    monkeypatch.setenv("LINKSPECTRA_THREADS", "3")
    par = synth.verify_lemma(3, trials=2000, seed=5, sizes=LemmaSizes())
    assert [c.observed for c in seq] == [c.observed for c in par]
    monkeypatch.setenv("LINKSPECTRA_THREADS", "0")
    with pytest.raises(ValueError):
        synth.verify_lemma(3, trials=500, seed=0)
