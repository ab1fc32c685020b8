import numpy as np
import pytest

from linkspectra import (
    FourierBasis,
    FrequencyFilter,
    GraphBasis,
    JointFilter,
    KeepRule,
    LinkStreamMatrix,
    analyze,
    apply_joint_filter,
    backbone,
    decompose,
    default_basis,
    full_space,
    graph_edit,
    motif_counts,
    reconstruct,
    regularity,
    relaxed_time_regularity,
    stream_from_slices,
    time_structure,
)
from linkspectra.graphbasis import coarse_pass_response
from linkspectra.spectra import apply_joint_filter_sequential, freq_relational, structure_split
from linkspectra import synth

from conftest import random_tree


def random_stream(rng, t=16, n=4, density=0.4, unweighted=True):
    space = full_space(n)
    vals = (rng.random((t, space.num_relations)) < density).astype(float)
    return LinkStreamMatrix(space, 0, vals, unweighted=unweighted)


# ---------------------------------------------------------------------------
# decomposition

def test_zero_stream(fig_basis):
    stream = LinkStreamMatrix(full_space(4), 0, np.zeros((8, 16)))
    c = decompose(stream, fig_basis)
    assert np.all(c.values == 0.0)
    assert np.all(reconstruct(c).values == 0.0)


def test_rank_one_basis_stream_is_single_indicator(fig_basis):
    t = 8
    psi = FourierBasis(t).matrix()
    phi = fig_basis.materialize()
    for u, k in ((0, 0), (t // 2, 3)):
        z = np.outer(psi[:, u].real, phi[k])
        stream = LinkStreamMatrix(full_space(4), 0, z)
        c = decompose(stream, fig_basis).values
        expected = np.zeros((t, 16))
        expected[u, k] = 1.0
        assert np.abs(np.abs(c) - expected).max() < 1e-10


def test_basis_streams_orthonormal(fig_basis):
    t = 8
    psi = FourierBasis(t).matrix()
    phi = fig_basis.materialize()
    pairs = [(0, 0), (1, 0), (0, 3), (5, 9), (1, 9)]
    for i, (u, k) in enumerate(pairs):
        zi = np.outer(psi[:, u], phi[k])
        for (u2, k2) in pairs[i:]:
            zj = np.outer(psi[:, u2], phi[k2])
            ip = np.vdot(zj, zi)
            expected = 1.0 if (u, k) == (u2, k2) else 0.0
            assert abs(ip - expected) < 1e-12


def test_oscillating_four_coefficients(fig_basis):
    stream = synth.gen_oscillating(8)
    c = decompose(stream, fig_basis)
    mag = c.magnitude
    hot = {(int(u), int(k)) for u, k in np.argwhere(mag > 1e-9)}
    assert hot == {(0, 0), (0, 1), (4, 0), (4, 1)}
    vals = sorted(mag[mag > 1e-9])
    assert vals[-1] == pytest.approx(vals[0], abs=1e-10)
    assert vals[0] == pytest.approx(np.sqrt(8) * np.sqrt(8) / 2, abs=1e-10)


def test_two_application_orders_agree(rng, fig_basis):
    stream = random_stream(rng, t=12)
    time_then_graph = fig_basis.analyze_values(
        FourierBasis(12).forward(stream.values.astype(complex)))
    graph_then_time = decompose(stream, fig_basis).values
    assert np.abs(time_then_graph - graph_then_time).max() < 1e-10


def test_parseval_2d_and_round_trip(rng, fig_basis):
    stream = random_stream(rng, t=10, unweighted=False)
    c = decompose(stream, fig_basis)
    assert np.linalg.norm(c.values) == pytest.approx(np.linalg.norm(stream.values), rel=1e-12)
    back = reconstruct(c)
    assert np.abs(back.values - stream.values).max() < 1e-10
    assert back.t0 == stream.t0


def test_framework_associativity(rng):
    h = rng.standard_normal((6, 6))
    l = rng.standard_normal((6, 16))
    q = rng.standard_normal((16, 16))
    assert np.allclose((h @ l) @ q, h @ (l @ q), atol=1e-10)


def test_time_structure_rows_match_analyze(rng, fig_basis):
    stream = random_stream(rng, t=6)
    x = time_structure(stream, fig_basis)
    for t in range(6):
        row = analyze(stream.slice_at(t), fig_basis).values
        assert np.abs(x[t] - row).max() < 1e-12
    s, w = structure_split(x, fig_basis)
    assert s.shape == (6, 2) and w.shape == (6, 14)


def test_oscillating_scaling_series_alternate(fig_basis):
    stream = synth.gen_oscillating(8)
    x = time_structure(stream, fig_basis)
    s = x[:, :2]
    amp = 8 / np.sqrt(8)
    assert np.allclose(s[0::2, 0], amp) and np.allclose(s[0::2, 1], 0.0)
    assert np.allclose(s[1::2, 1], amp) and np.allclose(s[1::2, 0], 0.0)
    # claw and triangle never appear simultaneously
    assert np.all((s[:, 0] < 1e-12) | (s[:, 1] < 1e-12))


def test_freq_relational_matches_dft(rng):
    stream = random_stream(rng, t=8)
    psi = FourierBasis(8).matrix()
    assert np.abs(freq_relational(stream) - psi.conj().T @ stream.values).max() < 1e-10


def test_default_basis_from_aggregate():
    g1, _, _ = synth.gen_sbm_pair(2, 4, 0.9, 0.05, seed=2)
    stream = stream_from_slices([g1, g1], unweighted=True)
    basis = default_basis(stream, level=4, seed=1)
    assert basis.level == 4
    assert basis.num_relations == 64


# ---------------------------------------------------------------------------
# joint filters

def test_identity_joint_filter(rng, fig_basis):
    stream = random_stream(rng, t=8, unweighted=False)
    jf = JointFilter(FrequencyFilter(np.ones(8)), np.ones(16))
    out = apply_joint_filter(stream, jf, fig_basis)
    assert np.abs(out.values - stream.values).max() < 1e-10


def test_joint_filter_two_paths_agree(rng, fig_basis):
    stream = random_stream(rng, t=8, unweighted=False)
    chi = np.fft.fft(np.array([0.5, 0.3, 0.0, 0.0, 0.1, 0.0, 0.0, 0.1]))
    jf = JointFilter(FrequencyFilter(chi), rng.standard_normal(16))
    fast = apply_joint_filter(stream, jf, fig_basis)
    slow = apply_joint_filter_sequential(stream, jf, fig_basis)
    assert np.abs(fast.values - slow.values).max() < 1e-10


def test_dc_plus_scaling_gives_constant_mean_graph(fig_basis):
    stream = synth.gen_oscillating(8)
    chi = np.zeros(8)
    chi[0] = 1.0
    jf = JointFilter(FrequencyFilter(chi), coarse_pass_response(fig_basis))
    out = apply_joint_filter(stream, jf, fig_basis)
    # every slice becomes the mean graph: 0.5 on every relation
    assert np.allclose(out.values, 0.5, atol=1e-10)


def test_embedding_filter_keeps_scaling_columns(fig_basis):
    stream = synth.gen_oscillating(8)
    jf = JointFilter(FrequencyFilter(np.ones(8)), coarse_pass_response(fig_basis))
    out = apply_joint_filter(stream, jf, fig_basis)
    x = time_structure(out, fig_basis)
    assert np.abs(x[:, 2:]).max() < 1e-10
    assert np.abs(x[:, :2] - time_structure(stream, fig_basis)[:, :2]).max() < 1e-10


def test_joint_filter_composition(rng, fig_basis):
    stream = random_stream(rng, t=8, unweighted=False)
    folded = np.minimum(np.arange(8), 8 - np.arange(8))
    jf1 = JointFilter(FrequencyFilter(np.where(folded % 2 == 0, 1.0, 0.5)),
                      rng.random(16))
    jf2 = JointFilter(FrequencyFilter(np.where(folded < 2, 1.0, 0.25)),
                      rng.random(16))
    twice = apply_joint_filter(apply_joint_filter(stream, jf1, fig_basis), jf2, fig_basis)
    combined = JointFilter(jf1.freq.compose(jf2.freq), jf1.struct * jf2.struct)
    once = apply_joint_filter(stream, combined, fig_basis)
    assert np.abs(twice.values - once.values).max() < 1e-9


# ---------------------------------------------------------------------------
# backbone

def test_backbone_keep_all(rng, fig_basis):
    stream = random_stream(rng, t=8, unweighted=False)
    out, mask = backbone(stream, fig_basis, KeepRule.box(0, 4, 0, 15))
    assert mask.all()
    assert np.abs(out.values - stream.values).max() < 1e-10


def test_backbone_top4_oscillating_exact(fig_basis):
    stream = synth.gen_oscillating(8)
    out, mask = backbone(stream, fig_basis, KeepRule.top_k(4))
    assert mask.sum() == 4
    assert np.abs(out.values - stream.values).max() < 1e-10


def test_backbone_box_symmetric(fig_basis):
    stream = synth.gen_oscillating(8)
    out, mask = backbone(stream, fig_basis, KeepRule.box(0, 0, 0, 1))
    # DC only: the constant half-clique
    assert np.allclose(out.values, 0.5, atol=1e-10)
    assert mask[0, 0] and mask[0, 1] and not mask[4, 0]


def test_backbone_errors(fig_basis):
    stream = synth.gen_oscillating(8)
    with pytest.raises(ValueError):
        KeepRule.top_k(0)
    with pytest.raises(ValueError):
        backbone(stream, fig_basis, KeepRule.box(0, 99, 0, 1))
    with pytest.raises(ValueError):
        backbone(stream, fig_basis, KeepRule.box(0, 0, 0, 99))


def test_backbone_tie_break_deterministic(fig_basis):
    stream = synth.gen_oscillating(8)
    _, m1 = backbone(stream, fig_basis, KeepRule.top_k(2))
    _, m2 = backbone(stream, fig_basis, KeepRule.top_k(2))
    assert np.array_equal(m1, m2)
    # all four dominant entries tie; lexicographic (frequency, column) order wins
    assert m1[0, 0] and m1[0, 1]


# ---------------------------------------------------------------------------
# regularity

def test_regularity_zero_for_trivial_stream(fig_basis):
    # constant stream of full motifs (the clique)
    vals = np.ones((6, 16))
    stream = LinkStreamMatrix(full_space(4), 0, vals, unweighted=True)
    rep = regularity(stream, fig_basis)
    assert rep.reg_t == 0.0
    assert rep.reg_e == pytest.approx(0.0, abs=1e-12)
    assert rep.reg == pytest.approx(0.0, abs=1e-12)


def test_reg_t_equals_edit_sum(rng, fig_basis):
    stream = random_stream(rng, t=12)
    rep = regularity(stream, fig_basis)
    edits = sum(graph_edit(stream.slice_at(t), stream.slice_at((t - 1) % 12))
                for t in range(12))
    assert rep.reg_t == edits


def test_reg_t_linear_boundary(rng, fig_basis):
    stream = random_stream(rng, t=12)
    rep = regularity(stream, fig_basis, boundary="linear")
    edits = sum(graph_edit(stream.slice_at(t), stream.slice_at(t - 1))
                for t in range(1, 12))
    assert rep.reg_t == edits


def test_reg_e_closed_form(rng, fig_basis):
    stream = random_stream(rng, t=12)
    rep = regularity(stream, fig_basis)
    expected = 0.0
    for sl in stream.slices():
        m = motif_counts(sl, fig_basis).astype(float)
        expected += np.sum(m - m ** 2 / 8)
    assert rep.reg_e == pytest.approx(expected, abs=1e-9)


def test_relaxed_regularity_zero_on_structural_class(rng):
    basis = GraphBasis(random_tree(64, rng), 4)
    profile = rng.integers(0, 17, size=4)
    cls = synth.StructuralClass(full_space(8), basis.tree, 4, profile)
    slices = [synth.sample_structurally_equal(cls, rng) for _ in range(16)]
    stream = stream_from_slices(slices, unweighted=True)
    assert relaxed_time_regularity(stream, basis) < 1e-10


def test_relaxed_regularity_alternating_value(fig_basis, osc_space):
    stream = synth.gen_oscillating(16)
    claw = analyze(stream.slice_at(0), fig_basis).scaling
    tri = analyze(stream.slice_at(1), fig_basis).scaling
    expected = 16 * float(np.sum((claw - tri) ** 2))
    assert relaxed_time_regularity(stream, fig_basis) == pytest.approx(expected, rel=1e-12)
    const = LinkStreamMatrix(osc_space, 0, np.ones((6, 16)), unweighted=True)
    assert relaxed_time_regularity(const, fig_basis) == 0.0
