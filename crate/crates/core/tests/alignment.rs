use qaccel_core::genomics::{
    align, build_alignment_circuit, index_marginals, simulate, AlignmentInstance, Diffusion, STAGES,
};
use qaccel_core::statecore::Amplitude;
use qaccel_core::tensor_oracle::CachedOracle;
use qaccel_core::Program;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn binary_strings(len: usize) -> impl Iterator<Item = String> {
    (0..1usize << len).map(move |x| (0..len).map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect())
}

/// Every binary instance with R ≤ `max_reference`, r ≤ 3 and exactly one exact match.
fn unique_match_instances(max_reference: usize) -> Vec<(String, String, usize)> {
    let mut out = Vec::new();
    for big_r in 1..=max_reference {
        for r in 1..=big_r.min(3) {
            for reference in binary_strings(big_r) {
                for read in binary_strings(r) {
                    let hits: Vec<usize> = (0..=big_r - r).filter(|&i| reference[i..i + r] == read).collect();
                    if let [pos] = hits[..] {
                        out.push((reference.clone(), read, pos));
                    }
                }
            }
        }
    }
    out
}

/// Program truncated just before the named stage.
fn prefix_before(p: &Program, stage: &str) -> Program {
    let start = p.kernels().iter().find(|k| k.name == stage).unwrap().start;
    let mut out = Program::new(p.num_qubits());
    out.extend(p.instructions()[..start].iter().cloned()).unwrap();
    out
}

fn max_dev(a: &[Amplitude], b: &[Amplitude]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn generated_circuits_match_the_dense_oracle() {
    let mut oracle = CachedOracle::new();
    for (reference, read, _) in unique_match_instances(8) {
        let a = AlignmentInstance::new(&reference, &read).unwrap();
        let p = build_alignment_circuit(&a).unwrap();
        let dense = oracle.simulate(p.num_qubits(), p.instructions()).unwrap();
        let fast = simulate(&p).unwrap();
        assert!(max_dev(fast.amplitudes(), &dense) <= 1e-9, "{reference}/{read}");
    }
}

#[test]
fn unique_exact_match_ranks_first() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (reference, read, pos) in unique_match_instances(8) {
        let a = AlignmentInstance::new(&reference, &read).unwrap();
        let r = align(&a, 0, &mut rng).unwrap();
        let best = r.best().unwrap();
        assert_eq!(best.position, pos, "{reference}/{read}");
        let others = r.index_marginals.iter().enumerate().filter(|(i, _)| *i != pos);
        for (i, p) in others {
            assert!(best.probability > *p, "{reference}/{read}: slot {i} has {p}");
        }
    }
}

#[test]
fn loaded_register_is_a_uniform_table_of_pairs() {
    for (reference, read, _) in unique_match_instances(6) {
        let a = AlignmentInstance::new(&reference, &read).unwrap();
        let p = build_alignment_circuit(&a).unwrap();
        let state = simulate(&prefix_before(&p, STAGES[2])).unwrap();
        let k = a.index_qubits();
        let slots = 1usize << k;
        for (pos, slice) in a.encoded().slices.iter().enumerate() {
            let data: usize = slice.iter().enumerate().map(|(j, &b)| usize::from(b) << j).sum();
            let amp = state.amplitudes()[pos | data << k];
            assert!((amp.norm_sqr() - 1.0 / slots as f64).abs() <= 1e-9, "{reference}/{read} pos {pos}");
        }
    }
}

#[test]
fn hamming_stage_zeroes_the_matching_branch() {
    for (reference, read, pos) in unique_match_instances(6) {
        let a = AlignmentInstance::new(&reference, &read).unwrap();
        let p = build_alignment_circuit(&a).unwrap();
        let state = simulate(&prefix_before(&p, STAGES[3])).unwrap();
        let slots = 1usize << a.index_qubits();
        assert!((state.amplitudes()[pos].norm_sqr() - 1.0 / slots as f64).abs() <= 1e-9);
    }
}

#[test]
fn one_grover_round_amplifies_the_match() {
    for (reference, read, pos) in unique_match_instances(6) {
        let a = AlignmentInstance::new(&reference, &read).unwrap();
        if a.positions() == 1 {
            continue;
        }
        let p = build_alignment_circuit(&a).unwrap();
        let k = a.index_qubits();
        let before = index_marginals(simulate(&prefix_before(&p, STAGES[3])).unwrap().amplitudes(), k);
        let after = index_marginals(simulate(&p).unwrap().amplitudes(), k);
        assert!(after[pos] > before[pos], "{reference}/{read}");
    }
}

#[test]
fn index_only_diffusion_can_lose_the_match() {
    // Diffusing the index alone acts separately on each data branch, so the
    // marked branch is not always amplified.
    let a = AlignmentInstance::new("0100", "00").unwrap().with_diffusion(Diffusion::Index);
    let p = build_alignment_circuit(&a).unwrap();
    let before = index_marginals(simulate(&prefix_before(&p, STAGES[3])).unwrap().amplitudes(), 2);
    let after = index_marginals(simulate(&p).unwrap().amplitudes(), 2);
    assert!(after[2] <= before[2]);
}

#[test]
fn toy_amplitude_and_marginal() {
    let a = AlignmentInstance::new("0110", "01").unwrap();
    let p = build_alignment_circuit(&a).unwrap();
    let dense = CachedOracle::new().simulate(p.num_qubits(), p.instructions()).unwrap();
    assert!((dense[0] - Amplitude::new(0.625, 0.0)).norm() < 1e-12);
    let r = align(&a, 0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!(r.best().unwrap().position, 0);
}
