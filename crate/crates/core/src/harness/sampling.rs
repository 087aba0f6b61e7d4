//! Seeded Monte Carlo sampling of the protocol.
//!
//! Each shot draws which branch of the noisy mixture each copy is in, then
//! draws the Bennett measurement outcome from the Born rule of that pure
//! trajectory. Trajectories depend only on the pair of drawn branches, so
//! they are computed once per pair and shared by every shot.
//!
//! Shot `i` uses a ChaCha8 stream selected by `i` under a key derived from
//! the seed and the round, so its draws do not depend on execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::gates::apply_h;
use crate::noise::LogicQubit;
use crate::protocol::{
    bennett_step, correct_physical_bitflip, recover_logic, reduce_copy, to_second_copy, CopyModes, ErrorBasis,
    RecoveryPath,
};
use crate::state::{fidelity, make_logic_bell, Bell, Ensemble, PureState};

const CHUNK: u64 = 4096;

/// Outcome of one trajectory branch: whether it survives post-selection,
/// its probability given the drawn copies, and the output fidelity.
#[derive(Clone, Copy, Debug)]
struct Leaf {
    kept: bool,
    probability: f64,
    fidelity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledRound {
    pub shots: u64,
    pub successes: u64,
    pub success_probability: f64,
    pub success_stderr: f64,
    /// Mean output fidelity over successful shots.
    pub fidelity: f64,
    pub fidelity_stderr: f64,
}

fn purification_leaves(first: &PureState, second: &PureState, basis: ErrorBasis) -> Result<Vec<Leaf>> {
    let n = first.register().group("a").len();
    let (m1, m2) = (CopyModes::first_copy(n)?, CopyModes::second_copy(n)?);
    let mut s = first.tensor(&second.relabel(to_second_copy)?)?;
    s = reduce_copy(&reduce_copy(&s, &m1)?, &m2)?;
    if basis == ErrorBasis::Phase {
        for l in ["a1", "b1", "c1", "d1"] {
            s = apply_h(&s, l)?;
        }
    }
    let target = make_logic_bell(n, Bell::PhiPlus)?;
    let drop: Vec<&str> = m2.labels().collect();
    let mut leaves = Vec::new();
    for (bits, (p, e)) in bennett_step(&Ensemble::pure(s), m1.heads(), m2.heads())? {
        let kept = bits[0] == bits[1];
        let fid = if kept {
            let mut pair = e.discard(&drop)?;
            if basis == ErrorBasis::Phase {
                pair = pair.map(|s| apply_h(&apply_h(s, "a1")?, "b1"))?;
            }
            fidelity(&recover_logic(&pair, &m1)?, &target)?
        } else {
            0.0
        };
        leaves.push(Leaf {
            kept,
            probability: p,
            fidelity: fid,
        });
    }
    Ok(leaves)
}

fn pick<T>(items: &[(f64, T)], u: f64) -> &T {
    let mut acc = 0.0;
    for (w, item) in items {
        acc += w;
        if u < acc {
            return item;
        }
    }
    &items.last().expect("non-empty").1
}

fn shot_rng(seed: u64, round: usize, shot: u64) -> ChaCha8Rng {
    let key = seed ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(shot);
    rng
}

/// (successes, Σ fidelity, Σ fidelity²) over a contiguous block of shots.
type Tally = (u64, f64, f64);

fn run_shots<F>(shots: u64, draw: F) -> Tally
where
    F: Fn(u64) -> Option<f64> + Sync,
{
    let chunks: Vec<Tally> = (0..shots.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut t: Tally = (0, 0.0, 0.0);
            for shot in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                if let Some(f) = draw(shot) {
                    t.0 += 1;
                    t.1 += f;
                    t.2 += f * f;
                }
            }
            t
        })
        .collect();
    // fixed summation order keeps results bit-identical across thread counts
    chunks
        .into_iter()
        .fold((0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
}

fn summarize(shots: u64, (successes, sum, sum_sq): Tally) -> SampledRound {
    let p = successes as f64 / shots as f64;
    let (mean, se) = if successes > 0 {
        let k = successes as f64;
        let mean = sum / k;
        let var = (sum_sq / k - mean * mean).max(0.0);
        (mean, (var / k).sqrt())
    } else {
        (0.0, 0.0)
    };
    SampledRound {
        shots,
        successes,
        success_probability: p,
        success_stderr: (p * (1.0 - p) / shots as f64).sqrt(),
        fidelity: mean,
        fidelity_stderr: se,
    }
}

/// Samples `shots` runs of one purification round on two independent copies
/// of `copy`.
pub fn sample_purification(copy: &Ensemble, basis: ErrorBasis, shots: u64, seed: u64, round: usize) -> Result<SampledRound> {
    let branches: Vec<(f64, usize)> = copy.branches().iter().enumerate().map(|(i, b)| (b.weight, i)).collect();
    let k = branches.len();
    let mut table = Vec::with_capacity(k * k);
    for b1 in copy.branches() {
        for b2 in copy.branches() {
            let leaves = purification_leaves(&b1.state, &b2.state, basis)?;
            table.push(leaves.into_iter().map(|l| (l.probability, l)).collect::<Vec<_>>());
        }
    }
    let tally = run_shots(shots, |shot| {
        let mut rng = shot_rng(seed, round, shot);
        let i = *pick(&branches, rng.random::<f64>());
        let j = *pick(&branches, rng.random::<f64>());
        let leaf = pick(&table[i * k + j], rng.random::<f64>());
        leaf.kept.then_some(leaf.fidelity)
    });
    Ok(summarize(shots, tally))
}

/// Samples `shots` single-copy physical bit-flip corrections.
pub fn sample_correction(copy: &Ensemble, target: LogicQubit, shots: u64, seed: u64) -> Result<SampledRound> {
    let n = copy.register().group(target.prefix()).len();
    let phi = make_logic_bell(n, Bell::PhiPlus)?;
    let mut per_branch = Vec::with_capacity(copy.branches().len());
    for b in copy.branches() {
        let c = correct_physical_bitflip(&Ensemble::pure(b.state.clone()), target, RecoveryPath::Qnd)?;
        per_branch.push((b.weight, fidelity(&c.outcome.output, &phi)?));
    }
    let tally = run_shots(shots, |shot| {
        let mut rng = shot_rng(seed, 1, shot);
        Some(*pick(&per_branch, rng.random::<f64>()))
    });
    Ok(summarize(shots, tally))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::noisy_pair;

    #[test]
    fn leaves_cover_all_probability() {
        let copy = noisy_pair(2, ErrorBasis::Bit, 0.8).unwrap();
        for b1 in copy.branches() {
            for b2 in copy.branches() {
                let leaves = purification_leaves(&b1.state, &b2.state, ErrorBasis::Bit).unwrap();
                let total: f64 = leaves.iter().map(|l| l.probability).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn same_seed_same_result() {
        let copy = noisy_pair(2, ErrorBasis::Bit, 0.7).unwrap();
        let a = sample_purification(&copy, ErrorBasis::Bit, 5000, 11, 1).unwrap();
        let b = sample_purification(&copy, ErrorBasis::Bit, 5000, 11, 1).unwrap();
        assert_eq!(a, b);
        let c = sample_purification(&copy, ErrorBasis::Bit, 5000, 12, 1).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn shot_streams_are_order_independent() {
        let mut r1 = shot_rng(5, 1, 42);
        let mut r2 = shot_rng(5, 1, 42);
        let _ = shot_rng(5, 1, 41).random::<f64>();
        assert_eq!(r1.random::<u64>(), r2.random::<u64>());
    }

    #[test]
    fn perfect_pairs_always_succeed() {
        let copy = noisy_pair(2, ErrorBasis::Phase, 1.0).unwrap();
        let s = sample_purification(&copy, ErrorBasis::Phase, 1000, 0, 1).unwrap();
        assert_eq!(s.successes, 1000);
        assert_eq!(s.fidelity, 1.0);
    }
}
