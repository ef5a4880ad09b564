//! Quick built-in checks that the local prover agrees with the verifier.

use gizkp_core::protocol::{commit_with, left_to_right, verifier_verify, Challenge, Composer, RoundProver};
use gizkp_core::stats::sigma_interval;
use gizkp_core::{run_session, CheatingProver, Choice, Graph, IdentityMaterial, Permutation};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn permutations(n: usize) -> Vec<Permutation> {
    fn go(prefix: &mut Vec<u32>, left: &mut Vec<u32>, out: &mut Vec<Permutation>) {
        if left.is_empty() {
            out.push(Permutation::new(prefix.clone()).expect("bijection"));
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n as u32).collect(), &mut out);
    out
}

/// Every graph on four vertices, every secret, every commitment permutation
/// and every `(a, b)`.
pub fn exhaustive_completeness(compose: Composer) -> Check {
    const N: usize = 4;
    let pairs = N * (N - 1) / 2;
    let perms = permutations(N);
    let (mut cases, mut failures) = (0u64, 0u64);
    for mask in 0u32..1 << pairs {
        let g1 = Graph::from_upper_triangle(N, (0..pairs).map(|i| mask >> i & 1 == 1)).expect("sized");
        for pi in &perms {
            let id = IdentityMaterial::new(pi.clone(), g1.clone()).expect("sized");
            for eps in &perms {
                for a in [Choice::One, Choice::Two] {
                    for b in [Choice::One, Choice::Two] {
                        let (round, c) = commit_with(&id, a, eps.clone()).expect("sized");
                        let r = round.respond_with(Challenge { b }, compose);
                        cases += 1;
                        if !verifier_verify(id.public(), &c.h, Challenge { b }, &r).accepted() {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }
    Check {
        name: "honest prover accepted in every n=4 case",
        passed: failures == 0,
        detail: format!("{cases} cases, {failures} rejected"),
    }
}

/// A prover without the secret passes about half of single rounds.
pub fn cheater_rate(rounds: u64, seed: u64) -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let id = crate::simulate::simulation_identity(16, seed);
    let mut passed = 0u64;
    for _ in 0..rounds {
        let mut p = CheatingProver::new(id.public());
        let prover: &mut dyn RoundProver = &mut p;
        if run_session(prover, id.public(), 1, &mut rng).expect("one round").accepted() {
            passed += 1;
        }
    }
    let rate = passed as f64 / rounds as f64;
    let (lo, hi) = sigma_interval(0.5, rounds, 4.0);
    Check {
        name: "cheating prover passes about half of rounds",
        passed: (lo..=hi).contains(&rate),
        detail: format!("{passed}/{rounds} = {rate:.4}, expected within [{lo:.4}, {hi:.4}]"),
    }
}

pub fn run_all(compose: Composer, cheater_rounds: u64) -> Vec<Check> {
    vec![exhaustive_completeness(compose), cheater_rate(cheater_rounds, 0x5e1f)]
}

pub fn run_default() -> Vec<Check> {
    run_all(left_to_right, 10_000)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reversed(first: &Permutation, second: &Permutation) -> Permutation {
        second.then(first).unwrap()
    }

    #[test]
    fn default_passes() {
        assert!(exhaustive_completeness(left_to_right).passed);
        assert!(cheater_rate(2000, 3).passed);
    }

    #[test]
    fn reversed_composition_is_caught() {
        let c = exhaustive_completeness(reversed);
        assert!(!c.passed, "{}", c.detail);
    }

    #[test]
    fn all_permutations_of_four() {
        let p = permutations(4);
        assert_eq!(p.len(), 24);
        let mut m: Vec<_> = p.iter().map(|p| p.as_slice().to_vec()).collect();
        m.sort();
        m.dedup();
        assert_eq!(m.len(), 24);
    }
}
