//! The Markov-switching volatility chain.
//!
//! Volatility follows a discrete-time Markov chain on a finite grid of
//! levels u_1 < ... < u_m with constant step tau and a row-stochastic
//! transition matrix. The module provides the chain specification, the
//! evolution of the state distribution, and a lazy enumerator over all
//! sample paths (the brute-force oracle behind complete enumeration).

use crate::error::{CoreError, Result};
use crate::math::Fnv1a;

const ROW_SUM_TOL: f64 = 1e-12;

/// Specification of the volatility chain.
///
/// States are stored as volatilities; squared levels are precomputed once so
/// every consumer of variances reads the same numbers.
#[derive(Debug, Clone)]
pub struct ChainSpec {
    states: Vec<f64>,
    states_sq: Vec<f64>,
    transition: Vec<Vec<f64>>,
    step: f64,
    initial_state: usize,
}

impl ChainSpec {
    /// Builds a chain from volatility levels. States must be strictly
    /// increasing and positive, rows of `transition` must sum to one within
    /// 1e-12 with entries in [0, 1], and `step` must be positive.
    pub fn new(
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        step: f64,
        initial_state: usize,
    ) -> Result<Self> {
        Self::build(states, transition, step, initial_state, false)
    }

    /// Like [`ChainSpec::new`] but renormalizes each transition row by its
    /// sum when the row is off by no more than 1e-6. Intended for matrices
    /// produced by external estimation that carry rounding.
    pub fn new_renormalized(
        states: Vec<f64>,
        transition: Vec<Vec<f64>>,
        step: f64,
        initial_state: usize,
    ) -> Result<Self> {
        Self::build(states, transition, step, initial_state, true)
    }

    /// Builds a chain from variance levels, converting them to volatilities.
    pub fn from_variances(
        variances: &[f64],
        transition: Vec<Vec<f64>>,
        step: f64,
        initial_state: usize,
    ) -> Result<Self> {
        if variances.iter().any(|&v| v <= 0.0) {
            return Err(CoreError::Invalid {
                what: "chain states",
                detail: "variance levels must be positive".into(),
            });
        }
        let states = variances.iter().map(|v| v.sqrt()).collect();
        Self::new(states, transition, step, initial_state)
    }

    fn build(
        states: Vec<f64>,
        mut transition: Vec<Vec<f64>>,
        step: f64,
        initial_state: usize,
        renormalize: bool,
    ) -> Result<Self> {
        let m = states.len();
        if m == 0 {
            return Err(CoreError::Invalid { what: "chain states", detail: "at least one state required".into() });
        }
        if states.iter().any(|&u| !(u > 0.0) || !u.is_finite()) {
            return Err(CoreError::Invalid {
                what: "chain states",
                detail: "volatility levels must be positive and finite".into(),
            });
        }
        if states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::Invalid {
                what: "chain states",
                detail: "volatility levels must be strictly increasing".into(),
            });
        }
        if transition.len() != m || transition.iter().any(|row| row.len() != m) {
            return Err(CoreError::Invalid {
                what: "transition matrix",
                detail: format!("expected {m}x{m}"),
            });
        }
        for (i, row) in transition.iter_mut().enumerate() {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(CoreError::Invalid {
                    what: "transition matrix",
                    detail: format!("row {i} has entries outside [0, 1]"),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                if renormalize && (sum - 1.0).abs() <= 1e-6 && sum > 0.0 {
                    for p in row.iter_mut() {
                        *p /= sum;
                    }
                } else {
                    return Err(CoreError::Invalid {
                        what: "transition matrix",
                        detail: format!("row {i} sums to {sum}, not 1"),
                    });
                }
            }
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(CoreError::Invalid { what: "chain step", detail: format!("step {step} must be positive") });
        }
        if initial_state >= m {
            return Err(CoreError::Invalid {
                what: "initial state",
                detail: format!("index {initial_state} out of range for {m} states"),
            });
        }
        let states_sq = states.iter().map(|u| u * u).collect();
        Ok(ChainSpec { states, states_sq, transition, step, initial_state })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Volatility levels u_1 < ... < u_m.
    pub fn states(&self) -> &[f64] {
        &self.states
    }

    /// Squared levels, precomputed at construction.
    pub fn states_sq(&self) -> &[f64] {
        &self.states_sq
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    /// Chain step in years.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    /// Copy of the chain started from a different state; used when mixing
    /// over the unobserved state at a rollback date.
    pub fn with_initial_state(&self, initial_state: usize) -> Result<Self> {
        if initial_state >= self.num_states() {
            return Err(CoreError::Invalid {
                what: "initial state",
                detail: format!("index {initial_state} out of range for {} states", self.num_states()),
            });
        }
        let mut chain = self.clone();
        chain.initial_state = initial_state;
        Ok(chain)
    }

    /// Number of chain steps in `horizon` years; errors unless the ratio is
    /// an integer within 1e-9 relative.
    pub fn steps_for_horizon(&self, horizon: f64) -> Result<usize> {
        let ratio = horizon / self.step;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) {
            return Err(CoreError::NonIntegralSteps { horizon, tau: self.step, ratio });
        }
        Ok(rounded as usize)
    }

    /// Point mass on the configured initial state.
    pub fn initial_distribution(&self) -> StateDistribution {
        let mut probs = vec![0.0; self.num_states()];
        probs[self.initial_state] = 1.0;
        StateDistribution { probs, time_steps: 0 }
    }

    /// Stationary distribution by power iteration.
    pub fn stationary_distribution(&self) -> StateDistribution {
        let m = self.num_states();
        let mut pi = vec![1.0 / m as f64; m];
        for _ in 0..10_000 {
            let next = mat_vec_left(&self.transition, &pi);
            let diff: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            pi = next;
            if diff < 1e-15 {
                break;
            }
        }
        StateDistribution { probs: pi, time_steps: 0 }
    }

    /// Mean stationary variance; the volatility scale used for grid sizing.
    pub fn stationary_mean_variance(&self) -> f64 {
        let pi = self.stationary_distribution();
        pi.probs.iter().zip(&self.states_sq).map(|(p, v)| p * v).sum()
    }

    /// Hash over states, matrix, step and initial state.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.states.len() as u64);
        for &u in &self.states {
            h.write_f64(u);
        }
        for row in &self.transition {
            for &p in row {
                h.write_f64(p);
            }
        }
        h.write_f64(self.step);
        h.write_u64(self.initial_state as u64);
        h.finish()
    }
}

/// Distribution of the chain state after a number of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution {
    pub probs: Vec<f64>,
    pub time_steps: usize,
}

impl StateDistribution {
    pub fn new(probs: Vec<f64>, time_steps: usize) -> Result<Self> {
        if probs.iter().any(|&p| p < 0.0) {
            return Err(CoreError::Invalid {
                what: "state distribution",
                detail: "negative probability".into(),
            });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(CoreError::Invalid {
                what: "state distribution",
                detail: format!("probabilities sum to {sum}, not 1"),
            });
        }
        Ok(StateDistribution { probs, time_steps })
    }
}

fn mat_vec_left(p: &[Vec<f64>], pi: &[f64]) -> Vec<f64> {
    let m = pi.len();
    let mut out = vec![0.0; m];
    for (i, &pi_i) in pi.iter().enumerate() {
        if pi_i == 0.0 {
            continue;
        }
        for j in 0..m {
            out[j] += pi_i * p[i][j];
        }
    }
    out
}

/// Left-multiplies `start` by the transition matrix `steps` times.
pub fn evolve_distribution(chain: &ChainSpec, start: &StateDistribution, steps: usize) -> StateDistribution {
    let mut probs = start.probs.clone();
    for _ in 0..steps {
        probs = mat_vec_left(chain.transition(), &probs);
    }
    StateDistribution { probs, time_steps: start.time_steps + steps }
}

/// One sample path of the chain over L steps: state indices sigma_0..sigma_L,
/// the path weight (mean of the first L squared levels) and its probability.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub states: Vec<usize>,
    pub weight: f64,
    pub prob: f64,
}

/// Lazily yields all m^L sample paths of length L (sigma_0 fixed).
///
/// The path count is checked against `cap` up front; enumeration at large L
/// exhausts memory and time exponentially, which is the reason the
/// recombination algorithm exists.
pub fn enumerate_paths(chain: &ChainSpec, num_steps: usize, cap: u64) -> Result<PathIter<'_>> {
    let m = chain.num_states();
    let total = (m as f64).powi(num_steps as i32);
    if total > cap as f64 {
        return Err(CoreError::EnumerationCapExceeded {
            num_states: m,
            num_steps,
            paths: total,
            cap: cap as f64,
        });
    }
    Ok(PathIter { chain, num_steps, counter: vec![0; num_steps], done: false })
}

/// Iterator over sample paths in odometer order (last step varies fastest).
#[derive(Debug)]
pub struct PathIter<'a> {
    chain: &'a ChainSpec,
    num_steps: usize,
    counter: Vec<usize>,
    done: bool,
}

impl Iterator for PathIter<'_> {
    type Item = SamplePath;

    fn next(&mut self) -> Option<SamplePath> {
        if self.done {
            return None;
        }
        let chain = self.chain;
        let l = self.num_steps;
        let mut states = Vec::with_capacity(l + 1);
        states.push(chain.initial_state());
        states.extend_from_slice(&self.counter);

        let mut sum_sq = 0.0;
        let mut prob = 1.0;
        for k in 0..l {
            sum_sq += chain.states_sq()[states[k]];
            prob *= chain.transition()[states[k]][states[k + 1]];
        }
        let weight = if l == 0 { 0.0 } else { sum_sq / l as f64 };

        // odometer increment
        let m = chain.num_states();
        let mut pos = l;
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.counter[pos] += 1;
            if self.counter[pos] < m {
                break;
            }
            self.counter[pos] = 0;
        }
        if l == 0 {
            self.done = true;
        }

        Some(SamplePath { states, weight, prob })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2_chain() -> ChainSpec {
        ChainSpec::from_variances(
            &[0.02, 0.04, 0.06, 0.08],
            vec![
                vec![0.70, 0.15, 0.10, 0.05],
                vec![0.03, 0.90, 0.06, 0.01],
                vec![0.05, 0.05, 0.85, 0.05],
                vec![0.03, 0.07, 0.10, 0.80],
            ],
            0.25 / 30.0,
            1,
        )
        .unwrap()
    }

    fn two_state_chain() -> ChainSpec {
        // sigma in {0.2, 0.4}, sigma_0 = 0.4
        ChainSpec::new(
            vec![0.2, 0.4],
            vec![vec![0.7, 0.3], vec![0.4, 0.6]],
            0.1,
            1,
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_rows_and_states() {
        let bad_row = ChainSpec::new(vec![0.2, 0.4], vec![vec![0.6, 0.3], vec![0.4, 0.6]], 0.1, 0);
        assert!(bad_row.is_err());
        let not_sorted = ChainSpec::new(vec![0.4, 0.2], vec![vec![1.0, 0.0], vec![0.0, 1.0]], 0.1, 0);
        assert!(not_sorted.is_err());
        let bad_entry = ChainSpec::new(vec![0.2, 0.4], vec![vec![1.2, -0.2], vec![0.0, 1.0]], 0.1, 0);
        assert!(bad_entry.is_err());
        let bad_init = ChainSpec::new(vec![0.2], vec![vec![1.0]], 0.1, 3);
        assert!(bad_init.is_err());
    }

    #[test]
    fn renormalization_fixes_small_row_drift() {
        let rows = vec![vec![0.7 + 3e-9, 0.3], vec![0.4, 0.6]];
        assert!(ChainSpec::new(vec![0.2, 0.4], rows.clone(), 0.1, 0).is_err());
        let chain = ChainSpec::new_renormalized(vec![0.2, 0.4], rows, 0.1, 0).unwrap();
        let sum: f64 = chain.transition()[0].iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let chain = table2_chain();
        let start = chain.initial_distribution();
        let out = evolve_distribution(&chain, &start, 0);
        assert_eq!(out, start);
    }

    #[test]
    fn identity_matrix_keeps_point_mass() {
        let chain = ChainSpec::new(
            vec![0.2, 0.4],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            0.1,
            1,
        )
        .unwrap();
        let out = evolve_distribution(&chain, &chain.initial_distribution(), 5);
        assert_eq!(out.probs, vec![0.0, 1.0]);
        assert_eq!(out.time_steps, 5);
    }

    #[test]
    fn evolution_matches_matrix_power_oracle() {
        // Oracle: dense P^30 by repeated squaring-free direct multiplication.
        let chain = table2_chain();
        let m = chain.num_states();
        let mut power = vec![vec![0.0; m]; m];
        for (i, row) in power.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for _ in 0..30 {
            let mut next = vec![vec![0.0; m]; m];
            for i in 0..m {
                for k in 0..m {
                    let a = power[i][k];
                    if a == 0.0 {
                        continue;
                    }
                    for j in 0..m {
                        next[i][j] += a * chain.transition()[k][j];
                    }
                }
            }
            power = next;
        }
        let evolved = evolve_distribution(&chain, &chain.initial_distribution(), 30);
        for j in 0..m {
            assert!((evolved.probs[j] - power[chain.initial_state()][j]).abs() < 1e-13);
        }
        assert!((evolved.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chapman_kolmogorov_split() {
        let chain = table2_chain();
        let start = chain.initial_distribution();
        let direct = evolve_distribution(&chain, &start, 17);
        let split = evolve_distribution(&chain, &evolve_distribution(&chain, &start, 9), 8);
        for (a, b) in direct.probs.iter().zip(&split.probs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_state_chain_has_one_path() {
        let chain = ChainSpec::new(vec![0.3], vec![vec![1.0]], 0.1, 0).unwrap();
        let paths: Vec<_> = enumerate_paths(&chain, 4, 1_000).unwrap().collect();
        assert_eq!(paths.len(), 1);
        assert!((paths[0].prob - 1.0).abs() < 1e-15);
        assert!((paths[0].weight - 0.09).abs() < 1e-15);
    }

    #[test]
    fn two_state_three_step_tree() {
        // Eight paths, starting [0.4, 0.4, ...] down to [0.4, 0.2, 0.2, 0.2].
        let chain = two_state_chain();
        let paths: Vec<_> = enumerate_paths(&chain, 3, 1_000).unwrap().collect();
        assert_eq!(paths.len(), 8);
        assert_eq!(paths[0].states, vec![1, 0, 0, 0]);
        assert_eq!(paths[7].states, vec![1, 1, 1, 1]);
        let total: f64 = paths.iter().map(|p| p.prob).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // all-sigma_0 path weight is exactly sigma_0^2
        let all_start = paths.iter().find(|p| p.states.iter().all(|&s| s == 1)).unwrap();
        assert_eq!(all_start.weight, 0.4 * 0.4);
        // weights realized: {0.16, 0.12, 0.08}
        let mut weights: Vec<f64> = paths.iter().map(|p| p.weight).collect();
        weights.sort_by(f64::total_cmp);
        weights.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert_eq!(weights.len(), 3);
        assert!((weights[0] - 0.08).abs() < 1e-12);
        assert!((weights[1] - 0.12).abs() < 1e-12);
        assert!((weights[2] - 0.16).abs() < 1e-12);
    }

    #[test]
    fn three_state_path_count_and_mass() {
        let chain = ChainSpec::new(
            vec![0.1, 0.2, 0.3],
            vec![
                vec![0.5, 0.25, 0.25],
                vec![0.1, 0.6, 0.3],
                vec![0.2, 0.2, 0.6],
            ],
            0.05,
            0,
        )
        .unwrap();
        let mut count = 0usize;
        let mut mass = 0.0;
        for p in enumerate_paths(&chain, 5, 1_000).unwrap() {
            count += 1;
            mass += p.prob;
        }
        assert_eq!(count, 243);
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn enumeration_cap_reports_context() {
        let chain = two_state_chain();
        let err = enumerate_paths(&chain, 40, 1_000_000).unwrap_err();
        match err {
            CoreError::EnumerationCapExceeded { num_states, num_steps, .. } => {
                assert_eq!(num_states, 2);
                assert_eq!(num_steps, 40);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn stationary_distribution_is_fixed_point() {
        let chain = table2_chain();
        let pi = chain.stationary_distribution();
        let moved = evolve_distribution(&chain, &pi, 1);
        for (a, b) in pi.probs.iter().zip(&moved.probs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
