//! Monte Carlo statistics of random positive height-one words.
//!
//! A positive word `x` of length `N` in `a, b` is drawn uniformly and pushed
//! through `f(a) = a`, `f(b) = a^b`. The block data of `f(x)` is read off the
//! cyclic runs of `x`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par::Executor;
use crate::words::{Letter, Word};

pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    /// The positive word `x`, as a string over `a` and `b`.
    pub x: String,
    /// `f(x)`, freely reduced.
    pub word: String,
    pub p: u64,
    pub q: u64,
    pub p_prime: u64,
    pub q_prime: u64,
    /// Number of blocks `a^{p_i}(a^{q_i})^b`. Zero for `a^N` and `(a^N)^b`,
    /// whose `l` is one half by convention.
    pub l: u64,
    pub degenerate: bool,
    /// Number of runs of the linear word `x`.
    pub s: u64,
    /// `pp' ≤ q²`.
    pub q_condition: bool,
    /// `qq' ≤ p²`.
    pub p_condition: bool,
}

impl SampleStats {
    pub fn condition(&self) -> bool {
        self.q_condition && self.p_condition
    }

    /// `q² ≤ pp'`.
    pub fn fails_q(&self) -> bool {
        self.q * self.q <= self.p * self.p_prime
    }

    /// `p² ≤ qq'`.
    pub fn fails_p(&self) -> bool {
        self.p * self.p <= self.q * self.q_prime
    }
}

/// `f(x)` for a positive word given as booleans, `true` for `b`.
pub fn push_forward(x: &[bool]) -> Word {
    let (a, b) = (Letter::new(1, false), Letter::new(2, false));
    let letters = x.iter().flat_map(|&is_b| if is_b { vec![b.inverse(), a, b] } else { vec![a] }).collect();
    Word::new(2, letters).expect("rank 2").reduced()
}

/// Statistics of one positive word.
pub fn stats_of(x: &[bool]) -> SampleStats {
    let n = x.len();
    let s = 1 + x.windows(2).filter(|w| w[0] != w[1]).count() as u64;
    let q = x.iter().filter(|&&b| b).count() as u64;
    let p = n as u64 - q;
    let text: String = x.iter().map(|&b| if b { 'b' } else { 'a' }).collect();
    let word = push_forward(x).to_string();
    let mut out = SampleStats {
        n,
        x: text,
        word,
        p,
        q,
        p_prime: 0,
        q_prime: 0,
        l: 0,
        degenerate: p == 0 || q == 0,
        s,
        q_condition: false,
        p_condition: false,
    };
    if !out.degenerate {
        // cyclic runs, starting just after an a→b or b→a change
        let start = (0..n).find(|&i| x[i] != x[(i + n - 1) % n]).expect("both letters occur");
        let mut i = 0;
        while i < n {
            let v = x[(start + i) % n];
            let mut len = 0;
            while i < n && x[(start + i) % n] == v {
                len += 1;
                i += 1;
            }
            if v {
                out.q_prime += (len == 1) as u64;
                out.l += 1;
            } else {
                out.p_prime += (len == 1) as u64;
            }
        }
    } else if n == 1 {
        if p == 1 {
            out.p_prime = 1;
        } else {
            out.q_prime = 1;
        }
    }
    out.q_condition = out.p * out.p_prime <= out.q * out.q;
    out.p_condition = out.q * out.q_prime <= out.p * out.p;
    out
}

/// A uniform positive word of length `n` and its statistics.
pub fn sample_height_one(n: usize, rng: &mut impl RngCore) -> SampleStats {
    let mut x = Vec::with_capacity(n);
    while x.len() < n {
        let bits = rng.next_u64();
        let take = (n - x.len()).min(64);
        x.extend((0..take).map(|k| bits >> k & 1 == 1));
    }
    stats_of(&x)
}

/// The generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    condition: u64,
    fail_q: u64,
    fail_p: u64,
    runs: u128,
    runs_sq: u128,
    p_sum: u128,
    p_sq: u128,
}

impl Tally {
    fn add(mut self, o: Tally) -> Tally {
        self.condition += o.condition;
        self.fail_q += o.fail_q;
        self.fail_p += o.fail_p;
        self.runs += o.runs;
        self.runs_sq += o.runs_sq;
        self.p_sum += o.p_sum;
        self.p_sq += o.p_sq;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub rng: String,
    /// Fraction with `pp' ≤ q²` and `qq' ≤ p²`.
    pub p_condition: f64,
    /// Fraction with `q² ≤ pp'`.
    pub p_fail_q: f64,
    /// Fraction with `p² ≤ qq'`.
    pub p_fail_p: f64,
    /// Sample mean of `s - 1`.
    pub mean_runs: f64,
    /// Unbiased sample variance of `s - 1`.
    pub var_runs: f64,
    /// Sample mean of `p`.
    pub mean_p: f64,
    pub var_p: f64,
}

impl TrialReport {
    pub const CSV_HEADER: &'static str = "N,samples,seed,p_condition,p_fail_q,p_fail_p,mean_runs,var_runs";

    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{},{},{},{},{},{},{},{}\n",
            Self::CSV_HEADER,
            self.n,
            self.samples,
            self.seed,
            self.p_condition,
            self.p_fail_q,
            self.p_fail_p,
            self.mean_runs,
            self.var_runs
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Standard error of an empirical proportion.
    pub fn standard_error(p: f64, samples: u64) -> f64 {
        (p * (1.0 - p) / samples as f64).sqrt()
    }
}

pub fn run_trials(n: usize, samples: u64, seed: u64) -> TrialReport {
    run_trials_with(n, samples, seed, &Executor::default())
}

/// Samples are split across workers by index range; counts are summed
/// exactly, so the report does not depend on the thread count.
pub fn run_trials_with(n: usize, samples: u64, seed: u64, exec: &Executor) -> TrialReport {
    assert!(n >= 2 && samples >= 1, "need N ≥ 2 and at least one sample");
    let tallies = exec.map_range(samples, 256, |range| {
        range.fold(Tally::default(), |t, i| {
            let st = sample_height_one(n, &mut sample_rng(seed, i));
            let r = (st.s - 1) as u128;
            t.add(Tally {
                condition: st.condition() as u64,
                fail_q: st.fails_q() as u64,
                fail_p: st.fails_p() as u64,
                runs: r,
                runs_sq: r * r,
                p_sum: st.p as u128,
                p_sq: (st.p as u128).pow(2),
            })
        })
    });
    let t = tallies.into_iter().fold(Tally::default(), Tally::add);
    let k = samples as f64;
    let var = |sum: u128, sq: u128| {
        if samples < 2 {
            0.0
        } else {
            let num = samples as u128 * sq - sum * sum;
            num as f64 / (k * (k - 1.0))
        }
    };
    TrialReport {
        n,
        samples,
        seed,
        rng: RNG_ALGORITHM.into(),
        p_condition: t.condition as f64 / k,
        p_fail_q: t.fail_q as f64 / k,
        p_fail_p: t.fail_p as f64 / k,
        mean_runs: t.runs as f64 / k,
        var_runs: var(t.runs, t.runs_sq),
        mean_p: t.p_sum as f64 / k,
        var_p: var(t.p_sum, t.p_sq),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::is_simple_height_one;
    use crate::words::cyclic_reduce;

    fn x(text: &str) -> Vec<bool> {
        text.chars().map(|c| c == 'b').collect()
    }

    #[test]
    fn degenerate_words() {
        let st = stats_of(&x("aaaaa"));
        assert!(st.degenerate);
        assert_eq!((st.p, st.q, st.l, st.s), (5, 0, 0, 1));
        assert!(st.condition());
        let st = stats_of(&x("bbbb"));
        assert!(st.degenerate && st.condition());
        assert_eq!(st.word, "b^-1 a^4 b");
    }

    #[test]
    fn alternating_word() {
        let st = stats_of(&x("abababab"));
        assert_eq!((st.s, st.l, st.p, st.q, st.p_prime, st.q_prime), (8, 4, 4, 4, 4, 4));
    }

    #[test]
    fn single_block() {
        let st = stats_of(&x("aaabb"));
        assert_eq!((st.p, st.q, st.s, st.l, st.p_prime, st.q_prime), (3, 2, 2, 1, 0, 0));
    }

    #[test]
    fn wraparound_runs_merge() {
        let st = stats_of(&x("abbaa"));
        assert_eq!((st.s, st.l, st.p_prime, st.q_prime), (3, 1, 0, 0));
    }

    #[test]
    fn agrees_with_height_one_reader() {
        let mut rng = sample_rng(7, 0);
        for _ in 0..200 {
            let st = sample_height_one(12, &mut rng);
            if st.degenerate {
                continue;
            }
            let w = cyclic_reduce(&push_forward(&x(&st.x))).unwrap();
            let h = is_simple_height_one(&w).unwrap();
            assert_eq!(
                (h.p, h.q, h.p_prime, h.q_prime, h.l as u64),
                (st.p, st.q, st.p_prime, st.q_prime, st.l),
                "{}",
                st.x
            );
            assert_eq!(h.condition(), st.condition());
        }
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let a = run_trials_with(50, 1000, 3, &Executor::sequential());
        let b = run_trials_with(50, 1000, 3, &Executor::with_jobs(4));
        assert_eq!(a, b);
        let one = run_trials(30, 1, 9);
        assert_eq!(one, run_trials(30, 1, 9));
        assert!(one.to_csv().starts_with(TrialReport::CSV_HEADER));
    }
}
