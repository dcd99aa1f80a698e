//! Seeded random instances with integer utilities.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MmsError, Result};
use crate::instance::Instance;
use crate::oracle::{self, SearchBudget};
use crate::rational::Rational;

/// Rejection sampling gives up after this many attempts per instance.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    Goods,
    Chores,
    Mixed,
    /// Every row has a positive and a negative entry and a negative guarantee.
    NegativeMixedOnly,
    /// At least one agent has a non-negative guarantee.
    WithNonnegativeAgent,
}

impl Profile {
    pub const ALL: [Profile; 5] = [
        Profile::Goods,
        Profile::Chores,
        Profile::Mixed,
        Profile::NegativeMixedOnly,
        Profile::WithNonnegativeAgent,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Profile::Goods => "goods",
            Profile::Chores => "chores",
            Profile::Mixed => "mixed",
            Profile::NegativeMixedOnly => "negative-mixed-only",
            Profile::WithNonnegativeAgent => "with-nonnegative-agent",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = MmsError;

    fn from_str(s: &str) -> Result<Self> {
        Profile::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| MmsError::Argument(format!("unknown profile {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub num_agents: usize,
    pub num_items: usize,
    pub profile: Profile,
    /// Inclusive bounds on utilities.
    pub value_range: (i64, i64),
    pub seed: u64,
}

fn fail(profile: Profile, reason: impl Into<String>) -> MmsError {
    MmsError::Generation { profile: profile.to_string(), reason: reason.into() }
}

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    let GenSpec { num_agents: n, num_items: m, profile, value_range: (lo, hi), seed } = *spec;
    if n == 0 || m == 0 {
        return Err(fail(profile, "need at least one agent and one item"));
    }
    if lo > hi {
        return Err(fail(profile, format!("empty value range [{lo}, {hi}]")));
    }
    let (lo, hi) = match profile {
        Profile::Goods if hi < 0 => return Err(fail(profile, "range has no non-negative values")),
        Profile::Goods => (lo.max(0), hi),
        Profile::Chores if lo > 0 => return Err(fail(profile, "range has no non-positive values")),
        Profile::Chores => (lo, hi.min(0)),
        Profile::NegativeMixedOnly if !(lo < 0 && hi > 0) || m < 2 => {
            return Err(fail(profile, "needs positive and negative values and at least two items"))
        }
        Profile::WithNonnegativeAgent if hi < 0 => return Err(fail(profile, "range has no non-negative values")),
        _ => (lo, hi),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row = |rng: &mut ChaCha8Rng| -> Vec<Rational> { (0..m).map(|_| Rational::from(rng.gen_range(lo..=hi))).collect() };
    let budget = SearchBudget::default();
    let guarantee = |r: &[Rational]| -> Result<Rational> {
        let single = Instance::new(vec![r.to_vec()])?;
        Ok(oracle::mms_guarantee_within(&single, 0, n, budget)?.guarantee)
    };
    let mut attempts = 0usize;
    let bump = |attempts: &mut usize| -> Result<()> {
        *attempts += 1;
        if *attempts > MAX_ATTEMPTS {
            return Err(fail(profile, format!("rejection sampling exceeded {MAX_ATTEMPTS} attempts")));
        }
        Ok(())
    };
    let rows = match profile {
        Profile::Goods | Profile::Chores | Profile::Mixed => (0..n).map(|_| row(&mut rng)).collect(),
        Profile::NegativeMixedOnly => {
            let mut rows = Vec::with_capacity(n);
            while rows.len() < n {
                bump(&mut attempts)?;
                let r = row(&mut rng);
                let mixed = r.iter().any(Rational::is_positive) && r.iter().any(Rational::is_negative);
                if mixed && guarantee(&r)?.is_negative() {
                    rows.push(r);
                }
            }
            rows
        }
        Profile::WithNonnegativeAgent => {
            let mut rows: Vec<Vec<Rational>> = (0..n).map(|_| row(&mut rng)).collect();
            let mut ok = false;
            for r in &rows {
                if !guarantee(r)?.is_negative() {
                    ok = true;
                    break;
                }
            }
            if !ok {
                let target = rng.gen_range(0..n);
                loop {
                    bump(&mut attempts)?;
                    let r = row(&mut rng);
                    if !guarantee(&r)?.is_negative() {
                        rows[target] = r;
                        break;
                    }
                }
            }
            rows
        }
    };
    Instance::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(profile: Profile, seed: u64) -> GenSpec {
        GenSpec { num_agents: 4, num_items: 9, profile, value_range: (-9, 9), seed }
    }

    #[test]
    fn goods_and_chores_signs() {
        let g = generate(&spec(Profile::Goods, 1)).unwrap();
        assert!(g.rows().iter().flatten().all(|u| !u.is_negative()));
        let c = generate(&spec(Profile::Chores, 1)).unwrap();
        assert!(c.rows().iter().flatten().all(|u| !u.is_positive()));
    }

    #[test]
    fn negative_mixed_only_rows() {
        let inst = generate(&spec(Profile::NegativeMixedOnly, 7)).unwrap();
        let g = oracle::guarantees(&inst, SearchBudget::default()).unwrap();
        for (i, row) in inst.rows().iter().enumerate() {
            assert!(row.iter().any(Rational::is_positive) && row.iter().any(Rational::is_negative));
            assert!(g[i].is_negative());
        }
    }

    #[test]
    fn with_nonnegative_agent() {
        for seed in 0..10 {
            let inst = generate(&spec(Profile::WithNonnegativeAgent, seed)).unwrap();
            let g = oracle::guarantees(&inst, SearchBudget::default()).unwrap();
            assert!(g.iter().any(|x| !x.is_negative()));
        }
    }

    #[test]
    fn deterministic() {
        for p in Profile::ALL {
            assert_eq!(generate(&spec(p, 42)).unwrap(), generate(&spec(p, 42)).unwrap());
        }
        assert_ne!(generate(&spec(Profile::Mixed, 1)).unwrap(), generate(&spec(Profile::Mixed, 2)).unwrap());
    }

    #[test]
    fn infeasible_specs() {
        let mut s = spec(Profile::NegativeMixedOnly, 0);
        s.value_range = (0, 9);
        assert!(matches!(generate(&s), Err(MmsError::Generation { .. })));
        s.value_range = (1, 0);
        assert!(generate(&s).is_err());
        let mut s = spec(Profile::Goods, 0);
        s.num_items = 0;
        assert!(generate(&s).is_err());
        // one agent with a single tiny range cannot be both mixed and negative
        let s = GenSpec { num_agents: 1, num_items: 2, profile: Profile::NegativeMixedOnly, value_range: (-1, 1), seed: 0 };
        let err = generate(&s).unwrap_err();
        assert!(err.to_string().contains("negative-mixed-only"), "{err}");
    }

    #[test]
    fn profile_names_round_trip() {
        for p in Profile::ALL {
            assert_eq!(p.as_str().parse::<Profile>().unwrap(), p);
        }
    }
}
