//! Size rounding, the rounding context, and configuration censuses.
//!
//! Sizes are rounded *down* onto an exponentially spaced grid: inside each
//! binary octave `[2^e, 2^(e+1))` sizes snap to multiples of `eps * 2^e`
//! above `2^e`. The rounding loses at most a factor `1 - eps` and is
//! independent of any upper bound estimate, so rounded sizes never change
//! while the algorithms run.
//!
//! A [`RoundingContext`] fixes the window of octaves that matter for a given
//! upper bound `ub` on the optimum: exponents `e` with
//! `eps * ub <= 2^e < ub`. Jobs below the window are Small, inside it Big,
//! above it Huge. Big rounded sizes form the descending size ladder, and
//! all Big/Huge rounded sizes are integer multiples of the grid value
//! `eps * 2^low`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::job::Instance;
use crate::lpt;
use crate::rational::{
    ceil_log2, check_epsilon, floor, floor_log2, format_rational, pow2, Rational,
};

/// Rounds `size` down within its binary octave to the `epsilon` grid.
///
/// For `2^e <= size < 2^(e+1)` the result is
/// `2^e + floor((size - 2^e) / (eps 2^e)) * eps 2^e`; it always satisfies
/// `(1 - eps) * size <= result <= size` and rounding is idempotent.
pub fn round_size(size: &Rational, epsilon: &Rational) -> Result<Rational> {
    check_epsilon(epsilon)?;
    if !size.is_positive() {
        return Err(Error::NonPositiveSize(format_rational(size)));
    }
    let e = floor_log2(size)?;
    let base = pow2(e);
    let step = epsilon * &base;
    let k = floor(&((size - &base) / &step));
    let rounded = &base + Rational::from_integer(k) * &step;
    debug_assert!(rounded <= *size);
    debug_assert!((Rational::one() - epsilon) * size <= rounded);
    Ok(rounded)
}

/// Upper bound estimate for the optimal minimum load: twice the minimum
/// load of an LPT run over the rounded sizes. Returns 0 exactly when LPT
/// leaves some machine empty (fewer jobs than machines).
pub fn compute_ub(inst: &Instance) -> Result<Rational> {
    let schedule = lpt::lpt_schedule(inst, &lpt::TieBreak::LowestIndex)?;
    Ok(schedule.min_load() * Rational::from_integer(BigInt::from(2)))
}

/// How a rounded size relates to the context window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobClass {
    /// Below the window; individually negligible.
    Small,
    /// Inside the window; a ladder value.
    Big,
    /// At least `2^(high+1) >= ub`; covers a machine single-handedly.
    Huge,
}

/// The octave window `[low, high]` of a context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentRange {
    pub low: i64,
    pub high: i64,
}

/// Everything derived from `(epsilon, ub)`: the octave window, the grid
/// value and the descending ladder of Big rounded sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingContext {
    epsilon: Rational,
    ub: Rational,
    exponents: Option<ExponentRange>,
    ladder: Vec<Rational>,
}

/// Builds the context for an upper bound estimate. `ub == 0` yields the
/// degenerate context with an empty ladder in which every job is Huge.
pub fn build_context(epsilon: &Rational, ub: &Rational) -> Result<RoundingContext> {
    check_epsilon(epsilon)?;
    if ub.is_negative() {
        return Err(Error::BadParameter(format!("negative ub {}", format_rational(ub))));
    }
    if ub.is_zero() {
        return Ok(RoundingContext {
            epsilon: epsilon.clone(),
            ub: ub.clone(),
            exponents: None,
            ladder: Vec::new(),
        });
    }
    let low = ceil_log2(&(epsilon * ub))?;
    let f = floor_log2(ub)?;
    let high = if pow2(f) == *ub { f - 1 } else { f };
    // epsilon <= 1/2 guarantees a power of two in [eps*ub, ub).
    debug_assert!(low <= high);
    let steps = epsilon
        .recip()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::BadParameter("1/epsilon too large".into()))?;
    let mut ladder = Vec::with_capacity(((high - low + 1) as usize) * steps as usize);
    for e in (low..=high).rev() {
        let base = pow2(e);
        let step = epsilon * &base;
        for k in (0..steps).rev() {
            ladder.push(&base + Rational::from_integer(BigInt::from(k)) * &step);
        }
    }
    debug_assert!(ladder.windows(2).all(|w| w[0] > w[1]));
    Ok(RoundingContext {
        epsilon: epsilon.clone(),
        ub: ub.clone(),
        exponents: Some(ExponentRange { low, high }),
        ladder,
    })
}

impl RoundingContext {
    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn ub(&self) -> &Rational {
        &self.ub
    }

    /// `None` for the degenerate (`ub == 0`) context.
    pub fn exponents(&self) -> Option<ExponentRange> {
        self.exponents
    }

    pub fn is_degenerate(&self) -> bool {
        self.exponents.is_none()
    }

    /// Sizes below this are Small: `2^low`.
    pub fn small_threshold(&self) -> Option<Rational> {
        self.exponents.map(|r| pow2(r.low))
    }

    /// Sizes at or above this are Huge: `2^(high+1)`.
    pub fn huge_threshold(&self) -> Option<Rational> {
        self.exponents.map(|r| pow2(r.high + 1))
    }

    /// Common grid of all Big and Huge loads: `eps * 2^low`.
    pub fn grid(&self) -> Option<Rational> {
        self.exponents.map(|r| &self.epsilon * pow2(r.low))
    }

    /// All Big rounded sizes, strictly descending.
    pub fn ladder(&self) -> &[Rational] {
        &self.ladder
    }

    /// Classifies a rounded size against the window.
    pub fn classify(&self, rounded: &Rational) -> JobClass {
        match self.exponents {
            None => JobClass::Huge,
            Some(r) => {
                if *rounded < pow2(r.low) {
                    JobClass::Small
                } else if *rounded < pow2(r.high + 1) {
                    JobClass::Big
                } else {
                    JobClass::Huge
                }
            }
        }
    }
}

/// Which family of admissible sizes a census enumerates.
#[derive(Debug, Clone)]
pub enum CensusMode {
    /// Ladder values of the context built for `ub`.
    Arithmetic { ub: Rational },
    /// Powers of `1 + epsilon`.
    Geometric,
    /// Powers of two.
    GeometricPow2,
}

/// Exhaustive enumeration results over multisets of admissible sizes with
/// total at most the bound (the empty multiset included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    /// Number of enumerated multisets.
    pub multisets: u64,
    /// Multisets whose total equals the bound exactly.
    pub exact_bound: u64,
    /// Distinct totals among all enumerated multisets.
    pub distinct_loads: u64,
    /// True when no two multisets share a total.
    pub all_distinct: bool,
}

/// Enumerates every multiset of admissible sizes (size at least
/// `size_floor`, total at most `bound`) and reports how many distinct total
/// loads are realized. `budget` caps the number of enumeration steps.
pub fn load_census(
    mode: &CensusMode,
    epsilon: &Rational,
    bound: &Rational,
    size_floor: &Rational,
    budget: u64,
) -> Result<CensusReport> {
    check_epsilon(epsilon)?;
    if !size_floor.is_positive() {
        return Err(Error::BadParameter("size_floor must be positive".into()));
    }
    if bound.is_negative() {
        return Err(Error::BadParameter("bound must be non-negative".into()));
    }
    let sizes: Vec<Rational> = match mode {
        CensusMode::Arithmetic { ub } => build_context(epsilon, ub)?
            .ladder()
            .iter()
            .filter(|s| *s >= size_floor && *s <= bound)
            .cloned()
            .collect(),
        CensusMode::Geometric => {
            geometric_sizes(&(Rational::one() + epsilon), size_floor, bound)
        }
        CensusMode::GeometricPow2 => {
            geometric_sizes(&Rational::from_integer(BigInt::from(2)), size_floor, bound)
        }
    };

    let mut census = Census {
        sizes,
        bound: bound.clone(),
        budget,
        steps: 0,
        multisets: 0,
        exact_bound: 0,
        totals: BTreeSet::new(),
    };
    census.enumerate(0, Rational::zero())?;
    let distinct_loads = census.totals.len() as u64;
    Ok(CensusReport {
        multisets: census.multisets,
        exact_bound: census.exact_bound,
        distinct_loads,
        all_distinct: distinct_loads == census.multisets,
    })
}

/// Powers `base^i` (any integer `i`) within `[floor_value, bound]`,
/// descending.
fn geometric_sizes(base: &Rational, floor_value: &Rational, bound: &Rational) -> Vec<Rational> {
    let mut sizes = Vec::new();
    // Walk down from the largest power <= bound.
    let mut v = Rational::one();
    while v <= *bound {
        v *= base;
    }
    v /= base;
    while v >= *floor_value {
        if v <= *bound {
            sizes.push(v.clone());
        }
        v /= base;
    }
    sizes
}

struct Census {
    sizes: Vec<Rational>,
    bound: Rational,
    budget: u64,
    steps: u64,
    multisets: u64,
    exact_bound: u64,
    totals: BTreeSet<Rational>,
}

impl Census {
    fn enumerate(&mut self, idx: usize, total: Rational) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::BudgetExceeded(format!("census budget {} steps", self.budget)));
        }
        if idx == self.sizes.len() {
            self.multisets += 1;
            if total == self.bound {
                self.exact_bound += 1;
            }
            self.totals.insert(total);
            return Ok(());
        }
        let size = self.sizes[idx].clone();
        let mut running = total;
        loop {
            self.enumerate(idx + 1, running.clone())?;
            running += &size;
            if running > self.bound {
                break;
            }
        }
        Ok(())
    }
}
