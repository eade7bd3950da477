//! Ground-truth computations at desk scale: exact optimal machine covering
//! by branch and bound, an independent dynamic program as a cross-check, the
//! best achievable minimum load when an existing placement is frozen, and a
//! driver that replays arrival streams through the online algorithms while
//! measuring migration and competitive ratios.
//!
//! All oracles work on exact rationals. Internally values are scaled by the
//! common denominator to u128 integers; inputs too large for that scaling
//! are rejected rather than approximated.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::generators::StreamSpec;
use crate::job::{Instance, Job, JobId};
use crate::jump::JumpSession;
use crate::lpt::{self, TieBreak};
use crate::migration::MigrationLedger;
use crate::online_lpt::OnlineLptSession;
use crate::rational::Rational;
use crate::schedule::Schedule;

/// Which size attribute of a job an oracle should optimize over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeView {
    Original,
    Rounded,
}

/// Scales rationals to integers by their common denominator. Fails when the
/// scaled values or their total would not fit exact u128 arithmetic.
fn scale(values: &[Rational], machines: usize) -> Result<(Vec<u128>, BigInt)> {
    let mut lcm = BigInt::one();
    for value in values {
        if value < &Rational::zero() {
            return Err(Error::BadParameter("negative load or size".into()));
        }
        lcm = lcm.lcm(value.denom());
    }
    let mut scaled = Vec::with_capacity(values.len());
    let mut total: u128 = 0;
    for value in values {
        let big = value.numer() * (&lcm / value.denom());
        let small = big
            .to_u128()
            .ok_or_else(|| Error::BadParameter("values too large for exact scaling".into()))?;
        total = total
            .checked_add(small)
            .ok_or_else(|| Error::BadParameter("values too large for exact scaling".into()))?;
        scaled.push(small);
    }
    if total.checked_mul(machines as u128 + 1).is_none() {
        return Err(Error::BadParameter("values too large for exact scaling".into()));
    }
    Ok((scaled, lcm))
}

/// List-schedules the sizes (assumed non-increasing) onto the loads, always
/// filling a least loaded machine; returns the final minimum load.
fn greedy_fill(base: &[u128], sizes_desc: &[u128]) -> u128 {
    let mut loads = base.to_vec();
    for &size in sizes_desc {
        let target = (0..loads.len()).min_by_key(|&i| (loads[i], i)).expect("machines");
        loads[target] += size;
    }
    loads.iter().copied().min().expect("machines")
}

/// Fractional water level: the largest minimum load reachable if the
/// remaining volume could be split arbitrarily. Returned as a fraction
/// (numerator, denominator); an upper bound for any integral completion.
fn water_level(loads: &[u128], remaining: u128) -> (u128, u128) {
    let mut sorted = loads.to_vec();
    sorted.sort_unstable();
    let mut prefix: u128 = 0;
    for k in 1..=sorted.len() {
        prefix += sorted[k - 1];
        if k == sorted.len() || prefix + remaining <= sorted[k] * k as u128 {
            return (prefix + remaining, k as u128);
        }
    }
    unreachable!("loop returns at k = m");
}

struct Search<'a> {
    sizes: &'a [u128],
    suffix: &'a [u128],
    budget: u64,
    nodes: u64,
    best: u128,
}

impl Search<'_> {
    fn dfs(&mut self, loads: &mut [u128], idx: usize, start: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "enumeration exceeded {} nodes",
                self.budget
            )));
        }
        if idx == self.sizes.len() {
            let min = loads.iter().copied().min().expect("machines");
            if min > self.best {
                self.best = min;
            }
            return Ok(());
        }
        let (level_num, level_den) = water_level(loads, self.suffix[idx]);
        if level_num <= self.best * level_den {
            return Ok(());
        }
        let size = self.sizes[idx];
        for machine in start..loads.len() {
            // Machines with equal loads are interchangeable here; keeping
            // only the first of each load class prunes symmetric branches.
            if (start..machine).any(|earlier| loads[earlier] == loads[machine]) {
                continue;
            }
            loads[machine] += size;
            let next_start =
                if idx + 1 < self.sizes.len() && self.sizes[idx + 1] == size { machine } else { 0 };
            self.dfs(loads, idx + 1, next_start)?;
            loads[machine] -= size;
        }
        Ok(())
    }
}

/// Exact maximum over all assignments of the minimum machine load, with
/// `base` as frozen per-machine starting loads. Branch and bound seeded by
/// the greedy solution, pruned by the fractional water level, machine-load
/// symmetry and canonical ordering of equal sizes.
pub fn max_min_load(base: &[Rational], sizes: &[Rational], budget: u64) -> Result<Rational> {
    if base.is_empty() {
        return Err(Error::BadParameter("need at least one machine".into()));
    }
    if sizes.is_empty() {
        return Ok(base.iter().min().expect("machines").clone());
    }
    let all: Vec<Rational> = base.iter().chain(sizes.iter()).cloned().collect();
    let (scaled, lcm) = scale(&all, base.len())?;
    let (base_scaled, sizes_scaled) = scaled.split_at(base.len());
    let mut sizes_desc = sizes_scaled.to_vec();
    sizes_desc.sort_unstable_by(|a, b| b.cmp(a));
    let mut suffix = vec![0u128; sizes_desc.len() + 1];
    for i in (0..sizes_desc.len()).rev() {
        suffix[i] = suffix[i + 1] + sizes_desc[i];
    }
    let mut search = Search {
        sizes: &sizes_desc,
        suffix: &suffix,
        budget,
        nodes: 0,
        best: greedy_fill(base_scaled, &sizes_desc),
    };
    let mut loads = base_scaled.to_vec();
    search.dfs(&mut loads, 0, 0)?;
    Ok(Rational::new(BigInt::from(search.best), lcm))
}

/// Independent second implementation of [`max_min_load`]: a dynamic program
/// over the set of reachable sorted load vectors. Exponential in the worst
/// case; the budget caps the number of distinct states.
pub fn max_min_load_dp(base: &[Rational], sizes: &[Rational], budget: u64) -> Result<Rational> {
    if base.is_empty() {
        return Err(Error::BadParameter("need at least one machine".into()));
    }
    let all: Vec<Rational> = base.iter().chain(sizes.iter()).cloned().collect();
    let (scaled, lcm) = scale(&all, base.len())?;
    let (base_scaled, sizes_scaled) = scaled.split_at(base.len());
    let mut start = base_scaled.to_vec();
    start.sort_unstable();
    let mut states: BTreeSet<Vec<u128>> = BTreeSet::new();
    states.insert(start);
    let mut sizes_desc = sizes_scaled.to_vec();
    sizes_desc.sort_unstable_by(|a, b| b.cmp(a));
    for &size in &sizes_desc {
        let mut next: BTreeSet<Vec<u128>> = BTreeSet::new();
        for state in &states {
            for machine in 0..state.len() {
                if machine > 0 && state[machine] == state[machine - 1] {
                    continue;
                }
                let mut grown = state.clone();
                grown[machine] += size;
                grown.sort_unstable();
                next.insert(grown);
            }
        }
        states = next;
        if states.len() as u64 > budget {
            return Err(Error::BudgetExceeded(format!(
                "dynamic program exceeded {} states",
                budget
            )));
        }
    }
    let best = states
        .iter()
        .map(|state| state[0])
        .max()
        .expect("at least one state");
    Ok(Rational::new(BigInt::from(best), lcm))
}

/// Exact optimal minimum load for an instance starting from empty machines.
pub fn brute_force_opt(inst: &Instance, view: SizeView, budget: u64) -> Result<Rational> {
    let base = vec![Rational::zero(); inst.machines()];
    let sizes: Vec<Rational> = inst
        .jobs()
        .iter()
        .map(|job| match view {
            SizeView::Original => job.size().clone(),
            SizeView::Rounded => job.rounded_size().clone(),
        })
        .collect();
    max_min_load(&base, &sizes, budget)
}

/// Best achievable minimum load when the existing placement is frozen and
/// only the new sizes may be placed. Identical sizes are placed by exact
/// water-filling (optimal for identical items); mixed sizes fall back to the
/// branch-and-bound search.
pub fn best_without_migration(
    base: &[Rational],
    sizes: &[Rational],
    budget: u64,
) -> Result<Rational> {
    if base.is_empty() {
        return Err(Error::BadParameter("need at least one machine".into()));
    }
    if sizes.is_empty() {
        return Ok(base.iter().min().expect("machines").clone());
    }
    if sizes.iter().all(|s| s == &sizes[0]) {
        let all: Vec<Rational> = base.iter().chain(sizes.iter()).cloned().collect();
        let (scaled, lcm) = scale(&all, base.len())?;
        let (base_scaled, sizes_scaled) = scaled.split_at(base.len());
        let best = greedy_fill(base_scaled, sizes_scaled);
        return Ok(Rational::new(BigInt::from(best), lcm));
    }
    max_min_load(base, sizes, budget)
}

/// Ratio of the exact optimum (original sizes) to the schedule's minimum
/// original load. At least 1 for any feasible schedule.
pub fn competitive_check(s: &Schedule, inst: &Instance, budget: u64) -> Result<Rational> {
    let opt = brute_force_opt(inst, SizeView::Original, budget)?;
    let alg = s.min_load_original(inst)?;
    if alg.is_zero() {
        if opt.is_zero() {
            return Ok(Rational::one());
        }
        return Err(Error::BadParameter(
            "minimum load is zero but the optimum is positive".into(),
        ));
    }
    Ok(opt / alg)
}

/// Online algorithm a stream should be replayed through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    /// Work-queue insertion keeping big jobs jump-optimal.
    JumpOnline,
    /// Phased rebuild keeping the non-small restriction a valid
    /// longest-processing-time solution.
    OnlineLpt,
    /// Baseline: rebuild a canonical longest-processing-time schedule from
    /// scratch on every arrival and charge the implied migration.
    RecomputeLpt,
}

impl AlgorithmKind {
    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::JumpOnline => "jump",
            AlgorithmKind::OnlineLpt => "online-lpt",
            AlgorithmKind::RecomputeLpt => "recompute-lpt",
        }
    }

    pub fn parse(s: &str) -> Result<AlgorithmKind> {
        match s {
            "jump" => Ok(AlgorithmKind::JumpOnline),
            "online-lpt" => Ok(AlgorithmKind::OnlineLpt),
            "recompute-lpt" => Ok(AlgorithmKind::RecomputeLpt),
            other => Err(Error::Parse(format!(
                "unknown algorithm {:?}, expected jump, online-lpt or recompute-lpt",
                other
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StreamConfig {
    pub algorithm: AlgorithmKind,
    pub epsilon: Rational,
    /// Compute the exact optimum (original sizes) after every arrival.
    pub compute_opt: bool,
    /// Node budget per optimum computation.
    pub opt_budget: u64,
}

/// Per-arrival measurements of a replayed stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalRow {
    pub arrival: JobId,
    pub size: Rational,
    pub rounded: Rational,
    pub ub: Rational,
    pub min_load_rounded: Rational,
    pub min_load_original: Rational,
    pub migrated_rounded: Rational,
    pub migrated_original: Rational,
    pub migration_factor: Rational,
    pub moves: usize,
    pub opt_original: Option<Rational>,
    /// opt / min original load; 1 when both are zero, absent when the
    /// optimum was not computed or the minimum load is zero.
    pub ratio: Option<Rational>,
    /// Number of rebuild phases, for the phased algorithm only.
    pub phase_rows: Option<usize>,
    /// Small jobs shuffled by the final rebalancing, phased algorithm only.
    pub rebalance_moves: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct StreamReport {
    pub algorithm: AlgorithmKind,
    pub epsilon: Rational,
    pub machines: usize,
    pub rows: Vec<ArrivalRow>,
    pub max_migration_factor: Rational,
    pub max_ratio: Option<Rational>,
    pub final_min_load_rounded: Rational,
    pub final_min_load_original: Rational,
    pub final_assignment: BTreeMap<JobId, usize>,
}

fn make_row(
    ledger: &MigrationLedger,
    inst: &Instance,
    s: &Schedule,
    config: &StreamConfig,
) -> Result<ArrivalRow> {
    let min_load_original = s.min_load_original(inst)?;
    let (opt_original, ratio) = if config.compute_opt {
        let opt = brute_force_opt(inst, SizeView::Original, config.opt_budget)?;
        let ratio = if opt.is_zero() {
            Some(Rational::one())
        } else if min_load_original.is_zero() {
            None
        } else {
            Some(&opt / &min_load_original)
        };
        (Some(opt), ratio)
    } else {
        (None, None)
    };
    Ok(ArrivalRow {
        arrival: ledger.arrival,
        size: ledger.arrival_size.clone(),
        rounded: ledger.arrival_rounded.clone(),
        ub: ledger.ub.clone(),
        min_load_rounded: ledger.min_load.clone(),
        min_load_original,
        migrated_rounded: ledger.migrated_rounded.clone(),
        migrated_original: ledger.migrated_original.clone(),
        migration_factor: ledger.migration_factor(),
        moves: ledger.moves.len(),
        opt_original,
        ratio,
        phase_rows: ledger.phases.as_ref().map(|t| t.rows.len()),
        rebalance_moves: ledger.phases.as_ref().map(|t| t.rebalance_moves),
    })
}

fn finish_report(
    algorithm: AlgorithmKind,
    config: &StreamConfig,
    machines: usize,
    rows: Vec<ArrivalRow>,
    s: &Schedule,
    inst: &Instance,
) -> Result<StreamReport> {
    let max_migration_factor = rows
        .iter()
        .map(|row| row.migration_factor.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    let max_ratio = rows.iter().filter_map(|row| row.ratio.clone()).max();
    Ok(StreamReport {
        algorithm,
        epsilon: config.epsilon.clone(),
        machines,
        rows,
        max_migration_factor,
        max_ratio,
        final_min_load_rounded: s.min_load().clone(),
        final_min_load_original: s.min_load_original(inst)?,
        final_assignment: s.assignment().clone(),
    })
}

/// Replays a stream through the configured algorithm, measuring migration
/// and (optionally) the competitive ratio after every arrival.
pub fn run_stream(spec: &StreamSpec, config: &StreamConfig) -> Result<StreamReport> {
    let machines = spec.machines;
    match config.algorithm {
        AlgorithmKind::JumpOnline => {
            let mut session = if spec.prefix.is_empty() {
                JumpSession::new(machines, config.epsilon.clone())?
            } else {
                JumpSession::with_seed(machines, config.epsilon.clone(), &spec.prefix)?
            };
            session.set_push_rule(spec.push_rule.clone());
            session.set_ub_override(spec.ub_override.clone());
            let mut rows = Vec::with_capacity(spec.arrivals.len());
            for (id, size) in &spec.arrivals {
                let ledger = session.insert(*id, size.clone())?.clone();
                rows.push(make_row(&ledger, session.instance(), session.schedule(), config)?);
            }
            finish_report(
                config.algorithm,
                config,
                machines,
                rows,
                session.schedule(),
                session.instance(),
            )
        }
        AlgorithmKind::OnlineLpt => {
            if !spec.prefix.is_empty() {
                return Err(Error::BadParameter(
                    "pre-seeded prefixes are only supported by the jump algorithm".into(),
                ));
            }
            let mut session = OnlineLptSession::new(machines, config.epsilon.clone())?;
            session.set_ub_override(spec.ub_override.clone());
            let mut rows = Vec::with_capacity(spec.arrivals.len());
            for (id, size) in &spec.arrivals {
                let ledger = session.insert(*id, size.clone())?.clone();
                rows.push(make_row(&ledger, session.instance(), session.schedule(), config)?);
            }
            finish_report(
                config.algorithm,
                config,
                machines,
                rows,
                session.schedule(),
                session.instance(),
            )
        }
        AlgorithmKind::RecomputeLpt => {
            if !spec.prefix.is_empty() {
                return Err(Error::BadParameter(
                    "pre-seeded prefixes are only supported by the jump algorithm".into(),
                ));
            }
            let mut inst = Instance::new(machines)?;
            let mut current = Schedule::new(machines)?;
            let mut rows = Vec::with_capacity(spec.arrivals.len());
            for (id, size) in &spec.arrivals {
                let job = Job::new(*id, size.clone(), &config.epsilon)?;
                inst.push_job(job)?;
                let next = lpt::lpt_schedule(&inst, &TieBreak::LowestIndex)?;
                // Rebuilding from scratch must never lower the sorted load
                // profile; this is the monotonicity lemma the phased
                // algorithm relies on.
                if !current.profile().coordinatewise_le(&next.profile())? {
                    return Err(Error::IntegrityCheck(
                        "rebuilt profile dropped below its predecessor".into(),
                    ));
                }
                let ub = Rational::from_integer(2.into()) * next.min_load();
                let ledger = MigrationLedger::from_diff(&current, &next, &inst, *id, ub, None)?;
                current = next;
                rows.push(make_row(&ledger, &inst, &current, config)?);
            }
            finish_report(config.algorithm, config, machines, rows, &current, &inst)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::rational::rat;

    fn inst_of(machines: usize, sizes: &[Rational]) -> Instance {
        let mut inst = Instance::new(machines).unwrap();
        for (k, size) in sizes.iter().enumerate() {
            inst.push_job(Job::unrounded(k as u64, size.clone()).unwrap()).unwrap();
        }
        inst
    }

    #[test]
    fn brute_force_matches_hand_results() {
        let sizes: Vec<Rational> = [3, 3, 2, 2, 2].iter().map(|&n| rat(n, 1)).collect();
        let inst = inst_of(2, &sizes);
        assert_eq!(brute_force_opt(&inst, SizeView::Original, 1 << 20).unwrap(), rat(6, 1));

        let single = inst_of(1, &sizes);
        assert_eq!(brute_force_opt(&single, SizeView::Original, 1 << 20).unwrap(), rat(12, 1));

        let starved = inst_of(3, &[rat(5, 1), rat(7, 1)]);
        assert_eq!(brute_force_opt(&starved, SizeView::Original, 1 << 20).unwrap(), rat(0, 1));
    }

    #[test]
    fn brute_force_handles_the_ratio_gap_base() {
        let sizes = [rat(2, 1), rat(2, 1), rat(2, 1), rat(3, 1), rat(3, 1), rat(80, 17)];
        let inst = inst_of(3, &sizes);
        assert_eq!(brute_force_opt(&inst, SizeView::Original, 1 << 22).unwrap(), rat(5, 1));
    }

    #[test]
    fn the_two_oracles_agree_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let machines = rng.gen_range(1..=3);
            let n = rng.gen_range(0..=8);
            let sizes: Vec<Rational> =
                (0..n).map(|_| rat(rng.gen_range(1..=12), rng.gen_range(1..=4))).collect();
            let base = vec![Rational::zero(); machines];
            let a = max_min_load(&base, &sizes, 1 << 22).unwrap();
            let b = max_min_load_dp(&base, &sizes, 1 << 22).unwrap();
            assert_eq!(a, b, "oracles disagree on sizes {:?}", sizes);
        }
    }

    #[test]
    fn frozen_base_placement_matches_hand_results() {
        // Two empty machines, one job: somebody stays empty.
        assert_eq!(
            best_without_migration(&[rat(0, 1), rat(0, 1)], &[rat(4, 1)], 1 << 20).unwrap(),
            rat(0, 1)
        );
        // Equal quanta water-fill onto equal bases.
        let quanta: Vec<Rational> = (0..8).map(|_| rat(1, 4)).collect();
        assert_eq!(
            best_without_migration(&[rat(1, 1), rat(1, 1)], &quanta, 1 << 20).unwrap(),
            rat(2, 1)
        );
    }

    #[test]
    fn frozen_equal_quanta_agree_with_full_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let machines = rng.gen_range(1..=3);
            let base: Vec<Rational> =
                (0..machines).map(|_| rat(rng.gen_range(0..=6), 1)).collect();
            let count = rng.gen_range(0..=7);
            let quantum = rat(1, rng.gen_range(1..=3));
            let sizes = vec![quantum; count];
            let fast = best_without_migration(&base, &sizes, 1 << 22).unwrap();
            let slow = max_min_load(&base, &sizes, 1 << 22).unwrap();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn budget_guard_fires() {
        let sizes: Vec<Rational> = (0..12).map(|k| rat(k + 3, 2)).collect();
        let base = vec![Rational::zero(); 4];
        assert!(matches!(
            max_min_load(&base, &sizes, 10),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn competitive_check_is_at_least_one() {
        let sizes: Vec<Rational> = [3, 3, 2, 2, 2].iter().map(|&n| rat(n, 1)).collect();
        let inst = inst_of(2, &sizes);
        let s = lpt::lpt_schedule(&inst, &TieBreak::LowestIndex).unwrap();
        let ratio = competitive_check(&s, &inst, 1 << 20).unwrap();
        assert!(ratio >= Rational::one());
        assert_eq!(ratio, rat(6, 5));
    }

    #[test]
    fn stream_driver_is_deterministic_and_sane() {
        let spec = generators::random_stream(5, 10, 2, &generators::SizeLaw::uniform_grid());
        let config = StreamConfig {
            algorithm: AlgorithmKind::JumpOnline,
            epsilon: rat(1, 4),
            compute_opt: true,
            opt_budget: 1 << 22,
        };
        let a = run_stream(&spec, &config).unwrap();
        let b = run_stream(&spec, &config).unwrap();
        assert_eq!(a.final_assignment, b.final_assignment);
        for row in &a.rows {
            if let Some(ratio) = &row.ratio {
                assert!(*ratio >= Rational::one());
            }
        }
    }

    #[test]
    fn recompute_baseline_profiles_never_drop() {
        let spec = generators::random_stream(9, 12, 3, &generators::SizeLaw::uniform_grid());
        let config = StreamConfig {
            algorithm: AlgorithmKind::RecomputeLpt,
            epsilon: rat(1, 8),
            compute_opt: false,
            opt_budget: 1 << 20,
        };
        run_stream(&spec, &config).unwrap();
    }
}
