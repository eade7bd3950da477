//! Randomized invariant checks for the rounding, profile and scheduling
//! primitives. Each property encodes a fact the algorithms rely on; a
//! shrunk counterexample here means the corresponding lemma is broken.

use proptest::prelude::*;

use covering::jump::{is_jump_optimal, push, JumpSession};
use covering::lpt::{is_lpt_solution, lpt_schedule, TieBreak};
use covering::oracle::{self, SizeView};
use covering::rational::{is_integer, pow2, rat};
use covering::rounding::{build_context, round_size};
use covering::{Instance, Job, LoadProfile, Rational, Schedule};

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=1_000_000, 1i64..=10_000).prop_map(|(n, d)| rat(n, d))
}

fn epsilon() -> impl Strategy<Value = Rational> {
    (2i64..=64).prop_map(|d| rat(1, d))
}

fn unit_fraction_epsilon() -> impl Strategy<Value = Rational> {
    (1u32..=6).prop_map(|e| rat(1, 1 << e))
}

proptest! {
    /// Rounding never increases a size and loses at most a factor epsilon.
    #[test]
    fn rounding_brackets_the_size(p in positive_rational(), eps in epsilon()) {
        let r = round_size(&p, &eps).unwrap();
        prop_assert!(r <= p);
        prop_assert!(r >= (rat(1, 1) - &eps) * &p);
    }

    /// Rounding is idempotent: a rounded size is its own rounding.
    #[test]
    fn rounding_is_idempotent(p in positive_rational(), eps in epsilon()) {
        let r = round_size(&p, &eps).unwrap();
        prop_assert_eq!(round_size(&r, &eps).unwrap(), r);
    }

    /// Rounding preserves order.
    #[test]
    fn rounding_is_monotone(
        p in positive_rational(),
        delta in positive_rational(),
        eps in epsilon(),
    ) {
        let q = &p + &delta;
        prop_assert!(round_size(&p, &eps).unwrap() <= round_size(&q, &eps).unwrap());
    }

    /// Rounding commutes with scaling by powers of two, which is what makes
    /// it independent of the upper-bound estimate.
    #[test]
    fn rounding_commutes_with_octave_shifts(
        p in positive_rational(),
        eps in epsilon(),
        shift in -4i64..=4,
    ) {
        let scaled = round_size(&(&p * pow2(shift)), &eps).unwrap();
        prop_assert_eq!(scaled, round_size(&p, &eps).unwrap() * pow2(shift));
    }

    /// Every ladder value is a fixed point of the rounding and an exact
    /// multiple of the context grid.
    #[test]
    fn ladder_values_sit_on_the_grid(
        eps in unit_fraction_epsilon(),
        ub in positive_rational(),
    ) {
        let ctx = build_context(&eps, &ub).unwrap();
        if let Some(grid) = ctx.grid() {
            for value in ctx.ladder() {
                prop_assert_eq!(&round_size(value, &eps).unwrap(), value);
                prop_assert!(is_integer(&(value / &grid)));
            }
        }
    }

    /// Sorted load profiles: adding the larger delta to the dominating
    /// profile preserves coordinatewise dominance.
    #[test]
    fn profile_adjust_preserves_dominance(
        base in prop::collection::vec(0i64..=20, 1..=6),
        raises in prop::collection::vec(0i64..=20, 1..=6),
        index in 0usize..6,
        alpha in 0i64..=20,
        beta_extra in 0i64..=20,
    ) {
        let len = base.len().min(raises.len());
        let index = index % len;
        let x = LoadProfile::from_unsorted(base[..len].iter().map(|&v| rat(v, 3)).collect());
        let y = LoadProfile::from_unsorted(
            base[..len]
                .iter()
                .zip(&raises)
                .map(|(&v, &r)| rat(v + r, 3))
                .collect(),
        );
        prop_assert!(x.coordinatewise_le(&y).unwrap());
        let xa = x.adjust_entry(index, &rat(alpha, 3)).unwrap();
        let ya = y.adjust_entry(index, &rat(alpha + beta_extra, 3)).unwrap();
        prop_assert!(xa.coordinatewise_le(&ya).unwrap());
    }

    /// Removing a value present in both profiles (at possibly different
    /// positions) preserves coordinatewise dominance.
    #[test]
    fn profile_remove_preserves_dominance(
        base in prop::collection::vec(0i64..=12, 2..=6),
        raises in prop::collection::vec(0i64..=12, 2..=6),
    ) {
        let len = base.len().min(raises.len());
        let x = LoadProfile::from_unsorted(base[..len].iter().map(|&v| rat(v, 1)).collect());
        let y = LoadProfile::from_unsorted(
            base[..len]
                .iter()
                .zip(&raises)
                .map(|(&v, &r)| rat(v + r, 1))
                .collect(),
        );
        for j in 0..len {
            for i in 0..len {
                if x.values()[j] == y.values()[i] {
                    let xr = x.remove_entry(j).unwrap();
                    let yr = y.remove_entry(i).unwrap();
                    prop_assert!(xr.coordinatewise_le(&yr).unwrap());
                }
            }
        }
    }

    /// The upper-bound estimate really is an upper bound on the optimum and
    /// at most twice it.
    #[test]
    fn ub_estimate_brackets_the_optimum(
        sizes in prop::collection::vec((1i64..=12, 1i64..=4), 1..=7),
        machines in 1usize..=3,
    ) {
        let mut inst = Instance::new(machines).unwrap();
        for (i, (n, d)) in sizes.iter().enumerate() {
            inst.push_job(Job::unrounded(i as u64, rat(*n, *d)).unwrap()).unwrap();
        }
        let ub = covering::rounding::compute_ub(&inst).unwrap();
        let opt = oracle::brute_force_opt(&inst, SizeView::Original, 1 << 22).unwrap();
        prop_assert!(opt <= ub);
        prop_assert!(ub <= rat(2, 1) * &opt);
    }

    /// `push` postcondition: afterwards no job on the target machine could
    /// jump away, i.e. removing any single occupant keeps the load above
    /// the old minimum.
    #[test]
    fn push_leaves_no_job_able_to_jump(
        sizes in prop::collection::vec(1i64..=8, 3..=9),
        arrival in 2i64..=9,
        machines in 2usize..=3,
    ) {
        let eps = rat(1, 4);
        let mut inst = Instance::new(machines).unwrap();
        let mut schedule = Schedule::new(machines).unwrap();
        for (i, &n) in sizes.iter().enumerate() {
            let job = Job::new(i as u64, rat(n, 1), &eps).unwrap();
            inst.push_job(job.clone()).unwrap();
            schedule.assign(&job, i % machines).unwrap();
        }
        let id = sizes.len() as u64;
        let job = Job::new(id, rat(arrival, 1), &eps).unwrap();
        inst.push_job(job.clone()).unwrap();
        let target = schedule.least_loaded();
        let expelled = push(&mut schedule, &inst, target, &job).unwrap();
        let min_after = schedule.min_load().clone();
        for occupant in schedule.jobs_on(target) {
            let spare = schedule.load(target) - inst.job(occupant).unwrap().rounded_size();
            prop_assert!(spare <= min_after);
        }
        for id in expelled {
            prop_assert!(schedule.machine_of(id).is_none());
        }
    }

    /// The online jump algorithm keeps its non-small restriction
    /// jump-optimal after every arrival.
    #[test]
    fn jump_session_keeps_big_restriction_jump_optimal(
        sizes in prop::collection::vec((1i64..=16, 1i64..=2), 1..=10),
        machines in 1usize..=3,
    ) {
        let eps = rat(1, 4);
        let mut session = JumpSession::new(machines, eps.clone()).unwrap();
        for (i, (n, d)) in sizes.iter().enumerate() {
            session.insert(i as u64, rat(*n, *d)).unwrap();
            let inst = session.instance();
            let ub = covering::rounding::compute_ub(inst).unwrap();
            let ctx = build_context(&eps, &ub).unwrap();
            let small = ctx.small_threshold();
            let keep = |job: &Job| match &small {
                Some(t) => job.rounded_size() >= t,
                None => true,
            };
            let mut big = Instance::new(machines).unwrap();
            for job in inst.jobs().iter().filter(|j| keep(j)) {
                big.push_job(job.clone()).unwrap();
            }
            let restricted = session.schedule().restricted(inst, keep).unwrap();
            prop_assert!(is_jump_optimal(&restricted, &big).unwrap());
        }
    }

    /// The LPT certifier accepts what the LPT scheduler builds, under both
    /// tie-breaking rules.
    #[test]
    fn lpt_certifier_accepts_lpt_runs(
        sizes in prop::collection::vec(1i64..=10, 1..=10),
        machines in 1usize..=4,
    ) {
        let mut inst = Instance::new(machines).unwrap();
        for (i, &n) in sizes.iter().enumerate() {
            inst.push_job(Job::unrounded(i as u64, rat(n, 2)).unwrap()).unwrap();
        }
        let all: std::collections::BTreeSet<usize> = (0..machines).collect();
        for tie in [TieBreak::LowestIndex, TieBreak::PreferSet(all)] {
            let s = lpt_schedule(&inst, &tie).unwrap();
            prop_assert!(is_lpt_solution(&s, &inst).unwrap());
        }
    }

    /// Branch and bound and the dynamic program agree on the optimum.
    #[test]
    fn oracles_agree(
        sizes in prop::collection::vec((1i64..=10, 1i64..=3), 1..=7),
        base in prop::collection::vec(0i64..=6, 1..=3),
    ) {
        let base: Vec<Rational> = base.iter().map(|&v| rat(v, 1)).collect();
        let sizes: Vec<Rational> = sizes.iter().map(|&(n, d)| rat(n, d)).collect();
        let bb = oracle::max_min_load(&base, &sizes, 1 << 22).unwrap();
        let dp = oracle::max_min_load_dp(&base, &sizes, 1 << 22).unwrap();
        prop_assert_eq!(bb, dp);
    }
}
