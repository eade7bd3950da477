//! Jump- and swap-optimality certifiers, the push primitive and the online
//! jump-optimal algorithm.
//!
//! A schedule is *jump-optimal* when no machine can spare a job: for every
//! machine `i` and job `j` on it, `load(i) - size(j) <= min_load`. The
//! certifiers below decide that characterization directly
//! ([`is_jump_optimal`]) and, independently, by enumerating single-job moves
//! under the lexicographic order on sorted load vectors
//! ([`is_lex_jump_optimal`]); the two must agree on every schedule.
//! [`is_swap_optimal`] extends the neighborhood with pairwise exchanges.
//!
//! The online algorithm keeps the big jobs jump-optimal under a rounding
//! context refreshed on every arrival, using a work queue of displaced jobs
//! and a final rebalancing of small jobs. Its migration cost is bounded by a
//! constant factor of the arrival's size.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};


use crate::error::{Error, Result};
use crate::job::{Instance, Job, JobId};
use crate::lpt::{self, TieBreak};
use crate::migration::MigrationLedger;
use crate::rational::{check_epsilon, Rational};
use crate::rounding::{self, JobClass};
use crate::schedule::Schedule;

/// Decides jump-optimality by its load characterization: every machine must
/// satisfy `load(i) - size(j) <= min_load` for each job `j` it carries.
pub fn is_jump_optimal(s: &Schedule, inst: &Instance) -> Result<bool> {
    let min = s.min_load().clone();
    for machine in 0..s.machines() {
        // load(i) - size(j) > min_load rearranges to size(j) < load(i) - min.
        let spare = s.load(machine) - &min;
        for id in s.jobs_on(machine) {
            if *inst.job(id)?.rounded_size() < spare {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Decides jump-optimality from first principles: a schedule is optimal for
/// the jump neighborhood when no single-job move produces a lexicographically
/// larger sorted load vector. Exists as an independent cross-check for
/// [`is_jump_optimal`].
pub fn is_lex_jump_optimal(s: &Schedule, inst: &Instance) -> Result<bool> {
    let loads = s.loads().to_vec();
    let mut current = loads.clone();
    current.sort();
    for (&id, &from) in s.assignment() {
        let size = inst.job(id)?.rounded_size().clone();
        for to in 0..s.machines() {
            if to == from {
                continue;
            }
            let mut next = loads.clone();
            next[from] -= &size;
            next[to] += &size;
            next.sort();
            if next > current {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Multiset of machine loads supporting cheap what-if weight queries.
struct LoadBag {
    counts: BTreeMap<Rational, usize>,
}

impl LoadBag {
    fn new(loads: &[Rational]) -> LoadBag {
        let mut counts = BTreeMap::new();
        for load in loads {
            *counts.entry(load.clone()).or_insert(0) += 1;
        }
        LoadBag { counts }
    }

    fn shift(&mut self, from: &Rational, to: Rational) {
        let cnt = self.counts.get_mut(from).expect("load present");
        *cnt -= 1;
        if *cnt == 0 {
            self.counts.remove(from);
        }
        *self.counts.entry(to).or_insert(0) += 1;
    }

    /// Weight of the current load vector: the minimum load together with its
    /// multiplicity. Larger minimum is better; at equal minimum, fewer
    /// machines attaining it is better.
    fn weight(&self) -> (Rational, usize) {
        let (min, cnt) = self.counts.iter().next().expect("nonempty");
        (min.clone(), *cnt)
    }
}

fn weight_improves(candidate: &(Rational, usize), current: &(Rational, usize)) -> bool {
    candidate.0 > current.0 || (candidate.0 == current.0 && candidate.1 < current.1)
}

/// Decides swap-optimality: no single-job move and no exchange of two jobs
/// between distinct machines may improve the weight `(min_load, count at
/// min_load)`, where a larger minimum wins and ties prefer fewer machines at
/// the minimum.
///
/// Candidate moves are deduplicated by outcome, so large schedules with few
/// distinct sizes and loads are cheap to certify.
pub fn is_swap_optimal(s: &Schedule, inst: &Instance) -> Result<bool> {
    let mut bag = LoadBag::new(s.loads());
    let current = bag.weight();

    // One representative job per (machine, rounded size).
    let mut groups: BTreeMap<(usize, Rational), JobId> = BTreeMap::new();
    for (&id, &machine) in s.assignment() {
        let size = inst.job(id)?.rounded_size().clone();
        groups.entry((machine, size)).or_insert(id);
    }

    // Moves, keyed by (source load, size, target load).
    let mut seen_moves: BTreeSet<(Rational, Rational, Rational)> = BTreeSet::new();
    for (machine_a, size) in groups.keys() {
        let load_a = s.load(*machine_a).clone();
        for machine_b in 0..s.machines() {
            if machine_b == *machine_a {
                continue;
            }
            let load_b = s.load(machine_b).clone();
            if !seen_moves.insert((load_a.clone(), size.clone(), load_b.clone())) {
                continue;
            }
            bag.shift(&load_a, &load_a - size);
            bag.shift(&load_b, &load_b + size);
            let improved = weight_improves(&bag.weight(), &current);
            bag.shift(&(&load_b + size), load_b.clone());
            bag.shift(&(&load_a - size), load_a.clone());
            if improved {
                return Ok(false);
            }
        }
    }

    // Swaps, keyed by the unordered pair of (load, size) endpoints.
    let mut seen_swaps: BTreeSet<(Rational, Rational, Rational, Rational)> = BTreeSet::new();
    let entries: Vec<((usize, Rational), JobId)> =
        groups.iter().map(|(k, v)| (k.clone(), *v)).collect();
    for ((machine_a, size_a), _) in &entries {
        for ((machine_b, size_b), _) in &entries {
            if machine_a == machine_b || size_a == size_b {
                continue;
            }
            let load_a = s.load(*machine_a).clone();
            let load_b = s.load(*machine_b).clone();
            let key = if (&load_a, size_a) <= (&load_b, size_b) {
                (load_a.clone(), size_a.clone(), load_b.clone(), size_b.clone())
            } else {
                (load_b.clone(), size_b.clone(), load_a.clone(), size_a.clone())
            };
            if !seen_swaps.insert(key) {
                continue;
            }
            let new_a = &load_a - size_a + size_b;
            let new_b = &load_b - size_b + size_a;
            bag.shift(&load_a, new_a.clone());
            bag.shift(&load_b, new_b.clone());
            let improved = weight_improves(&bag.weight(), &current);
            bag.shift(&new_b, load_b);
            bag.shift(&new_a, load_a);
            if improved {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// How the online algorithm breaks ties among least-loaded machines when
/// choosing a push target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PushRule {
    /// Lowest machine index. The canonical choice.
    LowestIndex,
    /// Among least-loaded machines, prefer the one whose largest occupant
    /// smaller than the incoming job is maximal; fall back to the lowest
    /// index. This adversarial choice maximizes displacement chains and is
    /// used by the lower-bound instance families.
    LargestSmallerOccupant,
}

/// Picks the machine a job should be pushed onto: a least-loaded machine of
/// `view`, with ties broken by `rule`.
pub fn choose_push_target(
    view: &Schedule,
    inst: &Instance,
    job: &Job,
    rule: &PushRule,
) -> Result<usize> {
    let min = view.min_load().clone();
    let ties = (0..view.machines()).filter(|&i| *view.load(i) == min);
    match rule {
        PushRule::LowestIndex => Ok(ties.min().expect("at least one machine")),
        PushRule::LargestSmallerOccupant => {
            let mut best: Option<(Option<Rational>, usize)> = None;
            for machine in ties {
                let mut key: Option<Rational> = None;
                for id in view.jobs_on(machine) {
                    let size = inst.job(id)?.rounded_size();
                    if size < job.rounded_size() && key.as_ref().map_or(true, |k| size > k) {
                        key = Some(size.clone());
                    }
                }
                let better = match &best {
                    None => true,
                    Some((best_key, _)) => key > *best_key,
                };
                if better {
                    best = Some((key, machine));
                }
            }
            Ok(best.expect("at least one machine").1)
        }
    }
}

/// Inserts `job` on machine `target` of `s`, then expels every original
/// occupant the machine no longer needs: job `k` leaves while
/// `load(target) - size(k) > min_load`, scanning occupants by non-increasing
/// rounded size (ties by ascending id) and re-evaluating the loads after
/// every removal. Returns the expelled jobs in removal order.
pub fn push(s: &mut Schedule, inst: &Instance, target: usize, job: &Job) -> Result<Vec<JobId>> {
    let mut occupants: Vec<&Job> = s
        .jobs_on(target)
        .map(|id| inst.job(id))
        .collect::<Result<_>>()?;
    occupants.sort_by(|a, b| b.rounded_size().cmp(a.rounded_size()).then(a.id().cmp(&b.id())));
    s.assign(job, target)?;

    let mut expelled = Vec::new();
    loop {
        let mut changed = false;
        for occ in &occupants {
            if s.machine_of(occ.id()) != Some(target) {
                continue;
            }
            if &(s.load(target) - occ.rounded_size()) > s.min_load() {
                s.unassign(occ)?;
                expelled.push(occ.id());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(expelled)
}

/// Restores jump-optimality by repeatedly moving a violating job to a least
/// loaded machine. Returns the number of moves performed.
pub fn jump_optimal_completion(s: &mut Schedule, inst: &Instance) -> Result<usize> {
    let mut moves = 0usize;
    loop {
        let min = s.min_load().clone();
        let mut violation: Option<JobId> = None;
        'scan: for machine in 0..s.machines() {
            let mut on_machine: Vec<&Job> = s
                .jobs_on(machine)
                .map(|id| inst.job(id))
                .collect::<Result<_>>()?;
            on_machine
                .sort_by(|a, b| b.rounded_size().cmp(a.rounded_size()).then(a.id().cmp(&b.id())));
            for job in on_machine {
                if &(s.load(machine) - job.rounded_size()) > &min {
                    violation = Some(job.id());
                    break 'scan;
                }
            }
        }
        let Some(id) = violation else {
            return Ok(moves);
        };
        let job = inst.job(id)?.clone();
        s.unassign(&job)?;
        let target = s.least_loaded();
        s.assign(&job, target)?;
        moves += 1;
        if moves > 1_000_000 {
            return Err(Error::BudgetExceeded(
                "jump completion exceeded one million moves".into(),
            ));
        }
    }
}

/// Outcome of comparing a schedule against a reference under the relaxed
/// optimality notion: jobs of rounded size at least `k1 * epsilon * opt`
/// must be assigned identically up to machine relabeling, and every machine
/// carrying a smaller job must stay within `k2 * epsilon * opt` of the
/// minimum load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedCertificate {
    pub k1: Rational,
    pub k2: Rational,
    /// The size threshold `k1 * epsilon * opt` that was applied.
    pub threshold: Rational,
    /// Condition 1: the partition of jobs at or above the threshold agrees
    /// with the reference up to machine relabeling.
    pub big_jobs_match: bool,
    /// Condition 2: machines carrying a job below the threshold are within
    /// `k2 * epsilon * opt` of the minimum load.
    pub spread_bounded: bool,
}

impl RelaxedCertificate {
    pub fn witnessed(&self) -> bool {
        self.big_jobs_match && self.spread_bounded
    }
}

fn big_partition(
    s: &Schedule,
    inst: &Instance,
    threshold: &Rational,
) -> Result<Vec<BTreeSet<JobId>>> {
    let mut groups: Vec<BTreeSet<JobId>> = vec![BTreeSet::new(); s.machines()];
    for (&id, &machine) in s.assignment() {
        if inst.job(id)?.rounded_size() >= threshold {
            groups[machine].insert(id);
        }
    }
    let mut nonempty: Vec<BTreeSet<JobId>> =
        groups.into_iter().filter(|g| !g.is_empty()).collect();
    nonempty.sort();
    Ok(nonempty)
}

/// Checks the relaxed optimality conditions of `s` against `reference`.
/// Both schedules must assign exactly the jobs of `inst`.
pub fn check_relaxed(
    s: &Schedule,
    reference: &Schedule,
    inst: &Instance,
    k1: &Rational,
    k2: &Rational,
    epsilon: &Rational,
    opt: &Rational,
) -> Result<RelaxedCertificate> {
    s.audit(inst)?;
    reference.audit(inst)?;
    if s.machines() != reference.machines() {
        return Err(Error::LengthMismatch {
            left: s.machines(),
            right: reference.machines(),
        });
    }
    if s.len() != inst.len() || reference.len() != inst.len() {
        return Err(Error::IntegrityCheck(
            "relaxed certificate needs complete schedules".into(),
        ));
    }
    let threshold = k1 * epsilon * opt;
    let big_jobs_match =
        big_partition(s, inst, &threshold)? == big_partition(reference, inst, &threshold)?;

    let slack = k2 * epsilon * opt;
    let bound = s.min_load() + &slack;
    let mut spread_bounded = true;
    for machine in 0..s.machines() {
        let mut has_small = false;
        for id in s.jobs_on(machine) {
            if *inst.job(id)?.rounded_size() < threshold {
                has_small = true;
                break;
            }
        }
        if has_small && *s.load(machine) > bound {
            spread_bounded = false;
            break;
        }
    }
    Ok(RelaxedCertificate {
        k1: k1.clone(),
        k2: k2.clone(),
        threshold,
        big_jobs_match,
        spread_bounded,
    })
}

/// Online scheduler that keeps the big-job part of the schedule jump-optimal
/// while migrating at most a constant factor of each arrival's size.
///
/// Every arrival refreshes the upper-bound estimate (twice the minimum load
/// of a longest-processing-time schedule built from scratch, unless
/// overridden) and with it the rounding context. Small arrivals go to a
/// least loaded machine untouched. Bigger arrivals enter a work queue: the
/// largest queued job is pushed onto a least loaded machine of the view that
/// ignores small jobs, the jobs it displaces join the queue, and small jobs
/// are taken off the target while its load exceeds the minimum by more than
/// the small-job threshold. Displaced small jobs are list-scheduled at the
/// end.
pub struct JumpSession {
    epsilon: Rational,
    instance: Instance,
    schedule: Schedule,
    push_rule: PushRule,
    ub_override: Option<Rational>,
    history: Vec<MigrationLedger>,
}

impl JumpSession {
    pub fn new(machines: usize, epsilon: Rational) -> Result<JumpSession> {
        check_epsilon(&epsilon)?;
        Ok(JumpSession {
            epsilon,
            instance: Instance::new(machines)?,
            schedule: Schedule::new(machines)?,
            push_rule: PushRule::LowestIndex,
            ub_override: None,
            history: Vec::new(),
        })
    }

    /// Starts from a pre-assigned schedule instead of an empty one. Each
    /// seed entry is `(id, size, machine)`; sizes are rounded on admission.
    pub fn with_seed(
        machines: usize,
        epsilon: Rational,
        seed: &[(JobId, Rational, usize)],
    ) -> Result<JumpSession> {
        let mut session = JumpSession::new(machines, epsilon)?;
        for (id, size, machine) in seed {
            let job = Job::new(*id, size.clone(), &session.epsilon)?;
            session.instance.push_job(job.clone())?;
            session.schedule.assign(&job, *machine)?;
        }
        Ok(session)
    }

    pub fn set_push_rule(&mut self, rule: PushRule) {
        self.push_rule = rule;
    }

    /// Fixes the upper-bound estimate instead of recomputing it per arrival.
    pub fn set_ub_override(&mut self, ub: Option<Rational>) {
        self.ub_override = ub;
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn history(&self) -> &[MigrationLedger] {
        &self.history
    }

    /// Handles one arrival and returns its migration ledger.
    pub fn insert(&mut self, id: JobId, size: Rational) -> Result<&MigrationLedger> {
        let job = Job::new(id, size, &self.epsilon)?;
        self.instance.push_job(job.clone())?;
        let before = self.schedule.clone();

        let ub = match &self.ub_override {
            Some(ub) => ub.clone(),
            None => rounding::compute_ub(&self.instance)?,
        };
        let ctx = rounding::build_context(&self.epsilon, &ub)?;

        if ctx.classify(job.rounded_size()) == JobClass::Small {
            let target = self.schedule.least_loaded();
            self.schedule.assign(&job, target)?;
        } else {
            self.place_big(&ctx, job)?;
        }

        self.schedule.audit(&self.instance)?;
        let ledger =
            MigrationLedger::from_diff(&before, &self.schedule, &self.instance, id, ub, None)?;
        self.history.push(ledger);
        Ok(self.history.last().expect("just pushed"))
    }

    fn place_big(&mut self, ctx: &rounding::RoundingContext, job: Job) -> Result<()> {
        let mut view = self
            .schedule
            .restricted(&self.instance, |j| ctx.classify(j.rounded_size()) != JobClass::Small)?;

        let mut queue: BTreeSet<(Reverse<Rational>, JobId)> = BTreeSet::new();
        queue.insert((Reverse(job.rounded_size().clone()), job.id()));
        let mut displaced_small: Vec<Job> = Vec::new();

        let mut pops = 0usize;
        while let Some((_, id)) = queue.pop_first() {
            pops += 1;
            if pops > 4 * self.instance.len() + 8 {
                return Err(Error::IntegrityCheck(
                    "push queue failed to drain".into(),
                ));
            }
            let current = self.instance.job(id)?.clone();
            let target = choose_push_target(&view, &self.instance, &current, &self.push_rule)?;
            let expelled = push(&mut view, &self.instance, target, &current)?;

            // Mirror the placement into the full schedule.
            if self.schedule.machine_of(id).is_some() {
                self.schedule.unassign(&current)?;
            }
            self.schedule.assign(&current, target)?;
            for eid in expelled {
                let ejob = self.instance.job(eid)?.clone();
                self.schedule.unassign(&ejob)?;
                queue.insert((Reverse(ejob.rounded_size().clone()), eid));
            }

            // Take small jobs off the target while it overshoots.
            if let Some(threshold) = ctx.small_threshold() {
                loop {
                    let bound = self.schedule.min_load() + &threshold;
                    if *self.schedule.load(target) <= bound {
                        break;
                    }
                    let mut smalls: Vec<&Job> = Vec::new();
                    for sid in self.schedule.jobs_on(target) {
                        let sj = self.instance.job(sid)?;
                        if ctx.classify(sj.rounded_size()) == JobClass::Small {
                            smalls.push(sj);
                        }
                    }
                    smalls.sort_by(|a, b| {
                        b.rounded_size().cmp(a.rounded_size()).then(a.id().cmp(&b.id()))
                    });
                    let Some(small) = smalls.first() else {
                        break;
                    };
                    let small = (*small).clone();
                    self.schedule.unassign(&small)?;
                    displaced_small.push(small);
                }
            }
        }

        displaced_small
            .sort_by(|a, b| b.rounded_size().cmp(a.rounded_size()).then(a.id().cmp(&b.id())));
        lpt::list_schedule(&mut self.schedule, &displaced_small, &TieBreak::LowestIndex)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn job(id: JobId, num: i64) -> Job {
        Job::unrounded(id, rat(num, 1)).unwrap()
    }

    fn schedule_from(machines: usize, placement: &[(JobId, i64, usize)]) -> (Schedule, Instance) {
        let mut inst = Instance::new(machines).unwrap();
        let mut s = Schedule::new(machines).unwrap();
        for &(id, size, machine) in placement {
            let j = job(id, size);
            inst.push_job(j.clone()).unwrap();
            s.assign(&j, machine).unwrap();
        }
        (s, inst)
    }

    #[test]
    fn push_expels_spare_occupants() {
        // Machine 0 holds {3, 1}, machine 1 holds {2}; pushing a job of size
        // 5 onto machine 1 makes the 2 redundant there.
        let (mut s, mut inst) = schedule_from(2, &[(1, 3, 0), (2, 1, 0), (3, 2, 1)]);
        let incoming = job(4, 5);
        inst.push_job(incoming.clone()).unwrap();
        let expelled = push(&mut s, &inst, 1, &incoming).unwrap();
        assert_eq!(expelled, vec![3]);
        assert_eq!(*s.load(0), rat(4, 1));
        assert_eq!(*s.load(1), rat(5, 1));
    }

    #[test]
    fn push_keeps_needed_occupants() {
        let (mut s, mut inst) = schedule_from(2, &[(1, 4, 0), (2, 4, 1)]);
        let incoming = job(3, 1);
        inst.push_job(incoming.clone()).unwrap();
        let expelled = push(&mut s, &inst, 0, &incoming).unwrap();
        assert!(expelled.is_empty());
        assert_eq!(*s.load(0), rat(5, 1));
    }

    #[test]
    fn push_reevaluates_after_each_removal() {
        // Machine 1 holds {2, 2} against min load 5. Pushing a 4 (load 8)
        // expels the first 2 (8 - 2 = 6 > 5); after that removal the other
        // must stay (6 - 2 = 4 <= 5).
        let (mut s, mut inst) = schedule_from(2, &[(1, 5, 0), (2, 2, 1), (3, 2, 1)]);
        let incoming = job(4, 4);
        inst.push_job(incoming.clone()).unwrap();
        let expelled = push(&mut s, &inst, 1, &incoming).unwrap();
        assert_eq!(expelled, vec![2]);
        assert_eq!(*s.load(1), rat(6, 1));
    }

    #[test]
    fn jump_certifiers_match_by_hand() {
        let (balanced, inst) = schedule_from(2, &[(1, 3, 0), (2, 3, 1), (3, 2, 0), (4, 2, 1)]);
        assert!(is_jump_optimal(&balanced, &inst).unwrap());
        assert!(is_lex_jump_optimal(&balanced, &inst).unwrap());

        let (stacked, inst2) = schedule_from(2, &[(1, 2, 0), (2, 2, 0), (3, 2, 0)]);
        assert!(!is_jump_optimal(&stacked, &inst2).unwrap());
        assert!(!is_lex_jump_optimal(&stacked, &inst2).unwrap());
    }

    #[test]
    fn jump_certifiers_agree_on_random_schedules() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let machines = rng.gen_range(1..=4);
            let n = rng.gen_range(0..=8);
            let mut inst = Instance::new(machines).unwrap();
            let mut s = Schedule::new(machines).unwrap();
            for id in 0..n {
                let j = job(id, rng.gen_range(1..=8));
                inst.push_job(j.clone()).unwrap();
                let machine = rng.gen_range(0..machines);
                s.assign(&j, machine).unwrap();
            }
            assert_eq!(
                is_jump_optimal(&s, &inst).unwrap(),
                is_lex_jump_optimal(&s, &inst).unwrap()
            );
        }
    }

    #[test]
    fn swap_optimal_rejects_stack_and_accepts_balance() {
        let (stacked, inst) = schedule_from(3, &[(1, 1, 0), (2, 1, 0), (3, 1, 0)]);
        assert!(!is_swap_optimal(&stacked, &inst).unwrap());

        let (balanced, inst2) =
            schedule_from(2, &[(1, 3, 0), (2, 3, 0), (3, 2, 1), (4, 2, 1), (5, 2, 1)]);
        assert!(is_swap_optimal(&balanced, &inst2).unwrap());
    }

    #[test]
    fn swap_beats_jump_on_trade() {
        // Loads (7, 5) with sizes {4, 3} vs {3, 2}: every job is at least
        // its machine's spare, so no single move helps, but trading the 3
        // against the 2 balances the loads at (6, 6).
        let (s, inst) = schedule_from(2, &[(1, 4, 0), (2, 3, 0), (3, 3, 1), (4, 2, 1)]);
        assert!(is_jump_optimal(&s, &inst).unwrap());
        assert!(!is_swap_optimal(&s, &inst).unwrap());
    }

    #[test]
    fn completion_restores_jump_optimality() {
        let (mut s, inst) =
            schedule_from(2, &[(1, 2, 0), (2, 2, 0), (3, 2, 0), (4, 2, 0), (5, 1, 1)]);
        let moves = jump_optimal_completion(&mut s, &inst).unwrap();
        assert!(moves > 0);
        assert!(is_jump_optimal(&s, &inst).unwrap());
    }

    #[test]
    fn small_arrival_does_not_migrate() {
        let mut session = JumpSession::new(2, rat(1, 2)).unwrap();
        for (id, size) in [(1u64, 8i64), (2, 8), (3, 1)] {
            session.insert(id, rat(size, 1)).unwrap();
        }
        let last = session.history().last().unwrap();
        assert!(last.moves.is_empty());
        assert_eq!(last.migration_factor(), rat(0, 1));
    }

    #[test]
    fn big_arrival_migrates_only_smaller_jobs() {
        let mut session = JumpSession::new(2, rat(1, 4)).unwrap();
        let sizes = [5i64, 4, 3, 7, 6, 2, 9, 8];
        for (k, size) in sizes.iter().enumerate() {
            let ledger = session.insert(k as u64, rat(*size, 1)).unwrap();
            for mv in &ledger.moves {
                assert!(mv.rounded < ledger.arrival_rounded);
            }
        }
        session.schedule().audit(session.instance()).unwrap();
    }

    #[test]
    fn seeded_session_accepts_override() {
        let seed = [(1u64, rat(4, 1), 0usize), (2, rat(4, 1), 1)];
        let mut session = JumpSession::with_seed(2, rat(1, 2), &seed).unwrap();
        session.set_ub_override(Some(rat(8, 1)));
        session.set_push_rule(PushRule::LargestSmallerOccupant);
        let ledger = session.insert(3, rat(4, 1)).unwrap();
        assert_eq!(ledger.ub, rat(8, 1));
    }

    #[test]
    fn relaxed_certificate_flags_big_job_mismatch() {
        let (s, inst) = schedule_from(2, &[(1, 8, 0), (2, 8, 1), (3, 1, 0)]);
        let (reference, _) = schedule_from(2, &[(1, 8, 0), (2, 8, 0), (3, 1, 1)]);
        let cert = check_relaxed(
            &s,
            &reference,
            &inst,
            &rat(1, 1),
            &rat(1, 1),
            &rat(1, 2),
            &rat(8, 1),
        )
        .unwrap();
        assert!(!cert.big_jobs_match);
        assert!(!cert.witnessed());
    }

    #[test]
    fn relaxed_certificate_allows_relabeling() {
        let (s, inst) = schedule_from(2, &[(1, 8, 1), (2, 8, 0), (3, 1, 1)]);
        let (reference, _) = schedule_from(2, &[(1, 8, 0), (2, 8, 1), (3, 1, 0)]);
        let cert = check_relaxed(
            &s,
            &reference,
            &inst,
            &rat(1, 1),
            &rat(1, 1),
            &rat(1, 2),
            &rat(8, 1),
        )
        .unwrap();
        assert!(cert.big_jobs_match);
        assert!(cert.spread_bounded);
        assert!(cert.witnessed());
    }

    #[test]
    fn relaxed_certificate_bounds_spread() {
        // Machine 0 carries a small job and sits far above machine 1.
        let (s, inst) = schedule_from(2, &[(1, 8, 0), (2, 1, 0), (3, 2, 1)]);
        let cert = check_relaxed(
            &s,
            &s.clone(),
            &inst,
            &rat(1, 1),
            &rat(1, 1),
            &rat(1, 2),
            &rat(4, 1),
        )
        .unwrap();
        assert!(cert.big_jobs_match);
        assert!(!cert.spread_bounded);
    }
}
