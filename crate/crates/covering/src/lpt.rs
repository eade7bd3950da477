//! Longest-processing-time list scheduling and its certifier.
//!
//! `lpt_schedule` processes jobs in non-increasing rounded size and puts
//! each on a least loaded machine. Different tie-breaks yield different
//! assignments but always the same load profile, and the certifier
//! [`is_lpt_solution`] recognizes exactly the schedules *some* tie-break
//! could have produced: per size class, the number of class jobs a machine
//! receives is forced up to the usual "one more on a tie" slack.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::job::{Instance, Job};
use crate::rational::{is_integer, Rational};
use crate::schedule::Schedule;

/// How to choose among least loaded machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TieBreak {
    /// Lowest machine index.
    LowestIndex,
    /// Prefer machines in the set (lowest index within it), falling back to
    /// the lowest index overall.
    PreferSet(BTreeSet<usize>),
}

/// Least loaded machine under the tie-break rule.
pub fn pick_machine(s: &Schedule, tie_break: &TieBreak) -> usize {
    let min = s.min_load().clone();
    let ties = (0..s.machines()).filter(|&i| *s.load(i) == min);
    match tie_break {
        TieBreak::LowestIndex => ties.min().expect("at least one machine"),
        TieBreak::PreferSet(set) => {
            let mut fallback = None;
            for i in ties {
                if set.contains(&i) {
                    return i;
                }
                fallback.get_or_insert(i);
            }
            fallback.expect("at least one machine")
        }
    }
}

/// Assigns `jobs` in the given order, each to a least loaded machine.
pub fn list_schedule<'a, I>(s: &mut Schedule, jobs: I, tie_break: &TieBreak) -> Result<()>
where
    I: IntoIterator<Item = &'a Job>,
{
    for job in jobs {
        let machine = pick_machine(s, tie_break);
        s.assign(job, machine)?;
    }
    Ok(())
}

/// Jobs in LPT order: rounded size non-increasing, ids ascending on ties.
pub fn lpt_order(inst: &Instance) -> Vec<&Job> {
    let mut jobs: Vec<&Job> = inst.jobs().iter().collect();
    jobs.sort_by(|a, b| {
        b.rounded_size().cmp(a.rounded_size()).then(a.id().cmp(&b.id()))
    });
    jobs
}

/// A fresh LPT run over the whole instance.
pub fn lpt_schedule(inst: &Instance, tie_break: &TieBreak) -> Result<Schedule> {
    let mut s = Schedule::new(inst.machines())?;
    list_schedule(&mut s, lpt_order(inst), tie_break)?;
    Ok(s)
}

/// Whether `s` could have been produced by an LPT run over `inst` under
/// some tie-breaking.
///
/// Size classes are replayed in descending order. For each class, a
/// reference list-scheduling of the class on top of `s` restricted to the
/// larger sizes yields the class's watermark `lambda` (tie-break
/// independent); machine `i` must then hold exactly
/// `ceil((lambda - load_i)+ / p)` class jobs, with one extra allowed when
/// the quotient is integral.
pub fn is_lpt_solution(s: &Schedule, inst: &Instance) -> Result<bool> {
    if s.len() != inst.len() {
        return Err(Error::IntegrityCheck(format!(
            "schedule has {} jobs, instance {}",
            s.len(),
            inst.len()
        )));
    }
    for job in inst.jobs() {
        if s.machine_of(job.id()).is_none() {
            return Err(Error::UnknownJob(job.id()));
        }
    }

    let order = lpt_order(inst);
    let mut base = Schedule::new(s.machines())?;
    let mut idx = 0;
    while idx < order.len() {
        let size = order[idx].rounded_size().clone();
        let mut class = Vec::new();
        while idx < order.len() && *order[idx].rounded_size() == size {
            class.push(order[idx]);
            idx += 1;
        }

        let lambda = class_watermark(base.loads(), &size, class.len());
        for machine in 0..s.machines() {
            let have = class.iter().filter(|j| s.machine_of(j.id()) == Some(machine)).count();
            let needed = &lambda - base.load(machine);
            let quota = if needed.is_zero() || needed < Rational::zero() {
                Rational::zero()
            } else {
                needed / &size
            };
            let ok = if is_integer(&quota) {
                let q = quota.to_integer();
                let have = num_bigint::BigInt::from(have);
                have == q || have == q + 1
            } else {
                let q = quota.numer().div_ceil(quota.denom());
                num_bigint::BigInt::from(have) == q
            };
            if !ok {
                return Ok(false);
            }
        }

        for job in class {
            base.assign(job, s.machine_of(job.id()).expect("checked above"))?;
        }
    }
    Ok(true)
}

/// Minimum load after list-scheduling `count` jobs of one size on top of
/// the given loads; independent of tie-breaking.
fn class_watermark(loads: &[Rational], size: &Rational, count: usize) -> Rational {
    let mut heap: BinaryHeap<Reverse<Rational>> =
        loads.iter().cloned().map(Reverse).collect();
    for _ in 0..count {
        let Reverse(least) = heap.pop().expect("at least one machine");
        heap.push(Reverse(least + size));
    }
    let Reverse(min) = heap.pop().expect("at least one machine");
    min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn instance(machines: usize, sizes: &[i64]) -> Instance {
        let eps = rat(1, 2);
        let jobs = sizes
            .iter()
            .enumerate()
            .map(|(i, &s)| Job::new(i as u64, rat(s, 1), &eps).unwrap())
            .collect();
        Instance::from_jobs(machines, jobs).unwrap()
    }

    #[test]
    fn lpt_profile() {
        let inst = instance(2, &[3, 3, 2, 2, 2]);
        let s = lpt_schedule(&inst, &TieBreak::LowestIndex).unwrap();
        assert_eq!(
            s.profile().values(),
            &[rat(5, 1), rat(7, 1)],
        );
    }

    #[test]
    fn tie_breaks_share_profile() {
        let inst = instance(3, &[4, 4, 3, 2, 2, 1, 1]);
        let a = lpt_schedule(&inst, &TieBreak::LowestIndex).unwrap();
        for set in [[1usize].as_slice(), &[2], &[1, 2], &[0, 2]] {
            let tb = TieBreak::PreferSet(set.iter().copied().collect());
            let b = lpt_schedule(&inst, &tb).unwrap();
            assert_eq!(a.profile(), b.profile());
        }
    }

    #[test]
    fn prefer_set_wins_ties() {
        let mut s = Schedule::new(3).unwrap();
        // All empty: LowestIndex picks 0, PreferSet{2} picks 2.
        assert_eq!(pick_machine(&s, &TieBreak::LowestIndex), 0);
        let tb = TieBreak::PreferSet([2usize].into_iter().collect());
        assert_eq!(pick_machine(&s, &tb), 2);
        // Set members that are not least loaded are ignored.
        s.assign(&Job::unrounded(0, rat(1, 1)).unwrap(), 2).unwrap();
        assert_eq!(pick_machine(&s, &tb), 0);
    }

    #[test]
    fn certifier_accepts_every_tie_break() {
        let inst = instance(3, &[5, 4, 4, 3, 2, 2, 1]);
        for set in [[0usize].as_slice(), &[1], &[2], &[1, 2]] {
            let tb = TieBreak::PreferSet(set.iter().copied().collect());
            let s = lpt_schedule(&inst, &tb).unwrap();
            assert!(is_lpt_solution(&s, &inst).unwrap());
        }
    }

    #[test]
    fn certifier_rejects_stacked_pair() {
        let inst = instance(2, &[3, 3, 2, 2, 2]);
        let mut s = Schedule::new(2).unwrap();
        let jobs = inst.jobs();
        // Both 3s on machine 0: no list-scheduling run does that.
        s.assign(&jobs[0], 0).unwrap();
        s.assign(&jobs[1], 0).unwrap();
        s.assign(&jobs[2], 1).unwrap();
        s.assign(&jobs[3], 1).unwrap();
        s.assign(&jobs[4], 1).unwrap();
        assert!(!is_lpt_solution(&s, &inst).unwrap());
    }

    #[test]
    fn certifier_wants_full_assignment() {
        let inst = instance(2, &[2, 1]);
        let s = Schedule::new(2).unwrap();
        assert!(is_lpt_solution(&s, &inst).is_err());
    }
}
