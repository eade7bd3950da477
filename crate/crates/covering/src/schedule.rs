//! Schedules and sorted load profiles.
//!
//! A schedule maps jobs to machines and maintains per-machine loads under
//! *rounded* sizes incrementally. Loads under exact sizes are recomputed on
//! demand. Machine symmetry ("up to relabeling") is always handled by
//! comparing sorted load profiles, never raw load vectors.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::job::{Instance, Job, JobId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    machines: usize,
    assignment: BTreeMap<JobId, usize>,
    machine_jobs: Vec<BTreeSet<JobId>>,
    loads: Vec<Rational>,
}

impl Schedule {
    pub fn new(machines: usize) -> Result<Schedule> {
        if machines == 0 {
            return Err(Error::BadParameter("need at least one machine".into()));
        }
        Ok(Schedule {
            machines,
            assignment: BTreeMap::new(),
            machine_jobs: vec![BTreeSet::new(); machines],
            loads: vec![Rational::zero(); machines],
        })
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    /// Number of assigned jobs.
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assign(&mut self, job: &Job, machine: usize) -> Result<()> {
        if machine >= self.machines {
            return Err(Error::MachineOutOfRange { machine, machines: self.machines });
        }
        if self.assignment.contains_key(&job.id()) {
            return Err(Error::DuplicateJob(job.id()));
        }
        self.assignment.insert(job.id(), machine);
        self.machine_jobs[machine].insert(job.id());
        self.loads[machine] += job.rounded_size();
        Ok(())
    }

    pub fn unassign(&mut self, job: &Job) -> Result<usize> {
        let machine = self.assignment.remove(&job.id()).ok_or(Error::UnknownJob(job.id()))?;
        self.machine_jobs[machine].remove(&job.id());
        self.loads[machine] -= job.rounded_size();
        Ok(machine)
    }

    pub fn machine_of(&self, id: JobId) -> Option<usize> {
        self.assignment.get(&id).copied()
    }

    /// Job ids on one machine, ascending.
    pub fn jobs_on(&self, machine: usize) -> impl Iterator<Item = JobId> + '_ {
        self.machine_jobs[machine].iter().copied()
    }

    pub fn assignment(&self) -> &BTreeMap<JobId, usize> {
        &self.assignment
    }

    /// Load under rounded sizes.
    pub fn load(&self, machine: usize) -> &Rational {
        &self.loads[machine]
    }

    pub fn loads(&self) -> &[Rational] {
        &self.loads
    }

    pub fn min_load(&self) -> &Rational {
        self.loads.iter().min().expect("at least one machine")
    }

    /// Lowest-index machine among the least loaded (under rounded sizes).
    pub fn least_loaded(&self) -> usize {
        let min = self.min_load().clone();
        self.loads.iter().position(|l| *l == min).expect("at least one machine")
    }

    pub fn profile(&self) -> LoadProfile {
        LoadProfile::from_unsorted(self.loads.clone())
    }

    /// Loads under exact (unrounded) sizes.
    pub fn loads_original(&self, inst: &Instance) -> Result<Vec<Rational>> {
        let mut loads = vec![Rational::zero(); self.machines];
        for (&id, &machine) in &self.assignment {
            loads[machine] += inst.job(id)?.size();
        }
        Ok(loads)
    }

    pub fn min_load_original(&self, inst: &Instance) -> Result<Rational> {
        Ok(self.loads_original(inst)?.into_iter().min().expect("at least one machine"))
    }

    /// Recomputes all loads from the assignment and checks them against the
    /// incrementally maintained ones. Also fails if the schedule references
    /// a job the instance does not contain.
    pub fn audit(&self, inst: &Instance) -> Result<()> {
        let mut loads = vec![Rational::zero(); self.machines];
        for (&id, &machine) in &self.assignment {
            loads[machine] += inst.job(id)?.rounded_size();
        }
        if loads != self.loads {
            return Err(Error::IntegrityCheck("stored loads diverge from assignment".into()));
        }
        for (machine, set) in self.machine_jobs.iter().enumerate() {
            for &id in set {
                if self.assignment.get(&id) != Some(&machine) {
                    return Err(Error::IntegrityCheck("machine index diverges".into()));
                }
            }
        }
        Ok(())
    }

    /// The sub-schedule containing exactly the jobs that satisfy `keep`,
    /// on the same machines.
    pub fn restricted<F>(&self, inst: &Instance, keep: F) -> Result<Schedule>
    where
        F: Fn(&Job) -> bool,
    {
        let mut sub = Schedule::new(self.machines)?;
        for (&id, &machine) in &self.assignment {
            let job = inst.job(id)?;
            if keep(job) {
                sub.assign(job, machine)?;
            }
        }
        Ok(sub)
    }
}

/// A non-decreasing vector of loads; the canonical machine-symmetric view
/// of a schedule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LoadProfile(Vec<Rational>);

impl LoadProfile {
    /// Wraps an already sorted vector; rejects unsorted input.
    pub fn new(values: Vec<Rational>) -> Result<LoadProfile> {
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::BadParameter("profile entries must be non-decreasing".into()));
        }
        Ok(LoadProfile(values))
    }

    pub fn from_unsorted(mut values: Vec<Rational>) -> LoadProfile {
        values.sort();
        LoadProfile(values)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coordinatewise `self[i] <= other[i]`. Errors on length mismatch.
    pub fn coordinatewise_le(&self, other: &LoadProfile) -> Result<bool> {
        if self.0.len() != other.0.len() {
            return Err(Error::LengthMismatch { left: self.0.len(), right: other.0.len() });
        }
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// Adds `delta` to entry `index` and re-sorts.
    pub fn adjust_entry(&self, index: usize, delta: &Rational) -> Result<LoadProfile> {
        if index >= self.0.len() {
            return Err(Error::IndexOutOfRange { index, len: self.0.len() });
        }
        let mut values = self.0.clone();
        values[index] += delta;
        Ok(LoadProfile::from_unsorted(values))
    }

    /// Removes entry `index`; the rest stays sorted.
    pub fn remove_entry(&self, index: usize) -> Result<LoadProfile> {
        if index >= self.0.len() {
            return Err(Error::IndexOutOfRange { index, len: self.0.len() });
        }
        let mut values = self.0.clone();
        values.remove(index);
        Ok(LoadProfile(values))
    }

    /// Number of positions where the profiles differ. Errors on length
    /// mismatch.
    pub fn hamming(&self, other: &LoadProfile) -> Result<usize> {
        if self.0.len() != other.0.len() {
            return Err(Error::LengthMismatch { left: self.0.len(), right: other.0.len() });
        }
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }
}
