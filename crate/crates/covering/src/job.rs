//! Jobs and instances.

use std::collections::HashMap;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};
use crate::rounding;

pub type JobId = u64;

/// A job with its exact size and the rounded size cached at admission.
///
/// The rounded size depends only on the size and the accuracy parameter,
/// never on the current upper bound estimate, so it is computed once when
/// the job enters the system and stays fixed for the job's lifetime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    id: JobId,
    size: Rational,
    rounded: Rational,
}

impl Job {
    /// Admits a job, rounding its size down to the accuracy grid.
    pub fn new(id: JobId, size: Rational, epsilon: &Rational) -> Result<Job> {
        let rounded = rounding::round_size(&size, epsilon)?;
        Ok(Job { id, size, rounded })
    }

    /// A job whose rounded size equals its exact size. Used by certifier-only
    /// constructions that are stated without any rounding.
    pub fn unrounded(id: JobId, size: Rational) -> Result<Job> {
        if !size.is_positive() {
            return Err(Error::NonPositiveSize(format_rational(&size)));
        }
        Ok(Job { rounded: size.clone(), id, size })
    }

    pub fn id(&self) -> JobId {
        self.id
    }

    pub fn size(&self) -> &Rational {
        &self.size
    }

    pub fn rounded_size(&self) -> &Rational {
        &self.rounded
    }
}

/// A set of jobs with distinct ids plus a machine count.
#[derive(Debug, Clone)]
pub struct Instance {
    machines: usize,
    jobs: Vec<Job>,
    index: HashMap<JobId, usize>,
}

impl Instance {
    pub fn new(machines: usize) -> Result<Instance> {
        if machines == 0 {
            return Err(Error::BadParameter("need at least one machine".into()));
        }
        Ok(Instance { machines, jobs: Vec::new(), index: HashMap::new() })
    }

    pub fn from_jobs(machines: usize, jobs: Vec<Job>) -> Result<Instance> {
        let mut inst = Instance::new(machines)?;
        for job in jobs {
            inst.push_job(job)?;
        }
        Ok(inst)
    }

    pub fn push_job(&mut self, job: Job) -> Result<()> {
        if self.index.contains_key(&job.id) {
            return Err(Error::DuplicateJob(job.id));
        }
        self.index.insert(job.id, self.jobs.len());
        self.jobs.push(job);
        Ok(())
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> Result<&Job> {
        self.index.get(&id).map(|&i| &self.jobs[i]).ok_or(Error::UnknownJob(id))
    }

    pub fn contains(&self, id: JobId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn admission_rounds_once() {
        let j = Job::new(0, rat(11, 1), &rat(1, 4)).unwrap();
        assert_eq!(*j.size(), rat(11, 1));
        assert_eq!(*j.rounded_size(), rat(10, 1));
    }

    #[test]
    fn rejects_non_positive_sizes() {
        assert!(Job::new(0, rat(0, 1), &rat(1, 2)).is_err());
        assert!(Job::new(0, rat(-3, 1), &rat(1, 2)).is_err());
        assert!(Job::unrounded(0, rat(0, 1)).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut inst = Instance::new(2).unwrap();
        inst.push_job(Job::unrounded(7, rat(1, 1)).unwrap()).unwrap();
        let err = inst.push_job(Job::unrounded(7, rat(2, 1)).unwrap());
        assert_eq!(err, Err(Error::DuplicateJob(7)));
    }

    #[test]
    fn zero_machines_rejected() {
        assert!(Instance::new(0).is_err());
    }
}
