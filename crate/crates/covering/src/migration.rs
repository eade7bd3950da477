//! Migration accounting shared by the online algorithms.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::job::{Instance, JobId};
use crate::online_lpt::PhaseTrace;
use crate::rational::Rational;
use crate::schedule::Schedule;

/// One job that changed machines during an arrival.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MigrationRecord {
    pub job: JobId,
    pub from: usize,
    pub to: usize,
    pub rounded: Rational,
    pub original: Rational,
}

/// Everything one arrival did: the migrated volume, the resulting minimum
/// load and the upper bound estimate in effect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MigrationLedger {
    pub arrival: JobId,
    pub arrival_size: Rational,
    pub arrival_rounded: Rational,
    pub moves: Vec<MigrationRecord>,
    pub migrated_rounded: Rational,
    pub migrated_original: Rational,
    /// Minimum rounded load after the arrival was placed.
    pub min_load: Rational,
    pub ub: Rational,
    /// Phase bookkeeping; only the phased online LPT algorithm fills this.
    pub phases: Option<PhaseTrace>,
}

impl MigrationLedger {
    /// Migrated original volume relative to the arrival's original size.
    pub fn migration_factor(&self) -> Rational {
        &self.migrated_original / &self.arrival_size
    }

    /// Builds a ledger by comparing the schedule before and after an
    /// arrival. Every job of `before` must still be assigned in `after`.
    pub fn from_diff(
        before: &Schedule,
        after: &Schedule,
        inst: &Instance,
        arrival: JobId,
        ub: Rational,
        phases: Option<PhaseTrace>,
    ) -> Result<MigrationLedger> {
        let arrival_job = inst.job(arrival)?;
        let mut moves = Vec::new();
        let mut migrated_rounded = Rational::zero();
        let mut migrated_original = Rational::zero();
        for (&id, &from) in before.assignment() {
            let to = after
                .machine_of(id)
                .ok_or_else(|| Error::IntegrityCheck(format!("job {} dropped", id)))?;
            if to != from {
                let job = inst.job(id)?;
                migrated_rounded += job.rounded_size();
                migrated_original += job.size();
                moves.push(MigrationRecord {
                    job: id,
                    from,
                    to,
                    rounded: job.rounded_size().clone(),
                    original: job.size().clone(),
                });
            }
        }
        Ok(MigrationLedger {
            arrival,
            arrival_size: arrival_job.size().clone(),
            arrival_rounded: arrival_job.rounded_size().clone(),
            moves,
            migrated_rounded,
            migrated_original,
            min_load: after.min_load().clone(),
            ub,
            phases,
        })
    }
}
