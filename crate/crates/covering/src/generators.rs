//! Instance families behind the lower-bound and tightness experiments, plus
//! deterministic pseudo-random streams. Every family self-audits its sizes,
//! counts and machine loads in exact arithmetic before returning.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::job::{Instance, Job, JobId};
use crate::jump::PushRule;
use crate::rational::{check_epsilon, format_rational, pow2, rat, Rational};
use crate::schedule::Schedule;

/// A replayable arrival stream: an optional pre-placed prefix, the ordered
/// arrivals, and the knobs the replay should run with.
#[derive(Debug, Clone)]
pub struct StreamSpec {
    pub name: String,
    pub machines: usize,
    /// Jobs already in place before the first arrival: `(id, size, machine)`.
    pub prefix: Vec<(JobId, Rational, usize)>,
    /// Arrivals in order.
    pub arrivals: Vec<(JobId, Rational)>,
    /// Tie-break rule for the jump algorithm's push targets.
    pub push_rule: PushRule,
    /// Fixed upper-bound estimate; `None` recomputes it per arrival.
    pub ub_override: Option<Rational>,
}

impl StreamSpec {
    /// All jobs of the stream (prefix and arrivals) as an instance, sizes
    /// kept unrounded.
    pub fn instance(&self) -> Result<Instance> {
        let mut inst = Instance::new(self.machines)?;
        for (id, size, _) in &self.prefix {
            inst.push_job(Job::unrounded(*id, size.clone())?)?;
        }
        for (id, size) in &self.arrivals {
            inst.push_job(Job::unrounded(*id, size.clone())?)?;
        }
        Ok(inst)
    }
}

/// Stream on which rebuilding a longest-processing-time schedule from
/// scratch after the last arrival must migrate at least the `2k+1` smallest
/// jobs: `k+1` unit jobs, pairs `1/2 + iε` and `1/2 − (i+1)ε`, `k` filler
/// jobs of `1/2 − kε`, then one arrival of `1/2 + kε` on `2k+1` machines.
pub fn lpt_rebuild_lb(k: usize, eps: &Rational) -> Result<StreamSpec> {
    if k < 2 {
        return Err(Error::BadParameter("rebuild family needs k at least 2".into()));
    }
    let bound = rat(1, 6 * k as i64);
    if !(eps > &Rational::zero() && eps <= &bound) {
        return Err(Error::BadParameter(format!(
            "rebuild family needs 0 < eps <= 1/{}",
            6 * k
        )));
    }
    let half = rat(1, 2);
    let mut sizes: Vec<Rational> = Vec::with_capacity(4 * k + 1);
    for _ in 0..=k {
        sizes.push(Rational::one());
    }
    for i in 0..k {
        sizes.push(&half + rat(i as i64, 1) * eps);
        sizes.push(&half - rat(i as i64 + 1, 1) * eps);
    }
    for _ in 0..k {
        sizes.push(&half - rat(k as i64, 1) * eps);
    }
    sizes.sort_by(|a, b| b.cmp(a));
    let mut arrivals: Vec<(JobId, Rational)> =
        sizes.into_iter().enumerate().map(|(i, s)| (i as u64, s)).collect();
    arrivals.push((4 * k as u64 + 1, &half + rat(k as i64, 1) * eps));
    Ok(StreamSpec {
        name: format!("lpt-rebuild-lb:k={},eps={}", k, format_rational(eps)),
        machines: 2 * k + 1,
        prefix: Vec::new(),
        arrivals,
        push_rule: PushRule::LowestIndex,
        ub_override: None,
    })
}

/// Stream whose single arrival of size `2^u` triggers a long expulsion
/// cascade in the push insertion. One pre-filled machine per ladder value
/// `t = 2^j + cε2^j < 2^u`, each completed to load exactly `2^{u+1}` by a
/// complement job, a second `2^j`, and one power `2^{j'}` per octave above
/// `j+1`. Requires `ε = 1/2^s` with `s ≥ 2` so the ladder spans at least one
/// full octave below `2^u`. Ships with the adversarial push tie-break and a
/// fixed upper bound of `2^{u+1}`.
pub fn jump_cascade_lb(u: i64, eps: &Rational) -> Result<StreamSpec> {
    check_epsilon(eps)?;
    let q = eps
        .denom()
        .to_u32()
        .ok_or_else(|| Error::BadParameter("eps denominator too large".into()))?;
    if !q.is_power_of_two() || q < 4 {
        return Err(Error::BadParameter(
            "cascade family needs eps = 1/2^s with s >= 2".into(),
        ));
    }
    let s = q.trailing_zeros() as i64;
    let ell = u + 1 - s;
    let target = pow2(u + 1);
    let mut prefix: Vec<(JobId, Rational, usize)> = Vec::new();
    let mut id: JobId = 0;
    let mut machine = 0usize;
    for j in (ell..u).rev() {
        let octave = pow2(j);
        let grid = eps * &octave;
        for c in (0..q as i64).rev() {
            let t = &octave + rat(c, 1) * &grid;
            let complement = pow2(j + 1) - rat(c, 1) * &grid;
            let mut jobs = vec![t, complement, octave.clone()];
            for above in (j + 2)..=u {
                jobs.push(pow2(above));
            }
            let load: Rational = jobs.iter().fold(Rational::zero(), |acc, p| acc + p);
            if load != target {
                return Err(Error::IntegrityCheck(format!(
                    "cascade machine {} has load {}, wanted {}",
                    machine,
                    format_rational(&load),
                    format_rational(&target)
                )));
            }
            for size in jobs {
                prefix.push((id, size, machine));
                id += 1;
            }
            machine += 1;
        }
    }
    let arrivals = vec![(id, pow2(u))];
    Ok(StreamSpec {
        name: format!("jump-cascade-lb:u={},eps=1/{}", u, q),
        machines: machine,
        prefix,
        arrivals,
        push_rule: PushRule::LargestSmallerOccupant,
        ub_override: Some(target),
    })
}

/// The flood family: a six-job base whose optimum is 5, followed by a wave
/// of equal small jobs of total mass 22/17, each smaller than 1/C. Keeping
/// the base placement frozen caps the reachable minimum load at 96/17 while
/// the new optimum is 6.
#[derive(Debug, Clone)]
pub struct SmallFloodFamily {
    /// Base jobs then quanta, largest first.
    pub spec: StreamSpec,
    /// The six base jobs on three machines.
    pub base: Instance,
    /// An optimal placement of the base, loads (114/17, 5, 5).
    pub frozen: Schedule,
    pub quantum: Rational,
    pub quanta: usize,
    pub small_total: Rational,
}

pub fn small_flood_lb(c: &Rational) -> Result<SmallFloodFamily> {
    if c < &Rational::one() {
        return Err(Error::BadParameter("flood family needs C >= 1".into()));
    }
    let small_total = rat(22, 17);
    // Splitting the mass into an even number of quanta lets the frozen-base
    // optimum spread it exactly evenly over the two low machines; the count
    // is the smallest even integer keeping each quantum below 1/C.
    let halves = crate::rational::floor(&(rat(11, 17) * c)) + BigInt::one();
    let halves = halves
        .to_usize()
        .ok_or_else(|| Error::BadParameter("C too large".into()))?;
    let quanta = 2 * halves;
    let quantum = &small_total / rat(quanta as i64, 1);
    if &(Rational::one() / c) <= &quantum {
        return Err(Error::IntegrityCheck("flood quantum not below 1/C".into()));
    }
    if quantum.clone() * rat(quanta as i64, 1) != small_total {
        return Err(Error::IntegrityCheck("flood quanta do not sum to 22/17".into()));
    }

    let base_sizes = [rat(80, 17), rat(3, 1), rat(3, 1), rat(2, 1), rat(2, 1), rat(2, 1)];
    let mut base = Instance::new(3)?;
    for (i, size) in base_sizes.iter().enumerate() {
        base.push_job(Job::unrounded(i as u64, size.clone())?)?;
    }
    // 80/17 + 2 on one machine, 3 + 2 on each of the other two.
    let mut frozen = Schedule::new(3)?;
    frozen.assign(base.job(0)?, 0)?;
    frozen.assign(base.job(3)?, 0)?;
    frozen.assign(base.job(1)?, 1)?;
    frozen.assign(base.job(4)?, 1)?;
    frozen.assign(base.job(2)?, 2)?;
    frozen.assign(base.job(5)?, 2)?;
    frozen.audit(&base)?;
    if *frozen.load(0) != rat(114, 17) || *frozen.load(1) != rat(5, 1) {
        return Err(Error::IntegrityCheck("flood base placement has wrong loads".into()));
    }

    let mut arrivals: Vec<(JobId, Rational)> =
        base_sizes.iter().enumerate().map(|(i, s)| (i as u64, s.clone())).collect();
    for k in 0..quanta {
        arrivals.push((6 + k as u64, quantum.clone()));
    }
    Ok(SmallFloodFamily {
        spec: StreamSpec {
            name: format!("small-flood-lb:c={}", format_rational(c)),
            machines: 3,
            prefix: Vec::new(),
            arrivals,
            push_rule: PushRule::LowestIndex,
            ub_override: None,
        },
        base,
        frozen,
        quantum,
        quanta,
        small_total,
    })
}

/// The family separating swap-optimal solutions from the optimum: five job
/// types sized around 1, 1/2 and 1/5, a swap-optimal schedule whose unique
/// least loaded machine carries only the tiniest jobs, and a witness
/// schedule proving the optimum is almost 1.7 times higher.
#[derive(Debug, Clone)]
pub struct SwapGapFamily {
    pub instance: Instance,
    /// The swap-optimal schedule under scrutiny.
    pub swap: Schedule,
    /// Feasible schedule with minimum load exactly `1.7 − δ`.
    pub witness: Schedule,
    pub delta: Rational,
    pub machines: usize,
    /// Size of the tiniest jobs, `1/(6m − 1)`; the swap schedule's minimum
    /// load is `1 +` this.
    pub smallest: Rational,
}

/// One contiguous id range of identically sized jobs, consumed cursor-style
/// while building a schedule.
#[derive(Debug, Clone)]
struct JobPool {
    next: JobId,
    end: JobId,
    size: Rational,
}

impl JobPool {
    fn take(&mut self) -> Result<JobId> {
        if self.next == self.end {
            return Err(Error::IntegrityCheck("job pool exhausted".into()));
        }
        let id = self.next;
        self.next += 1;
        Ok(id)
    }

    fn drained(&self) -> bool {
        self.next == self.end
    }
}

struct SwapPools {
    ones: JobPool,
    a: Vec<JobPool>,
    b: Vec<JobPool>,
    c: Vec<JobPool>,
    d: Vec<JobPool>,
}

impl SwapPools {
    fn all(&self) -> Vec<&JobPool> {
        let mut out = vec![&self.ones];
        out.extend(self.a.iter());
        out.extend(self.b.iter());
        out.extend(self.c.iter());
        out.extend(self.d.iter());
        out
    }
}

pub fn swap_gap_family(k: usize) -> Result<SwapGapFamily> {
    if k < 2 {
        return Err(Error::BadParameter("swap family needs k at least 2".into()));
    }
    let ten_k = 10usize
        .checked_pow(k as u32)
        .ok_or_else(|| Error::BadParameter("swap family k too large".into()))?;
    let machines = 2 * (ten_k - 1);

    // n_0 = 0, n_i = 4 n_{i-1} + 2.
    let mut n = vec![0i64; k + 1];
    for i in 1..=k {
        n[i] = 4 * n[i - 1] + 2;
    }
    let delta = rat(1, 30 * n[k]);
    let half = rat(1, 2);
    let fifth = rat(1, 5);
    let smallest = rat(1, 6 * machines as i64 - 1);

    let a: Vec<Rational> = (1..=k).map(|i| &half + rat(n[i] - 1, 1) * &delta).collect();
    let b: Vec<Rational> = (1..=k).map(|i| &half - rat(n[i] - 1, 1) * &delta).collect();
    let c: Vec<Rational> = (1..=k).map(|i| &fifth + rat(4 * n[i - 1], 1) * &delta).collect();
    let mut d: Vec<Rational> = (1..k).map(|i| &fifth - rat(n[i], 1) * &delta).collect();
    d.push(smallest.clone());

    let pow10 = |e: usize| 10usize.pow(e as u32);
    let mut cursor: JobId = 0;
    let mut add_pool = |count: usize, size: &Rational| {
        let pool = JobPool { next: cursor, end: cursor + count as u64, size: size.clone() };
        cursor += count as u64;
        pool
    };
    let ones_pool = add_pool(machines, &Rational::one());
    let mut a_pools = Vec::with_capacity(k);
    let mut b_pools = Vec::with_capacity(k);
    let mut c_pools = Vec::with_capacity(k);
    let mut d_pools = Vec::with_capacity(k);
    for i in 1..=k {
        a_pools.push(add_pool(6 * pow10(k - i), &a[i - 1]));
    }
    for i in 1..=k {
        b_pools.push(add_pool(12 * pow10(k - i), &b[i - 1]));
    }
    for i in 1..=k {
        c_pools.push(add_pool(12 * pow10(k - i), &c[i - 1]));
    }
    for i in 1..k {
        d_pools.push(add_pool(6 * pow10(k - i), &d[i - 1]));
    }
    d_pools.push(add_pool(6 * machines, &smallest));
    let pools = SwapPools { ones: ones_pool, a: a_pools, b: b_pools, c: c_pools, d: d_pools };

    let mut instance = Instance::new(machines)?;
    for pool in pools.all() {
        for id in pool.next..pool.end {
            instance.push_job(Job::unrounded(id, pool.size.clone())?)?;
        }
    }

    let assign_from = |s: &mut Schedule,
                       inst: &Instance,
                       pool: &mut JobPool,
                       machine: usize,
                       count: usize|
     -> Result<()> {
        for _ in 0..count {
            s.assign(inst.job(pool.take()?)?, machine)?;
        }
        Ok(())
    };

    // The swap-optimal schedule: paired unit jobs; one a with two b per
    // machine; six c_1 per machine; one c_{i+1} with five d_i per machine;
    // every tiniest job together on one final machine.
    let mut swap = Schedule::new(machines)?;
    {
        let mut pools = SwapPools {
            ones: pools.ones.clone(),
            a: pools.a.clone(),
            b: pools.b.clone(),
            c: pools.c.clone(),
            d: pools.d.clone(),
        };
        let mut machine = 0usize;
        for _ in 0..machines / 2 {
            assign_from(&mut swap, &instance, &mut pools.ones, machine, 2)?;
            machine += 1;
        }
        for i in 1..=k {
            for _ in 0..6 * pow10(k - i) {
                assign_from(&mut swap, &instance, &mut pools.a[i - 1], machine, 1)?;
                assign_from(&mut swap, &instance, &mut pools.b[i - 1], machine, 2)?;
                machine += 1;
            }
        }
        for _ in 0..2 * pow10(k - 1) {
            assign_from(&mut swap, &instance, &mut pools.c[0], machine, 6)?;
            machine += 1;
        }
        for i in 1..k {
            for _ in 0..12 * pow10(k - i - 1) {
                assign_from(&mut swap, &instance, &mut pools.c[i], machine, 1)?;
                assign_from(&mut swap, &instance, &mut pools.d[i - 1], machine, 5)?;
                machine += 1;
            }
        }
        assign_from(&mut swap, &instance, &mut pools.d[k - 1], machine, 6 * machines)?;
        machine += 1;
        if machine != machines || pools.all().iter().any(|p| !p.drained()) {
            return Err(Error::IntegrityCheck(
                "swap schedule does not consume machines and jobs exactly".into(),
            ));
        }
    }
    swap.audit(&instance)?;
    if swap.min_load() != &(Rational::one() + &smallest) {
        return Err(Error::IntegrityCheck("swap schedule minimum load is off".into()));
    }

    // The witness: a unit job everywhere, topped with a_i + d_i, or
    // b_i + c_i, or a_k plus all the tiniest jobs six ways. Its minimum
    // load is exactly 1.7 - delta.
    let mut witness = Schedule::new(machines)?;
    {
        let mut pools = SwapPools {
            ones: pools.ones.clone(),
            a: pools.a.clone(),
            b: pools.b.clone(),
            c: pools.c.clone(),
            d: pools.d.clone(),
        };
        let mut machine = 0usize;
        for i in 1..k {
            for _ in 0..6 * pow10(k - i) {
                assign_from(&mut witness, &instance, &mut pools.ones, machine, 1)?;
                assign_from(&mut witness, &instance, &mut pools.a[i - 1], machine, 1)?;
                assign_from(&mut witness, &instance, &mut pools.d[i - 1], machine, 1)?;
                machine += 1;
            }
        }
        for i in 1..=k {
            for _ in 0..12 * pow10(k - i) {
                assign_from(&mut witness, &instance, &mut pools.ones, machine, 1)?;
                assign_from(&mut witness, &instance, &mut pools.b[i - 1], machine, 1)?;
                assign_from(&mut witness, &instance, &mut pools.c[i - 1], machine, 1)?;
                machine += 1;
            }
        }
        for _ in 0..6 {
            assign_from(&mut witness, &instance, &mut pools.ones, machine, 1)?;
            assign_from(&mut witness, &instance, &mut pools.a[k - 1], machine, 1)?;
            assign_from(&mut witness, &instance, &mut pools.d[k - 1], machine, machines)?;
            machine += 1;
        }
        if machine != machines || pools.all().iter().any(|p| !p.drained()) {
            return Err(Error::IntegrityCheck(
                "witness schedule does not consume machines and jobs exactly".into(),
            ));
        }
    }
    witness.audit(&instance)?;
    let target = rat(17, 10) - &delta;
    if witness.min_load() != &target {
        return Err(Error::IntegrityCheck("witness minimum load is off".into()));
    }

    Ok(SwapGapFamily { instance, swap, witness, delta, machines, smallest })
}

/// Size distributions for [`random_stream`].
#[derive(Debug, Clone)]
pub enum SizeLaw {
    /// `quantum × {1..=steps}`, uniformly.
    UniformGrid { quantum: Rational, steps: u32 },
    /// Powers of two with geometrically decaying exponents up to `2^cap`.
    DyadicHeavyTail { cap: u32 },
    /// Mostly tiny multiples of the quantum, occasionally a job two orders
    /// of magnitude bigger.
    SmallFlood { quantum: Rational },
}

impl SizeLaw {
    /// Multiples of 1/8 up to 2, the workhorse law of the test suites.
    pub fn uniform_grid() -> SizeLaw {
        SizeLaw::UniformGrid { quantum: rat(1, 8), steps: 16 }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Rational {
        match self {
            SizeLaw::UniformGrid { quantum, steps } => {
                quantum * rat(rng.gen_range(1..=*steps) as i64, 1)
            }
            SizeLaw::DyadicHeavyTail { cap } => {
                let mut e = 0u32;
                while e < *cap && rng.gen_bool(0.5) {
                    e += 1;
                }
                pow2(e as i64)
            }
            SizeLaw::SmallFlood { quantum } => {
                let factor = if rng.gen_bool(0.125) {
                    rng.gen_range(64..=128)
                } else {
                    rng.gen_range(1..=4)
                };
                quantum * rat(factor, 1)
            }
        }
    }

    fn label(&self) -> &'static str {
        match self {
            SizeLaw::UniformGrid { .. } => "uniform-grid",
            SizeLaw::DyadicHeavyTail { .. } => "dyadic-heavy-tail",
            SizeLaw::SmallFlood { .. } => "small-flood",
        }
    }
}

/// Deterministic pseudo-random stream: same seed, same stream, always.
pub fn random_stream(seed: u64, n: usize, machines: usize, law: &SizeLaw) -> StreamSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrivals = (0..n).map(|i| (i as u64, law.draw(&mut rng))).collect();
    StreamSpec {
        name: format!("random:seed={},n={},m={},law={}", seed, n, machines, law.label()),
        machines,
        prefix: Vec::new(),
        arrivals,
        push_rule: PushRule::LowestIndex,
        ub_override: None,
    }
}
