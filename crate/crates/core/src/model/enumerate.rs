use super::{stage_schedules, Assortment, Instance};
use crate::error::{Error, Result};

/// Default cap on the number of schedule combinations an enumeration may visit.
pub const DEFAULT_ENUMERATION_CEILING: f64 = 2.0e7;

/// Streams every feasible assortment exactly once, starting with the empty
/// one. Products are the odometer digits (product 0 most significant), each
/// digit ranging over [`stage_schedules`].
#[derive(Debug)]
pub struct FeasibleAssortments<'a> {
    inst: &'a Instance,
    schedules: Vec<Vec<usize>>,
    digits: Vec<usize>,
    load: Vec<usize>,
    started: bool,
    done: bool,
}

pub fn enumerate_feasible(inst: &Instance) -> Result<FeasibleAssortments<'_>> {
    enumerate_feasible_with_ceiling(inst, DEFAULT_ENUMERATION_CEILING)
}

/// Refuses when the schedule-combination count `S^n` exceeds `ceiling`.
pub fn enumerate_feasible_with_ceiling(inst: &Instance, ceiling: f64) -> Result<FeasibleAssortments<'_>> {
    let schedules = stage_schedules(inst.m(), inst.w());
    let estimate = (schedules.len() as f64).powi(inst.n() as i32);
    if estimate > ceiling {
        return Err(Error::EnumerationCeiling { estimate, ceiling });
    }
    Ok(FeasibleAssortments {
        inst,
        schedules,
        digits: vec![0; inst.n()],
        load: vec![0; inst.m()],
        started: false,
        done: false,
    })
}

impl FeasibleAssortments<'_> {
    fn fits(&self, s: usize) -> bool {
        self.schedules[s].iter().all(|&z| self.load[z] < self.inst.d())
    }

    fn apply(&mut self, s: usize, delta: isize) {
        for &z in &self.schedules[s] {
            self.load[z] = (self.load[z] as isize + delta) as usize;
        }
    }

    fn current(&self) -> Assortment {
        let chosen: Vec<Vec<usize>> = self.digits.iter().map(|&s| self.schedules[s].clone()).collect();
        Assortment::from_schedules(self.inst.n(), self.inst.w(), self.inst.m(), &chosen)
            .expect("schedules stay inside the tensor")
    }
}

impl Iterator for FeasibleAssortments<'_> {
    type Item = Assortment;

    fn next(&mut self) -> Option<Assortment> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current());
        }
        let mut p = self.digits.len();
        loop {
            if p == 0 {
                self.done = true;
                return None;
            }
            p -= 1;
            let old = self.digits[p];
            self.apply(old, -1);
            let mut s = old + 1;
            while s < self.schedules.len() && !self.fits(s) {
                s += 1;
            }
            if s < self.schedules.len() {
                self.digits[p] = s;
                self.apply(s, 1);
                return Some(self.current());
            }
            // carry: digit p falls back to the empty schedule
            self.digits[p] = 0;
        }
    }
}
