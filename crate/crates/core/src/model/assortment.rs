use std::fmt;

use super::Instance;
use crate::error::{Error, Result};

/// One displayed exposure: exposure `exposure` of product `product` shown in
/// stage `stage`. All indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Placement {
    pub product: usize,
    pub exposure: usize,
    pub stage: usize,
}

/// Binary tensor `x[i][k][z]` over products, exposures and stages.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assortment {
    n: usize,
    w: usize,
    m: usize,
    x: Vec<bool>,
}

impl Assortment {
    pub fn empty(n: usize, w: usize, m: usize) -> Self {
        Assortment { n, w, m, x: vec![false; n * w * m] }
    }

    pub fn empty_for(inst: &Instance) -> Self {
        Assortment::empty(inst.n(), inst.w(), inst.m())
    }

    /// `(n, w, m)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n, self.w, self.m)
    }

    #[inline]
    fn index(&self, i: usize, k: usize, z: usize) -> usize {
        (i * self.w + k) * self.m + z
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize, z: usize) -> bool {
        self.x[self.index(i, k, z)]
    }

    pub fn set(&mut self, i: usize, k: usize, z: usize, value: bool) {
        let idx = self.index(i, k, z);
        self.x[idx] = value;
    }

    pub fn from_placements(n: usize, w: usize, m: usize, placements: &[Placement]) -> Result<Self> {
        let mut a = Assortment::empty(n, w, m);
        for p in placements {
            if p.product >= n || p.exposure >= w || p.stage >= m {
                return Err(Error::Shape(format!(
                    "placement (product {}, exposure {}, stage {}) outside tensor {n}x{w}x{m}",
                    p.product + 1,
                    p.exposure + 1,
                    p.stage + 1
                )));
            }
            a.set(p.product, p.exposure, p.stage, true);
        }
        Ok(a)
    }

    /// Builds the assortment in which product `i` is shown in the stages
    /// `schedules[i]` (ascending), exposure `k` going to the `k`-th stage.
    pub fn from_schedules(n: usize, w: usize, m: usize, schedules: &[Vec<usize>]) -> Result<Self> {
        let placements: Vec<Placement> = schedules
            .iter()
            .enumerate()
            .flat_map(|(product, stages)| {
                stages
                    .iter()
                    .enumerate()
                    .map(move |(exposure, &stage)| Placement { product, exposure, stage })
            })
            .collect();
        Assortment::from_placements(n, w, m, &placements)
    }

    /// All placements, sorted by (product, exposure, stage).
    pub fn placements(&self) -> Vec<Placement> {
        let mut out = Vec::new();
        for product in 0..self.n {
            for exposure in 0..self.w {
                for stage in 0..self.m {
                    if self.get(product, exposure, stage) {
                        out.push(Placement { product, exposure, stage });
                    }
                }
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        !self.x.iter().any(|&b| b)
    }

    /// Number of exposures displayed in stage `z`.
    pub fn stage_load(&self, z: usize) -> usize {
        (0..self.n)
            .map(|i| (0..self.w).filter(|&k| self.get(i, k, z)).count())
            .sum()
    }

    /// Copy with every placement in stages after `last_stage` removed.
    pub fn truncated_after(&self, last_stage: usize) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in 0..self.w {
                for z in (last_stage + 1)..self.m {
                    out.set(i, k, z, false);
                }
            }
        }
        out
    }

    /// Copy with empty stages squeezed out: nonempty stages keep their order
    /// and move to the front. Revenue, `g` and every cost prefix are unchanged.
    pub fn compacted(&self) -> Self {
        let mut out = Assortment::empty(self.n, self.w, self.m);
        let mut next = 0;
        for z in 0..self.m {
            if self.stage_load(z) == 0 {
                continue;
            }
            for i in 0..self.n {
                for k in 0..self.w {
                    if self.get(i, k, z) {
                        out.set(i, k, next, true);
                    }
                }
            }
            next += 1;
        }
        out
    }

    /// True when no empty stage precedes a nonempty one.
    pub fn is_gap_free(&self) -> bool {
        self.last_nonempty_stage().is_none_or(|last| (0..last).all(|z| self.stage_load(z) > 0))
    }

    /// Index of the last stage holding a placement.
    pub fn last_nonempty_stage(&self) -> Option<usize> {
        (0..self.m).rev().find(|&z| self.stage_load(z) > 0)
    }
}

/// A broken feasibility condition. Display strings use 1-based indices to
/// match the document format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// More than one exposure of a product in the same stage.
    StageUniqueness { product: usize, stage: usize, count: usize },
    /// An exposure is shown without all earlier exposures shown, once each, in
    /// strictly earlier stages.
    PrefixCompleteness { product: usize, exposure: usize, stage: usize },
    Capacity { stage: usize, load: usize, capacity: usize },
    ExposureCap { product: usize, count: usize, cap: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::StageUniqueness { product, stage, count } => write!(
                f,
                "per-stage uniqueness: product {} has {count} exposures in stage {}",
                product + 1,
                stage + 1
            ),
            Violation::PrefixCompleteness { product, exposure, stage } => write!(
                f,
                "prefix-completeness: exposure {} of product {} in stage {} lacks its earlier exposures in earlier stages",
                exposure + 1,
                product + 1,
                stage + 1
            ),
            Violation::Capacity { stage, load, capacity } => write!(
                f,
                "capacity: stage {} holds {load} exposures (d = {capacity})",
                stage + 1
            ),
            Violation::ExposureCap { product, count, cap } => write!(
                f,
                "exposure cap: product {} is shown {count} times (w = {cap})",
                product + 1
            ),
        }
    }
}

/// Lists every violated feasibility condition; an empty list means the
/// assortment is feasible.
pub fn validate_assortment(inst: &Instance, a: &Assortment) -> Result<Vec<Violation>> {
    let (n, w, m) = a.dims();
    if (n, w, m) != (inst.n(), inst.w(), inst.m()) {
        return Err(Error::Shape(format!(
            "assortment tensor is {n}x{w}x{m}, instance expects {}x{}x{}",
            inst.n(),
            inst.w(),
            inst.m()
        )));
    }
    let mut out = Vec::new();
    for i in 0..n {
        for z in 0..m {
            let count = (0..w).filter(|&k| a.get(i, k, z)).count();
            if count > 1 {
                out.push(Violation::StageUniqueness { product: i, stage: z, count });
            }
        }
        // stages holding each exposure of product i
        let shown: Vec<Vec<usize>> =
            (0..w).map(|k| (0..m).filter(|&z| a.get(i, k, z)).collect()).collect();
        for k in 0..w {
            for &z in &shown[k] {
                let ok = shown[k].len() == 1
                    && (0..k).all(|j| shown[j].len() == 1 && shown[j][0] < z)
                    && (k == 0 || shown[k - 1][0] < z);
                if !ok {
                    out.push(Violation::PrefixCompleteness { product: i, exposure: k, stage: z });
                }
            }
        }
        let count: usize = shown.iter().map(Vec::len).sum();
        if count > w {
            out.push(Violation::ExposureCap { product: i, count, cap: w });
        }
    }
    for z in 0..m {
        let load = a.stage_load(z);
        if load > inst.d() {
            out.push(Violation::Capacity { stage: z, load, capacity: inst.d() });
        }
    }
    Ok(out)
}

pub(crate) fn ensure_feasible(inst: &Instance, a: &Assortment) -> Result<()> {
    let violations = validate_assortment(inst, a)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Infeasible(violations.iter().map(ToString::to_string).collect()))
    }
}

/// Total order used to pick among candidate solutions: larger value first,
/// then the lexicographically smaller placement list.
pub(crate) fn outranks(value: f64, a: &Assortment, best_value: f64, best: &Assortment) -> bool {
    value > best_value || (value == best_value && a.placements() < best.placements())
}

/// Every stage subset of size at most `w`, as ascending stage lists, in
/// increasing bitmask order. The empty schedule comes first.
pub fn stage_schedules(m: usize, w: usize) -> Vec<Vec<usize>> {
    assert!(m < 32, "too many stages for schedule enumeration");
    (0u32..(1u32 << m))
        .filter(|mask| mask.count_ones() as usize <= w)
        .map(|mask| (0..m).filter(|&z| mask & (1 << z) != 0).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PatienceModel, Product};

    fn inst(n: usize, m: usize, d: usize, w: usize) -> Instance {
        let weights: Vec<f64> = (0..w).map(|k| 1.0 / (k + 1) as f64).collect();
        Instance::new(
            (0..n).map(|_| Product::new(1.0, 1.0, weights.clone())).collect(),
            m,
            d,
            w,
            PatienceModel::Exponential { rate: 1.0 },
        )
        .unwrap()
    }

    fn place(product: usize, exposure: usize, stage: usize) -> Placement {
        Placement { product, exposure, stage }
    }

    #[test]
    fn compaction_removes_gaps() {
        let i = inst(2, 4, 1, 2);
        let a = Assortment::from_schedules(2, 2, 4, &[vec![1, 3], vec![]]).unwrap();
        assert!(!a.is_gap_free());
        let c = a.compacted();
        assert!(c.is_gap_free());
        assert_eq!(c, Assortment::from_schedules(2, 2, 4, &[vec![0, 1], vec![]]).unwrap());
        assert!(validate_assortment(&i, &c).unwrap().is_empty());
        assert!(Assortment::empty(2, 2, 4).is_gap_free());
    }

    #[test]
    fn empty_is_feasible() {
        let i = inst(2, 2, 1, 2);
        assert!(validate_assortment(&i, &Assortment::empty_for(&i)).unwrap().is_empty());
    }

    #[test]
    fn second_exposure_without_first() {
        let i = inst(1, 2, 1, 2);
        let a = Assortment::from_placements(1, 2, 2, &[place(0, 1, 0)]).unwrap();
        let v = validate_assortment(&i, &a).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("prefix-completeness"));
    }

    #[test]
    fn exposures_out_of_order() {
        let i = inst(1, 2, 1, 2);
        let a = Assortment::from_placements(1, 2, 2, &[place(0, 0, 1), place(0, 1, 0)]).unwrap();
        let v = validate_assortment(&i, &a).unwrap();
        assert!(v.iter().any(|v| matches!(v, Violation::PrefixCompleteness { exposure: 1, .. })));
    }

    #[test]
    fn duplicate_exposure_and_same_stage() {
        let i = inst(1, 2, 2, 2);
        let a = Assortment::from_placements(1, 2, 2, &[place(0, 0, 0), place(0, 0, 1)]).unwrap();
        assert!(!validate_assortment(&i, &a).unwrap().is_empty());
        let b = Assortment::from_placements(1, 2, 2, &[place(0, 0, 0), place(0, 1, 0)]).unwrap();
        let v = validate_assortment(&i, &b).unwrap();
        assert!(v.iter().any(|v| matches!(v, Violation::StageUniqueness { .. })));
    }

    #[test]
    fn capacity_exceeded() {
        let i = inst(3, 1, 2, 1);
        let a = Assortment::from_placements(3, 1, 1, &[place(0, 0, 0), place(1, 0, 0), place(2, 0, 0)])
            .unwrap();
        let v = validate_assortment(&i, &a).unwrap();
        assert_eq!(v, vec![Violation::Capacity { stage: 0, load: 3, capacity: 2 }]);
        assert!(v[0].to_string().contains("stage 1"));
    }

    #[test]
    fn shape_mismatch() {
        let i = inst(2, 2, 1, 1);
        assert!(matches!(validate_assortment(&i, &Assortment::empty(2, 1, 3)), Err(Error::Shape(_))));
        assert!(Assortment::from_placements(1, 1, 1, &[place(0, 0, 1)]).is_err());
    }

    #[test]
    fn schedules_listing() {
        assert_eq!(stage_schedules(2, 2), vec![vec![], vec![0], vec![1], vec![0, 1]]);
        assert_eq!(stage_schedules(3, 1).len(), 4);
        assert_eq!(stage_schedules(3, 2).len(), 7);
    }

    #[test]
    fn truncation_drops_later_stages() {
        let a = Assortment::from_schedules(2, 2, 3, &[vec![0, 2], vec![1]]).unwrap();
        let t = a.truncated_after(1);
        assert_eq!(t.placements(), vec![place(0, 0, 0), place(1, 0, 1)]);
        assert_eq!(a.last_nonempty_stage(), Some(2));
    }
}
