use crate::error::{Error, Result};
use crate::model::{Assortment, Instance};

use super::table::Cell;

/// Exclusive upper bound `(sqrt(5) - 1) / 2` on the grid precision, the
/// root of `1 - e(1 + e) = 0`.
pub fn epsilon_upper_bound() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < epsilon_upper_bound() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "epsilon must lie in (0, {:.6}), got {epsilon}",
            epsilon_upper_bound()
        )))
    }
}

/// Geometric guess grids for per-stage revenue-weight sums (`gamma`) and
/// attraction sums (`beta`).
#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub epsilon: f64,
    pub capacity: usize,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    /// `gamma_min (1 + e)^a` for `a = 0..=A`
    pub gamma: Vec<f64>,
    /// `beta_min (1 + e)^b` for `b = 0..=B`
    pub beta: Vec<f64>,
}

fn geometric(min: f64, cover: f64, epsilon: f64) -> Vec<f64> {
    let top = ((cover / min).ln() / (1.0 + epsilon).ln()).ceil().max(0.0) as i32;
    (0..=top).map(|a| min * (1.0 + epsilon).powi(a)).collect()
}

/// Grids covering `[gamma_min, d gamma_max / e]` and `[beta_min, d beta_max / e]`.
/// Zero-revenue products are left out of the gamma range.
pub fn build_grids(inst: &Instance, epsilon: f64) -> Result<Grids> {
    check_epsilon(epsilon)?;
    let (mut gamma_min, mut gamma_max) = (f64::INFINITY, 0.0f64);
    let (mut beta_min, mut beta_max) = (f64::INFINITY, 0.0f64);
    for i in 0..inst.n() {
        for k in 0..inst.w() {
            let b = inst.weight(i, k);
            beta_min = beta_min.min(b);
            beta_max = beta_max.max(b);
            let g = inst.gamma(i, k);
            if g > 0.0 {
                gamma_min = gamma_min.min(g);
                gamma_max = gamma_max.max(g);
            }
        }
    }
    if gamma_max == 0.0 {
        return Err(Error::DegenerateGrid(
            "every product has zero revenue; use the exact surrogate oracle (`--method exact-p1`) instead".into(),
        ));
    }
    let d = inst.d() as f64;
    Ok(Grids {
        epsilon,
        capacity: inst.d(),
        gamma_min,
        gamma_max,
        beta_min,
        beta_max,
        gamma: geometric(gamma_min, d * gamma_max / epsilon, epsilon),
        beta: geometric(beta_min, d * beta_max / epsilon, epsilon),
    })
}

/// One guess `(mu, nu)`: grid indices per stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Guess {
    pub gamma: Vec<usize>,
    pub beta: Vec<usize>,
}

impl Guess {
    pub fn mu(&self, grids: &Grids) -> Vec<f64> {
        self.gamma.iter().map(|&a| grids.gamma[a]).collect()
    }

    pub fn nu(&self, grids: &Grids) -> Vec<f64> {
        self.beta.iter().map(|&b| grids.beta[b]).collect()
    }
}

fn snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// Discretized `(gamma~, beta~)` of every `(product, exposure)` for one
/// stage guess `(mu_z, nu_z)`; `None` marks a pruned placement.
pub(crate) type Column = Vec<Option<(u32, u32)>>;

pub(crate) fn discretize_pair(inst: &Instance, grids: &Grids, mu: f64, nu: f64) -> Column {
    let d = inst.d() as f64;
    let gamma_unit = mu * grids.epsilon / d;
    let beta_unit = nu * grids.epsilon / d;
    let mut col = Vec::with_capacity(inst.n() * inst.w());
    for i in 0..inst.n() {
        for k in 0..inst.w() {
            let g = inst.gamma(i, k);
            let b = inst.weight(i, k);
            col.push(if g <= mu && b <= nu {
                Some((snapped(g / gamma_unit).ceil() as u32, snapped(b / beta_unit).floor() as u32))
            } else {
                None
            });
        }
    }
    col
}

/// Discretized instance for one guess: `gamma~_{i,k,z}`, `beta~_{i,k,z}` and
/// the admissibility of each placement.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedInstance {
    n: usize,
    w: usize,
    m: usize,
    /// Upper bound `floor(d (d / e + 1))` on any per-stage scaled sum.
    value_bound: u32,
    /// indexed `(z * n + i) * w + k`
    entries: Vec<Option<(u32, u32)>>,
}

impl DiscretizedInstance {
    pub fn new(inst: &Instance, grids: &Grids, guess: &Guess) -> Self {
        let cols: Vec<Column> = (0..inst.m())
            .map(|z| discretize_pair(inst, grids, grids.gamma[guess.gamma[z]], grids.beta[guess.beta[z]]))
            .collect();
        let refs: Vec<&Column> = cols.iter().collect();
        DiscretizedInstance::from_columns(inst, grids, &refs)
    }

    pub(crate) fn from_columns(inst: &Instance, grids: &Grids, cols: &[&Column]) -> Self {
        let d = inst.d() as f64;
        let value_bound = (d * (d / grids.epsilon + 1.0)).floor() as u32;
        DiscretizedInstance {
            n: inst.n(),
            w: inst.w(),
            m: inst.m(),
            value_bound,
            entries: cols.iter().flat_map(|c| c.iter().copied()).collect(),
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n, self.w, self.m)
    }

    pub fn value_bound(&self) -> u32 {
        self.value_bound
    }

    /// `(gamma~, beta~)` of exposure `k` of product `i` in stage `z`, or `None`
    /// if that placement is pruned under this guess.
    pub fn scaled(&self, i: usize, k: usize, z: usize) -> Option<(u32, u32)> {
        self.entries[(z * self.n + i) * self.w + k]
    }

    /// Scaled per-stage sums and counts of `a`; `None` if `a` uses a pruned
    /// placement.
    pub fn cell_of(&self, a: &Assortment) -> Option<Cell> {
        let mut cell = Cell::zero(self.m);
        for p in a.placements() {
            let (g, b) = self.scaled(p.product, p.exposure, p.stage)?;
            cell.u[p.stage] += g;
            cell.v[p.stage] += b;
            cell.l[p.stage] += 1;
        }
        Some(cell)
    }
}

/// The guess space `I^m x J^m`, with stage guesses grouped by identical
/// discretization. Two guesses whose stages map to the same columns yield the
/// same dynamic program, so only one per class is solved.
#[derive(Debug, Clone)]
pub struct GuessSpace {
    m: usize,
    columns: Vec<Column>,
    /// a representative `(a, b)` grid pair for each column
    representatives: Vec<(usize, usize)>,
    pair_count: usize,
}

impl GuessSpace {
    pub fn new(inst: &Instance, grids: &Grids) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut columns = Vec::new();
        let mut representatives = Vec::new();
        for (a, &mu) in grids.gamma.iter().enumerate() {
            for (b, &nu) in grids.beta.iter().enumerate() {
                let col = discretize_pair(inst, grids, mu, nu);
                index.entry(col.clone()).or_insert_with(|| {
                    columns.push(col);
                    representatives.push((a, b));
                    columns.len() - 1
                });
            }
        }
        GuessSpace { m: inst.m(), columns, representatives, pair_count: grids.gamma.len() * grids.beta.len() }
    }

    /// `|I|^m |J|^m`.
    pub fn guess_count(&self) -> f64 {
        (self.pair_count as f64).powi(self.m as i32)
    }

    pub fn distinct_columns(&self) -> usize {
        self.columns.len()
    }

    /// Number of distinct dynamic programs, `K^m` for `K` distinct columns.
    pub fn class_count(&self) -> f64 {
        (self.columns.len() as f64).powi(self.m as i32)
    }

    fn digits(&self, mut idx: u64) -> Vec<usize> {
        let k = self.columns.len() as u64;
        (0..self.m)
            .map(|_| {
                let d = (idx % k) as usize;
                idx /= k;
                d
            })
            .collect()
    }

    pub fn discretization(&self, inst: &Instance, grids: &Grids, class: u64) -> DiscretizedInstance {
        let cols: Vec<&Column> = self.digits(class).into_iter().map(|c| &self.columns[c]).collect();
        DiscretizedInstance::from_columns(inst, grids, &cols)
    }

    pub fn representative(&self, class: u64) -> Guess {
        let (gamma, beta) = self.digits(class).into_iter().map(|c| self.representatives[c]).unzip();
        Guess { gamma, beta }
    }
}
