use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::model::{stage_schedules, Assortment, Instance};

use super::grid::DiscretizedInstance;

/// Per-stage scaled sums `(u_z, v_z)` and item counts `l_z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub u: Vec<u32>,
    pub v: Vec<u32>,
    pub l: Vec<u32>,
}

impl Cell {
    pub fn zero(m: usize) -> Self {
        Cell { u: vec![0; m], v: vec![0; m], l: vec![0; m] }
    }
}

/// Storage strategy for the cost table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DpMode {
    /// Only reachable cells, in a hash map per layer.
    #[default]
    Sparse,
    /// The full `((U + 1)^2 (d + 1))^m` array per layer, filled by pulling
    /// from every predecessor.
    Dense,
}

#[derive(Debug, Clone, Copy)]
pub struct TableLimits {
    /// live cells in any one sparse layer
    pub max_states: usize,
    /// cells per dense layer
    pub max_dense_cells: usize,
}

impl Default for TableLimits {
    fn default() -> Self {
        TableLimits { max_states: 4_000_000, max_dense_cells: 20_000_000 }
    }
}

/// Admissible schedule of one product: the stage offsets it adds.
#[derive(Debug, Clone)]
struct Move {
    schedule: u16,
    count: u32,
    /// `(stage, du, dv)` for each stage the schedule touches
    touches: Vec<(usize, u32, u32)>,
}

fn product_moves(disc: &DiscretizedInstance, schedules: &[Vec<usize>], j: usize) -> Vec<Option<Move>> {
    schedules
        .iter()
        .enumerate()
        .map(|(s, sched)| {
            let mut touches = Vec::with_capacity(sched.len());
            for (k, &z) in sched.iter().enumerate() {
                let (g, b) = disc.scaled(j, k, z)?;
                touches.push((z, g, b));
            }
            Some(Move { schedule: s as u16, count: touches.len() as u32, touches })
        })
        .collect()
}

/// Bit layout packing a [`Cell`] into a `u128`: per stage, `u`, `v`, `l`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    m: usize,
    value_bits: u32,
    count_bits: u32,
}

impl Layout {
    fn new(m: usize, value_bound: u32, d: u32) -> Option<Self> {
        let bits = |x: u32| 32 - x.leading_zeros();
        let l = Layout { m, value_bits: bits(value_bound).max(1), count_bits: bits(d).max(1) };
        (l.stride() * m as u32 <= 128).then_some(l)
    }

    fn stride(&self) -> u32 {
        2 * self.value_bits + self.count_bits
    }

    fn shift(&self, z: usize, field: u32) -> u32 {
        z as u32 * self.stride()
            + match field {
                0 => 0,
                1 => self.value_bits,
                _ => 2 * self.value_bits,
            }
    }

    fn get(&self, key: u128, z: usize, field: u32) -> u32 {
        let width = if field == 2 { self.count_bits } else { self.value_bits };
        ((key >> self.shift(z, field)) & ((1u128 << width) - 1)) as u32
    }

    fn offset(&self, z: usize, du: u32, dv: u32) -> u128 {
        ((du as u128) << self.shift(z, 0)) | ((dv as u128) << self.shift(z, 1)) | (1u128 << self.shift(z, 2))
    }

    fn unpack(&self, key: u128) -> Cell {
        let mut c = Cell::zero(self.m);
        for z in 0..self.m {
            c.u[z] = self.get(key, z, 0);
            c.v[z] = self.get(key, z, 1);
            c.l[z] = self.get(key, z, 2);
        }
        c
    }

    fn pack(&self, c: &Cell) -> u128 {
        (0..self.m).fold(0u128, |acc, z| {
            acc | ((c.u[z] as u128) << self.shift(z, 0))
                | ((c.v[z] as u128) << self.shift(z, 1))
                | ((c.l[z] as u128) << self.shift(z, 2))
        })
    }
}

/// Dense predecessor of a schedule: linear offset, `(digit, amount)` lower
/// bounds, added cost.
type Pull = (usize, Vec<(usize, usize)>, f64);

#[derive(Debug, Clone, Copy)]
struct Entry {
    cost: f64,
    prev: u128,
    schedule: u16,
}

#[derive(Debug, Clone)]
enum Storage {
    Sparse { layout: Layout, layers: Vec<FxHashMap<u128, Entry>> },
    Dense { radix: Vec<usize>, cost: Vec<Vec<f64>>, choice: Vec<Vec<u16>> },
}

/// Minimum total patience cost `h(j, u, v, l)` over the first `j` products,
/// with back-pointers for reconstruction.
#[derive(Debug, Clone)]
pub struct DpTable {
    n: usize,
    w: usize,
    m: usize,
    schedules: Vec<Vec<usize>>,
    /// per product: the admissible moves, indexed by schedule
    moves: Vec<Vec<Option<Move>>>,
    steps: u64,
    storage: Storage,
}

/// Fills the table for one discretized instance.
pub fn fill_table(inst: &Instance, disc: &DiscretizedInstance, mode: DpMode, limits: TableLimits) -> Result<DpTable> {
    let (n, w, m) = disc.dims();
    let schedules = stage_schedules(m, w);
    let moves: Vec<_> = (0..n).map(|j| product_moves(disc, &schedules, j)).collect();
    let mut table = DpTable { n, w, m, schedules, moves, steps: 0, storage: Storage::Dense { radix: vec![], cost: vec![], choice: vec![] } };
    match mode {
        DpMode::Sparse => table.fill_sparse(inst, disc, limits)?,
        DpMode::Dense => table.fill_dense(inst, disc, limits)?,
    }
    Ok(table)
}

impl DpTable {
    fn fill_sparse(&mut self, inst: &Instance, disc: &DiscretizedInstance, limits: TableLimits) -> Result<()> {
        let d = inst.d() as u32;
        let bound = disc.value_bound();
        let layout = Layout::new(self.m, bound, d).ok_or_else(|| Error::Refused {
            reason: "cell does not fit the packed sparse key".into(),
            estimate: f64::NAN,
        })?;
        let mut layers = Vec::with_capacity(self.n + 1);
        let mut first = FxHashMap::default();
        first.insert(0u128, Entry { cost: 0.0, prev: 0, schedule: 0 });
        layers.push(first);
        for j in 0..self.n {
            let c = inst.product(j).patience_cost;
            let moves: Vec<(&Move, u128)> = self.moves[j]
                .iter()
                .flatten()
                .map(|mv| (mv, mv.touches.iter().fold(0u128, |acc, &(z, du, dv)| acc + layout.offset(z, du, dv))))
                .collect();
            let mut next: FxHashMap<u128, Entry> = FxHashMap::default();
            next.reserve(layers[j].len() * 2);
            let mut steps = 0u64;
            for (&key, e) in &layers[j] {
                for &(mv, delta) in &moves {
                    steps += 1;
                    let fits = mv.touches.iter().all(|&(z, du, dv)| {
                        layout.get(key, z, 2) < d
                            && layout.get(key, z, 0) + du <= bound
                            && layout.get(key, z, 1) + dv <= bound
                    });
                    if !fits {
                        continue;
                    }
                    let cost = e.cost + mv.count as f64 * c;
                    let cand = Entry { cost, prev: key, schedule: mv.schedule };
                    next.entry(key + delta)
                        .and_modify(|o| {
                            if cost < o.cost || (cost == o.cost && (key, mv.schedule) < (o.prev, o.schedule)) {
                                *o = cand;
                            }
                        })
                        .or_insert(cand);
                }
            }
            self.steps += steps;
            if next.len() > limits.max_states {
                return Err(Error::Refused {
                    reason: format!("{} live DP states exceed the ceiling of {}", next.len(), limits.max_states),
                    estimate: next.len() as f64,
                });
            }
            layers.push(next);
        }
        self.storage = Storage::Sparse { layout, layers };
        Ok(())
    }

    fn fill_dense(&mut self, inst: &Instance, disc: &DiscretizedInstance, limits: TableLimits) -> Result<()> {
        let d = inst.d();
        let side = disc.value_bound() as usize + 1;
        // mixed radix per stage: u, v, l
        let radix: Vec<usize> = (0..self.m).flat_map(|_| [side, side, d + 1]).collect();
        let cells = radix.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r)).filter(|&c| c <= limits.max_dense_cells);
        let Some(cells) = cells else {
            return Err(Error::Refused {
                reason: format!("dense DP layer exceeds {} cells", limits.max_dense_cells),
                estimate: radix.iter().map(|&r| r as f64).product(),
            });
        };
        let strides: Vec<usize> = radix.iter().scan(1usize, |s, &r| {
            let cur = *s;
            *s *= r;
            Some(cur)
        }).collect();
        let mut cost = vec![vec![f64::INFINITY; cells]];
        cost[0][0] = 0.0;
        let mut choice = vec![Vec::new()];
        let sched_count = self.schedules.len();
        for j in 0..self.n {
            let c = inst.product(j).patience_cost;
            let pulls: Vec<Option<Pull>> = self.moves[j]
                .iter()
                .map(|mv| {
                    mv.as_ref().map(|mv| {
                        let mut need = Vec::new();
                        let mut offset = 0usize;
                        for &(z, du, dv) in &mv.touches {
                            for (f, amount) in [(0, du as usize), (1, dv as usize), (2, 1)] {
                                let digit = 3 * z + f;
                                offset += amount * strides[digit];
                                need.push((digit, amount));
                            }
                        }
                        (offset, need, mv.count as f64 * c)
                    })
                })
                .collect();
            let prev = &cost[j];
            let mut layer = vec![f64::INFINITY; cells];
            let mut picks = vec![u16::MAX; cells];
            let mut digits = vec![0usize; radix.len()];
            for idx in 0..cells {
                let mut best = f64::INFINITY;
                let mut pick = u16::MAX;
                for (s, pull) in pulls.iter().enumerate() {
                    let Some((offset, need, add)) = pull else { continue };
                    if need.iter().all(|&(dg, amt)| digits[dg] >= amt) {
                        let v = prev[idx - offset] + add;
                        if v < best {
                            best = v;
                            pick = s as u16;
                        }
                    }
                }
                layer[idx] = best;
                picks[idx] = pick;
                for (dg, r) in digits.iter_mut().zip(&radix) {
                    *dg += 1;
                    if *dg < *r {
                        break;
                    }
                    *dg = 0;
                }
            }
            self.steps += (cells * sched_count) as u64;
            cost.push(layer);
            choice.push(picks);
        }
        self.storage = Storage::Dense { radix, cost, choice };
        Ok(())
    }

    /// Number of (cell, schedule) transitions examined while filling.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn schedules(&self) -> &[Vec<usize>] {
        &self.schedules
    }

    fn dense_index(radix: &[usize], c: &Cell) -> Option<usize> {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for z in 0..c.u.len() {
            for (val, r) in [(c.u[z], radix[3 * z]), (c.v[z], radix[3 * z + 1]), (c.l[z], radix[3 * z + 2])] {
                if val as usize >= r {
                    return None;
                }
                idx += val as usize * stride;
                stride *= r;
            }
        }
        Some(idx)
    }

    fn dense_cell(radix: &[usize], mut idx: usize) -> Cell {
        let m = radix.len() / 3;
        let mut c = Cell::zero(m);
        for z in 0..m {
            for f in 0..3 {
                let r = radix[3 * z + f];
                let val = (idx % r) as u32;
                idx /= r;
                match f {
                    0 => c.u[z] = val,
                    1 => c.v[z] = val,
                    _ => c.l[z] = val,
                }
            }
        }
        c
    }

    /// `h(j, cell)`, or `None` when no selection of the first `j` products
    /// lands in `cell`.
    pub fn min_cost(&self, j: usize, cell: &Cell) -> Option<f64> {
        match &self.storage {
            Storage::Sparse { layout, layers } => {
                if cell.u.len() != self.m {
                    return None;
                }
                let key = layout.pack(cell);
                (layout.unpack(key) == *cell).then(|| layers[j].get(&key).map(|e| e.cost)).flatten()
            }
            Storage::Dense { radix, cost, .. } => {
                Self::dense_index(radix, cell).map(|i| cost[j][i]).filter(|c| c.is_finite())
            }
        }
    }

    /// Every reachable cell after the last product, with its minimum cost, in
    /// cell order.
    pub fn terminal_cells(&self) -> Vec<(Cell, f64)> {
        let mut out: Vec<(Cell, f64)> = match &self.storage {
            Storage::Sparse { layout, layers } => {
                layers[self.n].iter().map(|(&k, e)| (layout.unpack(k), e.cost)).collect()
            }
            Storage::Dense { radix, cost, .. } => cost[self.n]
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_finite())
                .map(|(i, &c)| (Self::dense_cell(radix, i), c))
                .collect(),
        };
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Schedule index chosen for each product along the minimum-cost path to
    /// every terminal cell, with that cost.
    pub(crate) fn terminal_choices(&self) -> Vec<(Vec<u16>, f64)> {
        match &self.storage {
            Storage::Sparse { layers, .. } => layers[self.n]
                .iter()
                .map(|(&key, e)| {
                    let mut picks = vec![0u16; self.n];
                    let mut k = key;
                    for j in (0..self.n).rev() {
                        let ent = layers[j + 1][&k];
                        picks[j] = ent.schedule;
                        k = ent.prev;
                    }
                    (picks, e.cost)
                })
                .collect(),
            Storage::Dense { cost, .. } => cost[self.n]
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_finite())
                .map(|(i, &c)| (self.dense_path(i), c))
                .collect(),
        }
    }

    fn dense_path(&self, mut idx: usize) -> Vec<u16> {
        let Storage::Dense { radix, choice, .. } = &self.storage else { unreachable!() };
        let strides: Vec<usize> = radix.iter().scan(1usize, |s, &r| {
            let cur = *s;
            *s *= r;
            Some(cur)
        }).collect();
        let mut picks = vec![0u16; self.n];
        for j in (0..self.n).rev() {
            let s = choice[j + 1][idx];
            picks[j] = s;
            let mv = self.moves[j][s as usize].as_ref().expect("back-pointer to admissible schedule");
            for &(z, du, dv) in &mv.touches {
                idx -= du as usize * strides[3 * z] + dv as usize * strides[3 * z + 1] + strides[3 * z + 2];
            }
        }
        picks
    }

    /// Assortment built from per-product schedule indices.
    pub(crate) fn assortment_from(&self, picks: &[u16]) -> Assortment {
        let scheds: Vec<Vec<usize>> = picks.iter().map(|&s| self.schedules[s as usize].clone()).collect();
        Assortment::from_schedules(self.n, self.w, self.m, &scheds).expect("schedules index valid placements")
    }

    /// A minimum-cost assortment landing in `cell`.
    pub fn reconstruct(&self, cell: &Cell) -> Option<Assortment> {
        let picks = match &self.storage {
            Storage::Sparse { layout, layers } => {
                let key = layout.pack(cell);
                if !layers[self.n].contains_key(&key) || layout.unpack(key) != *cell {
                    return None;
                }
                let mut picks = vec![0u16; self.n];
                let mut k = key;
                for j in (0..self.n).rev() {
                    let ent = layers[j + 1][&k];
                    picks[j] = ent.schedule;
                    k = ent.prev;
                }
                picks
            }
            Storage::Dense { radix, cost, .. } => {
                let idx = Self::dense_index(radix, cell)?;
                if !cost[self.n][idx].is_finite() {
                    return None;
                }
                self.dense_path(idx)
            }
        };
        Some(self.assortment_from(&picks))
    }
}
