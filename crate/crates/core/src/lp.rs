//! Dense two-phase primal simplex for small linear programs.
//!
//! Programs have the form
//!
//! ```text
//! maximize  c·x
//! subject to A x = b,  x_j >= l_j   (l_j may be -inf)
//! ```
//!
//! which is all the conjugacy, membership and relative-interior tests need.
//! Finite lower bounds are shifted away and free variables split into a
//! difference of two nonnegative columns before the tableau is built.
//! Pivoting follows Dantzig's rule and falls back to Bland's rule for the
//! rest of the solve once a run of degenerate pivots suggests cycling, so
//! the result is deterministic for a fixed input.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{all_finite, dot, norm_inf};

/// Phase-one residual above which a program is declared infeasible.
pub const INFEASIBILITY_TOL: f64 = 1e-9;

const REDUCED_COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    lower_bounds: Vec<f64>,
}

impl LinearProgram {
    /// Builds `max objective·x  s.t.  rows·x = rhs, x >= lower_bounds`.
    /// Lower bounds may be `f64::NEG_INFINITY` for free variables.
    pub fn new(
        objective: Vec<f64>,
        rows: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        lower_bounds: Vec<f64>,
    ) -> Result<Self> {
        let n = objective.len();
        check_dim(n, lower_bounds.len())?;
        check_dim(rows.len(), rhs.len())?;
        for r in &rows {
            check_dim(n, r.len())?;
            if !all_finite(r) {
                return Err(Error::NonFinite("constraint matrix"));
            }
        }
        if !all_finite(&objective) || !all_finite(&rhs) {
            return Err(Error::NonFinite("linear program data"));
        }
        if lower_bounds
            .iter()
            .any(|l| l.is_nan() || *l == f64::INFINITY)
        {
            return Err(Error::NonFinite("lower bounds"));
        }
        Ok(LinearProgram {
            objective,
            rows,
            rhs,
            lower_bounds,
        })
    }

    /// All variables nonnegative.
    pub fn nonnegative(objective: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        Self::new(objective, rows, rhs, vec![0.0; n])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }

    /// Largest violation of the equality rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| (dot(r, x) - b).abs());
        let bounds = self
            .lower_bounds
            .iter()
            .zip(x)
            .map(|(l, xi)| (l - xi).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }
}

/// How an original variable maps onto standard-form columns.
#[derive(Debug, Clone, Copy)]
enum Column {
    Shifted { col: usize, lower: f64 },
    Split { plus: usize, minus: usize },
}

struct StandardForm {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    columns: Vec<Column>,
}

fn standardize(p: &LinearProgram) -> StandardForm {
    let mut columns = Vec::with_capacity(p.num_vars());
    let mut ncols = 0;
    for &l in &p.lower_bounds {
        if l.is_finite() {
            columns.push(Column::Shifted {
                col: ncols,
                lower: l,
            });
            ncols += 1;
        } else {
            columns.push(Column::Split {
                plus: ncols,
                minus: ncols + 1,
            });
            ncols += 2;
        }
    }
    let mut cost = vec![0.0; ncols];
    for (j, col) in columns.iter().enumerate() {
        match *col {
            Column::Shifted { col, .. } => cost[col] = p.objective[j],
            Column::Split { plus, minus } => {
                cost[plus] = p.objective[j];
                cost[minus] = -p.objective[j];
            }
        }
    }
    let mut rows = Vec::with_capacity(p.num_rows());
    let mut rhs = Vec::with_capacity(p.num_rows());
    for (r, &b) in p.rows.iter().zip(&p.rhs) {
        let mut row = vec![0.0; ncols];
        let mut shifted_b = b;
        for (j, col) in columns.iter().enumerate() {
            match *col {
                Column::Shifted { col, lower } => {
                    row[col] = r[j];
                    shifted_b -= r[j] * lower;
                }
                Column::Split { plus, minus } => {
                    row[plus] = r[j];
                    row[minus] = -r[j];
                }
            }
        }
        if shifted_b < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            shifted_b = -shifted_b;
        }
        rows.push(row);
        rhs.push(shifted_b);
    }
    StandardForm {
        rows,
        rhs,
        cost,
        columns,
    }
}

struct Tableau {
    width: usize,
    cells: Vec<f64>,
    /// Reduced costs `z_j - c_j`; the last entry is the objective value.
    z: Vec<f64>,
    basis: Vec<usize>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * (self.width + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width)
    }

    fn row(&self, i: usize) -> &[f64] {
        let w = self.width + 1;
        &self.cells[i * w..(i + 1) * w]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width + 1;
        let piv = self.at(r, c);
        for v in &mut self.cells[r * w..(r + 1) * w] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.row(r).to_vec();
        for i in 0..self.rows() {
            if i == r {
                continue;
            }
            let f = self.at(i, c);
            if f != 0.0 {
                for (v, p) in self.cells[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        let f = self.z[c];
        if f != 0.0 {
            for (v, p) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
        }
        self.basis[r] = c;
    }

    /// Resets the reduced-cost row for `maximize cost·x` under the current basis.
    fn price(&mut self, cost: &[f64]) {
        let mut z: Vec<f64> = cost.iter().map(|c| -c).collect();
        z.push(0.0);
        for i in 0..self.rows() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (zj, a) in z.iter_mut().zip(self.row(i)) {
                    *zj += cb * a;
                }
            }
        }
        self.z = z;
    }

    fn iterate(&mut self, pivots: &mut usize) -> Result<Phase> {
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            let entering = if bland {
                (0..self.width).find(|&j| self.z[j] < -REDUCED_COST_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..self.width {
                    let zj = self.z[j];
                    if zj < -REDUCED_COST_TOL && best.is_none_or(|(_, b)| zj < b) {
                        best = Some((j, zj));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(c) = entering else {
                return Ok(Phase::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows() {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - DEGENERATE_STEP
                                || (ratio <= lr + DEGENERATE_STEP
                                    && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, step)) = leave else {
                return Ok(Phase::Unbounded);
            };

            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::PivotLimit(MAX_PIVOTS));
            }
            if step <= DEGENERATE_STEP {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_RUN_BEFORE_BLAND {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Solves `B x_B = b` by Gaussian elimination with partial pivoting.
fn solve_square(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k].abs() < 1e-14 {
            return None;
        }
        m.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f != 0.0 {
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / m[k][k];
    }
    Some(x)
}

/// Solves the program. Deterministic for a fixed input.
pub fn solve(p: &LinearProgram) -> Result<LpOutcome> {
    let sf = standardize(p);
    let m = sf.rows.len();
    let ncols = sf.cost.len();
    let mut pivots = 0usize;

    // Phase one: one artificial per row, maximize -(sum of artificials).
    let width = ncols + m;
    let mut cells = Vec::with_capacity(m * (width + 1));
    for (i, row) in sf.rows.iter().enumerate() {
        cells.extend_from_slice(row);
        cells.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
        cells.push(sf.rhs[i]);
    }
    let mut tab = Tableau {
        width,
        cells,
        z: Vec::new(),
        basis: (ncols..ncols + m).collect(),
    };
    let mut phase_one_cost = vec![0.0; width];
    phase_one_cost[ncols..].iter_mut().for_each(|c| *c = -1.0);
    tab.price(&phase_one_cost);
    tab.iterate(&mut pivots)?;

    let residual = -tab.z[width];
    let scale = norm_inf(&sf.rhs).max(1.0);
    if residual > INFEASIBILITY_TOL * scale {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive artificials out of the basis; rows where that is impossible are
    // linear combinations of the others.
    let mut redundant = vec![false; m];
    for i in 0..m {
        if tab.basis[i] < ncols {
            continue;
        }
        let best = (0..ncols)
            .filter(|j| !tab.basis.contains(j))
            .map(|j| (j, tab.at(i, j).abs()))
            .filter(|&(_, a)| a > PIVOT_TOL)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, _)) => tab.pivot(i, j),
            None => redundant[i] = true,
        }
    }

    let kept: Vec<usize> = (0..m).filter(|&i| !redundant[i]).collect();
    let mut cells = Vec::with_capacity(kept.len() * (ncols + 1));
    for &i in &kept {
        let row = tab.row(i);
        cells.extend_from_slice(&row[..ncols]);
        cells.push(row[width]);
    }
    let mut tab = Tableau {
        width: ncols,
        cells,
        z: Vec::new(),
        basis: kept.iter().map(|&i| tab.basis[i]).collect(),
    };
    // Phase two.
    tab.price(&sf.cost);
    if let Phase::Unbounded = tab.iterate(&mut pivots)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut xs = vec![0.0; ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        xs[b] = tab.rhs(i);
    }
    if let Some(refined) = refine_basic_solution(&sf, &tab.basis) {
        if refined.iter().all(|v| *v >= -PIVOT_TOL) {
            xs = vec![0.0; ncols];
            for (&b, v) in tab.basis.iter().zip(refined) {
                xs[b] = v;
            }
        }
    }

    let point: Vec<f64> = sf
        .columns
        .iter()
        .map(|col| match *col {
            Column::Shifted { col, lower } => lower + xs[col],
            Column::Split { plus, minus } => xs[plus] - xs[minus],
        })
        .collect();
    let value = dot(&p.objective, &point);
    Ok(LpOutcome::Optimal { value, point })
}

/// Recomputes basic values from the original standard-form data so the
/// reported point does not carry tableau round-off. Picks a maximal set of
/// linearly independent rows matching the basis size.
fn refine_basic_solution(sf: &StandardForm, basis: &[usize]) -> Option<Vec<f64>> {
    let k = basis.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let restricted: Vec<Vec<f64>> = sf
        .rows
        .iter()
        .map(|row| basis.iter().map(|&b| row[b]).collect())
        .collect();
    // Greedy independent row selection by Gram-Schmidt on the restricted rows.
    let mut chosen = Vec::with_capacity(k);
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(k);
    let largest = restricted.iter().map(|r| norm_inf(r)).fold(0.0, f64::max);
    for (idx, r) in restricted.iter().enumerate() {
        if chosen.len() == k {
            break;
        }
        let mut w = r.clone();
        for _ in 0..2 {
            for q in &ortho {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let nw = dot(&w, &w).sqrt();
        if nw > 1e-9 * largest.max(1.0) {
            ortho.push(w.iter().map(|v| v / nw).collect());
            chosen.push(idx);
        }
    }
    if chosen.len() != k {
        return None;
    }
    let mat = chosen.iter().map(|&i| restricted[i].clone()).collect();
    let rhs = chosen.iter().map(|&i| sf.rhs[i]).collect();
    solve_square(mat, rhs)
}
