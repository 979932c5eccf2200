//! Exact two-phase simplex over the rationals.
//!
//! Pivoting uses Bland's smallest-index rule, so every run terminates and the
//! returned basis is a deterministic function of the input. Infeasible
//! systems come back with a Farkas certificate that has already been checked
//! by substitution.

use serde::{Deserialize, Serialize};

use super::matrix::dot;
use super::rat::Rat;
use crate::error::{Error, Result};

/// A single linear row `coeffs · x (rel) rhs`; whether it is an equality or a
/// `>=` inequality is determined by which list it is passed in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, rhs }
    }

    pub fn from_ints(coeffs: &[i64], rhs: i64) -> Self {
        Constraint { coeffs: coeffs.iter().map(|&c| Rat::from_int(c)).collect(), rhs: Rat::from_int(rhs) }
    }

    pub fn lhs(&self, x: &[Rat]) -> Rat {
        dot(&self.coeffs, x)
    }
}

/// Multipliers proving that `eqs`, `ineqs` and the sign restrictions have no
/// common solution.
///
/// With `u` the equality multipliers (free) and `v >= 0` the inequality
/// multipliers, the combination `w = Σ u_i eq_i + Σ v_i ineq_i` has `w_j = 0`
/// on free variables, `w_j <= 0` on nonnegative ones, and `Σ u_i e_i + Σ v_i g_i > 0`.
/// Any solution would give `0 >= w·x >= (positive)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    /// One multiplier per constraint, equalities first.
    pub multipliers: Vec<Rat>,
}

impl FarkasCertificate {
    /// Checks the certificate against the system it claims to refute.
    pub fn verify(&self, num_vars: usize, eqs: &[Constraint], ineqs: &[Constraint], nonneg: &[usize]) -> bool {
        if self.multipliers.len() != eqs.len() + ineqs.len() {
            return false;
        }
        let (u, v) = self.multipliers.split_at(eqs.len());
        if v.iter().any(Rat::is_negative) {
            return false;
        }
        let mut w = vec![Rat::zero(); num_vars];
        let mut rhs = Rat::zero();
        for (m, c) in u.iter().zip(eqs).chain(v.iter().zip(ineqs)) {
            if m.is_zero() {
                continue;
            }
            for (wj, cj) in w.iter_mut().zip(&c.coeffs) {
                *wj += m * cj;
            }
            rhs += m * &c.rhs;
        }
        let mut is_nonneg = vec![false; num_vars];
        for &j in nonneg {
            is_nonneg[j] = true;
        }
        let combo_ok = w.iter().zip(&is_nonneg).all(|(wj, &nn)| if nn { !wj.is_positive() } else { wj.is_zero() });
        combo_ok && rhs.is_positive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rat>),
    Infeasible(FarkasCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible(FarkasCertificate),
    Unbounded,
}

/// Finds a point with `eqs` holding with equality, `ineqs` holding as `>=`,
/// and the variables listed in `nonneg` nonnegative.
pub fn lp_feasible(num_vars: usize, eqs: &[Constraint], ineqs: &[Constraint], nonneg: &[usize]) -> Result<Feasibility> {
    let mut t = Tableau::build(num_vars, eqs, ineqs, nonneg)?;
    match t.phase_one() {
        PhaseOne::Infeasible(cert) => {
            if !cert.verify(num_vars, eqs, ineqs, nonneg) {
                return Err(Error::Internal("Farkas certificate failed verification".into()));
            }
            Ok(Feasibility::Infeasible(cert))
        }
        PhaseOne::Feasible => {
            let x = t.solution();
            check_solution(&x, eqs, ineqs, nonneg)?;
            Ok(Feasibility::Feasible(x))
        }
    }
}

/// Minimizes `objective · x` over the same kind of system as [`lp_feasible`].
pub fn minimize(
    objective: &[Rat],
    eqs: &[Constraint],
    ineqs: &[Constraint],
    nonneg: &[usize],
) -> Result<LpOutcome> {
    let num_vars = objective.len();
    let mut t = Tableau::build(num_vars, eqs, ineqs, nonneg)?;
    if let PhaseOne::Infeasible(cert) = t.phase_one() {
        if !cert.verify(num_vars, eqs, ineqs, nonneg) {
            return Err(Error::Internal("Farkas certificate failed verification".into()));
        }
        return Ok(LpOutcome::Infeasible(cert));
    }
    if !t.phase_two(objective) {
        return Ok(LpOutcome::Unbounded);
    }
    let x = t.solution();
    check_solution(&x, eqs, ineqs, nonneg)?;
    let value = dot(objective, &x);
    Ok(LpOutcome::Optimal { x, value })
}

fn check_solution(x: &[Rat], eqs: &[Constraint], ineqs: &[Constraint], nonneg: &[usize]) -> Result<()> {
    let ok = eqs.iter().all(|c| c.lhs(x) == c.rhs)
        && ineqs.iter().all(|c| c.lhs(x) >= c.rhs)
        && nonneg.iter().all(|&j| !x[j].is_negative());
    if ok {
        Ok(())
    } else {
        Err(Error::Internal("simplex solution failed substitution check".into()))
    }
}

enum PhaseOne {
    Feasible,
    Infeasible(FarkasCertificate),
}

/// Standard-form tableau `A x = b, x >= 0` with one artificial per row.
struct Tableau {
    num_vars: usize,
    /// Column of `+x_j` and, for free variables, of `-x_j`.
    pos_col: Vec<usize>,
    neg_col: Vec<Option<usize>>,
    /// First artificial column; artificials occupy `art_start..art_start + rows`.
    art_start: usize,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    /// Sign applied to each original row to make its right-hand side nonnegative.
    row_sign: Vec<i32>,
    basis: Vec<usize>,
    /// Original row index of each tableau row (rows may be dropped).
    origin: Vec<usize>,
    reduced: Vec<Rat>,
    objective: Rat,
    allowed: Vec<bool>,
}

impl Tableau {
    fn build(num_vars: usize, eqs: &[Constraint], ineqs: &[Constraint], nonneg: &[usize]) -> Result<Self> {
        for c in eqs.iter().chain(ineqs) {
            if c.coeffs.len() != num_vars {
                return Err(Error::Shape(format!(
                    "constraint with {} coefficients in a {num_vars}-variable system",
                    c.coeffs.len()
                )));
            }
        }
        let mut is_nonneg = vec![false; num_vars];
        for &j in nonneg {
            if j >= num_vars {
                return Err(Error::Shape(format!("sign restriction on unknown variable {j}")));
            }
            is_nonneg[j] = true;
        }
        let mut ncols = 0;
        let mut pos_col = Vec::with_capacity(num_vars);
        let mut neg_col = Vec::with_capacity(num_vars);
        for &nn in &is_nonneg {
            pos_col.push(ncols);
            ncols += 1;
            if nn {
                neg_col.push(None);
            } else {
                neg_col.push(Some(ncols));
                ncols += 1;
            }
        }
        let m = eqs.len() + ineqs.len();
        let surplus_start = ncols;
        ncols += ineqs.len();
        let art_start = ncols;
        ncols += m;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for (i, c) in eqs.iter().chain(ineqs).enumerate() {
            let sign = if c.rhs.is_negative() { -1 } else { 1 };
            let s = Rat::from_int(sign as i64);
            let mut row = vec![Rat::zero(); ncols];
            for (j, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let v = a * &s;
                if let Some(nc) = neg_col[j] {
                    row[nc] = -&v;
                }
                row[pos_col[j]] = v;
            }
            if i >= eqs.len() {
                row[surplus_start + i - eqs.len()] = -&s;
            }
            row[art_start + i] = Rat::one();
            rows.push(row);
            rhs.push(&c.rhs * &s);
            row_sign.push(sign);
        }
        Ok(Tableau {
            num_vars,
            pos_col,
            neg_col,
            art_start,
            basis: (art_start..art_start + m).collect(),
            origin: (0..m).collect(),
            reduced: vec![Rat::zero(); ncols],
            objective: Rat::zero(),
            allowed: vec![true; ncols],
            rows,
            rhs,
            row_sign,
        })
    }

    fn ncols(&self) -> usize {
        self.reduced.len()
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].recip();
        if piv != Rat::one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &piv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &piv;
        }
        let prow = self.rows[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            let row = &mut self.rows[i];
            for &j in &nz {
                let t = &f * &prow[j];
                row[j] -= t;
            }
            if !prhs.is_zero() {
                self.rhs[i] -= &f * &prhs;
            }
        }
        let f = self.reduced[e].clone();
        if !f.is_zero() {
            for &j in &nz {
                let t = &f * &prow[j];
                self.reduced[j] -= t;
            }
            self.objective += &f * &prhs;
        }
        self.basis[r] = e;
    }

    /// Runs Bland's rule until optimal (`true`) or unbounded (`false`).
    fn optimize(&mut self) -> bool {
        loop {
            let Some(e) = (0..self.ncols()).find(|&j| self.allowed[j] && self.reduced[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, e),
            }
        }
    }

    fn phase_one(&mut self) -> PhaseOne {
        let n = self.ncols();
        let mut reduced = vec![Rat::zero(); n];
        for j in 0..self.art_start {
            let s: Rat = self.rows.iter().map(|r| &r[j]).sum();
            reduced[j] = -s;
        }
        self.reduced = reduced;
        self.objective = self.rhs.iter().sum();
        // phase one is bounded below by zero
        self.optimize();
        if self.objective.is_positive() {
            let m = self.row_sign.len();
            let multipliers = (0..m)
                .map(|i| {
                    let pi = Rat::one() - &self.reduced[self.art_start + i];
                    if self.row_sign[i] < 0 {
                        -pi
                    } else {
                        pi
                    }
                })
                .collect();
            return PhaseOne::Infeasible(FarkasCertificate { multipliers });
        }
        self.drive_out_artificials();
        PhaseOne::Feasible
    }

    fn drive_out_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.art_start {
                let col = (0..self.art_start).find(|&j| !self.rows[r][j].is_zero());
                match col {
                    Some(j) => self.pivot(r, j),
                    None => {
                        // linearly dependent row
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        self.origin.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for j in self.art_start..self.ncols() {
            self.allowed[j] = false;
        }
    }

    fn phase_two(&mut self, objective: &[Rat]) -> bool {
        let n = self.ncols();
        let mut cost = vec![Rat::zero(); n];
        for j in 0..self.num_vars {
            cost[self.pos_col[j]] = objective[j].clone();
            if let Some(nc) = self.neg_col[j] {
                cost[nc] = -&objective[j];
            }
        }
        let mut reduced = cost.clone();
        let mut value = Rat::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    reduced[j] -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.objective = value;
        self.optimize()
    }

    fn solution(&self) -> Vec<Rat> {
        let mut full = vec![Rat::zero(); self.ncols()];
        for (i, &b) in self.basis.iter().enumerate() {
            full[b] = self.rhs[i].clone();
        }
        (0..self.num_vars)
            .map(|j| match self.neg_col[j] {
                Some(nc) => &full[self.pos_col[j]] - &full[nc],
                None => full[self.pos_col[j]].clone(),
            })
            .collect()
    }
}
