//! Fourier–Motzkin elimination and LP-based redundancy removal.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::arith::{lp_feasible, primitive_integer_vector, Constraint, Feasibility, Rat};
use crate::error::{Error, Result};

/// Named variables with equalities `coeffs · x = rhs` and inequalities
/// `coeffs · x >= rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub variables: Vec<String>,
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = S>) -> Self {
        LinearSystem { variables: variables.into_iter().map(Into::into).collect(), equalities: Vec::new(), inequalities: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.variables.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.to_owned()))
    }

    fn check(&self, c: &Constraint) -> Result<()> {
        if c.coeffs.len() != self.num_vars() {
            return Err(Error::Shape(format!("{} coefficients for {} variables", c.coeffs.len(), self.num_vars())));
        }
        Ok(())
    }

    pub fn add_ge(&mut self, c: Constraint) -> Result<()> {
        self.check(&c)?;
        self.inequalities.push(c);
        Ok(())
    }

    pub fn add_eq(&mut self, c: Constraint) -> Result<()> {
        self.check(&c)?;
        self.equalities.push(c);
        Ok(())
    }

    /// Adds `Σ coef · var >= rhs` from `(name, coef)` pairs.
    pub fn add_ge_named(&mut self, terms: &[(&str, i64)], rhs: i64) -> Result<()> {
        let mut coeffs = vec![Rat::zero(); self.num_vars()];
        for (name, c) in terms {
            coeffs[self.var_index(name)?] += Rat::from_int(*c);
        }
        self.add_ge(Constraint::new(coeffs, Rat::from_int(rhs)))
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.num_vars()
            && self.equalities.iter().all(|c| c.lhs(x) == c.rhs)
            && self.inequalities.iter().all(|c| c.lhs(x) >= c.rhs)
    }

    fn without_var(&self, j: usize) -> Vec<String> {
        let mut v = self.variables.clone();
        v.remove(j);
        v
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |c: &Constraint, rel: &str| {
            let terms: Vec<String> = c
                .coeffs
                .iter()
                .zip(&self.variables)
                .filter(|(a, _)| !a.is_zero())
                .map(|(a, v)| format!("{a} {v}"))
                .collect();
            let lhs = if terms.is_empty() { "0".to_owned() } else { terms.join(" + ") };
            format!("{lhs} {rel} {}", c.rhs)
        };
        for c in &self.equalities {
            writeln!(f, "{}", render(c, "="))?;
        }
        for c in &self.inequalities {
            writeln!(f, "{}", render(c, ">="))?;
        }
        Ok(())
    }
}

fn drop_coeff(c: &Constraint, j: usize) -> Constraint {
    let mut coeffs = c.coeffs.clone();
    coeffs.remove(j);
    Constraint::new(coeffs, c.rhs.clone())
}

/// `alpha · a + beta · b`.
fn combine(alpha: &Rat, a: &Constraint, beta: &Rat, b: &Constraint) -> Constraint {
    let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| &(alpha * x) + &(beta * y)).collect();
    Constraint::new(coeffs, &(alpha * &a.rhs) + &(beta * &b.rhs))
}

/// Projects out `var`. An equality containing it is used for substitution;
/// otherwise every lower bound is combined with every upper bound. Vacuous
/// constraints are kept (see [`remove_redundant`]).
pub fn fm_eliminate(sys: &LinearSystem, var: &str) -> Result<LinearSystem> {
    let j = sys.var_index(var)?;
    let variables = sys.without_var(j);
    if let Some(k) = sys.equalities.iter().position(|c| !c.coeffs[j].is_zero()) {
        let pivot = &sys.equalities[k];
        let inv = pivot.coeffs[j].recip();
        let subst = |c: &Constraint| {
            if c.coeffs[j].is_zero() {
                return drop_coeff(c, j);
            }
            let f = -&(&c.coeffs[j] * &inv);
            drop_coeff(&combine(&Rat::one(), c, &f, pivot), j)
        };
        let equalities = sys.equalities.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| subst(c)).collect();
        let inequalities = sys.inequalities.iter().map(subst).collect();
        return Ok(LinearSystem { variables, equalities, inequalities });
    }
    let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for c in &sys.inequalities {
        match c.coeffs[j].signum() {
            1 => lower.push(c),
            -1 => upper.push(c),
            _ => rest.push(drop_coeff(c, j)),
        }
    }
    let combos: Vec<Constraint> = lower
        .par_iter()
        .flat_map_iter(|lo| {
            upper.iter().map(move |up| {
                // positive multipliers cancel the coefficient of var
                let c = combine(&-&up.coeffs[j], lo, &lo.coeffs[j], up);
                drop_coeff(&c, j)
            })
        })
        .collect();
    rest.extend(combos);
    let equalities = sys.equalities.iter().map(|c| drop_coeff(c, j)).collect();
    Ok(LinearSystem { variables, equalities, inequalities: rest })
}

/// Integer-scaled key `(coeffs, rhs)` with gcd 1 over the coefficients.
fn normalize(c: &Constraint) -> (Vec<BigInt>, Rat) {
    let ints = primitive_integer_vector(&c.coeffs);
    // the same positive factor applied to the rhs
    let scale = c.coeffs.iter().zip(&ints).find(|(a, _)| !a.is_zero()).map(|(a, i)| &Rat::from_bigint(i.clone()) / a);
    match scale {
        Some(f) => (ints, &c.rhs * &f),
        None => (ints, c.rhs.clone()),
    }
}

fn from_key(coeffs: &[BigInt], rhs: &Rat) -> Constraint {
    Constraint::new(coeffs.iter().map(|v| Rat::from_bigint(v.clone())).collect(), rhs.clone())
}

fn infeasible(variables: Vec<String>) -> LinearSystem {
    let n = variables.len();
    LinearSystem {
        variables,
        equalities: Vec::new(),
        inequalities: vec![Constraint::new(vec![Rat::zero(); n], Rat::one())],
    }
}

/// Whether `c` follows from the (feasible) system `eqs`, `ineqs`: by LP
/// duality, iff `c = Σ u_k eq_k + Σ y_i ineq_i` with `y >= 0` and
/// `Σ u_k e_k + Σ y_i g_i >= rhs(c)`. The multiplier problem has one row
/// per variable, far fewer than the number of constraints.
fn implied(c: &Constraint, eqs: &[Constraint], ineqs: &[Constraint]) -> Result<bool> {
    let rows: Vec<&Constraint> = eqs.iter().chain(ineqs).collect();
    let m = rows.len();
    let n = c.coeffs.len();
    let eq_rows: Vec<Constraint> =
        (0..n).map(|j| Constraint::new(rows.iter().map(|r| r.coeffs[j].clone()).collect(), c.coeffs[j].clone())).collect();
    let bound = Constraint::new(rows.iter().map(|r| r.rhs.clone()).collect(), c.rhs.clone());
    let nonneg: Vec<usize> = (eqs.len()..m).collect();
    Ok(matches!(lp_feasible(m, &eq_rows, &[bound], &nonneg)?, Feasibility::Feasible(_)))
}

/// Drops every inequality implied by the others. Coefficients are scaled to
/// primitive integers; the output is sorted. An infeasible system becomes
/// the single constraint `0 >= 1`.
pub fn remove_redundant(sys: &LinearSystem) -> Result<LinearSystem> {
    let n = sys.num_vars();
    // strongest rhs per direction
    let mut by_dir: BTreeMap<Vec<BigInt>, Rat> = BTreeMap::new();
    for c in &sys.inequalities {
        let (dir, rhs) = normalize(c);
        if dir.iter().all(|v| v.sign() == num_bigint::Sign::NoSign) {
            if rhs.is_positive() {
                return Ok(infeasible(sys.variables.clone()));
            }
            continue;
        }
        by_dir.entry(dir).and_modify(|r| if rhs > *r { *r = rhs.clone() }).or_insert(rhs);
    }
    let mut eqs: Vec<Constraint> = Vec::new();
    for c in &sys.equalities {
        let (dir, rhs) = normalize(c);
        if dir.iter().all(|v| v.sign() == num_bigint::Sign::NoSign) {
            if !rhs.is_zero() {
                return Ok(infeasible(sys.variables.clone()));
            }
            continue;
        }
        eqs.push(from_key(&dir, &rhs));
    }
    eqs.sort_by(|a, b| (&a.coeffs, &a.rhs).cmp(&(&b.coeffs, &b.rhs)));
    eqs.dedup();

    let mut kept: Vec<Constraint> = by_dir.iter().map(|(d, r)| from_key(d, r)).collect();
    if let Feasibility::Infeasible(_) = lp_feasible(n, &eqs, &kept, &[])? {
        return Ok(infeasible(sys.variables.clone()));
    }
    let mut i = 0;
    while i < kept.len() {
        let c = kept.remove(i);
        if !implied(&c, &eqs, &kept)? {
            kept.insert(i, c);
            i += 1;
        }
    }
    Ok(LinearSystem { variables: sys.variables.clone(), equalities: eqs, inequalities: kept })
}

/// Eliminates `vars` in order, removing redundancy after every step.
pub fn project(sys: &LinearSystem, vars: &[&str]) -> Result<LinearSystem> {
    let mut cur = remove_redundant(sys)?;
    for v in vars {
        cur = remove_redundant(&fm_eliminate(&cur, v)?)?;
    }
    Ok(cur)
}
