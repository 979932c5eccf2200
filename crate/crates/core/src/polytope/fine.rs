//! The local polytope of `[(2 2),(w_1 … w_n)]` as the projection of a
//! joint-distribution system.
//!
//! A behavior is local iff there are distributions `P(a_1 a_2 b|y)`, one per
//! second-party setting, that agree on `P(a_1 a_2)` and reproduce the
//! behavior as marginals. Writing everything in CG coordinates leaves one
//! unknown `P11 = P(a_1 = 1, a_2 = 1)` plus the partial sums
//! `S(b|y) = Σ_{b' <= b} P(1 1 b'|y)` for `b < w_y`; positivity of every
//! `P(a_1 a_2 b|y)` is the system. Eliminating the partial sums and then
//! `P11` yields the Bell inequalities.

use super::fm::{project, LinearSystem};
use crate::arith::{Constraint, Rat};
use crate::error::{Error, Result};
use crate::inequality::BellInequality;
use crate::scenario::Scenario;

fn check_shape(s: &Scenario) -> Result<()> {
    if s.num_parties() != 2 || s.parties()[0] != [2, 2] {
        return Err(Error::InvalidScenario(format!("{s}: the joint-distribution system needs a first party (2 2)")));
    }
    Ok(())
}

fn s_name(b: usize, y: usize) -> String {
    format!("S({}|{})", b + 1, y + 1)
}

/// Variables: the CG coordinates in CG order, then `P11`, then `S(b|y)`.
pub fn build_fine_system(s: &Scenario) -> Result<LinearSystem> {
    check_shape(s)?;
    let l = s.layout();
    let d = s.cg_len();
    let bob = s.parties()[1].clone();
    let mut names: Vec<String> = (0..d).map(|i| l.cg_label(i)).collect();
    names.push("P11".into());
    let mut s_index = Vec::new();
    for (y, &w) in bob.iter().enumerate() {
        s_index.push((0..w - 1).map(|b| names.len() + b).collect::<Vec<_>>());
        names.extend((0..w - 1).map(|b| s_name(b, y)));
    }
    let p11 = d;
    let nv = names.len();
    let cg = |term: [Option<(usize, usize)>; 2]| l.cg_index(&term).expect("CG term of a valid label");
    let pa = |x: usize| cg([Some((x, 0)), None]);
    let pb = |b: usize, y: usize| cg([None, Some((y, b))]);
    let pab = |x: usize, b: usize, y: usize| cg([Some((x, 0)), Some((y, b))]);

    let mut sys = LinearSystem::new(names);
    // `expr >= 0` from (index, coef) terms plus a constant
    let mut push = |terms: &[(usize, i64)], constant: i64| -> Result<()> {
        let mut coeffs = vec![Rat::zero(); nv];
        for &(i, c) in terms {
            coeffs[i] += Rat::from_int(c);
        }
        sys.add_ge(Constraint::new(coeffs, Rat::from_int(-constant)))
    };
    for (y, &w) in bob.iter().enumerate() {
        let sv = &s_index[y];
        for b in 0..w - 1 {
            // P(1 1 b|y) = S(b) − S(b−1)
            let mut p11b = vec![(sv[b], 1)];
            if b > 0 {
                p11b.push((sv[b - 1], -1));
            }
            let neg: Vec<(usize, i64)> = p11b.iter().map(|&(i, c)| (i, -c)).collect();
            push(&p11b, 0)?;
            push(&[&[(pab(0, b, y), 1)], &neg[..]].concat(), 0)?;
            push(&[&[(pab(1, b, y), 1)], &neg[..]].concat(), 0)?;
            push(&[&[(pb(b, y), 1), (pab(0, b, y), -1), (pab(1, b, y), -1)], &p11b[..]].concat(), 0)?;
        }
        // last outcome: P(1 1 w|y) = P11 − S(w−1)
        let last = sv[w - 2];
        let sum = |f: &dyn Fn(usize) -> usize, c: i64| (0..w - 1).map(|b| (f(b), c)).collect::<Vec<_>>();
        push(&[(p11, 1), (last, -1)], 0)?;
        push(&[&[(pa(0), 1), (p11, -1), (last, 1)], &sum(&|b| pab(0, b, y), -1)[..]].concat(), 0)?;
        push(&[&[(pa(1), 1), (p11, -1), (last, 1)], &sum(&|b| pab(1, b, y), -1)[..]].concat(), 0)?;
        push(
            &[
                &[(pa(0), -1), (pa(1), -1), (p11, 1), (last, -1)],
                &sum(&|b| pb(b, y), -1)[..],
                &sum(&|b| pab(0, b, y), 1)[..],
                &sum(&|b| pab(1, b, y), 1)[..],
            ]
            .concat(),
            1,
        )?;
    }
    Ok(sys)
}

/// `S(1|y), …, S(w_y − 1|y)` for each `y`, then `P11`.
pub fn fine_elimination_order(s: &Scenario) -> Result<Vec<String>> {
    check_shape(s)?;
    let mut order: Vec<String> =
        s.parties()[1].iter().enumerate().flat_map(|(y, &w)| (0..w - 1).map(move |b| s_name(b, y))).collect();
    order.push("P11".into());
    Ok(order)
}

/// Bell inequalities of `s` obtained by eliminating all auxiliary
/// variables, sorted by normal form.
pub fn fine_facets(s: &Scenario) -> Result<Vec<BellInequality>> {
    let sys = build_fine_system(s)?;
    let order = fine_elimination_order(s)?;
    let refs: Vec<&str> = order.iter().map(String::as_str).collect();
    let out = project(&sys, &refs)?;
    if !out.equalities.is_empty() {
        return Err(Error::Internal("projection kept an equality".into()));
    }
    let mut ineqs = out
        .inequalities
        .iter()
        .map(|c| BellInequality::from_rational_ge(s, &c.coeffs, &c.rhs))
        .collect::<Result<Vec<_>>>()?;
    ineqs.sort_by_cached_key(BellInequality::normal_form);
    Ok(ineqs)
}
