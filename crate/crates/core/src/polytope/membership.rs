//! Exact local-model membership.

use crate::arith::{lp_feasible, minimize, Constraint, FarkasCertificate, Feasibility, LpOutcome, Rat};
use crate::error::{Error, Result};
use crate::inequality::BellInequality;
use crate::scenario::{Behavior, DeterministicStrategy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Convex weights on deterministic strategies (zero weights omitted).
    Local { weights: Vec<(DeterministicStrategy, Rat)> },
    /// A facet violated by the behavior, with the behavior's value and the
    /// Farkas certificate of the infeasible decomposition problem.
    NonLocal { inequality: BellInequality, value: Rat, farkas: FarkasCertificate },
}

impl Membership {
    pub fn is_local(&self) -> bool {
        matches!(self, Membership::Local { .. })
    }
}

/// Decides whether `b` is a convex mixture of deterministic behaviors.
///
/// When it is not, the separating inequality is a facet: it is an optimal
/// vertex of `min y · (1, b)` over functionals `y` that are nonnegative on
/// every vertex and normalized to 1 at the barycenter of the vertices.
pub fn membership(b: &Behavior) -> Result<Membership> {
    b.validate()?;
    let s = b.scenario();
    let strategies = DeterministicStrategy::enumerate(s);
    let vertices: Vec<Vec<i64>> = strategies.iter().map(|v| v.cg_vector(s)).collect();
    let target = b.to_cg().coords().to_vec();
    let d = s.cg_len();
    let n = vertices.len();

    let mut eqs = vec![Constraint::new(vec![Rat::one(); n], Rat::one())];
    for i in 0..d {
        eqs.push(Constraint::new(vertices.iter().map(|v| Rat::from_int(v[i])).collect(), target[i].clone()));
    }
    let nonneg: Vec<usize> = (0..n).collect();
    let farkas = match lp_feasible(n, &eqs, &[], &nonneg)? {
        Feasibility::Feasible(w) => {
            let weights = strategies.into_iter().zip(w).filter(|(_, w)| !w.is_zero()).collect();
            return Ok(Membership::Local { weights });
        }
        Feasibility::Infeasible(cert) => cert,
    };

    // y = (y0, y') with y0 + y' · v >= 0 at every vertex
    let homog = |x: &[Rat]| std::iter::once(Rat::one()).chain(x.iter().cloned()).collect::<Vec<_>>();
    let ineqs: Vec<Constraint> =
        vertices.iter().map(|v| Constraint::new(homog(&v.iter().map(|&c| Rat::from_int(c)).collect::<Vec<_>>()), Rat::zero())).collect();
    let count = Rat::from_int(n as i64);
    let barycenter: Vec<Rat> =
        (0..d).map(|i| &Rat::from_int(vertices.iter().map(|v| v[i]).sum::<i64>()) / &count).collect();
    let norm = vec![Constraint::new(homog(&barycenter), Rat::one())];
    let objective = homog(&target);
    let y = match minimize(&objective, &norm, &ineqs, &[])? {
        LpOutcome::Optimal { x, value } if value.is_negative() => x,
        other => return Err(Error::Internal(format!("separation problem ended with {other:?}"))),
    };
    let inequality = BellInequality::from_rational_ge(s, &y[1..], &-&y[0])?;
    let value = inequality.evaluate(b)?;
    if value <= Rat::from_int(inequality.bound()) || !inequality.is_valid() {
        return Err(Error::Internal("separating inequality failed verification".into()));
    }
    Ok(Membership::NonLocal { inequality, value, farkas })
}
