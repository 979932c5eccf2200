//! Randomized generators and brute-force oracles shared by the property
//! suites.
#![allow(dead_code)]

use bellpoly_core::arith::{lp_feasible, minimize, Constraint, Feasibility, LpOutcome, Rat};
use bellpoly_core::inequality::{BellInequality, Relabeling};
use bellpoly_core::polytope::{facets_of_points, fm_eliminate, membership, remove_redundant, LinearSystem, Membership};
use bellpoly_core::scenario::{Behavior, DeterministicStrategy, Scenario};
use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;

/// Bounded, full-dimensional system: the box `|x_i| <= 2` plus random
/// `a · x >= -c` with `c > 0`, so the origin is interior.
pub fn random_system<R: Rng>(rng: &mut R, num_vars: usize, extra: usize) -> LinearSystem {
    let mut sys = LinearSystem::new((0..num_vars).map(|i| format!("x{}", i + 1)));
    for i in 0..num_vars {
        for sign in [1, -1] {
            let mut a = vec![0; num_vars];
            a[i] = sign;
            sys.add_ge(Constraint::from_ints(&a, -2)).unwrap();
        }
    }
    for _ in 0..extra {
        let a: Vec<i64> = (0..num_vars).map(|_| rng.gen_range(-3..=3)).collect();
        if a.iter().all(|&v| v == 0) {
            continue;
        }
        sys.add_ge(Constraint::from_ints(&a, -rng.gen_range(1..=4))).unwrap();
    }
    sys
}

fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn int_row(c: &Constraint) -> (Vec<i128>, i128) {
    let a = c.coeffs.iter().map(|v| v.to_i64().expect("integer test data") as i128).collect();
    (a, c.rhs.to_i64().expect("integer test data") as i128)
}

/// Vertices of an inequality-only system, by solving every square subsystem
/// with Cramer's rule.
pub fn brute_force_vertices(sys: &LinearSystem) -> Vec<Vec<Rat>> {
    let n = sys.num_vars();
    let rows: Vec<(Vec<i128>, i128)> = sys.inequalities.iter().map(int_row).collect();
    let mut out = Vec::new();
    for subset in (0..rows.len()).combinations(n) {
        let a: Vec<Vec<i128>> = subset.iter().map(|&r| rows[r].0.clone()).collect();
        let d = det(a.clone());
        if d == 0 {
            continue;
        }
        let nums: Vec<i128> = (0..n)
            .map(|j| {
                let mut aj = a.clone();
                for (row, &r) in aj.iter_mut().zip(&subset) {
                    row[j] = rows[r].1;
                }
                det(aj)
            })
            .collect();
        // x = nums / d; check a·x >= b as a·nums >= b·d for d > 0
        let (nums, d) = if d < 0 { (nums.iter().map(|v| -v).collect::<Vec<_>>(), -d) } else { (nums, d) };
        let feasible = rows.iter().all(|(a, b)| a.iter().zip(&nums).map(|(x, y)| x * y).sum::<i128>() >= b * d);
        if feasible {
            out.push(nums.iter().map(|&v| Rat::new(v as i64, d as i64)).collect());
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Primitive integer direction with the rhs scaled to match.
pub fn normalized(c: &Constraint) -> (Vec<i64>, Rat) {
    let l = c.coeffs.iter().fold(1i64, |l, v| l.lcm(&v.denom().try_into().unwrap()));
    let ints: Vec<i64> = c.coeffs.iter().map(|v| (v * &Rat::from_int(l)).to_i64().unwrap()).collect();
    let g = ints.iter().fold(0i64, |g, v| g.gcd(v));
    let scale = Rat::new(l, g);
    (ints.iter().map(|v| v / g).collect(), &c.rhs * &scale)
}

/// Facets of the projection of `sys` onto the variables it keeps after
/// eliminating the first `eliminate` ones, as `a · x >= b` over the kept
/// variables. `None` when the scaled points leave the range of the integer
/// enumeration.
pub fn projection_oracle(sys: &LinearSystem, eliminate: usize) -> Option<Vec<(Vec<i64>, Rat)>> {
    let verts = brute_force_vertices(sys);
    let kept: Vec<Vec<Rat>> = verts.iter().map(|v| v[eliminate..].to_vec()).collect();
    let l = kept.iter().flatten().fold(BigInt::one(), |l, v| l.lcm(&v.denom()));
    let l = l.to_i64()?;
    let scale = Rat::from_int(l);
    let mut pts: Vec<Vec<i64>> =
        kept.iter().map(|p| p.iter().map(|v| (v * &scale).to_i64()).collect::<Option<Vec<_>>>()).collect::<Option<_>>()?;
    pts.sort();
    pts.dedup();
    let facets = facets_of_points(&pts).ok()?;
    // a · (l x) <= b  <=>  -a · x >= -b / l
    let mut out: Vec<(Vec<i64>, Rat)> = facets
        .into_iter()
        .map(|(a, b)| {
            normalized(&Constraint::new(a.iter().map(|&v| Rat::from_int(-v)).collect(), Rat::new(-b, l)))
        })
        .collect();
    out.sort();
    Some(out)
}

/// Eliminates the first `eliminate` variables one by one.
pub fn fm_projection(sys: &LinearSystem, eliminate: usize) -> LinearSystem {
    let mut cur = sys.clone();
    for v in 0..eliminate {
        cur = remove_redundant(&fm_eliminate(&cur, &format!("x{}", v + 1)).unwrap()).unwrap();
    }
    cur
}

/// `a · x >= b` holds on every point of `sys`.
pub fn implied(sys: &LinearSystem, c: &Constraint) -> bool {
    match minimize(&c.coeffs, &sys.equalities, &sys.inequalities, &[]).unwrap() {
        LpOutcome::Optimal { value, .. } => value >= c.rhs,
        LpOutcome::Infeasible(_) => true,
        LpOutcome::Unbounded => false,
    }
}

/// Compares FM elimination and the vertex oracle on one random system.
/// Returns `Err` with a description on disagreement, `Ok(false)` when the
/// case was skipped.
pub fn oracle_case<R: Rng>(rng: &mut R) -> Result<bool, String> {
    let n = rng.gen_range(2..=6);
    let extra = rng.gen_range(0..=(20 - 2 * n));
    let sys = random_system(rng, n, extra);
    let eliminate = rng.gen_range(1..n);
    let Some(oracle) = projection_oracle(&sys, eliminate) else { return Ok(false) };
    let fm = fm_projection(&sys, eliminate);
    if !fm.equalities.is_empty() {
        return Err(format!("equality survived on\n{sys}"));
    }
    let mut got: Vec<(Vec<i64>, Rat)> = fm.inequalities.iter().map(normalized).collect();
    got.sort();
    let mut oracle_sys = LinearSystem::new(fm.variables.clone());
    for (a, b) in &oracle {
        oracle_sys.add_ge(Constraint::new(a.iter().map(|&v| Rat::from_int(v)).collect(), b.clone())).unwrap();
    }
    for c in &fm.inequalities {
        if !implied(&oracle_sys, c) {
            return Err(format!("FM constraint not implied by the oracle on\n{sys}"));
        }
    }
    for c in &oracle_sys.inequalities {
        if !implied(&fm, c) {
            return Err(format!("oracle facet not implied by FM on\n{sys}"));
        }
    }
    if got != oracle {
        return Err(format!("irredundant systems differ on\n{sys}\nfm: {got:?}\noracle: {oracle:?}"));
    }
    Ok(true)
}

/// A uniformly random relabeling of `s`.
pub fn random_relabeling<R: Rng>(rng: &mut R, s: &Scenario) -> Relabeling {
    let n = s.num_parties();
    let mut parties: Vec<usize> = (0..n).collect();
    // shuffle within groups of parties with equal sorted setting profiles
    let profile = |p: usize| {
        let mut v = s.parties()[p].clone();
        v.sort();
        v
    };
    for _ in 0..4 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if profile(parties[i]) == profile(parties[j]) {
            parties.swap(i, j);
        }
    }
    let mut settings = Vec::new();
    let mut outcomes = Vec::new();
    for p in 0..n {
        let q = parties[p];
        let src = &s.parties()[p];
        let dst = &s.parties()[q];
        // send settings of each outcome count to a random matching setting
        let mut map = vec![usize::MAX; src.len()];
        let mut counts: Vec<usize> = src.clone();
        counts.sort();
        counts.dedup();
        for o in counts {
            let from: Vec<usize> = (0..src.len()).filter(|&x| src[x] == o).collect();
            let mut to: Vec<usize> = (0..dst.len()).filter(|&y| dst[y] == o).collect();
            to.shuffle(rng);
            for (x, y) in from.into_iter().zip(to) {
                map[x] = y;
            }
        }
        outcomes.push(
            src.iter()
                .map(|&o| {
                    let mut perm: Vec<usize> = (0..o).collect();
                    perm.shuffle(rng);
                    perm
                })
                .collect(),
        );
        settings.push(map);
    }
    let r = Relabeling { parties, settings, outcomes };
    r.validate(s).expect("generated relabeling is valid");
    r
}

/// A random valid inequality: small integer CG coefficients with the local
/// maximum as bound.
pub fn random_inequality<R: Rng>(rng: &mut R, s: &Scenario) -> BellInequality {
    loop {
        let coeffs: Vec<i64> = (0..s.cg_len()).map(|_| if rng.gen_bool(0.5) { rng.gen_range(-2..=2) } else { 0 }).collect();
        if coeffs.iter().any(|&c| c != 0) {
            let probe = BellInequality::new(s.clone(), coeffs.clone(), 0).unwrap();
            return BellInequality::new(s.clone(), coeffs, probe.local_max()).unwrap();
        }
    }
}

/// A random mixture of deterministic behaviors, optionally with a PR box
/// component on the first two settings and outcomes.
pub fn random_behavior<R: Rng>(rng: &mut R, s: &Scenario) -> Behavior {
    let strategies = DeterministicStrategy::enumerate(s);
    let mut parts: Vec<(Rat, Behavior)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let st = strategies.choose(rng).unwrap();
            (Rat::from_int(rng.gen_range(1..=5)), Behavior::deterministic(s, st))
        })
        .collect();
    if s.num_parties() == 2 && rng.gen_bool(0.6) {
        parts.push((Rat::from_int(rng.gen_range(1..=12)), pr_box(s)));
    }
    let total: Rat = parts.iter().map(|(w, _)| w.clone()).sum();
    let parts: Vec<(Rat, Behavior)> = parts.into_iter().map(|(w, b)| (&w / &total, b)).collect();
    Behavior::mixture(s, &parts).unwrap()
}

/// PR correlations on settings 1, 2 and outcomes 1, 2 of a bipartite
/// scenario; outcomes beyond the second are never produced.
pub fn pr_box(s: &Scenario) -> Behavior {
    let l = s.layout();
    let table = (0..l.full_len())
        .map(|e| {
            let (xs, as_) = l.entry(e);
            let (x, y) = (xs[0].min(1), xs[1].min(1));
            let both_low = as_[0] < 2 && as_[1] < 2;
            // settings beyond the second reuse the second setting's correlations
            if both_low && (as_[0] ^ as_[1]) == x * y {
                Rat::new(1, 2)
            } else {
                Rat::zero()
            }
        })
        .collect();
    Behavior::new(s.clone(), table).unwrap()
}

/// Re-verifies a membership answer from scratch.
pub fn check_membership(b: &Behavior) -> Result<bool, String> {
    let s = b.scenario();
    match membership(b).map_err(|e| e.to_string())? {
        Membership::Local { weights } => {
            if weights.iter().any(|(_, w)| !w.is_positive()) {
                return Err("nonpositive weight".into());
            }
            let parts: Vec<(Rat, Behavior)> =
                weights.iter().map(|(v, w)| (w.clone(), Behavior::deterministic(s, v))).collect();
            if weights.iter().map(|(_, w)| w.clone()).sum::<Rat>() != Rat::one() {
                return Err("weights do not sum to 1".into());
            }
            if Behavior::mixture(s, &parts).map_err(|e| e.to_string())? != *b {
                return Err("weights do not reproduce the behavior".into());
            }
            Ok(true)
        }
        Membership::NonLocal { inequality, value, farkas } => {
            if inequality.evaluate(b).map_err(|e| e.to_string())? != value || value <= Rat::from_int(inequality.bound()) {
                return Err(format!("reported value {value} does not violate {inequality}"));
            }
            if !inequality.is_valid() {
                return Err(format!("{inequality} is not valid on the local polytope"));
            }
            // rebuild the convex-decomposition system the certificate refutes
            let vertices: Vec<Vec<i64>> = DeterministicStrategy::enumerate(s).iter().map(|v| v.cg_vector(s)).collect();
            let target = b.to_cg();
            let n = vertices.len();
            let mut eqs = vec![Constraint::new(vec![Rat::one(); n], Rat::one())];
            for i in 0..s.cg_len() {
                eqs.push(Constraint::new(vertices.iter().map(|v| Rat::from_int(v[i])).collect(), target.coords()[i].clone()));
            }
            let nonneg: Vec<usize> = (0..n).collect();
            if !farkas.verify(n, &eqs, &[], &nonneg) {
                return Err("Farkas certificate does not verify".into());
            }
            if matches!(lp_feasible(n, &eqs, &[], &nonneg).unwrap(), Feasibility::Feasible(_)) {
                return Err("decomposition is feasible".into());
            }
            Ok(false)
        }
    }
}

/// A random joint distribution; about a third of the entries are zero so
/// that vanishing first-party marginals occur.
pub fn random_joint<R: Rng>(rng: &mut R, s: &Scenario) -> bellpoly_core::scenario::JointDistribution {
    let n = s.num_vertices();
    let mut w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.35) { 0 } else { rng.gen_range(1..=9) }).collect();
    if w.iter().all(|&v| v == 0) {
        w[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = w.iter().sum();
    bellpoly_core::scenario::JointDistribution::new(s.clone(), w.iter().map(|&v| Rat::new(v, total)).collect()).unwrap()
}

/// Marginalizes a random joint, reconstructs it and compares per-setting
/// tables and behaviors exactly.
pub fn fine_lemma_case<R: Rng>(rng: &mut R, s: &Scenario) -> Result<(), String> {
    use bellpoly_core::scenario::{per_setting_marginals, reconstruct_joint};
    let d = random_joint(rng, s);
    let tables = per_setting_marginals(&d).map_err(|e| e.to_string())?;
    let rebuilt = reconstruct_joint(&tables, s).map_err(|e| e.to_string())?;
    if per_setting_marginals(&rebuilt).map_err(|e| e.to_string())? != tables {
        return Err(format!("per-setting marginals differ for {:?}", d.probs()));
    }
    if rebuilt.to_behavior() != d.to_behavior() {
        return Err(format!("behaviors differ for {:?}", d.probs()));
    }
    Ok(())
}
