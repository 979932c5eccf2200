//! Facet enumeration by the double description method.
//!
//! Points `p` are homogenized to `(1, p)` and the cone of functionals
//! `h` with `h · (1, p) >= 0` for every point is built one point at a time,
//! starting from a simplex. Extreme rays of that cone are exactly the
//! facets `h_0 + h' · x >= 0` of the hull.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::certificate::Independent;
use crate::arith::{int_rank, primitive_integer_vector, RatMatrix};
use crate::error::{Error, Result};
use crate::inequality::{BellInequality, ClassId, Classifier, InequalityClass, Label};
use crate::scenario::{DeterministicStrategy, Scenario};

pub const DEFAULT_MAX_VERTICES: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCount {
    pub class: InequalityClass,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetEnumeration {
    pub scenario: Scenario,
    /// Normalized facets sorted by normal form.
    pub facets: Vec<BellInequality>,
    /// Sorted by label, then canonical form.
    pub classes: Vec<ClassCount>,
}

impl FacetEnumeration {
    pub fn count(&self, label: Label) -> usize {
        self.classes.iter().filter(|c| c.class.label == label).map(|c| c.multiplicity).sum()
    }

    pub fn nontrivial_classes(&self) -> impl Iterator<Item = &ClassCount> {
        self.classes.iter().filter(|c| c.class.label != Label::Positivity)
    }
}

pub fn dd_facets(s: &Scenario) -> Result<FacetEnumeration> {
    dd_facets_with(s, DEFAULT_MAX_VERTICES)
}

/// Facets of the local polytope of `s`; refuses scenarios with more than
/// `max_vertices` vertices.
pub fn dd_facets_with(s: &Scenario, max_vertices: usize) -> Result<FacetEnumeration> {
    let facets = local_facets(s, max_vertices)?;
    let classes = classify_facets(s, &facets)?;
    Ok(FacetEnumeration { scenario: s.clone(), facets, classes })
}

/// The facet list of [`dd_facets_with`] without classification, sorted by
/// normal form.
pub fn local_facets(s: &Scenario, max_vertices: usize) -> Result<Vec<BellInequality>> {
    let n = s.num_vertices();
    if n > max_vertices {
        return Err(Error::CapExceeded { what: "local vertices", count: n, cap: max_vertices });
    }
    let mut points: Vec<Vec<i64>> = DeterministicStrategy::enumerate(s).iter().map(|v| v.cg_vector(s)).collect();
    points.sort();
    let mut facets = facets_of_points(&points)?
        .into_iter()
        .map(|(a, b)| BellInequality::new(s.clone(), a, b))
        .collect::<Result<Vec<_>>>()?;
    facets.sort_by_cached_key(BellInequality::normal_form);
    Ok(facets)
}

/// Groups facets into relabeling classes, naming the known ones.
pub fn classify_facets(s: &Scenario, facets: &[BellInequality]) -> Result<Vec<ClassCount>> {
    let mut c = Classifier::standard(s)?;
    let mut counts: HashMap<ClassId, usize> = HashMap::new();
    for f in facets {
        *counts.entry(c.classify(f)?).or_default() += 1;
    }
    let mut out: Vec<ClassCount> =
        counts.into_iter().map(|(id, multiplicity)| ClassCount { class: c.class(id).clone(), multiplicity }).collect();
    out.sort_by_cached_key(|cc| (cc.class.label, cc.class.canonical.normal_form()));
    Ok(out)
}

struct Ray {
    h: Vec<i64>,
    zeros: FixedBitSet,
}

const PRIME: u64 = 2_147_483_647;

/// Rank modulo a prime; never exceeds the rank over the rationals.
fn rank_mod_p(rows: &[&[i64]], cols: usize) -> usize {
    let mut m: Vec<Vec<u64>> =
        rows.iter().map(|r| r.iter().map(|&v| v.rem_euclid(PRIME as i64) as u64).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        let inv = pow_mod(m[rank][c], PRIME - 2);
        let pivot: Vec<u64> = m[rank].iter().map(|&v| v * inv % PRIME).collect();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, &pv) in row.iter_mut().zip(&pivot) {
                *x = (*x + PRIME - f * pv % PRIME) % PRIME;
            }
        }
        m[rank] = pivot;
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    r
}

/// Two extreme rays are adjacent iff the constraints tight at both have
/// rank `D − 2`. The modular rank is a lower bound, so a hit is conclusive
/// and only misses need the exact computation.
fn adjacent(q: &[Vec<i64>], common: &FixedBitSet, target: usize) -> bool {
    let rows: Vec<&[i64]> = common.ones().map(|i| q[i].as_slice()).collect();
    let cols = q[0].len();
    if rank_mod_p(&rows, cols) == target {
        return true;
    }
    int_rank(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()) == target
}

fn combine(sp: i128, hn: &[i64], sn: i128, hp: &[i64]) -> Result<Vec<i64>> {
    let overflow = || Error::Overflow("double description ray");
    let raw = hn
        .iter()
        .zip(hp)
        .map(|(&a, &b)| {
            let x = sp.checked_mul(a as i128)?;
            let y = sn.checked_mul(b as i128)?;
            x.checked_sub(y)
        })
        .collect::<Option<Vec<i128>>>()
        .ok_or_else(overflow)?;
    let g = raw.iter().fold(0i128, |g, v| g.gcd(v));
    raw.iter().map(|v| i64::try_from(if g > 1 { v / g } else { *v }).map_err(|_| overflow())).collect()
}

fn dot(h: &[i64], q: &[i64]) -> i128 {
    h.iter().zip(q).map(|(&a, &b)| a as i128 * b as i128).sum()
}

/// Facets `a · x <= b` of the convex hull of full-dimensional integer
/// points, sorted by `(b, a)`. Points are inserted in the order given.
pub fn facets_of_points(points: &[Vec<i64>]) -> Result<Vec<(Vec<i64>, i64)>> {
    let first = points.first().ok_or_else(|| Error::Shape("no points".into()))?;
    let d = first.len();
    if points.iter().any(|p| p.len() != d) {
        return Err(Error::Shape("points of unequal length".into()));
    }
    let big = d + 1;
    let q: Vec<Vec<i64>> = points.iter().map(|p| std::iter::once(1).chain(p.iter().copied()).collect()).collect();

    let mut ind = Independent::new();
    let mut simplex = Vec::with_capacity(big);
    for (k, p) in points.iter().enumerate() {
        if ind.push(p) {
            simplex.push(k);
            if simplex.len() == big {
                break;
            }
        }
    }
    if simplex.len() < big {
        return Err(Error::Shape(format!("points span affine dimension {} in {d} coordinates", ind.rank() - 1)));
    }

    let n = points.len();
    let base = RatMatrix::from_int_rows(&simplex.iter().map(|&k| q[k].clone()).collect::<Vec<_>>())?;
    let inv = base.inverse()?;
    let mut rays: Vec<Ray> = (0..big)
        .map(|j| {
            let col: Vec<_> = (0..big).map(|i| inv[(i, j)].clone()).collect();
            let h = primitive_integer_vector(&col)
                .iter()
                .map(|v| v.to_i64().ok_or(Error::Overflow("initial simplex ray")))
                .collect::<Result<Vec<_>>>()?;
            let mut zeros = FixedBitSet::with_capacity(n);
            for (i, &k) in simplex.iter().enumerate() {
                if i != j {
                    zeros.insert(k);
                }
            }
            Ok(Ray { h, zeros })
        })
        .collect::<Result<_>>()?;

    let mut in_simplex = FixedBitSet::with_capacity(n);
    simplex.iter().for_each(|&k| in_simplex.insert(k));
    let target = big - 2;

    for k in (0..n).filter(|&k| !in_simplex.contains(k)) {
        let values: Vec<i128> = rays.par_iter().map(|r| dot(&r.h, &q[k])).collect();
        let (mut pos, mut zero, mut neg) = (Vec::new(), Vec::new(), Vec::new());
        for (r, &v) in rays.iter().zip(&values) {
            match v.signum() {
                1 => pos.push((r, v)),
                0 => zero.push(r),
                _ => neg.push((r, v)),
            }
        }
        if neg.is_empty() {
            for r in rays.iter_mut().zip(&values).filter(|(_, v)| **v == 0).map(|(r, _)| r) {
                r.zeros.insert(k);
            }
            continue;
        }
        let created: Vec<Ray> = pos
            .par_iter()
            .map(|(p, sp)| {
                let mut out = Vec::new();
                for (m, sn) in &neg {
                    let mut common = p.zeros.clone();
                    common.intersect_with(&m.zeros);
                    if common.count_ones(..) < target || !adjacent(&q, &common, target) {
                        continue;
                    }
                    let h = combine(*sp, &m.h, *sn, &p.h)?;
                    common.insert(k);
                    out.push(Ray { h, zeros: common });
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + zero.len() + created.len());
        next.extend(pos.iter().map(|(r, _)| Ray { h: r.h.clone(), zeros: r.zeros.clone() }));
        next.extend(zero.iter().map(|r| {
            let mut zeros = r.zeros.clone();
            zeros.insert(k);
            Ray { h: r.h.clone(), zeros }
        }));
        next.extend(created);
        rays = next;
    }

    let mut out: Vec<(Vec<i64>, i64)> = rays.into_iter().map(|r| (r.h[1..].iter().map(|v| -v).collect(), r.h[0])).collect();
    out.sort_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
    Ok(out)
}
