//! Irreducible components of graded module varieties at
//! representation-finite desk scale.
//!
//! Indecomposables are found by exhaustive enumeration of relation-
//! satisfying points over a small prime field, grouped up to isomorphism.
//! Orbit closures are ordered by hom-dimension comparison against every
//! indecomposable, the standard criterion at representation-finite type;
//! component representatives are the hom-minimal classes, cross-checked
//! against orbit dimensions. The presentation filter then keeps the
//! classes whose generic module lies in the image of the homology
//! projection.

use serde::Serialize;

use crate::algebra::{global_dimension, Algebra, DimVec};
use crate::complexes::StrataProfile;
use crate::error::Error;
use crate::matrix::Mat;
use crate::realization::{self, presentable, DimensionReport};
use crate::rep::{
    decompose, direct_sum, hom_basis, is_iso, minimal_presentation, validate_rep, Representation,
};
use crate::rng::Rng;
use crate::Result;

/// One indecomposable up to isomorphism.
#[derive(Clone, Debug)]
pub struct IndecompEntry {
    pub id: usize,
    pub name: String,
    pub rep: Representation,
    pub dims: DimVec,
    pub end_dim: usize,
    /// Minimal presentation multiplicities.
    pub p0: DimVec,
    pub p1: DimVec,
}

/// All indecomposables with dimension vector below a bound, with the full
/// pairwise hom-dimension matrix.
#[derive(Clone, Debug)]
pub struct IndecompTable {
    pub bound: DimVec,
    pub entries: Vec<IndecompEntry>,
    /// `hom[x][y] = dim Hom(entries[x], entries[y])`.
    pub hom: Vec<Vec<usize>>,
}

/// A multiset of indecomposables with its orbit data.
#[derive(Clone, Debug, Serialize)]
pub struct IsoClass {
    /// Multiplicity per table entry.
    pub counts: Vec<usize>,
    pub dims: DimVec,
    pub name: String,
    pub end_dim: i64,
    /// `sum_a h_a^2 - dim End`.
    pub orbit_dim: i64,
    pub presentation_ok: bool,
}

fn connected_support(alg: &Algebra, c: &DimVec) -> bool {
    let n = alg.vertices();
    let verts: Vec<usize> = (0..n).filter(|&a| c.get(a) > 0).collect();
    if verts.len() <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![verts[0]];
    seen[verts[0]] = true;
    while let Some(v) = stack.pop() {
        for arrow in &alg.quiver.arrows {
            for (x, y) in [(arrow.source, arrow.target), (arrow.target, arrow.source)] {
                if x == v && c.get(y) > 0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    verts.iter().all(|&v| seen[v])
}

fn coord_count(alg: &Algebra, c: &DimVec) -> u32 {
    alg.quiver
        .arrows
        .iter()
        .map(|a| (c.at(a.target) * c.at(a.source)) as u32)
        .sum()
}

/// Exhaustive enumeration of all indecomposables with dimension vector
/// `<= bound`, over the prime field of `alg`.
pub fn enumerate_indecomposables(
    alg: &Algebra,
    bound: &DimVec,
    budget: u128,
    seed: u64,
    trials: usize,
) -> Result<IndecompTable> {
    let p = alg.field.order().ok_or(Error::NeedPrimeField)?;
    let n = alg.vertices();

    // all nonzero dimension vectors under the bound, cheapest first
    let mut vectors = Vec::new();
    let mut cursor = DimVec::zeros(n);
    loop {
        // odometer over the box
        let mut t = 0;
        while t < n {
            cursor.0[t] += 1;
            if cursor.0[t] <= bound.get(t) {
                break;
            }
            cursor.0[t] = 0;
            t += 1;
        }
        if t == n {
            break;
        }
        if !cursor.is_zero() && connected_support(alg, &cursor) {
            vectors.push(cursor.clone());
        }
    }
    vectors.sort_by_key(|c| c.total());

    let mut needed: u128 = 0;
    for c in &vectors {
        needed = needed.saturating_add((p as u128).saturating_pow(coord_count(alg, c)));
    }
    if needed > budget {
        return Err(Error::EnumerationBudget { needed, budget });
    }

    let mut rng = Rng::new(seed);
    let mut entries: Vec<IndecompEntry> = Vec::new();
    for c in &vectors {
        let coords = coord_count(alg, c) as usize;
        let shapes: Vec<(usize, usize)> = alg
            .quiver
            .arrows
            .iter()
            .map(|a| (c.at(a.target), c.at(a.source)))
            .collect();
        // representatives found for this dimension vector, bucketed by a
        // cheap isomorphism invariant
        let mut reps: Vec<(Vec<usize>, usize, Representation)> = Vec::new();
        let mut digits = vec![0u64; coords];
        loop {
            let mut maps = Vec::with_capacity(shapes.len());
            let mut pos = 0;
            for &(rows, cols) in &shapes {
                let mut m = Mat::zeros(alg.field, rows, cols);
                for rr in 0..rows {
                    for cc in 0..cols {
                        m.set(rr, cc, crate::field::Scalar::Fp(digits[pos]));
                        pos += 1;
                    }
                }
                maps.push(m);
            }
            let cand = Representation {
                field: alg.field,
                dims: c.clone(),
                maps,
            };
            if validate_rep(alg, &cand).is_ok() {
                let ranks: Vec<usize> = cand.maps.iter().map(Mat::rank).collect();
                let end_dim = hom_basis(alg, &cand, &cand).len();
                let mut known = false;
                for (r2, e2, rep2) in reps.iter() {
                    if *r2 == ranks && *e2 == end_dim && is_iso(alg, rep2, &cand, &mut rng, trials)?
                    {
                        known = true;
                        break;
                    }
                }
                if !known {
                    reps.push((ranks, end_dim, cand));
                }
            }
            // advance the odometer
            let mut t = 0;
            while t < coords {
                digits[t] += 1;
                if digits[t] < p {
                    break;
                }
                digits[t] = 0;
                t += 1;
            }
            if t == coords {
                break;
            }
            if coords == 0 {
                break;
            }
        }
        for (_, end_dim, rep) in reps {
            if decompose(alg, &rep, &mut rng, trials)?.len() != 1 {
                continue;
            }
            let pres = minimal_presentation(alg, &rep);
            let id = entries.len();
            entries.push(IndecompEntry {
                id,
                name: String::new(),
                rep,
                dims: c.clone(),
                end_dim,
                p0: pres.p0,
                p1: pres.p1,
            });
        }
    }

    // canonical names: projectives, then simples, then numbered
    let mut extra = 0usize;
    let mut names = Vec::with_capacity(entries.len());
    for e in &entries {
        let mut name = None;
        for a in 0..n {
            let pa = alg.projective_rep(a);
            if pa.dims == e.dims && is_iso(alg, &pa, &e.rep, &mut rng, trials)? {
                name = Some(format!("P_{}", a + 1));
                break;
            }
        }
        if name.is_none() {
            for a in 0..n {
                if DimVec::unit(n, a) == e.dims {
                    name = Some(format!("S_{}", a + 1));
                    break;
                }
            }
        }
        names.push(name.unwrap_or_else(|| {
            extra += 1;
            format!("X_{extra}{}", e.dims)
        }));
    }
    for (e, name) in entries.iter_mut().zip(names) {
        e.name = name;
    }

    let mut hom = vec![vec![0usize; entries.len()]; entries.len()];
    for x in 0..entries.len() {
        for y in 0..entries.len() {
            hom[x][y] = hom_basis(alg, &entries[x].rep, &entries[y].rep).len();
        }
    }
    Ok(IndecompTable {
        bound: bound.clone(),
        entries,
        hom,
    })
}

impl IndecompTable {
    pub fn class_name(&self, counts: &[usize]) -> String {
        let mut parts = Vec::new();
        for (x, &c) in counts.iter().enumerate() {
            if c == 1 {
                parts.push(self.entries[x].name.clone());
            } else if c > 1 {
                parts.push(format!("{}^{}", self.entries[x].name, c));
            }
        }
        parts.sort();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Hom-dimension vector of a multiset against every table entry.
    pub fn hom_vector(&self, counts: &[usize]) -> Vec<usize> {
        (0..self.entries.len())
            .map(|x| {
                counts
                    .iter()
                    .enumerate()
                    .map(|(y, &c)| c * self.hom[x][y])
                    .sum()
            })
            .collect()
    }

    pub fn assemble(&self, alg: &Algebra, counts: &[usize]) -> Representation {
        let mut parts = Vec::new();
        for (x, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                parts.push(self.entries[x].rep.clone());
            }
        }
        if parts.is_empty() {
            return Representation::zero(alg);
        }
        direct_sum(alg, &parts).0
    }
}

/// All multisets of table entries with total dimension vector `h`.
/// Orbit dimension is `sum h_a^2 - dim End` with
/// `dim End = sum of pairwise hom dimensions`.
pub fn iso_classes_of(table: &IndecompTable, h: &DimVec) -> Result<Vec<IsoClass>> {
    if !h.le(&table.bound) {
        return Err(Error::TableBound {
            bound: table.bound.to_string(),
            requested: h.to_string(),
        });
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; table.entries.len()];
    fn rec(
        table: &IndecompTable,
        h: &DimVec,
        remaining: DimVec,
        from: usize,
        counts: &mut Vec<usize>,
        out: &mut Vec<IsoClass>,
    ) {
        if remaining.is_zero() {
            let end_dim: i64 = (0..table.entries.len())
                .flat_map(|x| (0..table.entries.len()).map(move |y| (x, y)))
                .map(|(x, y)| (counts[x] * counts[y] * table.hom[x][y]) as i64)
                .sum();
            let sq: i64 = (0..h.len()).map(|a| h.get(a) * h.get(a)).sum();
            out.push(IsoClass {
                counts: counts.clone(),
                dims: h.clone(),
                name: table.class_name(counts),
                end_dim,
                orbit_dim: sq - end_dim,
                presentation_ok: true,
            });
            return;
        }
        if from == table.entries.len() {
            return;
        }
        // multiplicity of entry `from`
        let mut mult = 0usize;
        let mut rest = remaining.clone();
        loop {
            counts[from] = mult;
            rec(table, h, rest.clone(), from + 1, counts, out);
            rest = rest.sub(&table.entries[from].dims);
            if !rest.is_nonneg() {
                break;
            }
            mult += 1;
        }
        counts[from] = 0;
    }
    rec(table, h, h.clone(), 0, &mut counts, &mut out);
    Ok(out)
}

/// Component representatives: the classes minimal in the hom order
/// (generic orbits have the fewest homs). Cross-checked against orbit
/// dimensions: nothing above a representative may have a larger orbit.
pub fn maximal_classes(table: &IndecompTable, classes: &[IsoClass]) -> Result<Vec<IsoClass>> {
    let vectors: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| table.hom_vector(&c.counts))
        .collect();
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            if i < j && vi == vj {
                return Err(Error::HomOrderInconsistent {
                    witness: format!(
                        "distinct classes {} and {} share all hom dimensions",
                        classes[i].name, classes[j].name
                    ),
                });
            }
        }
    }
    let le = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(x, y)| x <= y);
    let mut out = Vec::new();
    for (i, vi) in vectors.iter().enumerate() {
        let minimal = vectors
            .iter()
            .enumerate()
            .all(|(j, vj)| i == j || !(le(vj, vi) && vj != vi));
        if !minimal {
            continue;
        }
        // orbit-dimension consistency: classes above must not have bigger orbits
        for (j, vj) in vectors.iter().enumerate() {
            if i != j && le(vi, vj) && classes[j].orbit_dim > classes[i].orbit_dim {
                return Err(Error::HomOrderInconsistent {
                    witness: format!(
                        "{} degenerates to {} but the orbit grows ({} -> {})",
                        classes[i].name,
                        classes[j].name,
                        classes[i].orbit_dim,
                        classes[j].orbit_dim
                    ),
                });
            }
        }
        out.push(classes[i].clone());
    }
    Ok(out)
}

/// Per-degree component data of the presentable locus.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeComponents {
    pub degree: i64,
    pub h: DimVec,
    /// Component count of the whole module variety at this degree, when it
    /// was enumerated (`None` for the forced-projective shortcut).
    pub maximal_count: Option<usize>,
    /// Hom-minimal classes with their presentation verdicts.
    pub classes: Vec<IsoClass>,
    pub filtered_count: usize,
}

/// Component report for the presentable locus and, through the component
/// bijection, for the rank stratum of the complex variety.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    pub per_degree: Vec<DegreeComponents>,
    pub total: u128,
}

/// Enumerate components degreewise and multiply the filtered counts.
///
/// `alg` must be over a prime field (use a small one: the search is
/// exhaustive). Degrees with no presentation source (`d_i = 0`) force the
/// homology to be the projective `P^{m_i}`, a single orbit, so they are
/// not enumerated.
pub fn components_presentable(
    alg: &Algebra,
    profile: &StrataProfile,
    budget: u128,
    seed: u64,
    trials: usize,
) -> Result<ComponentReport> {
    profile.require_feasible()?;
    let n = alg.vertices();
    let mut need_table: Vec<i64> = Vec::new();
    let mut bound = DimVec::zeros(n);
    for i in profile.hull() {
        let h_i = profile.h_at(i);
        if !h_i.is_zero() && !profile.d.get(i).is_zero() {
            bound = bound.sup(&h_i);
            need_table.push(i);
        }
    }
    let table = if need_table.is_empty() {
        None
    } else {
        Some(enumerate_indecomposables(
            alg, &bound, budget, seed, trials,
        )?)
    };

    let mut per_degree = Vec::new();
    let mut total: u128 = 1;
    for i in profile.hull() {
        let h_i = profile.h_at(i);
        let d_i = profile.d.get(i);
        let m_i = profile.m_at(i).ok_or(Error::InfeasibleProfile {
            reason: format!("no kernel multiplicities at degree {i}"),
        })?;
        let dc = if h_i.is_zero() {
            DegreeComponents {
                degree: i,
                h: h_i,
                maximal_count: None,
                classes: vec![IsoClass {
                    counts: vec![],
                    dims: DimVec::zeros(n),
                    name: "0".into(),
                    end_dim: 0,
                    orbit_dim: 0,
                    presentation_ok: true,
                }],
                filtered_count: 1,
            }
        } else if d_i.is_zero() {
            // forced projective: the stratum is the single orbit of P^{m_i}
            let sq: i64 = (0..n).map(|a| h_i.get(a) * h_i.get(a)).sum();
            let end: i64 = m_i.dot(&profile.k_at(i));
            let name = {
                let parts: Vec<String> = (0..n)
                    .filter(|&a| m_i.get(a) > 0)
                    .map(|a| {
                        if m_i.get(a) == 1 {
                            format!("P_{}", a + 1)
                        } else {
                            format!("P_{}^{}", a + 1, m_i.get(a))
                        }
                    })
                    .collect();
                parts.join(" + ")
            };
            DegreeComponents {
                degree: i,
                h: h_i.clone(),
                maximal_count: None,
                classes: vec![IsoClass {
                    counts: vec![],
                    dims: h_i,
                    name,
                    end_dim: end,
                    orbit_dim: sq - end,
                    presentation_ok: true,
                }],
                filtered_count: 1,
            }
        } else {
            let table = table.as_ref().expect("built above");
            let classes = iso_classes_of(table, &h_i)?;
            let maximal = maximal_classes(table, &classes)?;
            let mut kept = Vec::new();
            let mut filtered = 0usize;
            for mut class in maximal {
                let rep = table.assemble(alg, &class.counts);
                class.presentation_ok = presentable(alg, &rep, &m_i, &d_i);
                if class.presentation_ok {
                    filtered += 1;
                }
                kept.push(class);
            }
            DegreeComponents {
                degree: i,
                h: h_i,
                maximal_count: Some(kept.len()),
                classes: kept,
                filtered_count: filtered,
            }
        };
        total = total.saturating_mul(dc.filtered_count as u128);
        per_degree.push(dc);
    }
    Ok(ComponentReport { per_degree, total })
}

/// Report for hereditary algebras: the module variety is a single affine
/// space, so every nonempty stratum is irreducible and its dimension comes
/// straight off the bundle chain.
#[derive(Clone, Debug, Serialize)]
pub struct HereditaryReport {
    pub rep_h_dim_per_degree: Vec<(i64, i64)>,
    pub rep_h_dim: i64,
    pub component_count: usize,
    pub stratum_dim: i64,
    pub dims: DimensionReport,
}

pub fn hereditary_report(alg: &Algebra, profile: &StrataProfile) -> Result<HereditaryReport> {
    let gd = global_dimension(alg, 8);
    if !gd.at_most(1) {
        return Err(Error::NotHereditary {
            gldim: gd.to_string(),
        });
    }
    profile.require_feasible()?;
    let mut per_degree = Vec::new();
    let mut total = 0i64;
    for i in profile.hull() {
        let h = profile.h_at(i);
        let dim: i64 = alg
            .quiver
            .arrows
            .iter()
            .map(|a| h.get(a.source) * h.get(a.target))
            .sum();
        per_degree.push((i, dim));
        total += dim;
    }
    let dims = realization::dimension_report(profile, &[total])?;
    Ok(HereditaryReport {
        rep_h_dim_per_degree: per_degree,
        rep_h_dim: total,
        component_count: 1,
        stratum_dim: dims.per_component[0].stratum_chain,
        dims,
    })
}
