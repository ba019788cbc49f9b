//! Bound quiver algebras `kQ/I`: normal-form path bases, projective
//! indecomposables, the Cartan matrix and global dimension.
//!
//! The path basis is computed by truncated elimination: all paths up to a
//! length cap are enumerated, the two-sided ideal generated by the relations
//! is spanned inside that truncation, and one row reduction per
//! (source, target) pair yields normal forms. Admissibility is checked, not
//! assumed: the smallest length `N` at which every path reduces to zero is
//! recorded, and construction fails if no such `N <= cap` exists.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::matrix::Mat;
use crate::rep::{self, Representation};
use crate::Result;

/// Guard against runaway path enumeration on cyclic quivers.
const MAX_PATHS: usize = 500_000;

/// Vertex-indexed integer vector. Components may go negative in profile
/// arithmetic; representation dimensions keep them nonnegative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub struct DimVec(pub Vec<i64>);

impl DimVec {
    pub fn zeros(n: usize) -> DimVec {
        DimVec(vec![0; n])
    }

    pub fn unit(n: usize, a: usize) -> DimVec {
        let mut v = vec![0; n];
        v[a] = 1;
        DimVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, a: usize) -> i64 {
        self.0[a]
    }

    pub fn at(&self, a: usize) -> usize {
        debug_assert!(self.0[a] >= 0);
        self.0[a] as usize
    }

    pub fn add(&self, other: &DimVec) -> DimVec {
        DimVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DimVec) -> DimVec {
        DimVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn dot(&self, other: &DimVec) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// Componentwise `<=`.
    pub fn le(&self, other: &DimVec) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn sup(&self, other: &DimVec) -> DimVec {
        DimVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }
}

impl fmt::Display for DimVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: usize,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn validate(&self) -> Result<()> {
        for a in &self.arrows {
            if a.source >= self.vertices || a.target >= self.vertices {
                return Err(Error::BadQuiver(format!(
                    "arrow `{}` endpoints out of range",
                    a.name
                )));
            }
        }
        let mut names: Vec<&str> = self.arrows.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.arrows.len() {
            return Err(Error::BadQuiver("duplicate arrow names".into()));
        }
        Ok(())
    }
}

/// A linear combination of parallel paths, each path a list of arrow
/// indices in traversal order (first arrow applied first).
#[derive(Clone, Debug)]
pub struct Relation {
    pub terms: Vec<(Scalar, Vec<usize>)>,
}

/// A path in the quiver; `arrows` in traversal order, empty for `e_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// Cartan matrix: entry `(b, a)` is the dimension of the projective `P_a`
/// at vertex `b`, so column `a` is the dimension vector of `P_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanMatrix {
    pub n: usize,
    entries: Vec<i64>, // row-major
}

impl CartanMatrix {
    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.n + col]
    }

    /// `Theta * v`, the dimension vector of `P^v`.
    pub fn apply(&self, v: &DimVec) -> DimVec {
        let mut out = vec![0i64; self.n];
        for (b, slot) in out.iter_mut().enumerate() {
            for a in 0..self.n {
                *slot += self.entry(b, a) * v.get(a);
            }
        }
        DimVec(out)
    }

    /// Solve `Theta * m = k` exactly over the rationals, demanding an
    /// integral solution. Nonnegativity is the caller's concern.
    pub fn solve(&self, k: &DimVec) -> Result<DimVec> {
        let f = Field::Rationals;
        let theta = Mat::from_i64(f, self.n, self.n, &self.entries);
        let rhs = Mat::from_i64(
            f,
            self.n,
            1,
            &(0..self.n).map(|b| k.get(b)).collect::<Vec<_>>(),
        );
        if theta.rank() < self.n {
            return Err(Error::NotProjectiveDimVector {
                k: k.to_string(),
                reason: "Cartan matrix is singular".into(),
            });
        }
        let x = theta
            .solve_right(&rhs)
            .ok_or(Error::NotProjectiveDimVector {
                k: k.to_string(),
                reason: "no solution".into(),
            })?;
        let mut out = Vec::with_capacity(self.n);
        for a in 0..self.n {
            match x.get(a, 0) {
                Scalar::Rat(r) => {
                    use num_traits::{One, ToPrimitive};
                    if !r.denom().is_one() {
                        return Err(Error::NotProjectiveDimVector {
                            k: k.to_string(),
                            reason: format!("component {a} is not an integer"),
                        });
                    }
                    out.push(r.numer().to_i64().expect("desk-scale dimension"));
                }
                Scalar::Fp(_) => unreachable!("solved over Q"),
            }
        }
        Ok(DimVec(out))
    }

    /// Determinant is `+-1` exactly when the matrix is invertible over `Z`.
    pub fn is_unimodular(&self) -> bool {
        let f = Field::Rationals;
        let theta = Mat::from_i64(f, self.n, self.n, &self.entries);
        match theta.inverse() {
            Ok(inv) => (0..self.n).all(|r| {
                (0..self.n).all(|c| match inv.get(r, c) {
                    Scalar::Rat(x) => {
                        use num_traits::One;
                        x.denom().is_one()
                    }
                    _ => false,
                })
            }),
            Err(_) => false,
        }
    }
}

/// Per-(source, target) reduction data from the truncated elimination.
#[derive(Clone, Debug)]
struct PairReduction {
    /// Path ids in elimination order: longest first, then lexicographic.
    elim_cols: Vec<usize>,
    /// RREF rows of the ideal span, dense over `elim_cols`.
    rows: Vec<Vec<Scalar>>,
    /// Pivot positions into `elim_cols`, one per row.
    pivots: Vec<usize>,
    /// For each elimination column, the basis slot it maps to
    /// (`usize::MAX` for pivot columns).
    basis_slot_of_col: Vec<usize>,
    /// Basis path ids in canonical (length, lex) order.
    basis: Vec<usize>,
}

/// A bound quiver algebra with its normal-form path basis.
#[derive(Clone, Debug)]
pub struct Algebra {
    pub field: Field,
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    pub length_cap: usize,
    /// Witnessed admissibility bound: every path of this length reduces to 0.
    pub admissibility_bound: usize,
    paths: Vec<Path>,
    path_ids: HashMap<(usize, Vec<usize>), usize>,
    pair_reduction: Vec<Vec<PairReduction>>,
    cartan: CartanMatrix,
}

/// Builds the algebra `kQ/I` with paths enumerated up to `length_cap`.
pub fn build_algebra(
    quiver: Quiver,
    relations: Vec<Relation>,
    field: Field,
    length_cap: usize,
) -> Result<Algebra> {
    quiver.validate()?;
    if length_cap < 2 {
        return Err(Error::BadQuiver("length cap must be at least 2".into()));
    }
    for rel in &relations {
        let mut endpoints = None;
        for (_, arrows) in &rel.terms {
            if arrows.len() < 2 {
                return Err(Error::RelationTooShort { len: arrows.len() });
            }
            let mut at = match arrows.first() {
                Some(&a0) => {
                    let a = quiver
                        .arrows
                        .get(a0)
                        .ok_or_else(|| Error::BadQuiver("arrow index out of range".into()))?;
                    a.source
                }
                None => unreachable!(),
            };
            let source = at;
            for &ai in arrows {
                let a = quiver
                    .arrows
                    .get(ai)
                    .ok_or_else(|| Error::BadQuiver("arrow index out of range".into()))?;
                if a.source != at {
                    return Err(Error::BadQuiver("relation path is not composable".into()));
                }
                at = a.target;
            }
            match endpoints {
                None => endpoints = Some((source, at)),
                Some(e) => {
                    if e != (source, at) {
                        return Err(Error::RelationNotParallel);
                    }
                }
            }
        }
    }

    let n = quiver.vertices;
    let mut paths: Vec<Path> = Vec::new();
    let mut path_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let add_path =
        |paths: &mut Vec<Path>, ids: &mut HashMap<(usize, Vec<usize>), usize>, p: Path| {
            let key = (p.source, p.arrows.clone());
            let id = paths.len();
            paths.push(p);
            ids.insert(key, id);
        };
    for a in 0..n {
        add_path(
            &mut paths,
            &mut path_ids,
            Path {
                source: a,
                target: a,
                arrows: vec![],
            },
        );
    }
    let mut level_start = 0;
    for _len in 1..=length_cap {
        let level_end = paths.len();
        if level_start == level_end {
            break; // no paths of the previous length, the quiver is spent
        }
        for pid in level_start..level_end {
            let (tgt, src, arrows) = {
                let p = &paths[pid];
                (p.target, p.source, p.arrows.clone())
            };
            for (ai, arrow) in quiver.arrows.iter().enumerate() {
                if arrow.source != tgt {
                    continue;
                }
                let mut ext = arrows.clone();
                ext.push(ai);
                add_path(
                    &mut paths,
                    &mut path_ids,
                    Path {
                        source: src,
                        target: arrow.target,
                        arrows: ext,
                    },
                );
            }
        }
        if paths.len() > MAX_PATHS {
            return Err(Error::EnumerationBudget {
                needed: paths.len() as u128,
                budget: MAX_PATHS as u128,
            });
        }
        level_start = level_end;
    }

    // Group paths by (source, target); ids are already in (length, lex) order.
    let mut pair_paths: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; n];
    for (id, p) in paths.iter().enumerate() {
        pair_paths[p.source][p.target].push(id);
    }

    // Span of the two-sided ideal: one row per (prefix, relation, suffix)
    // whose every term stays within the cap. Rows are genuine ideal
    // elements, so everything the reduction kills is honestly zero in the
    // quotient; completeness is guarded below via the relation spread.
    let mut span_rows: Vec<Vec<Vec<Vec<Scalar>>>> = vec![vec![Vec::new(); n]; n];
    for rel in &relations {
        let (rel_src, rel_tgt) = {
            let (_, arrows) = &rel.terms[0];
            let src = quiver.arrows[arrows[0]].source;
            let tgt = quiver.arrows[*arrows.last().unwrap()].target;
            (src, tgt)
        };
        let max_len = rel.terms.iter().map(|(_, a)| a.len()).max().unwrap();
        for pre in &paths {
            if pre.target != rel_src || pre.len() + max_len > length_cap {
                continue;
            }
            for post in &paths {
                if post.source != rel_tgt || pre.len() + max_len + post.len() > length_cap {
                    continue;
                }
                let pair = &pair_paths[pre.source][post.target];
                let col_of: HashMap<usize, usize> =
                    pair.iter().enumerate().map(|(i, &id)| (id, i)).collect();
                let mut row = vec![field.zero(); pair.len()];
                for (coeff, term) in &rel.terms {
                    let mut arrows = pre.arrows.clone();
                    arrows.extend_from_slice(term);
                    arrows.extend_from_slice(&post.arrows);
                    let id = path_ids[&(pre.source, arrows)];
                    let col = col_of[&id];
                    row[col] = field.add(&row[col], coeff);
                }
                if row.iter().any(|s| !s.is_zero()) {
                    span_rows[pre.source][post.target].push(row);
                }
            }
        }
    }

    // One elimination per pair, pivots preferring longer paths so normal
    // forms are short.
    let mut pair_reduction: Vec<Vec<PairReduction>> = Vec::with_capacity(n);
    for a in 0..n {
        let mut per_target = Vec::with_capacity(n);
        for b in 0..n {
            let pair = &pair_paths[a][b];
            let mut elim_cols: Vec<usize> = pair.clone();
            elim_cols.sort_by(|&x, &y| paths[y].len().cmp(&paths[x].len()).then(x.cmp(&y)));
            let elim_pos: HashMap<usize, usize> = elim_cols
                .iter()
                .enumerate()
                .map(|(i, &id)| (id, i))
                .collect();
            let span = &span_rows[a][b];
            let reduction = if span.is_empty() {
                PairReduction {
                    basis_slot_of_col: (0..elim_cols.len()).map(|_| 0).collect(),
                    elim_cols: elim_cols.clone(),
                    rows: Vec::new(),
                    pivots: Vec::new(),
                    basis: pair.clone(),
                }
            } else {
                let mut m = Mat::zeros(field, span.len(), elim_cols.len());
                for (r, row) in span.iter().enumerate() {
                    for (pair_col, v) in row.iter().enumerate() {
                        if !v.is_zero() {
                            let ec = elim_pos[&pair[pair_col]];
                            m.set(r, ec, v.clone());
                        }
                    }
                }
                let rr = m.rref();
                let pivots = rr.pivots.clone();
                let mut rows = Vec::with_capacity(pivots.len());
                for r in 0..pivots.len() {
                    rows.push(
                        (0..elim_cols.len())
                            .map(|c| rr.reduced.get(r, c).clone())
                            .collect(),
                    );
                }
                let mut basis: Vec<usize> = elim_cols
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !pivots.contains(i))
                    .map(|(_, &id)| id)
                    .collect();
                basis.sort_unstable();
                PairReduction {
                    elim_cols: elim_cols.clone(),
                    rows,
                    pivots,
                    basis_slot_of_col: Vec::new(),
                    basis,
                }
            };
            per_target.push(reduction);
        }
        pair_reduction.push(per_target);
    }
    // Fill in column -> basis-slot maps now that bases are fixed.
    for row in pair_reduction.iter_mut() {
        for red in row.iter_mut() {
            let slot_of_id: HashMap<usize, usize> = red
                .basis
                .iter()
                .enumerate()
                .map(|(slot, &id)| (id, slot))
                .collect();
            red.basis_slot_of_col = red
                .elim_cols
                .iter()
                .map(|id| slot_of_id.get(id).copied().unwrap_or(usize::MAX))
                .collect();
        }
    }

    let mut cartan_entries = vec![0i64; n * n];
    for a in 0..n {
        for b in 0..n {
            cartan_entries[b * n + a] = pair_reduction[a][b].basis.len() as i64;
        }
    }
    let cartan = CartanMatrix {
        n,
        entries: cartan_entries,
    };

    let mut alg = Algebra {
        field,
        quiver,
        relations,
        length_cap,
        admissibility_bound: 0,
        paths,
        path_ids,
        pair_reduction,
        cartan,
    };

    // Witness the admissibility bound: smallest N with every length-N path
    // reducing to zero. Levels above N follow because the span is an ideal.
    let mut witnessed = None;
    'levels: for nn in 1..=length_cap {
        for p in &alg.paths {
            if p.len() == nn && !alg.reduce_path(p).iter().all(Scalar::is_zero) {
                continue 'levels;
            }
        }
        witnessed = Some(nn);
        break;
    }
    match witnessed {
        Some(nn) => alg.admissibility_bound = nn,
        None => {
            let survivors = alg
                .paths
                .iter()
                .filter(|p| {
                    p.len() == length_cap && !alg.reduce_path(p).iter().all(Scalar::is_zero)
                })
                .count();
            return Err(Error::NotAdmissible {
                cap: length_cap,
                survivors,
            });
        }
    }
    // Completeness guard: with the bound `N` certified, every ideal element
    // supported within the cap is reachable from full rows as long as
    // `cap >= N + spread`, where spread is the largest length difference
    // between two terms of one relation.
    let spread = alg
        .relations
        .iter()
        .map(|rel| {
            let lens: Vec<usize> = rel.terms.iter().map(|(_, a)| a.len()).collect();
            lens.iter().max().unwrap() - lens.iter().min().unwrap()
        })
        .max()
        .unwrap_or(0);
    if alg.admissibility_bound + spread > length_cap {
        return Err(Error::CapTooSmall {
            cap: length_cap,
            needed: alg.admissibility_bound + spread,
        });
    }
    debug_assert!(
        alg.paths
            .iter()
            .enumerate()
            .all(|(id, p)| p.len() < alg.admissibility_bound
                || !alg.pair_reduction[p.source][p.target].basis.contains(&id)),
        "no basis path survives past the admissibility bound"
    );
    Ok(alg)
}

impl Algebra {
    pub fn vertices(&self) -> usize {
        self.quiver.vertices
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    /// Total dimension of the algebra: the number of basis paths.
    pub fn dim(&self) -> usize {
        let n = self.vertices();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| self.basis(a, b).len())
            .sum()
    }

    /// Basis path ids from `a` to `b`, canonical (length, lex) order.
    pub fn basis(&self, a: usize, b: usize) -> &[usize] {
        &self.pair_reduction[a][b].basis
    }

    pub fn path(&self, id: usize) -> &Path {
        &self.paths[id]
    }

    pub fn basis_path(&self, a: usize, b: usize, slot: usize) -> &Path {
        &self.paths[self.basis(a, b)[slot]]
    }

    /// Normal form of a path, dense over the basis of its pair.
    pub fn reduce_path(&self, p: &Path) -> Vec<Scalar> {
        let red = &self.pair_reduction[p.source][p.target];
        let mut out = vec![self.field.zero(); red.basis.len()];
        if p.len() > self.length_cap {
            return out;
        }
        let id = self.path_ids[&(p.source, p.arrows.clone())];
        let col = red
            .elim_cols
            .iter()
            .position(|&c| c == id)
            .expect("known path");
        // unit vector at `col`, reduced against the RREF rows
        let mut hit_pivot = false;
        for (r, &pc) in red.pivots.iter().enumerate() {
            if pc == col {
                // the path itself is a leading term: subtract the whole row
                for (c2, v) in red.rows[r].iter().enumerate() {
                    if c2 == col || v.is_zero() {
                        continue;
                    }
                    let slot = red.basis_slot_of_col[c2];
                    debug_assert_ne!(slot, usize::MAX, "rref rows end in basis columns");
                    out[slot] = self.field.sub(&out[slot], v);
                }
                hit_pivot = true;
                break;
            }
        }
        if !hit_pivot {
            let slot = red.basis_slot_of_col[col];
            if slot != usize::MAX {
                out[slot] = self.field.one();
            }
        }
        out
    }

    /// Normal form of `first` followed by `then` (paths must compose).
    pub fn reduce_concat(&self, first: &Path, then: &Path) -> Vec<Scalar> {
        assert_eq!(first.target, then.source, "paths do not compose");
        let red = &self.pair_reduction[first.source][then.target];
        if first.len() + then.len() > self.length_cap {
            // beyond the cap everything is past the admissibility bound
            return vec![self.field.zero(); red.basis.len()];
        }
        let mut arrows = first.arrows.clone();
        arrows.extend_from_slice(&then.arrows);
        self.reduce_path(&Path {
            source: first.source,
            target: then.target,
            arrows,
        })
    }

    /// The projective indecomposable `P_a` as a representation: the space
    /// at `b` is spanned by basis paths `a -> b`, arrows act by composition.
    pub fn projective_rep(&self, a: usize) -> Representation {
        let n = self.vertices();
        let dims = DimVec((0..n).map(|b| self.basis(a, b).len() as i64).collect());
        let mut maps = Vec::with_capacity(self.quiver.arrows.len());
        for (ai, arrow) in self.quiver.arrows.iter().enumerate() {
            let (b, c) = (arrow.source, arrow.target);
            let arrow_path = Path {
                source: b,
                target: c,
                arrows: vec![ai],
            };
            let rows = self.basis(a, c).len();
            let cols = self.basis(a, b).len();
            let mut m = Mat::zeros(self.field, rows, cols);
            for (j, &pid) in self.basis(a, b).iter().enumerate() {
                let nf = self.reduce_concat(&self.paths[pid], &arrow_path);
                for (i, v) in nf.into_iter().enumerate() {
                    if !v.is_zero() {
                        m.set(i, j, v);
                    }
                }
            }
            maps.push(m);
        }
        Representation {
            field: self.field,
            dims,
            maps,
        }
    }

    /// The simple at `a`: indicator dimension vector, zero arrow maps.
    pub fn simple_rep(&self, a: usize) -> Representation {
        let n = self.vertices();
        let dims = DimVec::unit(n, a);
        let maps = self
            .quiver
            .arrows
            .iter()
            .map(|arrow| Mat::zeros(self.field, dims.at(arrow.target), dims.at(arrow.source)))
            .collect();
        Representation {
            field: self.field,
            dims,
            maps,
        }
    }

    /// Multiplicities `m` with `Theta m = k`, when `m` is nonnegative and
    /// integral; this is the dimension vector of projectives `P^m`.
    pub fn proj_multiplicities(&self, k: &DimVec) -> Result<DimVec> {
        let m = self.cartan.solve(k)?;
        if !m.is_nonneg() {
            return Err(Error::NotProjectiveDimVector {
                k: k.to_string(),
                reason: format!("solution {m} has a negative component"),
            });
        }
        Ok(m)
    }
}

/// Global dimension, capped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlobalDim {
    Finite(u32),
    /// Every simple still had a nonzero syzygy at the cap.
    OverCap(u32),
}

impl fmt::Display for GlobalDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalDim::Finite(d) => write!(f, "{d}"),
            GlobalDim::OverCap(c) => write!(f, "> {c}"),
        }
    }
}

impl GlobalDim {
    pub fn at_most(&self, bound: u32) -> bool {
        matches!(self, GlobalDim::Finite(d) if *d <= bound)
    }
}

/// Maximal length of a minimal projective resolution over all simples,
/// computed by iterated projective covers of kernels, stopping at `cap`.
pub fn global_dimension(alg: &Algebra, cap: u32) -> GlobalDim {
    let mut max = 0u32;
    for a in 0..alg.vertices() {
        let mut m = alg.simple_rep(a);
        let mut ell = 0u32;
        loop {
            let (cover, _) = rep::proj_cover(alg, &m);
            let (ker, _) = rep::kernel_rep(alg, &cover.map, cover.total(), &m);
            if ker.dims.is_zero() {
                break;
            }
            ell += 1;
            if ell > cap {
                return GlobalDim::OverCap(cap);
            }
            m = ker;
        }
        max = max.max(ell);
    }
    GlobalDim::Finite(max)
}
