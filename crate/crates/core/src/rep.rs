//! Quiver representations: hom spaces, kernels/images/quotients, direct
//! sums, Krull–Schmidt decomposition, isomorphism testing and minimal
//! projective presentations.
//!
//! Decomposition is Fitting-style: random endomorphisms are raised to a
//! stable power and split the module when the power is neither zero nor
//! invertible. Indecomposability is only ever *certified* (endomorphism
//! ring = scalars plus a nilpotent ideal); when neither a split nor a
//! certificate is found within the trial budget the result is an honest
//! "inconclusive" error, never a guess.

use crate::algebra::{Algebra, DimVec, Path};
use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::matrix::Mat;
use crate::rng::Rng;
use crate::Result;

/// A representation of the bound quiver: one space per vertex, one matrix
/// per arrow (shaped target x source), satisfying the relations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Representation {
    pub field: Field,
    pub dims: DimVec,
    pub maps: Vec<Mat>,
}

impl Representation {
    pub fn zero(alg: &Algebra) -> Representation {
        let dims = DimVec::zeros(alg.vertices());
        let maps = alg
            .quiver
            .arrows
            .iter()
            .map(|_| Mat::zeros(alg.field, 0, 0))
            .collect();
        Representation {
            field: alg.field,
            dims,
            maps,
        }
    }

    pub fn total_dim(&self) -> i64 {
        self.dims.total()
    }

    /// Matrix of the action of a whole path (identity for `e_a`).
    pub fn eval_path(&self, p: &Path) -> Mat {
        let mut m = Mat::identity(self.field, self.dims.at(p.source));
        for &ai in &p.arrows {
            m = self.maps[ai].mul(&m);
        }
        m
    }
}

/// A vertex-graded linear map between two representations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedMap {
    pub blocks: Vec<Mat>,
}

impl GradedMap {
    pub fn zero(field: Field, src: &DimVec, tgt: &DimVec) -> GradedMap {
        let blocks = (0..src.len())
            .map(|a| Mat::zeros(field, tgt.at(a), src.at(a)))
            .collect();
        GradedMap { blocks }
    }

    pub fn identity(field: Field, dims: &DimVec) -> GradedMap {
        let blocks = (0..dims.len())
            .map(|a| Mat::identity(field, dims.at(a)))
            .collect();
        GradedMap { blocks }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Mat::is_zero)
    }

    /// Per-vertex rank: the dimension vector of the image.
    pub fn rank_vec(&self) -> DimVec {
        DimVec(self.blocks.iter().map(|b| b.rank() as i64).collect())
    }

    pub fn add(&self, other: &GradedMap) -> GradedMap {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.add(b))
            .collect();
        GradedMap { blocks }
    }

    pub fn scale(&self, s: &Scalar) -> GradedMap {
        GradedMap {
            blocks: self.blocks.iter().map(|b| b.scale(s)).collect(),
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.blocks.iter().all(Mat::is_invertible)
    }
}

/// `f` after `g`.
pub fn compose(f: &GradedMap, g: &GradedMap) -> GradedMap {
    let blocks = f
        .blocks
        .iter()
        .zip(&g.blocks)
        .map(|(a, b)| a.mul(b))
        .collect();
    GradedMap { blocks }
}

/// Checks every relation of the algebra on `v`; reports the first nonzero
/// entry on failure.
pub fn validate_rep(alg: &Algebra, v: &Representation) -> Result<()> {
    for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
        let m = &v.maps[ai];
        if m.rows() != v.dims.at(arrow.target) || m.cols() != v.dims.at(arrow.source) {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "arrow `{}`: {}x{} map on dims {}",
                    arrow.name,
                    m.rows(),
                    m.cols(),
                    v.dims
                ),
            });
        }
    }
    for (ri, rel) in alg.relations.iter().enumerate() {
        let (src, tgt) = {
            let arrows = &rel.terms[0].1;
            (
                alg.quiver.arrows[arrows[0]].source,
                alg.quiver.arrows[*arrows.last().unwrap()].target,
            )
        };
        let mut acc = Mat::zeros(alg.field, v.dims.at(tgt), v.dims.at(src));
        for (coeff, arrows) in &rel.terms {
            let p = Path {
                source: src,
                target: tgt,
                arrows: arrows.clone(),
            };
            acc = acc.add(&v.eval_path(&p).scale(coeff));
        }
        if let Some((row, col)) = acc.first_nonzero() {
            return Err(Error::RelationViolated {
                relation: ri,
                row,
                col,
            });
        }
    }
    Ok(())
}

/// Does `f: src -> tgt` intertwine all arrow actions?
pub fn is_module_map(
    alg: &Algebra,
    f: &GradedMap,
    src: &Representation,
    tgt: &Representation,
) -> Result<()> {
    for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
        let lhs = tgt.maps[ai].mul(&f.blocks[arrow.source]);
        let rhs = f.blocks[arrow.target].mul(&src.maps[ai]);
        if let Some((row, col)) = lhs.sub(&rhs).first_nonzero() {
            return Err(Error::NotModuleMap {
                arrow: ai,
                row,
                col,
            });
        }
    }
    Ok(())
}

/// Canonical basis of `Hom(v, w)`, from the kernel of the assembled
/// intertwiner system.
pub fn hom_basis(alg: &Algebra, v: &Representation, w: &Representation) -> Vec<GradedMap> {
    let f = alg.field;
    let n = alg.vertices();
    let mut offsets = vec![0usize; n + 1];
    for a in 0..n {
        offsets[a + 1] = offsets[a] + w.dims.at(a) * v.dims.at(a);
    }
    let unknowns = offsets[n];
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
        let (a, b) = (arrow.source, arrow.target);
        let (va, vb) = (v.dims.at(a), v.dims.at(b));
        let (wb,) = (w.dims.at(b),);
        // W_alpha phi_a - phi_b V_alpha = 0, entry (r, c)
        for r in 0..wb {
            for c in 0..va {
                let mut row = vec![f.zero(); unknowns];
                for k in 0..w.dims.at(a) {
                    let coeff = w.maps[ai].get(r, k);
                    if !coeff.is_zero() {
                        let pos = offsets[a] + k * va + c;
                        row[pos] = f.add(&row[pos], coeff);
                    }
                }
                for k in 0..vb {
                    let coeff = v.maps[ai].get(k, c);
                    if !coeff.is_zero() {
                        let pos = offsets[b] + r * vb + k;
                        row[pos] = f.sub(&row[pos], coeff);
                    }
                }
                if row.iter().any(|s| !s.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let system = if rows.is_empty() {
        Mat::zeros(f, 0, unknowns)
    } else {
        Mat::from_rows(f, rows)
    };
    let kernel = system.kernel_basis();
    let mut out = Vec::with_capacity(kernel.cols());
    for j in 0..kernel.cols() {
        let mut blocks = Vec::with_capacity(n);
        for a in 0..n {
            let (wa, va) = (w.dims.at(a), v.dims.at(a));
            let mut m = Mat::zeros(f, wa, va);
            for i in 0..wa {
                for c in 0..va {
                    m.set(i, c, kernel.get(offsets[a] + i * va + c, j).clone());
                }
            }
            blocks.push(m);
        }
        out.push(GradedMap { blocks });
    }
    out
}

/// Kernel subrepresentation with its inclusion, bases canonical per vertex.
pub fn kernel_rep(
    alg: &Algebra,
    f: &GradedMap,
    src: &Representation,
    tgt: &Representation,
) -> (Representation, GradedMap) {
    is_module_map(alg, f, src, tgt).expect("kernel of a module map");
    let n = alg.vertices();
    let kb: Vec<Mat> = (0..n).map(|a| f.blocks[a].kernel_basis()).collect();
    let dims = DimVec(kb.iter().map(|k| k.cols() as i64).collect());
    let mut maps = Vec::with_capacity(alg.quiver.arrows.len());
    for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
        let (a, b) = (arrow.source, arrow.target);
        let rhs = src.maps[ai].mul(&kb[a]);
        let x = kb[b]
            .solve_right(&rhs)
            .expect("arrow action preserves the kernel");
        maps.push(x);
    }
    (
        Representation {
            field: alg.field,
            dims,
            maps,
        },
        GradedMap { blocks: kb },
    )
}

/// Image subrepresentation with its inclusion into the target; the basis at
/// each vertex is the pivot columns of the block.
pub fn image_rep(
    alg: &Algebra,
    f: &GradedMap,
    src: &Representation,
    tgt: &Representation,
) -> (Representation, GradedMap) {
    is_module_map(alg, f, src, tgt).expect("image of a module map");
    let n = alg.vertices();
    let ib: Vec<Mat> = (0..n).map(|a| f.blocks[a].column_space_basis()).collect();
    let dims = DimVec(ib.iter().map(|k| k.cols() as i64).collect());
    let mut maps = Vec::with_capacity(alg.quiver.arrows.len());
    for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
        let (a, b) = (arrow.source, arrow.target);
        let rhs = tgt.maps[ai].mul(&ib[a]);
        let x = ib[b]
            .solve_right(&rhs)
            .expect("arrow action preserves the image");
        maps.push(x);
    }
    (
        Representation {
            field: alg.field,
            dims,
            maps,
        },
        GradedMap { blocks: ib },
    )
}

/// Quotient of `v` by the image of the inclusion `incl: sub -> v`, with the
/// canonical projection. Coordinates come from the RREF complement of the
/// subspace, so quotients are reproducible.
pub fn quotient_rep(
    alg: &Algebra,
    v: &Representation,
    incl: &GradedMap,
    sub: &Representation,
) -> (Representation, GradedMap) {
    is_module_map(alg, incl, sub, v).expect("quotient by a subrepresentation");
    let f = alg.field;
    let n = alg.vertices();
    let mut proj_blocks = Vec::with_capacity(n);
    let mut section_blocks = Vec::with_capacity(n);
    for a in 0..n {
        let va = v.dims.at(a);
        let rr = incl.blocks[a].transpose().rref();
        let pivots = rr.pivots;
        let free: Vec<usize> = (0..va).filter(|c| !pivots.contains(c)).collect();
        let q = free.len();
        let mut proj = Mat::zeros(f, q, va);
        for (j, &k) in free.iter().enumerate() {
            proj.set(j, k, f.one());
        }
        for (i, &pk) in pivots.iter().enumerate() {
            for (j, &k) in free.iter().enumerate() {
                proj.set(j, pk, f.neg(rr.reduced.get(i, k)));
            }
        }
        let mut section = Mat::zeros(f, va, q);
        for (j, &k) in free.iter().enumerate() {
            section.set(k, j, f.one());
        }
        proj_blocks.push(proj);
        section_blocks.push(section);
    }
    let dims = DimVec(proj_blocks.iter().map(|b| b.rows() as i64).collect());
    let mut maps = Vec::with_capacity(alg.quiver.arrows.len());
    for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
        let (a, b) = (arrow.source, arrow.target);
        let m = proj_blocks[b].mul(&v.maps[ai]).mul(&section_blocks[a]);
        maps.push(m);
    }
    (
        Representation {
            field: alg.field,
            dims,
            maps,
        },
        GradedMap {
            blocks: proj_blocks,
        },
    )
}

/// Direct sum with inclusion/projection pairs for each part.
pub fn direct_sum(
    alg: &Algebra,
    parts: &[Representation],
) -> (Representation, Vec<(GradedMap, GradedMap)>) {
    let f = alg.field;
    let n = alg.vertices();
    let mut dims = DimVec::zeros(n);
    for p in parts {
        dims = dims.add(&p.dims);
    }
    let mut maps = Vec::with_capacity(alg.quiver.arrows.len());
    for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
        let (a, b) = (arrow.source, arrow.target);
        let mut m = Mat::zeros(f, dims.at(b), dims.at(a));
        let (mut ro, mut co) = (0, 0);
        for p in parts {
            for r in 0..p.dims.at(b) {
                for c in 0..p.dims.at(a) {
                    m.set(ro + r, co + c, p.maps[ai].get(r, c).clone());
                }
            }
            ro += p.dims.at(b);
            co += p.dims.at(a);
        }
        maps.push(m);
    }
    let total = Representation {
        field: f,
        dims: dims.clone(),
        maps,
    };
    let mut pairs = Vec::with_capacity(parts.len());
    let mut offset = vec![0usize; n];
    for p in parts {
        let mut incl_blocks = Vec::with_capacity(n);
        let mut proj_blocks = Vec::with_capacity(n);
        for a in 0..n {
            let (pa, ta, off) = (p.dims.at(a), dims.at(a), offset[a]);
            let mut incl = Mat::zeros(f, ta, pa);
            let mut proj = Mat::zeros(f, pa, ta);
            for i in 0..pa {
                incl.set(off + i, i, f.one());
                proj.set(i, off + i, f.one());
            }
            incl_blocks.push(incl);
            proj_blocks.push(proj);
        }
        for a in 0..n {
            offset[a] += p.dims.at(a);
        }
        pairs.push((
            GradedMap {
                blocks: incl_blocks,
            },
            GradedMap {
                blocks: proj_blocks,
            },
        ));
    }
    (total, pairs)
}

/// `P^mult` with its summand layout: summands ordered vertex-major, the
/// block of summand `(a, copy)` at vertex `c` spanned by basis paths
/// `a -> c` in algebra order.
#[derive(Clone, Debug)]
pub struct ProjSum {
    pub mult: DimVec,
    pub total: Representation,
    /// Vertex of each summand, vertex-major with repetition.
    pub summands: Vec<usize>,
    /// `offsets[c][s]`: start of summand `s`'s block inside `(P^mult)_c`.
    pub offsets: Vec<Vec<usize>>,
}

pub fn proj_sum(alg: &Algebra, mult: &DimVec) -> ProjSum {
    let n = alg.vertices();
    let mut summands = Vec::new();
    for a in 0..n {
        for _ in 0..mult.at(a) {
            summands.push(a);
        }
    }
    let parts: Vec<Representation> = summands.iter().map(|&a| alg.projective_rep(a)).collect();
    let (total, _) = direct_sum(alg, &parts);
    let mut offsets = vec![Vec::with_capacity(summands.len()); n];
    for c in 0..n {
        let mut off = 0usize;
        for &a in &summands {
            offsets[c].push(off);
            off += alg.basis(a, c).len();
        }
    }
    ProjSum {
        mult: mult.clone(),
        total,
        summands,
        offsets,
    }
}

impl ProjSum {
    /// Coordinate of the generator `e_a` of summand `s` inside the vertex
    /// space at `a`.
    pub fn generator_coord(&self, alg: &Algebra, s: usize) -> usize {
        let a = self.summands[s];
        let slot = alg
            .basis(a, a)
            .iter()
            .position(|&id| alg.path(id).is_empty())
            .expect("e_a is always a basis path");
        self.offsets[a][s] + slot
    }
}

/// Projective cover data: `map: sum.total -> m` is surjective with
/// superfluous kernel.
pub struct ProjCover {
    pub sum: ProjSum,
    pub map: GradedMap,
}

impl ProjCover {
    pub fn total(&self) -> &Representation {
        &self.sum.total
    }
}

/// Dimension vector of `top(m) = m / rad(m)` together with, per vertex,
/// the coordinates spanning a complement of the radical.
pub fn top_complement(alg: &Algebra, m: &Representation) -> (DimVec, Vec<Vec<usize>>) {
    let f = alg.field;
    let n = alg.vertices();
    let mut dims = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    for b in 0..n {
        let mb = m.dims.at(b);
        let mut rad = Mat::zeros(f, mb, 0);
        for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
            if arrow.target == b {
                rad = rad.hstack(&m.maps[ai]);
            }
        }
        let basis = rad.column_space_basis();
        let rr = basis.transpose().rref();
        let free: Vec<usize> = (0..mb).filter(|c| !rr.pivots.contains(c)).collect();
        dims.push(free.len() as i64);
        coords.push(free);
    }
    (DimVec(dims), coords)
}

/// Minimal projective cover of `m`.
pub fn proj_cover(alg: &Algebra, m: &Representation) -> (ProjCover, DimVec) {
    let f = alg.field;
    let n = alg.vertices();
    let (top, gens) = top_complement(alg, m);
    let sum = proj_sum(alg, &top);
    let mut blocks = Vec::with_capacity(n);
    for c in 0..n {
        let mut block = Mat::zeros(f, m.dims.at(c), sum.total.dims.at(c));
        for (s, &b) in sum.summands.iter().enumerate() {
            // summand index within the b-group picks its generator coordinate
            let copy = sum.summands[..s].iter().filter(|&&x| x == b).count();
            let g = gens[b][copy];
            for (t, &pid) in alg.basis(b, c).iter().enumerate() {
                let action = m.eval_path(alg.path(pid));
                for r in 0..m.dims.at(c) {
                    let v = action.get(r, g);
                    if !v.is_zero() {
                        block.set(r, sum.offsets[c][s] + t, v.clone());
                    }
                }
            }
        }
        blocks.push(block);
    }
    let map = GradedMap { blocks };
    (ProjCover { sum, map }, top)
}

/// Minimal projective presentation `P^{p1} -> P^{p0} -> h -> 0`.
pub struct PresentationData {
    pub p0: DimVec,
    pub p1: DimVec,
    pub cover_sum: ProjSum,
    pub syzygy_sum: ProjSum,
    /// `P^{p0} -> h`
    pub cover: GradedMap,
    /// `P^{p1} -> P^{p0}`
    pub syzygy: GradedMap,
}

pub fn minimal_presentation(alg: &Algebra, h: &Representation) -> PresentationData {
    let (c0, p0) = proj_cover(alg, h);
    let (ker, incl) = kernel_rep(alg, &c0.map, c0.total(), h);
    let (c1, p1) = proj_cover(alg, &ker);
    let syzygy = compose(&incl, &c1.map);
    PresentationData {
        p0,
        p1,
        cover_sum: c0.sum,
        syzygy_sum: c1.sum,
        cover: c0.map,
        syzygy,
    }
}

fn random_combination(field: Field, basis: &[GradedMap], rng: &mut Rng) -> GradedMap {
    let mut acc = basis[0].scale(&field.random(rng));
    for b in &basis[1..] {
        acc = acc.add(&b.scale(&field.random(rng)));
    }
    acc
}

fn stable_power(f: &GradedMap, total: u64) -> GradedMap {
    let mut g = f.clone();
    let mut e = 1u64;
    while e < total.max(1) {
        g = compose(&g, &g);
        e *= 2;
    }
    g
}

/// One direct summand of a decomposition, with the maps exhibiting it.
pub struct Summand {
    pub rep: Representation,
    /// Inclusion into the original representation.
    pub incl: GradedMap,
    /// Projection from the original representation (`proj . incl = id`).
    pub proj: GradedMap,
}

enum Locality {
    /// End = scalars + this nilpotent ideal (RREF rows of its flat span).
    Local { jspan: Mat },
    /// A splitting endomorphism fell out of the search.
    Split(GradedMap),
}

fn flatten(g: &GradedMap, field: Field) -> Vec<Scalar> {
    let mut out = Vec::new();
    for b in &g.blocks {
        for r in 0..b.rows() {
            for c in 0..b.cols() {
                out.push(b.get(r, c).clone());
            }
        }
    }
    if out.is_empty() {
        out.push(field.zero());
    }
    out
}

fn shift_candidates(field: Field, endo: &GradedMap, total: i64, rng: &mut Rng) -> Vec<Scalar> {
    match field {
        Field::Prime(p) if p <= 257 => (0..p).map(Scalar::Fp).collect(),
        Field::Prime(p) => {
            let mut out = vec![Scalar::Fp(0)];
            // trace-based candidate when the total dimension is invertible
            let tr: u64 = endo
                .blocks
                .iter()
                .map(|b| {
                    (0..b.rows())
                        .map(|i| match b.get(i, i) {
                            Scalar::Fp(x) => *x,
                            _ => unreachable!(),
                        })
                        .sum::<u64>()
                        % p
                })
                .sum::<u64>()
                % p;
            if let Some(inv) = field.inv(&field.from_i64(total)) {
                out.push(field.mul(&Scalar::Fp(tr), &inv));
            }
            for _ in 0..32 {
                out.push(field.random(rng));
            }
            out
        }
        Field::Rationals => {
            let mut tr = field.zero();
            for b in &endo.blocks {
                for i in 0..b.rows() {
                    tr = field.add(&tr, b.get(i, i));
                }
            }
            match field.div(&tr, &field.from_i64(total)) {
                Some(t) => vec![t],
                None => vec![field.zero()],
            }
        }
    }
}

/// Certify that End(m) is local with scalar residue field, or surface a
/// splitting endomorphism discovered along the way.
fn certify_local(
    alg: &Algebra,
    m: &Representation,
    endos: &[GradedMap],
    rng: &mut Rng,
) -> Result<Locality> {
    let field = alg.field;
    let total = m.total_dim();
    let ident = GradedMap::identity(field, &m.dims);
    let mut nilpotents = Vec::with_capacity(endos.len());
    for b in endos {
        let mut found = None;
        for lambda in shift_candidates(field, b, total, rng) {
            let shifted = b.add(&ident.scale(&field.neg(&lambda)));
            let power = stable_power(&shifted, total as u64);
            let rank = power.rank_vec().total();
            if rank == 0 {
                found = Some(shifted);
                break;
            }
            if rank < total {
                return Ok(Locality::Split(shifted));
            }
        }
        match found {
            Some(nil) => nilpotents.push(nil),
            None => {
                return Err(Error::DecomposeInconclusive {
                    trials: 0,
                    end_dim: endos.len(),
                })
            }
        }
    }
    // Span of the shifted basis; with id it spans End, so it has
    // codimension one exactly when id is not a combination of nilpotents.
    let rows: Vec<Vec<Scalar>> = nilpotents.iter().map(|n| flatten(n, field)).collect();
    let span = Mat::from_rows(field, rows);
    let rr = span.rref();
    let jdim = rr.pivots.len();
    if jdim + 1 != endos.len() {
        return Err(Error::DecomposeInconclusive {
            trials: 0,
            end_dim: endos.len(),
        });
    }
    let jspan = rr.reduced.select_rows(&(0..jdim).collect::<Vec<_>>());
    // Closure under composition makes the span a nil ideal; a product
    // escaping the span is itself a split candidate.
    for x in &nilpotents {
        for y in &nilpotents {
            let prod = compose(x, y);
            if !in_row_span(&jspan, &flatten(&prod, field)) {
                let power = stable_power(&prod, total as u64);
                let rank = power.rank_vec().total();
                if rank > 0 && rank < total {
                    return Ok(Locality::Split(prod));
                }
                return Err(Error::DecomposeInconclusive {
                    trials: 0,
                    end_dim: endos.len(),
                });
            }
        }
    }
    Ok(Locality::Local { jspan })
}

fn in_row_span(rref_rows: &Mat, v: &[Scalar]) -> bool {
    let f = rref_rows.field;
    let mut v = v.to_vec();
    for r in 0..rref_rows.rows() {
        let pivot = (0..rref_rows.cols()).find(|&c| !rref_rows.get(r, c).is_zero());
        let Some(pc) = pivot else { continue };
        if v[pc].is_zero() {
            continue;
        }
        let factor = v[pc].clone();
        for c in 0..rref_rows.cols() {
            let delta = f.mul(&factor, rref_rows.get(r, c));
            v[c] = f.sub(&v[c], &delta);
        }
    }
    v.iter().all(Scalar::is_zero)
}

fn split_along(alg: &Algebra, m: &Representation, power: &GradedMap) -> (Summand, Summand) {
    let f = alg.field;
    let (ker, ker_incl) = kernel_rep(alg, power, m, m);
    let (img, img_incl) = image_rep(alg, power, m, m);
    let n = alg.vertices();
    let mut ker_proj = Vec::with_capacity(n);
    let mut img_proj = Vec::with_capacity(n);
    for a in 0..n {
        let joined = ker_incl.blocks[a].hstack(&img_incl.blocks[a]);
        let inv = joined.inverse().expect("stable power splits the identity");
        let kd = ker.dims.at(a);
        ker_proj.push(inv.select_rows(&(0..kd).collect::<Vec<_>>()));
        img_proj.push(inv.select_rows(&(kd..kd + img.dims.at(a)).collect::<Vec<_>>()));
        let _ = f;
    }
    (
        Summand {
            rep: ker,
            incl: ker_incl,
            proj: GradedMap { blocks: ker_proj },
        },
        Summand {
            rep: img,
            incl: img_incl,
            proj: GradedMap { blocks: img_proj },
        },
    )
}

/// Krull–Schmidt decomposition into certified indecomposables.
pub fn decompose(
    alg: &Algebra,
    m: &Representation,
    rng: &mut Rng,
    trials: usize,
) -> Result<Vec<Summand>> {
    let whole = Summand {
        rep: m.clone(),
        incl: GradedMap::identity(alg.field, &m.dims),
        proj: GradedMap::identity(alg.field, &m.dims),
    };
    let mut done = Vec::new();
    let mut queue = vec![whole];
    while let Some(part) = queue.pop() {
        if part.rep.total_dim() == 0 {
            continue;
        }
        match decompose_step(alg, &part.rep, rng, trials)? {
            None => done.push(part),
            Some(power) => {
                let (k, i) = split_along(alg, &part.rep, &power);
                for s in [k, i] {
                    queue.push(Summand {
                        rep: s.rep,
                        incl: compose(&part.incl, &s.incl),
                        proj: compose(&s.proj, &part.proj),
                    });
                }
            }
        }
    }
    // vertex-major then dimension order keeps the output deterministic
    done.sort_by(|a, b| a.rep.dims.cmp(&b.rep.dims));
    Ok(done)
}

/// `Some(power)` to split along, or `None` when certified indecomposable.
fn decompose_step(
    alg: &Algebra,
    m: &Representation,
    rng: &mut Rng,
    trials: usize,
) -> Result<Option<GradedMap>> {
    let total = m.total_dim();
    let endos = hom_basis(alg, m, m);
    if endos.len() <= 1 {
        return Ok(None); // End = k . id
    }
    for _ in 0..trials {
        let phi = random_combination(alg.field, &endos, rng);
        let power = stable_power(&phi, total as u64);
        let rank = power.rank_vec().total();
        if rank > 0 && rank < total {
            return Ok(Some(power));
        }
    }
    match certify_local(alg, m, &endos, rng) {
        Ok(Locality::Local { .. }) => Ok(None),
        Ok(Locality::Split(phi)) => {
            let power = stable_power(&phi, total as u64);
            Ok(Some(power))
        }
        Err(e) => Err(e),
    }
}

/// Explicit invertible intertwiner, or a certified `None`.
pub fn find_iso(
    alg: &Algebra,
    m: &Representation,
    n: &Representation,
    rng: &mut Rng,
    trials: usize,
) -> Result<Option<GradedMap>> {
    if m.dims != n.dims {
        return Ok(None);
    }
    if m.total_dim() == 0 {
        return Ok(Some(GradedMap::identity(alg.field, &m.dims)));
    }
    let homs = hom_basis(alg, m, n);
    if homs.is_empty() {
        return Ok(None);
    }
    for _ in 0..trials {
        let phi = random_combination(alg.field, &homs, rng);
        if phi.is_invertible() {
            return Ok(Some(phi));
        }
    }
    // Decompose both sides and match indecomposable summands.
    let ms = decompose(alg, m, rng, trials)?;
    let mut ns = decompose(alg, n, rng, trials)?;
    if ms.len() != ns.len() {
        return Ok(None);
    }
    let mut iso = GradedMap::zero(alg.field, &m.dims, &n.dims);
    for sm in &ms {
        let mut matched = None;
        for (j, sn) in ns.iter().enumerate() {
            if let Some(cert) = match_indecomposables(alg, &sm.rep, &sn.rep, rng, trials)? {
                matched = Some((j, cert));
                break;
            }
        }
        match matched {
            Some((j, cert)) => {
                let sn = ns.remove(j);
                iso = iso.add(&compose(&sn.incl, &compose(&cert, &sm.proj)));
            }
            None => return Ok(None),
        }
    }
    debug_assert!(iso.is_invertible());
    Ok(Some(iso))
}

/// Isomorphism test between certified indecomposables: random certificate
/// search first, then the deterministic criterion that some composite
/// `n -> m -> n ... ` escapes the nilpotent ideal of End(m).
fn match_indecomposables(
    alg: &Algebra,
    m: &Representation,
    n: &Representation,
    rng: &mut Rng,
    trials: usize,
) -> Result<Option<GradedMap>> {
    if m.dims != n.dims {
        return Ok(None);
    }
    let fwd = hom_basis(alg, m, n);
    if fwd.is_empty() {
        return Ok(None);
    }
    for _ in 0..trials {
        let phi = random_combination(alg.field, &fwd, rng);
        if phi.is_invertible() {
            return Ok(Some(phi));
        }
    }
    let bwd = hom_basis(alg, n, m);
    if bwd.is_empty() {
        return Ok(None);
    }
    let endos = hom_basis(alg, m, m);
    let jspan = if endos.len() <= 1 {
        Mat::zeros(
            alg.field,
            0,
            flatten(&GradedMap::identity(alg.field, &m.dims), alg.field).len(),
        )
    } else {
        match certify_local(alg, m, &endos, rng)? {
            Locality::Local { jspan } => jspan,
            Locality::Split(_) => {
                return Err(Error::DecomposeInconclusive {
                    trials,
                    end_dim: endos.len(),
                })
            }
        }
    };
    // m iso n  <=>  some psi . phi is invertible in the local ring End(m),
    // i.e. escapes its nilpotent ideal; then phi is itself invertible.
    for phi in &fwd {
        for psi in &bwd {
            let round = compose(psi, phi);
            if !in_row_span(&jspan, &flatten(&round, alg.field)) {
                debug_assert!(phi.is_invertible());
                return Ok(Some(phi.clone()));
            }
        }
    }
    Ok(None)
}

/// True iff an invertible intertwiner exists.
pub fn is_iso(
    alg: &Algebra,
    m: &Representation,
    n: &Representation,
    rng: &mut Rng,
    trials: usize,
) -> Result<bool> {
    Ok(find_iso(alg, m, n, rng, trials)?.is_some())
}

/// Uniform relation-satisfying representation by rejection sampling.
pub fn random_rep(
    alg: &Algebra,
    dims: &DimVec,
    rng: &mut Rng,
    budget: usize,
) -> Result<Representation> {
    if !alg.field.is_prime_field() {
        return Err(Error::NeedPrimeField);
    }
    for _ in 0..budget.max(1) {
        let maps = alg
            .quiver
            .arrows
            .iter()
            .map(|arrow| Mat::random(alg.field, dims.at(arrow.target), dims.at(arrow.source), rng))
            .collect();
        let cand = Representation {
            field: alg.field,
            dims: dims.clone(),
            maps,
        };
        if validate_rep(alg, &cand).is_ok() {
            return Ok(cand);
        }
    }
    Err(Error::RejectionBudget {
        budget,
        accepted: 0,
    })
}

/// A uniformly random point of the isomorphism orbit of `rep`: conjugate
/// by random invertible change of basis at every vertex.
pub fn random_conjugate(alg: &Algebra, rep: &Representation, rng: &mut Rng) -> Representation {
    let n = alg.vertices();
    let mut g = Vec::with_capacity(n);
    let mut ginv = Vec::with_capacity(n);
    for a in 0..n {
        let d = rep.dims.at(a);
        loop {
            let cand = Mat::random(alg.field, d, d, rng);
            if cand.is_invertible() {
                ginv.push(cand.inverse().expect("just checked"));
                g.push(cand);
                break;
            }
        }
    }
    let maps = alg
        .quiver
        .arrows
        .iter()
        .enumerate()
        .map(|(ai, arrow)| g[arrow.target].mul(&rep.maps[ai]).mul(&ginv[arrow.source]))
        .collect();
    Representation {
        field: alg.field,
        dims: rep.dims.clone(),
        maps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{a2, a3_bound};

    #[test]
    fn projectives_validate() {
        let alg = a3_bound(Field::Rationals);
        for a in 0..3 {
            validate_rep(&alg, &alg.projective_rep(a)).unwrap();
        }
        validate_rep(&alg, &Representation::zero(&alg)).unwrap();
    }

    #[test]
    fn identity_maps_violate_the_relation() {
        let alg = a3_bound(Field::Rationals);
        let v = Representation {
            field: alg.field,
            dims: DimVec(vec![1, 1, 1]),
            maps: vec![Mat::identity(alg.field, 1), Mat::identity(alg.field, 1)],
        };
        assert!(matches!(
            validate_rep(&alg, &v),
            Err(Error::RelationViolated { relation: 0, .. })
        ));
    }

    #[test]
    fn hom_from_projective_is_yoneda_sized() {
        let alg = a3_bound(Field::Rationals);
        for a in 0..3 {
            let pa = alg.projective_rep(a);
            for b in 0..3 {
                let m = alg.projective_rep(b);
                assert_eq!(
                    hom_basis(&alg, &pa, &m).len() as i64,
                    m.dims.get(a),
                    "Hom(P_{a}, P_{b})"
                );
            }
        }
    }

    #[test]
    fn hom_between_distinct_simples_is_empty() {
        let alg = a2(Field::Rationals);
        let s1 = alg.simple_rep(0);
        let s2 = alg.simple_rep(1);
        assert!(hom_basis(&alg, &s1, &s2).is_empty());
    }

    #[test]
    fn hom_contains_identity() {
        let alg = a2(Field::Rationals);
        let p = alg.projective_rep(0);
        let homs = hom_basis(&alg, &p, &p);
        let ident = GradedMap::identity(alg.field, &p.dims);
        // identity lies in the span: End(P_1) is one-dimensional here
        assert_eq!(homs.len(), 1);
        let h = &homs[0];
        assert!(!h.blocks[0].is_zero());
        let _ = ident;
    }

    #[test]
    fn kernel_image_of_identity_and_zero() {
        let alg = a2(Field::Rationals);
        let p = alg.projective_rep(0);
        let ident = GradedMap::identity(alg.field, &p.dims);
        let (k, _) = kernel_rep(&alg, &ident, &p, &p);
        assert!(k.dims.is_zero());
        let (im, _) = image_rep(&alg, &ident, &p, &p);
        assert_eq!(im.dims, p.dims);

        let zero = GradedMap::zero(alg.field, &p.dims, &p.dims);
        let (k0, _) = kernel_rep(&alg, &zero, &p, &p);
        assert_eq!(k0.dims, p.dims);
        let (i0, _) = image_rep(&alg, &zero, &p, &p);
        assert!(i0.dims.is_zero());
    }

    #[test]
    fn arrow_path_map_p2_to_p1() {
        let alg = a2(Field::Rationals);
        let p1 = alg.projective_rep(0);
        let p2 = alg.projective_rep(1);
        // Hom(P_2, P_1) is one-dimensional
        let homs = hom_basis(&alg, &p2, &p1);
        assert_eq!(homs.len(), 1);
        let f = &homs[0];
        let (im, _) = image_rep(&alg, f, &p2, &p1);
        assert_eq!(im.dims, DimVec(vec![0, 1]));
        let (k, _) = kernel_rep(&alg, f, &p2, &p1);
        assert!(k.dims.is_zero());
    }

    #[test]
    fn quotient_by_zero_and_by_everything() {
        let alg = a2(Field::Rationals);
        let p = alg.projective_rep(0);
        let zero = Representation::zero(&alg);
        let incl = GradedMap::zero(alg.field, &zero.dims, &p.dims);
        let (q, _) = quotient_rep(&alg, &p, &incl, &zero);
        assert_eq!(q.dims, p.dims);

        let ident = GradedMap::identity(alg.field, &p.dims);
        let (q2, _) = quotient_rep(&alg, &p, &ident, &p);
        assert!(q2.dims.is_zero());
    }

    #[test]
    fn rank_nullity_per_vertex() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let p1 = alg.projective_rep(0);
        let p2 = alg.projective_rep(1);
        let homs = hom_basis(&alg, &p1, &p2);
        for f in &homs {
            let (k, _) = kernel_rep(&alg, f, &p1, &p2);
            let r = f.rank_vec();
            assert_eq!(k.dims.add(&r), p1.dims);
        }
    }

    #[test]
    fn decompose_direct_sum_of_projectives() {
        let alg = a2(Field::prime(5).unwrap());
        let p1 = alg.projective_rep(0);
        let (m, _) = direct_sum(&alg, &[p1.clone(), p1.clone()]);
        let mut rng = Rng::new(11);
        let parts = decompose(&alg, &m, &mut rng, 64).unwrap();
        assert_eq!(parts.len(), 2);
        for s in &parts {
            assert_eq!(s.rep.dims, p1.dims);
            // incl . proj restricted to the summand is the identity
            let round = compose(&s.proj, &s.incl);
            assert_eq!(round, GradedMap::identity(alg.field, &s.rep.dims));
        }
    }

    #[test]
    fn decompose_splits_p1_plus_s3() {
        let alg = a3_bound(Field::prime(5).unwrap());
        // dims (1,1,1), alpha = 1, beta = 0: P_1 + S_3
        let v = Representation {
            field: alg.field,
            dims: DimVec(vec![1, 1, 1]),
            maps: vec![Mat::identity(alg.field, 1), Mat::zeros(alg.field, 1, 1)],
        };
        validate_rep(&alg, &v).unwrap();
        let mut rng = Rng::new(3);
        let parts = decompose(&alg, &v, &mut rng, 64).unwrap();
        let mut dims: Vec<DimVec> = parts.iter().map(|s| s.rep.dims.clone()).collect();
        dims.sort();
        assert_eq!(dims, vec![DimVec(vec![0, 0, 1]), DimVec(vec![1, 1, 0])]);
    }

    #[test]
    fn simple_is_indecomposable() {
        let alg = a3_bound(Field::prime(2).unwrap());
        let s = alg.simple_rep(1);
        let mut rng = Rng::new(5);
        let parts = decompose(&alg, &s, &mut rng, 64).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].rep.dims, s.dims);
    }

    #[test]
    fn iso_reflexive() {
        let alg = a2(Field::prime(5).unwrap());
        let p = alg.projective_rep(0);
        let mut rng = Rng::new(1);
        assert!(is_iso(&alg, &p, &p, &mut rng, 32).unwrap());
    }

    #[test]
    fn simples_sum_not_iso_to_projective() {
        let alg = a2(Field::prime(5).unwrap());
        let (ss, _) = direct_sum(&alg, &[alg.simple_rep(0), alg.simple_rep(1)]);
        let p1 = alg.projective_rep(0);
        assert_eq!(ss.dims, p1.dims);
        let mut rng = Rng::new(2);
        assert!(!is_iso(&alg, &ss, &p1, &mut rng, 32).unwrap());
    }

    #[test]
    fn scaled_arrow_is_iso() {
        let alg = a2(Field::prime(5).unwrap());
        let p1 = alg.projective_rep(0);
        let mut scaled = p1.clone();
        scaled.maps[0] = scaled.maps[0].scale(&alg.field.from_i64(2));
        validate_rep(&alg, &scaled).unwrap();
        let mut rng = Rng::new(4);
        assert!(is_iso(&alg, &p1, &scaled, &mut rng, 32).unwrap());
    }

    #[test]
    fn presentation_of_projective_is_free() {
        let alg = a3_bound(Field::Rationals);
        let p2 = alg.projective_rep(1);
        let pd = minimal_presentation(&alg, &p2);
        assert_eq!(pd.p0, DimVec(vec![0, 1, 0]));
        assert!(pd.p1.is_zero());
    }

    #[test]
    fn presentation_of_s1() {
        let alg = a3_bound(Field::Rationals);
        let s1 = alg.simple_rep(0);
        let pd = minimal_presentation(&alg, &s1);
        assert_eq!(pd.p0, DimVec(vec![1, 0, 0]));
        assert_eq!(pd.p1, DimVec(vec![0, 1, 0]));
        // cokernel of the syzygy is s1 again: cover is onto with matching rank
        let rank: i64 = pd.cover.rank_vec().total();
        assert_eq!(rank, s1.total_dim());
    }

    #[test]
    fn presentation_of_zero() {
        let alg = a2(Field::Rationals);
        let z = Representation::zero(&alg);
        let pd = minimal_presentation(&alg, &z);
        assert!(pd.p0.is_zero());
        assert!(pd.p1.is_zero());
    }

    #[test]
    fn random_rep_hereditary_never_rejects() {
        let alg = a2(Field::prime(2).unwrap());
        let mut rng = Rng::new(9);
        let v = random_rep(&alg, &DimVec(vec![2, 2]), &mut rng, 1).unwrap();
        validate_rep(&alg, &v).unwrap();
    }

    #[test]
    fn random_rep_zero_dims() {
        let alg = a3_bound(Field::prime(2).unwrap());
        let mut rng = Rng::new(9);
        let v = random_rep(&alg, &DimVec::zeros(3), &mut rng, 1).unwrap();
        assert!(v.dims.is_zero());
    }

    #[test]
    fn random_rep_respects_relations() {
        let alg = a3_bound(Field::prime(2).unwrap());
        let mut rng = Rng::new(13);
        for _ in 0..20 {
            let v = random_rep(&alg, &DimVec(vec![1, 1, 1]), &mut rng, 64).unwrap();
            validate_rep(&alg, &v).unwrap();
        }
    }

    #[test]
    fn relation_acceptance_rate_by_exhaustion() {
        // dims (1,1,1) over F_2: of the four (alpha, beta) pairs exactly
        // three satisfy beta.alpha = 0
        let alg = a3_bound(Field::prime(2).unwrap());
        let mut valid = 0;
        for a in 0..2i64 {
            for b in 0..2i64 {
                let v = Representation {
                    field: alg.field,
                    dims: DimVec(vec![1, 1, 1]),
                    maps: vec![
                        Mat::from_i64(alg.field, 1, 1, &[a]),
                        Mat::from_i64(alg.field, 1, 1, &[b]),
                    ],
                };
                if validate_rep(&alg, &v).is_ok() {
                    valid += 1;
                }
            }
        }
        assert_eq!(valid, 3);
    }

    #[test]
    fn decompose_is_honestly_inconclusive_over_a_small_field() {
        // Kronecker quiver, dims (2,2), second arrow acting as the
        // companion matrix of an irreducible quadratic: the endomorphism
        // ring is the field with four elements, which no F_2 certificate
        // can split or certify as scalars-plus-nilpotents
        let field = Field::prime(2).unwrap();
        let quiver = crate::algebra::Quiver {
            vertices: 2,
            arrows: vec![
                crate::algebra::Arrow {
                    name: "a".into(),
                    source: 0,
                    target: 1,
                },
                crate::algebra::Arrow {
                    name: "b".into(),
                    source: 0,
                    target: 1,
                },
            ],
        };
        let alg = crate::algebra::build_algebra(quiver, vec![], field, 8).unwrap();
        let v = Representation {
            field,
            dims: DimVec(vec![2, 2]),
            maps: vec![
                Mat::identity(field, 2),
                // companion of x^2 + x + 1
                Mat::from_i64(field, 2, 2, &[0, 1, 1, 1]),
            ],
        };
        validate_rep(&alg, &v).unwrap();
        let mut rng = Rng::new(5);
        assert!(matches!(
            decompose(&alg, &v, &mut rng, 32),
            Err(Error::DecomposeInconclusive { .. })
        ));
    }

    #[test]
    fn random_rep_needs_prime_field() {
        let alg = a2(Field::Rationals);
        let mut rng = Rng::new(1);
        assert!(matches!(
            random_rep(&alg, &DimVec(vec![1, 1]), &mut rng, 4),
            Err(Error::NeedPrimeField)
        ));
    }

    #[test]
    fn proj_cover_of_simple_is_projective() {
        let alg = a3_bound(Field::Rationals);
        let s1 = alg.simple_rep(0);
        let (cover, top) = proj_cover(&alg, &s1);
        assert_eq!(top, DimVec(vec![1, 0, 0]));
        assert_eq!(cover.total().dims, alg.projective_rep(0).dims);
        is_module_map(&alg, &cover.map, cover.total(), &s1).unwrap();
    }

    #[test]
    fn hom_sized_by_multiplicities() {
        // dim Hom(P^d, M) = sum_a d_a dim M_a
        let alg = a3_bound(Field::prime(3).unwrap());
        let d = DimVec(vec![1, 2, 0]);
        let sum = proj_sum(&alg, &d);
        let m = alg.projective_rep(0);
        let expected: i64 = (0..3).map(|a| d.get(a) * m.dims.get(a)).sum();
        assert_eq!(hom_basis(&alg, &sum.total, &m).len() as i64, expected);
    }

    #[test]
    fn random_conjugate_stays_isomorphic() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let p = alg.projective_rep(0);
        let mut rng = Rng::new(77);
        let conj = random_conjugate(&alg, &p, &mut rng);
        validate_rep(&alg, &conj).unwrap();
        assert!(is_iso(&alg, &p, &conj, &mut rng, 32).unwrap());
    }
}
