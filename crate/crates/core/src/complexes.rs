//! Complexes of projective modules with fixed rank profiles.
//!
//! A point of the complex variety is a sequence of elements of
//! `Hom(P^{d_i}, P^{d_{i-1}})` composing to zero. Elements are stored in
//! coordinates over the canonical hom-space basis (one coefficient per
//! basis path between summand generators), which is also the block-matrix
//! display format: the block of a (target summand, source summand) pair is
//! the coefficient list of the map between those indecomposables.

use std::ops::RangeInclusive;

use crate::algebra::{Algebra, DimVec};
use crate::error::Error;
use crate::field::Scalar;
use crate::matrix::Mat;
use crate::realization;
use crate::rep::{
    find_iso, image_rep, kernel_rep, proj_sum, quotient_rep, GradedMap, ProjSum, Representation,
};
use crate::rng::Rng;
use crate::Result;

/// Finitely supported sequence of dimension vectors (`vecs[t]` is the
/// vector at degree `start + t`, zero outside).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DimArray {
    pub n: usize,
    pub start: i64,
    pub vecs: Vec<DimVec>,
}

impl DimArray {
    pub fn new(n: usize, start: i64, vecs: Vec<DimVec>) -> DimArray {
        let mut da = DimArray { n, start, vecs };
        da.trim();
        da
    }

    pub fn empty(n: usize) -> DimArray {
        DimArray {
            n,
            start: 0,
            vecs: Vec::new(),
        }
    }

    fn trim(&mut self) {
        while self.vecs.first().is_some_and(DimVec::is_zero) {
            self.vecs.remove(0);
            self.start += 1;
        }
        while self.vecs.last().is_some_and(DimVec::is_zero) {
            self.vecs.pop();
        }
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    /// Exclusive end of the support.
    pub fn end(&self) -> i64 {
        self.start + self.vecs.len() as i64
    }

    pub fn get(&self, i: i64) -> DimVec {
        if i < self.start || i >= self.end() {
            DimVec::zeros(self.n)
        } else {
            self.vecs[(i - self.start) as usize].clone()
        }
    }

    pub fn support(&self) -> std::ops::Range<i64> {
        self.start..self.end()
    }
}

/// Descriptor of `Hom(P^source, P^target)` with its canonical coordinate
/// layout: target summands vertex-major, then source summands, then the
/// basis paths of the one-summand hom space.
pub struct HomSpace<'a> {
    pub alg: &'a Algebra,
    pub src: ProjSum,
    pub tgt: ProjSum,
    offsets: Vec<usize>,
    pub dim: usize,
}

impl<'a> HomSpace<'a> {
    pub fn new(alg: &'a Algebra, source: &DimVec, target: &DimVec) -> HomSpace<'a> {
        let src = proj_sum(alg, source);
        let tgt = proj_sum(alg, target);
        let mut offsets = Vec::with_capacity(tgt.summands.len() * src.summands.len() + 1);
        let mut off = 0;
        for &b in &tgt.summands {
            for &a in &src.summands {
                offsets.push(off);
                off += alg.basis(b, a).len();
            }
        }
        offsets.push(off);
        HomSpace {
            alg,
            src,
            tgt,
            offsets,
            dim: off,
        }
    }

    fn block_index(&self, t: usize, s: usize) -> usize {
        t * self.src.summands.len() + s
    }

    pub fn block_range(&self, t: usize, s: usize) -> std::ops::Range<usize> {
        let i = self.block_index(t, s);
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn zero_elem(&self) -> HomProjElement {
        HomProjElement {
            source_mult: self.src.mult.clone(),
            target_mult: self.tgt.mult.clone(),
            coords: vec![self.alg.field.zero(); self.dim],
        }
    }

    pub fn random_elem(&self, rng: &mut Rng) -> HomProjElement {
        HomProjElement {
            source_mult: self.src.mult.clone(),
            target_mult: self.tgt.mult.clone(),
            coords: (0..self.dim).map(|_| self.alg.field.random(rng)).collect(),
        }
    }

    pub fn elem_from_coords(&self, coords: Vec<Scalar>) -> HomProjElement {
        assert_eq!(coords.len(), self.dim);
        HomProjElement {
            source_mult: self.src.mult.clone(),
            target_mult: self.tgt.mult.clone(),
            coords,
        }
    }

    /// The graded-map form of an element on the underlying representations.
    pub fn to_graded(&self, e: &HomProjElement) -> GradedMap {
        let alg = self.alg;
        let f = alg.field;
        let n = alg.vertices();
        let mut blocks = Vec::with_capacity(n);
        for x in 0..n {
            let mut block = Mat::zeros(f, self.tgt.total.dims.at(x), self.src.total.dims.at(x));
            for (s, &a) in self.src.summands.iter().enumerate() {
                for (pslot, &pid) in alg.basis(a, x).iter().enumerate() {
                    let col = self.src.offsets[x][s] + pslot;
                    let p = alg.path(pid);
                    for (t, &b) in self.tgt.summands.iter().enumerate() {
                        let coeffs = &e.coords[self.block_range(t, s)];
                        for (qslot, qc) in coeffs.iter().enumerate() {
                            if qc.is_zero() {
                                continue;
                            }
                            let q = alg.basis_path(b, a, qslot);
                            let nf = alg.reduce_concat(q, p);
                            for (wslot, w) in nf.iter().enumerate() {
                                if w.is_zero() {
                                    continue;
                                }
                                let row = self.tgt.offsets[x][t] + wslot;
                                let v = f.add(block.get(row, col), &f.mul(qc, w));
                                block.set(row, col, v);
                            }
                        }
                    }
                }
            }
            blocks.push(block);
        }
        GradedMap { blocks }
    }

    /// Read hom coordinates back off a graded map by evaluating it on the
    /// summand generators.
    pub fn from_graded(&self, g: &GradedMap) -> HomProjElement {
        let alg = self.alg;
        let mut coords = vec![alg.field.zero(); self.dim];
        for (s, &a) in self.src.summands.iter().enumerate() {
            let gen = self.src.generator_coord(alg, s);
            let block = &g.blocks[a];
            for (t, &b) in self.tgt.summands.iter().enumerate() {
                let base = self.tgt.offsets[a][t];
                let range = self.block_range(t, s);
                for (qslot, pos) in range.enumerate() {
                    coords[pos] = block.get(base + qslot, gen).clone();
                }
                let _ = b;
            }
        }
        self.elem_from_coords(coords)
    }
}

/// An element of `Hom(P^{source_mult}, P^{target_mult})` in hom-basis
/// coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomProjElement {
    pub source_mult: DimVec,
    pub target_mult: DimVec,
    pub coords: Vec<Scalar>,
}

impl HomProjElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }
}

/// Composition `f . g` in hom coordinates (`g: P^d -> P^e`,
/// `f: P^e -> P^g`): multiply and reduce the path-algebra elements
/// blockwise.
pub fn hom_compose(alg: &Algebra, f: &HomProjElement, g: &HomProjElement) -> HomProjElement {
    assert_eq!(g.target_mult, f.source_mult, "middle multiplicities differ");
    let gs = HomSpace::new(alg, &g.source_mult, &g.target_mult);
    let fs = HomSpace::new(alg, &f.source_mult, &f.target_mult);
    let out = HomSpace::new(alg, &g.source_mult, &f.target_mult);
    let mut coords = vec![alg.field.zero(); out.dim];
    for (s, &a) in gs.src.summands.iter().enumerate() {
        for (m, &b) in gs.tgt.summands.iter().enumerate() {
            let g_block = &g.coords[gs.block_range(m, s)];
            if g_block.iter().all(Scalar::is_zero) {
                continue;
            }
            for (t, &c) in fs.tgt.summands.iter().enumerate() {
                let f_block = &f.coords[fs.block_range(t, m)];
                if f_block.iter().all(Scalar::is_zero) {
                    continue;
                }
                let range = out.block_range(t, s);
                for (uslot, uc) in g_block.iter().enumerate() {
                    if uc.is_zero() {
                        continue;
                    }
                    let u = alg.basis_path(b, a, uslot);
                    for (vslot, vc) in f_block.iter().enumerate() {
                        if vc.is_zero() {
                            continue;
                        }
                        let v = alg.basis_path(c, b, vslot);
                        // u in e_a.L.e_b, v in e_b.L.e_c: the product u.v
                        // traverses v first
                        let nf = alg.reduce_concat(v, u);
                        let scale = alg.field.mul(uc, vc);
                        for (wslot, w) in nf.iter().enumerate() {
                            if w.is_zero() {
                                continue;
                            }
                            let pos = range.start + wslot;
                            coords[pos] = alg.field.add(&coords[pos], &alg.field.mul(&scale, w));
                        }
                    }
                }
            }
        }
    }
    out.elem_from_coords(coords)
}

/// A point of the complex variety: differentials
/// `partial_i: P^{d_i} -> P^{d_{i-1}}` for the interior degrees of `d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexPoint {
    pub d: DimArray,
    /// `diffs[t]` is the differential at degree `d.start + 1 + t`.
    pub diffs: Vec<HomProjElement>,
}

impl ComplexPoint {
    pub fn zero(alg: &Algebra, d: DimArray) -> ComplexPoint {
        let mut diffs = Vec::new();
        for i in d.start + 1..d.end() {
            diffs.push(HomSpace::new(alg, &d.get(i), &d.get(i - 1)).zero_elem());
        }
        ComplexPoint { d, diffs }
    }

    /// Degrees carrying a stored differential.
    pub fn diff_degrees(&self) -> std::ops::Range<i64> {
        self.d.start + 1..self.d.end()
    }

    pub fn diff(&self, i: i64) -> Option<&HomProjElement> {
        if self.diff_degrees().contains(&i) {
            Some(&self.diffs[(i - self.d.start - 1) as usize])
        } else {
            None
        }
    }

    /// Graded-map form of the differential at any degree (zero maps at and
    /// beyond the boundary).
    pub fn diff_graded(&self, alg: &Algebra, i: i64) -> GradedMap {
        match self.diff(i) {
            Some(e) => HomSpace::new(alg, &e.source_mult, &e.target_mult).to_graded(e),
            None => {
                let src = alg.cartan().apply(&self.d.get(i));
                let tgt = alg.cartan().apply(&self.d.get(i - 1));
                GradedMap::zero(alg.field, &src, &tgt)
            }
        }
    }
}

/// Exact check of every composite `partial_i . partial_{i+1} = 0`.
pub fn validate_complex(alg: &Algebra, x: &ComplexPoint) -> Result<()> {
    for i in x.diff_degrees() {
        let e = x.diff(i).expect("in range");
        let hs = HomSpace::new(alg, &x.d.get(i), &x.d.get(i - 1));
        if e.source_mult != x.d.get(i)
            || e.target_mult != x.d.get(i - 1)
            || e.coords.len() != hs.dim
        {
            return Err(Error::ComplexShape { degree: i });
        }
    }
    for i in x.diff_degrees() {
        let Some(next) = x.diff(i + 1) else { continue };
        let here = x.diff(i).expect("in range");
        let composite = hom_compose(alg, here, next);
        if !composite.is_zero() {
            let hs = HomSpace::new(alg, &composite.source_mult, &composite.target_mult);
            let g = hs.to_graded(&composite);
            for (vertex, block) in g.blocks.iter().enumerate() {
                if let Some((row, col)) = block.first_nonzero() {
                    return Err(Error::NotAComplex {
                        degree: i,
                        vertex,
                        row,
                        col,
                    });
                }
            }
            unreachable!("nonzero hom element has a nonzero graded block");
        }
    }
    Ok(())
}

/// Dimension vectors of the images of all differentials.
pub fn rank_profile(alg: &Algebra, x: &ComplexPoint) -> DimArray {
    let mut vecs = Vec::new();
    for i in x.diff_degrees() {
        vecs.push(x.diff_graded(alg, i).rank_vec());
    }
    DimArray::new(alg.vertices(), x.d.start + 1, vecs)
}

/// Stratum arithmetic for a `(d, r)` pair: kernel dimensions `k`,
/// homology dimensions `h`, and the projective multiplicities `m` of the
/// kernels, on the hull `d.start ..= d.end()`.
#[derive(Clone, Debug)]
pub struct StrataProfile {
    pub d: DimArray,
    pub r: DimArray,
    pub start: i64,
    pub k: Vec<DimVec>,
    pub h: Vec<DimVec>,
    pub m: Vec<Option<DimVec>>,
    pub feasible: bool,
    pub reason: Option<String>,
}

impl StrataProfile {
    pub fn hull(&self) -> RangeInclusive<i64> {
        if self.k.is_empty() {
            return self.start..=self.start - 1;
        }
        self.start..=self.start + self.k.len() as i64 - 1
    }

    fn idx(&self, i: i64) -> Option<usize> {
        if !self.k.is_empty() && self.hull().contains(&i) {
            Some((i - self.start) as usize)
        } else {
            None
        }
    }

    pub fn k_at(&self, i: i64) -> DimVec {
        self.idx(i)
            .map_or(DimVec::zeros(self.d.n), |t| self.k[t].clone())
    }

    pub fn h_at(&self, i: i64) -> DimVec {
        self.idx(i)
            .map_or(DimVec::zeros(self.d.n), |t| self.h[t].clone())
    }

    pub fn m_at(&self, i: i64) -> Option<DimVec> {
        match self.idx(i) {
            Some(t) => self.m[t].clone(),
            None => Some(DimVec::zeros(self.d.n)),
        }
    }

    pub fn require_feasible(&self) -> Result<()> {
        if self.feasible {
            Ok(())
        } else {
            Err(Error::InfeasibleProfile {
                reason: self.reason.clone().unwrap_or_else(|| "unspecified".into()),
            })
        }
    }
}

/// Computes `k_i = Theta d_{i-1} - r_{i-1}`, `h_i = k_i - r_i`,
/// `m_i = Theta^{-1} k_i` on the hull, with the numeric feasibility
/// verdict. Infeasibility is a reported verdict, not an error; it is only
/// a necessary condition for the stratum to be nonempty.
pub fn strata_profile(alg: &Algebra, d: &DimArray, r: &DimArray) -> StrataProfile {
    let mut feasible = true;
    let mut reason = None;
    let note = |cond: bool, msg: String, feasible: &mut bool, reason: &mut Option<String>| {
        if !cond && *feasible {
            *feasible = false;
            *reason = Some(msg);
        }
    };

    for i in r.support() {
        if !r.get(i).is_zero() {
            note(
                !d.get(i).is_zero() && !d.get(i - 1).is_zero(),
                format!("rank at degree {i} must vanish where the complex does"),
                &mut feasible,
                &mut reason,
            );
            note(
                r.get(i).is_nonneg(),
                format!("rank at degree {i} is negative"),
                &mut feasible,
                &mut reason,
            );
        }
    }

    let start = d.start;
    let hull_len = if d.is_empty() { 0 } else { d.len() + 1 };
    let mut k = Vec::with_capacity(hull_len);
    let mut h = Vec::with_capacity(hull_len);
    let mut m = Vec::with_capacity(hull_len);
    for t in 0..hull_len {
        let i = start + t as i64;
        let ki = alg.cartan().apply(&d.get(i - 1)).sub(&r.get(i - 1));
        let hi = ki.sub(&r.get(i));
        note(
            ki.is_nonneg(),
            format!("kernel dimension k_{i} = {ki} is negative"),
            &mut feasible,
            &mut reason,
        );
        note(
            hi.is_nonneg(),
            format!("homology dimension h_{i} = {hi} is negative"),
            &mut feasible,
            &mut reason,
        );
        let mi = if ki.is_nonneg() {
            match alg.proj_multiplicities(&ki) {
                Ok(v) => Some(v),
                Err(e) => {
                    note(
                        false,
                        format!("kernel multiplicities at degree {i}: {e}"),
                        &mut feasible,
                        &mut reason,
                    );
                    None
                }
            }
        } else {
            None
        };
        k.push(ki);
        h.push(hi);
        m.push(mi);
    }
    StrataProfile {
        d: d.clone(),
        r: r.clone(),
        start,
        k,
        h,
        m,
        feasible,
        reason,
    }
}

/// Homology at degree `j`: `ker partial_j / im partial_{j+1}`, with the
/// canonical quotient structure.
pub fn homology_rep(alg: &Algebra, x: &ComplexPoint, j: i64) -> Representation {
    let src = proj_sum(alg, &x.d.get(j));
    let tgt = proj_sum(alg, &x.d.get(j - 1));
    let dj = x.diff_graded(alg, j);
    let (ker, ker_incl) = kernel_rep(alg, &dj, &src.total, &tgt.total);

    let above = proj_sum(alg, &x.d.get(j + 1));
    let dnext = x.diff_graded(alg, j + 1);
    let (img, img_incl) = image_rep(alg, &dnext, &above.total, &src.total);
    let into_ker =
        factor_through(alg, &ker_incl, &img_incl).expect("image lies in the kernel of a complex");
    let (hom, _) = quotient_rep(alg, &ker, &into_ker, &img);
    hom
}

/// Per-kernel projectivity verdicts.
#[derive(Clone, Debug)]
pub struct KernelCheck {
    /// Kernel of the differential at this degree.
    pub degree: i64,
    pub kernel_dims: DimVec,
    /// Projective multiplicities when they exist.
    pub mult: Option<DimVec>,
    pub projective: bool,
}

/// Certifies `ker(partial_j)` projective (isomorphic to `P^m` with
/// `Theta m = dim ker`) for every supported degree.
pub fn check_kernel_projective(
    alg: &Algebra,
    x: &ComplexPoint,
    rng: &mut Rng,
    trials: usize,
) -> Result<Vec<KernelCheck>> {
    let mut out = Vec::new();
    for j in x.d.support() {
        let src = proj_sum(alg, &x.d.get(j));
        let tgt = proj_sum(alg, &x.d.get(j - 1));
        let dj = x.diff_graded(alg, j);
        let (ker, _) = kernel_rep(alg, &dj, &src.total, &tgt.total);
        let mult = alg.proj_multiplicities(&ker.dims).ok();
        let projective = match &mult {
            None => false,
            Some(m) => {
                let pm = proj_sum(alg, m);
                find_iso(alg, &pm.total, &ker, rng, trials)?.is_some()
            }
        };
        out.push(KernelCheck {
            degree: j,
            kernel_dims: ker.dims.clone(),
            mult,
            projective,
        });
    }
    Ok(out)
}

/// Uniform point of the complex variety: each differential is drawn
/// uniformly from the kernel of post-composition with the previous one.
pub fn random_complex(alg: &Algebra, d: &DimArray, seed: u64) -> ComplexPoint {
    let mut rng = Rng::new(seed);
    let f = alg.field;
    let mut diffs: Vec<HomProjElement> = Vec::new();
    for i in d.start + 1..d.end() {
        let hs = HomSpace::new(alg, &d.get(i), &d.get(i - 1));
        let prev = diffs.last();
        let elem = match prev {
            None => hs.random_elem(&mut rng),
            Some(p) if p.is_zero() => hs.random_elem(&mut rng),
            Some(p) => {
                // linear condition: prev . elem = 0 coordinatewise
                let out = HomSpace::new(alg, &d.get(i), &d.get(i - 2));
                let mut system = Mat::zeros(f, out.dim, hs.dim);
                for j in 0..hs.dim {
                    let mut unit = vec![f.zero(); hs.dim];
                    unit[j] = f.one();
                    let composite = hom_compose(alg, p, &hs.elem_from_coords(unit));
                    for (r, v) in composite.coords.iter().enumerate() {
                        if !v.is_zero() {
                            system.set(r, j, v.clone());
                        }
                    }
                }
                let kernel = system.kernel_basis();
                let mut coords = vec![f.zero(); hs.dim];
                for b in 0..kernel.cols() {
                    let c = f.random(&mut rng);
                    if c.is_zero() {
                        continue;
                    }
                    for rr in 0..hs.dim {
                        let v = kernel.get(rr, b);
                        if !v.is_zero() {
                            coords[rr] = f.add(&coords[rr], &f.mul(&c, v));
                        }
                    }
                }
                hs.elem_from_coords(coords)
            }
        };
        diffs.push(elem);
    }
    ComplexPoint {
        d: d.clone(),
        diffs,
    }
}

/// Sampler for a fixed rank profile: draw homology degreewise inside the
/// presentable locus, then resolve and assemble the differentials. The
/// output has exactly the requested rank profile. Exhausting the budget
/// means the stratum is *possibly* empty, never a verdict.
pub fn random_complex_fixed_rank(
    alg: &Algebra,
    profile: &StrataProfile,
    seed: u64,
    budget: usize,
) -> Result<ComplexPoint> {
    let point = realization::build_from_random_homology(alg, profile, seed, budget)?;
    Ok(realization::pi(&point))
}

/// Solve `incl . x = map` blockwise (factor a map through an inclusion).
pub(crate) fn factor_through(
    alg: &Algebra,
    incl: &GradedMap,
    map: &GradedMap,
) -> Option<GradedMap> {
    let blocks: Option<Vec<Mat>> = (0..alg.vertices())
        .map(|a| incl.blocks[a].solve_right(&map.blocks[a]))
        .collect();
    blocks.map(|blocks| GradedMap { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::rep;
    use crate::testutil::{a2, a3_bound, a3_free};

    fn dv(v: &[i64]) -> DimVec {
        DimVec(v.to_vec())
    }

    #[test]
    fn hom_space_dimension_and_zero_blocks() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let hs = HomSpace::new(&alg, &dv(&[2, 4, 1]), &dv(&[2, 2, 2]));
        // sum over summand pairs of dim Hom(P_a, P_b)
        assert_eq!(hs.dim, 24);
        // Hom(P_1 -> P_2) and Hom(P_3 -> P_1) blocks are empty here
        for (t, &b) in hs.tgt.summands.iter().enumerate() {
            for (s, &a) in hs.src.summands.iter().enumerate() {
                let len = hs.block_range(t, s).len();
                if (a, b) == (0, 1) || (a, b) == (2, 0) {
                    assert_eq!(len, 0);
                }
            }
        }
    }

    #[test]
    fn hom_space_from_zero_source() {
        let alg = a2(Field::Rationals);
        let hs = HomSpace::new(&alg, &dv(&[0, 0]), &dv(&[1, 1]));
        assert_eq!(hs.dim, 0);
    }

    #[test]
    fn composition_through_dead_path_vanishes() {
        // with ba = 0 the (P_3 -> P_2 -> P_1) composite is forced to zero
        let alg = a3_bound(Field::prime(5).unwrap());
        let x = HomSpace::new(&alg, &dv(&[0, 0, 1]), &dv(&[0, 1, 0]));
        let y = HomSpace::new(&alg, &dv(&[0, 1, 0]), &dv(&[1, 0, 0]));
        let mut rng = Rng::new(1);
        let xe = x.random_elem(&mut rng);
        let ye = y.random_elem(&mut rng);
        let comp = hom_compose(&alg, &ye, &xe);
        assert!(comp.is_zero());

        // without the relation the same composite is the nonzero long path
        let free = a3_free(Field::prime(5).unwrap());
        let xf = HomSpace::new(&free, &dv(&[0, 0, 1]), &dv(&[0, 1, 0]));
        let yf = HomSpace::new(&free, &dv(&[0, 1, 0]), &dv(&[1, 0, 0]));
        let one = |hs: &HomSpace| {
            let coords = vec![free.field.one(); hs.dim];
            hs.elem_from_coords(coords)
        };
        let comp_free = hom_compose(&free, &one(&yf), &one(&xf));
        assert!(!comp_free.is_zero());
    }

    #[test]
    fn graded_roundtrip_is_module_map() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let hs = HomSpace::new(&alg, &dv(&[1, 2, 1]), &dv(&[2, 1, 0]));
        let mut rng = Rng::new(7);
        for _ in 0..5 {
            let e = hs.random_elem(&mut rng);
            let g = hs.to_graded(&e);
            rep::is_module_map(&alg, &g, &hs.src.total, &hs.tgt.total).unwrap();
            let back = hs.from_graded(&g);
            assert_eq!(back, e);
        }
    }

    #[test]
    fn zero_complex_validates() {
        let alg = a2(Field::prime(3).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let x = ComplexPoint::zero(&alg, d);
        validate_complex(&alg, &x).unwrap();
        let r = rank_profile(&alg, &x);
        assert!(r.is_empty());
    }

    #[test]
    fn identity_composite_is_rejected() {
        let alg = a2(Field::Rationals);
        let d = DimArray::new(2, 0, vec![dv(&[1, 1]), dv(&[1, 1]), dv(&[1, 1])]);
        let hs = HomSpace::new(&alg, &dv(&[1, 1]), &dv(&[1, 1]));
        let ident = hs.from_graded(&GradedMap::identity(alg.field, &hs.src.total.dims));
        let x = ComplexPoint {
            d,
            diffs: vec![ident.clone(), ident],
        };
        assert!(matches!(
            validate_complex(&alg, &x),
            Err(Error::NotAComplex { degree: 1, .. })
        ));
    }

    #[test]
    fn rank_profile_a2_strata() {
        let alg = a2(Field::Rationals);
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let hs = HomSpace::new(&alg, &dv(&[1, 1]), &dv(&[1, 0]));
        // coordinates: (lambda) on the P_1 -> P_1 block, (mu) on P_2 -> P_1
        let f = alg.field;
        let mk =
            |lambda: i64, mu: i64| hs.elem_from_coords(vec![f.from_i64(lambda), f.from_i64(mu)]);
        let x1 = ComplexPoint {
            d: d.clone(),
            diffs: vec![mk(1, 0)],
        };
        assert_eq!(rank_profile(&alg, &x1).get(1), dv(&[1, 1]));
        let x2 = ComplexPoint {
            d: d.clone(),
            diffs: vec![mk(0, 1)],
        };
        assert_eq!(rank_profile(&alg, &x2).get(1), dv(&[0, 1]));
    }

    #[test]
    fn profile_matches_worked_instance() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let d = DimArray::new(3, 0, vec![dv(&[2, 2, 2]), dv(&[2, 4, 1]), dv(&[2, 3, 2])]);
        let r = DimArray::new(3, 1, vec![dv(&[0, 2, 1]), dv(&[0, 1, 1])]);
        let p = strata_profile(&alg, &d, &r);
        assert!(p.feasible, "{:?}", p.reason);
        for i in 1..=3 {
            assert_eq!(p.k_at(i), dv(&[2, 4, 4]));
            assert_eq!(p.m_at(i), Some(dv(&[2, 2, 2])));
        }
        assert_eq!(p.h_at(1), dv(&[2, 2, 3]));
        assert_eq!(p.h_at(2), dv(&[2, 3, 3]));
        assert_eq!(p.h_at(3), dv(&[2, 4, 4]));
    }

    #[test]
    fn profile_zero_ranks() {
        let alg = a3_bound(Field::Rationals);
        let d = DimArray::new(3, 0, vec![dv(&[1, 0, 0]), dv(&[0, 1, 0])]);
        let r = DimArray::empty(3);
        let p = strata_profile(&alg, &d, &r);
        assert!(p.feasible);
        assert_eq!(p.k_at(1), alg.cartan().apply(&dv(&[1, 0, 0])));
        assert_eq!(p.h_at(1), p.k_at(1));
        assert_eq!(p.m_at(1), Some(dv(&[1, 0, 0])));
    }

    #[test]
    fn profile_a2_instance() {
        let alg = a2(Field::Rationals);
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let r = DimArray::new(2, 1, vec![dv(&[1, 1])]);
        let p = strata_profile(&alg, &d, &r);
        assert!(p.feasible);
        assert_eq!(p.k_at(1), dv(&[1, 1]));
        assert_eq!(p.m_at(1), Some(dv(&[1, 0])));
        assert_eq!(p.h_at(1), dv(&[0, 0]));
        assert_eq!(p.k_at(2), dv(&[0, 1]));
        assert_eq!(p.m_at(2), Some(dv(&[0, 1])));
        assert_eq!(p.h_at(2), dv(&[0, 1]));
    }

    #[test]
    fn infeasible_rank_is_reported_not_thrown() {
        let alg = a2(Field::Rationals);
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let r = DimArray::new(2, 1, vec![dv(&[5, 5])]);
        let p = strata_profile(&alg, &d, &r);
        assert!(!p.feasible);
        assert!(p.reason.is_some());
        assert!(p.require_feasible().is_err());
    }

    #[test]
    fn homology_of_zero_complex_is_whole() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let d = DimArray::new(3, 0, vec![dv(&[1, 1, 0]), dv(&[0, 1, 1])]);
        let x = ComplexPoint::zero(&alg, d.clone());
        for j in 0..2 {
            let h = homology_rep(&alg, &x, j);
            assert_eq!(h.dims, alg.cartan().apply(&d.get(j)));
        }
    }

    #[test]
    fn homology_of_a2_instance() {
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let hs = HomSpace::new(&alg, &dv(&[1, 1]), &dv(&[1, 0]));
        let f = alg.field;
        let x = ComplexPoint {
            d,
            diffs: vec![hs.elem_from_coords(vec![f.one(), f.zero()])],
        };
        validate_complex(&alg, &x).unwrap();
        let h0 = homology_rep(&alg, &x, 0);
        assert!(h0.dims.is_zero());
        let h1 = homology_rep(&alg, &x, 1);
        assert_eq!(h1.dims, dv(&[0, 1]));
    }

    #[test]
    fn kernel_projectivity_on_samples() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let d = DimArray::new(3, 0, vec![dv(&[1, 1, 1]), dv(&[1, 2, 1]), dv(&[1, 1, 1])]);
        let mut rng = Rng::new(42);
        for seed in 0..5 {
            let x = random_complex(&alg, &d, seed);
            validate_complex(&alg, &x).unwrap();
            for check in check_kernel_projective(&alg, &x, &mut rng, 40).unwrap() {
                assert!(check.projective, "degree {}", check.degree);
            }
        }
    }

    #[test]
    fn homology_dimension_identity_on_samples() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let d = DimArray::new(3, 0, vec![dv(&[1, 1, 1]), dv(&[1, 2, 1]), dv(&[1, 1, 1])]);
        for seed in 0..10 {
            let x = random_complex(&alg, &d, seed);
            let r = rank_profile(&alg, &x);
            let p = strata_profile(&alg, &x.d, &r);
            assert!(p.feasible);
            for i in p.hull() {
                let h = homology_rep(&alg, &x, i - 1);
                assert_eq!(h.dims, p.h_at(i), "degree {} seed {}", i, seed);
            }
        }
    }

    #[test]
    fn single_degree_support_has_no_differentials() {
        let alg = a2(Field::prime(3).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 1])]);
        let x = random_complex(&alg, &d, 5);
        assert!(x.diffs.is_empty());
        validate_complex(&alg, &x).unwrap();
    }
}
