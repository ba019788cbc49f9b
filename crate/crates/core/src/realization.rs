//! Complexes paired with explicit realizations of their homology.
//!
//! A point carries, per degree, the differential together with a
//! factorization through the standard projective `P^{m_i}`: a monomorphism
//! `eta_i: P^{m_i} -> P^{d_{i-1}}` onto the kernel of the previous
//! differential, `phi_i: P^{d_i} -> P^{m_i}` with `partial_i = eta_i phi_i`,
//! and an epimorphism `gamma_i: P^{m_i} -> H_i` whose kernel is the image
//! of `phi_i`. The two projections `pi` (forget homology) and `rho` (keep
//! homology) have explicit sections: `lift` reconstructs a point over a
//! complex, `build_from_homology` over a presentable graded module. The
//! fibre dimensions of the bundle decompositions of `pi` and `rho` are
//! pure profile arithmetic and are computed here as well.

use serde::Serialize;

use crate::algebra::{Algebra, DimVec};
use crate::complexes::{
    factor_through, rank_profile, strata_profile, ComplexPoint, DimArray, HomProjElement, HomSpace,
    StrataProfile,
};
use crate::error::Error;
use crate::matrix::Mat;
use crate::rep::{
    self, compose, find_iso, hom_basis, image_rep, kernel_rep, minimal_presentation, proj_sum,
    quotient_rep, random_conjugate, random_rep, GradedMap, Representation,
};
use crate::rng::Rng;
use crate::Result;

/// Per-degree data of a point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RealizationDegree {
    /// `partial_i: P^{d_i} -> P^{d_{i-1}}`
    pub partial: HomProjElement,
    /// `eta_i: P^{m_i} -> P^{d_{i-1}}`, injective
    pub eta: HomProjElement,
    /// `phi_i: P^{d_i} -> P^{m_i}` with `partial = eta . phi`
    pub phi: HomProjElement,
    /// `gamma_i: P^{m_i} -> H_i`, surjective, kernel = image of `phi`
    pub gamma: GradedMap,
    /// `H_i`
    pub homology: Representation,
}

/// A point over the hull `start ..= start + d.len()`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RealizationPoint {
    pub d: DimArray,
    pub r: DimArray,
    pub start: i64,
    pub degrees: Vec<RealizationDegree>,
}

impl RealizationPoint {
    pub fn degree(&self, i: i64) -> Option<&RealizationDegree> {
        let t = i - self.start;
        if t < 0 {
            return None;
        }
        self.degrees.get(t as usize)
    }

    pub fn hull(&self) -> std::ops::RangeInclusive<i64> {
        self.start..=self.start + self.degrees.len() as i64 - 1
    }
}

/// A finitely supported sequence of representations, hull-aligned.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedModule {
    pub start: i64,
    pub reps: Vec<Representation>,
}

impl GradedModule {
    pub fn get(&self, i: i64) -> Option<&Representation> {
        let t = i - self.start;
        if t < 0 {
            return None;
        }
        self.reps.get(t as usize)
    }
}

/// Forget the homology data: the underlying complex, bit for bit.
pub fn pi(z: &RealizationPoint) -> ComplexPoint {
    let len = z.d.len();
    let mut diffs = Vec::new();
    for t in 1..len {
        diffs.push(z.degrees[t].partial.clone());
    }
    ComplexPoint {
        d: z.d.clone(),
        diffs,
    }
}

/// Keep only the homology coordinates.
pub fn rho(z: &RealizationPoint) -> GradedModule {
    GradedModule {
        start: z.start,
        reps: z.degrees.iter().map(|g| g.homology.clone()).collect(),
    }
}

fn condition(cond: bool, name: &'static str, degree: i64) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::RealizationCondition {
            condition: name,
            degree,
        })
    }
}

/// Exact check of all defining conditions, including `ker gamma = im phi`.
pub fn validate_point(alg: &Algebra, z: &RealizationPoint) -> Result<()> {
    let profile = strata_profile(alg, &z.d, &z.r);
    profile.require_feasible()?;
    let len = z.d.len();
    if z.degrees.len() != len + 1 && !(len == 0 && z.degrees.is_empty()) {
        return Err(Error::ComplexShape { degree: z.start });
    }
    for (t, deg) in z.degrees.iter().enumerate() {
        let i = z.start + t as i64;
        let d_i = z.d.get(i);
        let d_prev = z.d.get(i - 1);
        let m_i = profile
            .m_at(i)
            .ok_or(Error::KernelNotProjective { degree: i - 1 })?;
        let h_i = profile.h_at(i);

        condition(
            deg.partial.source_mult == d_i && deg.partial.target_mult == d_prev,
            "partial shape",
            i,
        )?;
        condition(
            deg.eta.source_mult == m_i && deg.eta.target_mult == d_prev,
            "eta shape",
            i,
        )?;
        condition(
            deg.phi.source_mult == d_i && deg.phi.target_mult == m_i,
            "phi shape",
            i,
        )?;
        condition(deg.homology.dims == h_i, "homology dimension", i)?;

        // partial . partial = 0
        if t + 1 < z.degrees.len() {
            let comp = crate::complexes::hom_compose(alg, &deg.partial, &z.degrees[t + 1].partial);
            condition(comp.is_zero(), "partial . partial = 0", i)?;
        }
        // partial = eta . phi
        let eta_phi = crate::complexes::hom_compose(alg, &deg.eta, &deg.phi);
        condition(eta_phi == deg.partial, "partial = eta . phi", i)?;
        // previous partial kills eta
        if t >= 1 {
            let prev = &z.degrees[t - 1].partial;
            let comp = crate::complexes::hom_compose(alg, prev, &deg.eta);
            condition(comp.is_zero(), "partial . eta = 0", i)?;
        }

        let m_sum = proj_sum(alg, &m_i);
        let eta_graded = HomSpace::new(alg, &m_i, &d_prev).to_graded(&deg.eta);
        let phi_space = HomSpace::new(alg, &d_i, &m_i);
        let phi_graded = phi_space.to_graded(&deg.phi);

        // eta injective
        condition(
            eta_graded.rank_vec() == alg.cartan().apply(&m_i),
            "eta injective",
            i,
        )?;
        // rank(phi) = r
        condition(phi_graded.rank_vec() == z.r.get(i), "rank phi = r", i)?;
        // gamma: module epimorphism onto a valid representation
        rep::validate_rep(alg, &deg.homology).map_err(|_| Error::RealizationCondition {
            condition: "homology satisfies relations",
            degree: i,
        })?;
        condition(
            deg.gamma.blocks.len() == alg.vertices()
                && (0..alg.vertices()).all(|a| {
                    deg.gamma.blocks[a].rows() == deg.homology.dims.at(a)
                        && deg.gamma.blocks[a].cols() == m_sum.total.dims.at(a)
                }),
            "gamma shape",
            i,
        )?;
        condition(
            rep::is_module_map(alg, &deg.gamma, &m_sum.total, &deg.homology).is_ok(),
            "gamma is a module map",
            i,
        )?;
        condition(deg.gamma.rank_vec() == h_i, "gamma surjective", i)?;
        // gamma . phi = 0
        let gp = compose(&deg.gamma, &phi_graded);
        condition(gp.is_zero(), "gamma . phi = 0", i)?;
        // ker gamma = im phi: containment from the previous condition,
        // equality by vertexwise dimensions
        let ker_gamma_dims = alg.cartan().apply(&m_i).sub(&deg.gamma.rank_vec());
        condition(
            ker_gamma_dims == phi_graded.rank_vec(),
            "ker gamma = im phi",
            i,
        )?;
    }
    Ok(())
}

/// Section of `pi`: reconstruct the homology realization over a complex.
/// Deterministic for a given seed; fails when some kernel is not
/// projective (the global-dimension hypothesis is violated).
pub fn lift(alg: &Algebra, x: &ComplexPoint, seed: u64, trials: usize) -> Result<RealizationPoint> {
    let mut rng = Rng::new(seed);
    let r = rank_profile(alg, x);
    let profile = strata_profile(alg, &x.d, &r);
    let len = x.d.len();
    let mut degrees = Vec::with_capacity(len + 1);
    for t in 0..=len {
        if len == 0 {
            break;
        }
        let i = x.d.start + t as i64;
        let d_i = x.d.get(i);
        let d_prev = x.d.get(i - 1);
        let m_i = profile
            .m_at(i)
            .ok_or(Error::KernelNotProjective { degree: i - 1 })?;

        let prev_src = proj_sum(alg, &d_prev);
        let prev_tgt = proj_sum(alg, &x.d.get(i - 2));
        let d_prev_graded = x.diff_graded(alg, i - 1);
        let (ker, ker_incl) = kernel_rep(alg, &d_prev_graded, &prev_src.total, &prev_tgt.total);

        let m_sum = proj_sum(alg, &m_i);
        let u = find_iso(alg, &m_sum.total, &ker, &mut rng, trials)?
            .ok_or(Error::KernelNotProjective { degree: i - 1 })?;
        let eta_graded = compose(&ker_incl, &u);
        let eta_space = HomSpace::new(alg, &m_i, &d_prev);
        let eta = eta_space.from_graded(&eta_graded);

        // phi = eta^{-1} . partial, via blockwise left inverses
        let partial = match x.diff(i) {
            Some(e) => e.clone(),
            None => HomSpace::new(alg, &d_i, &d_prev).zero_elem(),
        };
        let partial_graded = x.diff_graded(alg, i);
        let phi_blocks: Result<Vec<Mat>> = (0..alg.vertices())
            .map(|a| {
                Ok(eta_graded.blocks[a]
                    .left_inverse()?
                    .mul(&partial_graded.blocks[a]))
            })
            .collect();
        let phi_graded = GradedMap {
            blocks: phi_blocks?,
        };
        let phi_space = HomSpace::new(alg, &d_i, &m_i);
        let phi = phi_space.from_graded(&phi_graded);
        debug_assert_eq!(phi_space.to_graded(&phi), phi_graded, "phi is a module map");

        // gamma: canonical quotient of P^{m_i} by the image of phi
        let d_sum = proj_sum(alg, &d_i);
        let (img, img_incl) = image_rep(alg, &phi_graded, &d_sum.total, &m_sum.total);
        let (homology, gamma) = quotient_rep(alg, &m_sum.total, &img_incl, &img);

        degrees.push(RealizationDegree {
            partial,
            eta,
            phi,
            gamma,
            homology,
        });
    }
    let z = RealizationPoint {
        d: x.d.clone(),
        r,
        start: x.d.start,
        degrees,
    };
    validate_point(alg, &z)?;
    Ok(z)
}

/// Is `h` presentable at this degree of the profile, i.e. does it admit a
/// presentation `P^{d_i} -> P^{m_i} -> h -> 0`? Decided by the minimal
/// presentation multiplicities, padding included.
pub fn presentable(alg: &Algebra, h: &Representation, m_i: &DimVec, d_i: &DimVec) -> bool {
    let pres = minimal_presentation(alg, h);
    if !pres.p0.le(m_i) {
        return false;
    }
    let padded = pres.p1.add(&m_i.sub(&pres.p0));
    padded.le(d_i)
}

/// Membership of a graded module in the image of `rho`: every degree must
/// be presentable.
pub fn membership_presentable(
    alg: &Algebra,
    profile: &StrataProfile,
    h: &GradedModule,
) -> Result<bool> {
    profile.require_feasible()?;
    for i in profile.hull() {
        let h_i = profile.h_at(i);
        let rep = h.get(i);
        let dims = rep
            .map(|r| r.dims.clone())
            .unwrap_or_else(|| DimVec::zeros(profile.d.n));
        if dims != h_i {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "graded module has dims {dims} at degree {i}, profile wants {h_i}"
                ),
            });
        }
        if h_i.is_zero() {
            continue;
        }
        let m_i = profile.m_at(i).ok_or(Error::InfeasibleProfile {
            reason: format!("no kernel multiplicities at degree {i}"),
        })?;
        let rep = rep.expect("nonzero dims have a representation");
        if !presentable(alg, rep, &m_i, &profile.d.get(i)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Section of `rho`: resolve a presentable graded module into a point.
/// `rho(build(..)) = h` exactly and the rank profile of the underlying
/// complex is the profile's `r`.
pub fn build_from_homology(
    alg: &Algebra,
    profile: &StrataProfile,
    h: &GradedModule,
    seed: u64,
    trials: usize,
) -> Result<RealizationPoint> {
    profile.require_feasible()?;
    let mut rng = Rng::new(seed);
    let d = &profile.d;
    let len = d.len();
    let mut degrees: Vec<RealizationDegree> = Vec::with_capacity(len + 1);
    let mut prev_phi_graded: Option<GradedMap> = None;
    for t in 0..=len {
        if len == 0 {
            break;
        }
        let i = d.start + t as i64;
        let d_i = d.get(i);
        let d_prev = d.get(i - 1);
        let h_i = profile.h_at(i);
        let m_i = profile.m_at(i).ok_or(Error::InfeasibleProfile {
            reason: format!("no kernel multiplicities at degree {i}"),
        })?;
        let h_rep = match h.get(i) {
            Some(r) => r.clone(),
            None => Representation::zero(alg),
        };
        let h_dims_ok = if h_i.is_zero() {
            h_rep.dims.is_zero()
        } else {
            h_rep.dims == h_i
        };
        if !h_dims_ok {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "homology dims {} at degree {i}, profile wants {h_i}",
                    h_rep.dims
                ),
            });
        }
        let h_rep = if h_rep.dims.len() != alg.vertices() {
            // normalize the zero module to the right shape
            let mut z = Representation::zero(alg);
            z.dims = DimVec::zeros(alg.vertices());
            z
        } else {
            h_rep
        };
        if !h_i.is_zero() && !presentable(alg, &h_rep, &m_i, &d_i) {
            return Err(Error::NotPresentable { degree: i });
        }

        let m_sum = proj_sum(alg, &m_i);

        // gamma: minimal cover of h padded with zero columns up to m_i
        let pres = minimal_presentation(alg, &h_rep);
        let gamma = pad_cover(alg, &pres.p0, &pres.cover, &m_i, &h_rep);
        let (ker_gamma, ker_incl) = kernel_rep(alg, &gamma, &m_sum.total, &h_rep);

        // phi: cover the kernel of gamma by P^{d_i}, padded
        let (kcov, ktop) = rep::proj_cover(alg, &ker_gamma);
        if !ktop.le(&d_i) {
            return Err(Error::NotPresentable { degree: i });
        }
        let cover_into_m = compose(&ker_incl, &kcov.map);
        let phi_graded = pad_source(alg, &ktop, &cover_into_m, &d_i, &m_sum.total.dims);
        let phi_space = HomSpace::new(alg, &d_i, &m_i);
        let phi = phi_space.from_graded(&phi_graded);

        // eta: identify P^{m_i} with the kernel of the previous phi
        let (eta, eta_graded) = if t == 0 {
            let space = HomSpace::new(alg, &m_i, &d_prev);
            (
                space.zero_elem(),
                GradedMap::zero(
                    alg.field,
                    &alg.cartan().apply(&m_i),
                    &alg.cartan().apply(&d_prev),
                ),
            )
        } else {
            let prev_sum = proj_sum(alg, &d_prev);
            let prev_m = profile.m_at(i - 1).expect("checked above");
            let prev_m_sum = proj_sum(alg, &prev_m);
            let prev_phi = prev_phi_graded.as_ref().expect("t >= 1");
            let (kp, kp_incl) = kernel_rep(alg, prev_phi, &prev_sum.total, &prev_m_sum.total);
            let u = find_iso(alg, &m_sum.total, &kp, &mut rng, trials)?
                .ok_or(Error::KernelNotProjective { degree: i - 1 })?;
            let eta_graded = compose(&kp_incl, &u);
            let space = HomSpace::new(alg, &m_i, &d_prev);
            (space.from_graded(&eta_graded), eta_graded)
        };
        let _ = eta_graded;

        let partial = crate::complexes::hom_compose(alg, &eta, &phi);
        prev_phi_graded = Some(phi_graded);
        degrees.push(RealizationDegree {
            partial,
            eta,
            phi,
            gamma,
            homology: h_rep,
        });
    }
    let z = RealizationPoint {
        d: d.clone(),
        r: profile.r.clone(),
        start: d.start,
        degrees,
    };
    validate_point(alg, &z)?;
    Ok(z)
}

/// Extend a cover `P^{p0} -> h` by zero columns to `P^{m} -> h`
/// (summands are vertex-major, the first `p0_a` copies per vertex carry
/// the cover).
fn pad_cover(
    alg: &Algebra,
    p0: &DimVec,
    cover: &GradedMap,
    m: &DimVec,
    h: &Representation,
) -> GradedMap {
    let small = proj_sum(alg, p0);
    let big = proj_sum(alg, m);
    let n = alg.vertices();
    let mut blocks = Vec::with_capacity(n);
    for c in 0..n {
        let mut block = Mat::zeros(alg.field, h.dims.at(c), big.total.dims.at(c));
        for (s_small, &b) in small.summands.iter().enumerate() {
            let copy = small.summands[..s_small]
                .iter()
                .filter(|&&x| x == b)
                .count();
            let s_big = big
                .summands
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == b)
                .nth(copy)
                .map(|(idx, _)| idx)
                .expect("p0 <= m");
            let width = alg.basis(b, c).len();
            for w in 0..width {
                for rr in 0..h.dims.at(c) {
                    let v = cover.blocks[c].get(rr, small.offsets[c][s_small] + w);
                    if !v.is_zero() {
                        block.set(rr, big.offsets[c][s_big] + w, v.clone());
                    }
                }
            }
        }
        blocks.push(block);
    }
    GradedMap { blocks }
}

/// Extend a map `P^{t} -> X` by zero on extra summands to `P^{d} -> X`.
fn pad_source(
    alg: &Algebra,
    t_mult: &DimVec,
    map: &GradedMap,
    d: &DimVec,
    target_dims: &DimVec,
) -> GradedMap {
    let small = proj_sum(alg, t_mult);
    let big = proj_sum(alg, d);
    let n = alg.vertices();
    let mut blocks = Vec::with_capacity(n);
    for c in 0..n {
        let mut block = Mat::zeros(alg.field, target_dims.at(c), big.total.dims.at(c));
        for (s_small, &b) in small.summands.iter().enumerate() {
            let copy = small.summands[..s_small]
                .iter()
                .filter(|&&x| x == b)
                .count();
            let s_big = big
                .summands
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == b)
                .nth(copy)
                .map(|(idx, _)| idx)
                .expect("t <= d");
            let width = alg.basis(b, c).len();
            for w in 0..width {
                for rr in 0..target_dims.at(c) {
                    let v = map.blocks[c].get(rr, small.offsets[c][s_small] + w);
                    if !v.is_zero() {
                        block.set(rr, big.offsets[c][s_big] + w, v.clone());
                    }
                }
            }
        }
        blocks.push(block);
    }
    GradedMap { blocks }
}

/// Draw a presentable graded module degreewise and build a point over it.
pub fn build_from_random_homology(
    alg: &Algebra,
    profile: &StrataProfile,
    seed: u64,
    budget: usize,
) -> Result<RealizationPoint> {
    profile.require_feasible()?;
    let mut rng = Rng::new(seed ^ 0x5eed_c0de);
    let mut reps = Vec::new();
    for i in profile.hull() {
        let h_i = profile.h_at(i);
        let m_i = profile.m_at(i).ok_or(Error::InfeasibleProfile {
            reason: format!("no kernel multiplicities at degree {i}"),
        })?;
        let d_i = profile.d.get(i);
        let rep = if h_i.is_zero() {
            let mut z = Representation::zero(alg);
            z.dims = DimVec::zeros(alg.vertices());
            z
        } else if d_i.is_zero() {
            // the presentation P^0 -> P^{m_i} -> H -> 0 forces H = P^{m_i};
            // a random basis change samples the whole stratum
            let pm = proj_sum(alg, &m_i);
            random_conjugate(alg, &pm.total, &mut rng)
        } else {
            // membership attempts are capped by the sampler budget; the
            // inner relation rejection gets a generous floor of its own,
            // and running it dry only spends one attempt
            let floor = 65536.max(budget);
            let mut found = None;
            for _ in 0..budget.max(1) {
                let cand = match random_rep(alg, &h_i, &mut rng, floor) {
                    Ok(c) => c,
                    Err(Error::RejectionBudget { .. }) => continue,
                    Err(e) => return Err(e),
                };
                if presentable(alg, &cand, &m_i, &d_i) {
                    found = Some(cand);
                    break;
                }
            }
            found.ok_or(Error::StratumPossiblyEmpty { budget })?
        };
        reps.push(rep);
    }
    let h = GradedModule {
        start: profile.start,
        reps,
    };
    build_from_homology(alg, profile, &h, seed, 40)
}

/// Fibre dimensions of the bundle decompositions, per degree and summed.
#[derive(Clone, Debug, Serialize)]
pub struct FibreDimReport {
    pub per_degree: Vec<DegreeFibres>,
    /// Fibre of the homology-choice bundle of `pi`: sum of `h.h`.
    pub pi2: i64,
    /// Fibre of the kernel-framing bundle of `pi`: sum of `m.k`.
    pub pi4: i64,
    /// Same spaces seen from the `rho` side.
    pub rho2: i64,
    /// Fibre of the presentation bundle: sum of `d.r`.
    pub rho3: i64,
    /// Fibre of the cover bundle: sum of `m.h`.
    pub rho4: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeFibres {
    pub degree: i64,
    pub hh: i64,
    pub mk: i64,
    pub dr: i64,
    pub mh: i64,
}

impl FibreDimReport {
    pub fn pi_fibre(&self) -> i64 {
        self.pi2 + self.pi4
    }

    pub fn rho_fibre(&self) -> i64 {
        self.rho2 + self.rho3 + self.rho4
    }
}

pub fn fibre_dims(profile: &StrataProfile) -> Result<FibreDimReport> {
    profile.require_feasible()?;
    let mut per_degree = Vec::new();
    let (mut pi2, mut pi4, mut rho3, mut rho4) = (0, 0, 0, 0);
    for i in profile.hull() {
        let k = profile.k_at(i);
        let h = profile.h_at(i);
        let m = profile.m_at(i).ok_or(Error::InfeasibleProfile {
            reason: format!("no kernel multiplicities at degree {i}"),
        })?;
        let d = profile.d.get(i);
        let r = profile.r.get(i);
        let f = DegreeFibres {
            degree: i,
            hh: h.dot(&h),
            mk: m.dot(&k),
            dr: d.dot(&r),
            mh: m.dot(&h),
        };
        pi2 += f.hh;
        pi4 += f.mk;
        rho3 += f.dr;
        rho4 += f.mh;
        per_degree.push(f);
    }
    Ok(FibreDimReport {
        per_degree,
        pi2,
        pi4,
        rho2: pi4,
        rho3,
        rho4,
    })
}

/// Dimension bookkeeping for one irreducible component of the presentable
/// module locus.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentDims {
    pub presentable: i64,
    pub realization: i64,
    /// Via the bundle chain: the realization dimension minus the `pi` fibres.
    pub stratum_chain: i64,
    /// Via the alternative closed form: presentable dim plus `sum(d.r - m.k)`.
    pub stratum_closed: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub fibres: FibreDimReport,
    /// Stratum dimension minus presentable-locus dimension, bundle chain.
    pub chain_offset: i64,
    /// The same offset according to the closed form.
    pub closed_offset: i64,
    pub per_component: Vec<ComponentDims>,
    /// Set when the two offsets disagree; the point-count oracle
    /// adjudicates per instance.
    pub discrepancy: bool,
}

/// Assemble the dimension report from per-component dimensions of the
/// presentable locus (one entry per irreducible component).
pub fn dimension_report(
    profile: &StrataProfile,
    presentable_dims: &[i64],
) -> Result<DimensionReport> {
    let fibres = fibre_dims(profile)?;
    let chain_offset = fibres.rho_fibre() - fibres.pi_fibre();
    let closed_offset = fibres.rho3 - fibres.pi4;
    let per_component = presentable_dims
        .iter()
        .map(|&dim| ComponentDims {
            presentable: dim,
            realization: dim + fibres.rho_fibre(),
            stratum_chain: dim + chain_offset,
            stratum_closed: dim + closed_offset,
        })
        .collect();
    Ok(DimensionReport {
        fibres,
        chain_offset,
        closed_offset,
        per_component,
        discrepancy: chain_offset != closed_offset,
    })
}

/// Constant-fibre check on a complex: the solved dimension of
/// `Hom(P^{m_i}, ker partial_{i-1})` must equal `m_i . k_i`.
#[derive(Clone, Debug, Serialize)]
pub struct FibreCheck {
    pub degree: i64,
    pub hom_dim: usize,
    pub expected: i64,
    pub ok: bool,
}

pub fn fibre_dim_check(alg: &Algebra, x: &ComplexPoint) -> Result<Vec<FibreCheck>> {
    let r = rank_profile(alg, x);
    let profile = strata_profile(alg, &x.d, &r);
    profile.require_feasible()?;
    let mut out = Vec::new();
    for i in profile.hull() {
        let m_i = profile
            .m_at(i)
            .ok_or(Error::KernelNotProjective { degree: i - 1 })?;
        let k_i = profile.k_at(i);
        let src = proj_sum(alg, &x.d.get(i - 1));
        let tgt = proj_sum(alg, &x.d.get(i - 2));
        let prev = x.diff_graded(alg, i - 1);
        let (ker, _) = kernel_rep(alg, &prev, &src.total, &tgt.total);
        let m_sum = proj_sum(alg, &m_i);
        let hom_dim = hom_basis(alg, &m_sum.total, &ker).len();
        let expected = m_i.dot(&k_i);
        out.push(FibreCheck {
            degree: i,
            hom_dim,
            expected,
            ok: hom_dim as i64 == expected,
        });
    }
    Ok(out)
}

/// Solved fibre dimensions on a realization point, from the `rho` side:
/// `dim Hom(P^{d_i}, ker gamma_i) = d_i . r_i` and
/// `dim Hom(P^{m_i}, H_i) = m_i . h_i`.
#[derive(Clone, Debug, Serialize)]
pub struct RhoFibreCheck {
    pub degree: i64,
    pub hom_ker_gamma: usize,
    pub expected_dr: i64,
    pub hom_into_homology: usize,
    pub expected_mh: i64,
    pub ok: bool,
}

pub fn rho_fibre_check(alg: &Algebra, z: &RealizationPoint) -> Result<Vec<RhoFibreCheck>> {
    let profile = strata_profile(alg, &z.d, &z.r);
    profile.require_feasible()?;
    let mut out = Vec::new();
    for (t, deg) in z.degrees.iter().enumerate() {
        let i = z.start + t as i64;
        let m_i = profile
            .m_at(i)
            .ok_or(Error::KernelNotProjective { degree: i - 1 })?;
        let d_i = z.d.get(i);
        let r_i = z.r.get(i);
        let h_i = profile.h_at(i);
        let m_sum = proj_sum(alg, &m_i);
        let (ker_gamma, _) = kernel_rep(alg, &deg.gamma, &m_sum.total, &deg.homology);
        let d_sum = proj_sum(alg, &d_i);
        let hom_ker_gamma = hom_basis(alg, &d_sum.total, &ker_gamma).len();
        let hom_into_homology = hom_basis(alg, &m_sum.total, &deg.homology).len();
        let expected_dr = d_i.dot(&r_i);
        let expected_mh = m_i.dot(&h_i);
        out.push(RhoFibreCheck {
            degree: i,
            hom_ker_gamma,
            expected_dr,
            hom_into_homology,
            expected_mh,
            ok: hom_ker_gamma as i64 == expected_dr && hom_into_homology as i64 == expected_mh,
        });
    }
    Ok(out)
}

/// Two lifts of the same complex differ by a framing automorphism:
/// `eta' = eta . u` with `u` invertible.
pub fn lifts_differ_by_framing(
    alg: &Algebra,
    z1: &RealizationPoint,
    z2: &RealizationPoint,
) -> Result<bool> {
    if pi(z1) != pi(z2) {
        return Ok(false);
    }
    let profile = strata_profile(alg, &z1.d, &z1.r);
    for (t, (a, b)) in z1.degrees.iter().zip(&z2.degrees).enumerate() {
        let i = z1.start + t as i64;
        let m_i = profile
            .m_at(i)
            .ok_or(Error::KernelNotProjective { degree: i - 1 })?;
        let d_prev = z1.d.get(i - 1);
        let space = HomSpace::new(alg, &m_i, &d_prev);
        let e1 = space.to_graded(&a.eta);
        let e2 = space.to_graded(&b.eta);
        // solve e1 . u = e2; u must be invertible
        match factor_through(alg, &e1, &e2) {
            Some(u) if u.is_invertible() => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{random_complex, validate_complex};
    use crate::field::Field;
    use crate::testutil::{a2, a3_bound};

    fn dv(v: &[i64]) -> DimVec {
        DimVec(v.to_vec())
    }

    fn a2_instance(alg: &Algebra, lambda: i64, mu: i64) -> ComplexPoint {
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let hs = HomSpace::new(alg, &dv(&[1, 1]), &dv(&[1, 0]));
        ComplexPoint {
            d,
            diffs: vec![
                hs.elem_from_coords(vec![alg.field.from_i64(lambda), alg.field.from_i64(mu)])
            ],
        }
    }

    #[test]
    fn lift_roundtrip_on_a2() {
        let alg = a2(Field::prime(5).unwrap());
        let x = a2_instance(&alg, 1, 0);
        validate_complex(&alg, &x).unwrap();
        let z = lift(&alg, &x, 7, 40).unwrap();
        assert_eq!(pi(&z), x);
        // M_2 = P_2 and H_2 has dimension (0,1)
        let profile = strata_profile(&alg, &z.d, &z.r);
        assert_eq!(profile.m_at(2), Some(dv(&[0, 1])));
        assert_eq!(z.degree(2).unwrap().homology.dims, dv(&[0, 1]));
        // rho agrees with directly computed homology, degreewise
        let mut rng = Rng::new(3);
        let h = rho(&z);
        for i in z.hull() {
            let direct = crate::complexes::homology_rep(&alg, &x, i - 1);
            let stored = h.get(i).unwrap();
            assert!(rep::is_iso(&alg, stored, &direct, &mut rng, 32).unwrap());
        }
    }

    #[test]
    fn lift_zero_complex() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let d = DimArray::new(3, 0, vec![dv(&[1, 1, 0])]);
        let x = ComplexPoint::zero(&alg, d.clone());
        let z = lift(&alg, &x, 1, 40).unwrap();
        // H at the top of the hull is all of P^{d}
        assert_eq!(
            z.degree(1).unwrap().homology.dims,
            alg.cartan().apply(&d.get(0))
        );
        assert_eq!(pi(&z), x);
    }

    #[test]
    fn build_from_zero_profile() {
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::empty(2);
        let r = DimArray::empty(2);
        let profile = strata_profile(&alg, &d, &r);
        let h = GradedModule {
            start: 0,
            reps: vec![],
        };
        let z = build_from_homology(&alg, &profile, &h, 1, 16).unwrap();
        assert!(z.degrees.is_empty());
    }

    #[test]
    fn build_recovers_a2_stratum() {
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let r = DimArray::new(2, 1, vec![dv(&[1, 1])]);
        let profile = strata_profile(&alg, &d, &r);
        // h_1 = 0, h_2 = (0,1): the graded module (0, 0, P_2)
        let h = GradedModule {
            start: 0,
            reps: vec![
                Representation::zero(&alg),
                Representation::zero(&alg),
                alg.projective_rep(1),
            ],
        };
        let z = build_from_homology(&alg, &profile, &h, 5, 40).unwrap();
        assert_eq!(rho(&z), h);
        let x = pi(&z);
        validate_complex(&alg, &x).unwrap();
        assert_eq!(rank_profile(&alg, &x), r);
    }

    #[test]
    fn membership_examples() {
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let r = DimArray::new(2, 1, vec![dv(&[1, 1])]);
        let profile = strata_profile(&alg, &d, &r);
        let ok = GradedModule {
            start: 0,
            reps: vec![
                Representation::zero(&alg),
                Representation::zero(&alg),
                alg.projective_rep(1),
            ],
        };
        assert!(membership_presentable(&alg, &profile, &ok).unwrap());
        // S_1 + S_2 at the top degree is not presentable from P_2 alone:
        // wrong dimension vector is a shape error, so test a genuine
        // membership failure instead on the other profile below.
        let d2 = DimArray::new(2, 0, vec![dv(&[0, 1]), dv(&[0, 1])]);
        let r2 = DimArray::new(2, 1, vec![dv(&[0, 1])]);
        let p2 = strata_profile(&alg, &d2, &r2);
        // h_1 = 0, h_2 = 0: everything trivial, trivially a member
        let trivial = GradedModule {
            start: 0,
            reps: vec![
                Representation::zero(&alg),
                Representation::zero(&alg),
                Representation::zero(&alg),
            ],
        };
        assert!(membership_presentable(&alg, &p2, &trivial).unwrap());
    }

    #[test]
    fn membership_rejects_wrong_module() {
        // profile with h_2 = (1,1): P_1 is presentable, S_1 + S_2 is not
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0])]);
        let r = DimArray::empty(2);
        let profile = strata_profile(&alg, &d, &r);
        // hull = {0, 1}: h_1 = Theta d_0 = (1,1), m_1 = (1,0)
        assert_eq!(profile.h_at(1), dv(&[1, 1]));
        let p1 = GradedModule {
            start: 0,
            reps: vec![Representation::zero(&alg), alg.projective_rep(0)],
        };
        assert!(membership_presentable(&alg, &profile, &p1).unwrap());
        let (ss, _) = rep::direct_sum(&alg, &[alg.simple_rep(0), alg.simple_rep(1)]);
        let bad = GradedModule {
            start: 0,
            reps: vec![Representation::zero(&alg), ss],
        };
        assert!(!membership_presentable(&alg, &profile, &bad).unwrap());
    }

    #[test]
    fn fibre_dims_a2_instance() {
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let r = DimArray::new(2, 1, vec![dv(&[1, 1])]);
        let profile = strata_profile(&alg, &d, &r);
        let f = fibre_dims(&profile).unwrap();
        assert_eq!(f.pi2, 1);
        assert_eq!(f.pi4, 2);
        assert_eq!(f.rho2, 2);
        assert_eq!(f.rho3, 2);
        assert_eq!(f.rho4, 1);
        assert_eq!(f.pi_fibre(), 3);
        assert_eq!(f.rho_fibre(), 5);
    }

    #[test]
    fn fibre_dims_zero_profile() {
        let alg = a2(Field::Rationals);
        let profile = strata_profile(&alg, &DimArray::empty(2), &DimArray::empty(2));
        let f = fibre_dims(&profile).unwrap();
        assert_eq!(f.pi_fibre(), 0);
        assert_eq!(f.rho_fibre(), 0);
    }

    #[test]
    fn dimension_report_flags_the_a2_discrepancy() {
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let r = DimArray::new(2, 1, vec![dv(&[1, 1])]);
        let profile = strata_profile(&alg, &d, &r);
        let report = dimension_report(&profile, &[0]).unwrap();
        assert_eq!(report.per_component[0].stratum_chain, 2);
        assert_eq!(report.per_component[0].stratum_closed, 0);
        assert!(report.discrepancy);
    }

    #[test]
    fn fibre_check_on_a2_instance() {
        let alg = a2(Field::prime(5).unwrap());
        let x = a2_instance(&alg, 1, 0);
        for c in fibre_dim_check(&alg, &x).unwrap() {
            assert!(c.ok, "degree {}: {} vs {}", c.degree, c.hom_dim, c.expected);
        }
    }

    #[test]
    fn rho_fibre_checks_on_built_point() {
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let r = DimArray::new(2, 1, vec![dv(&[1, 1])]);
        let profile = strata_profile(&alg, &d, &r);
        let z = build_from_random_homology(&alg, &profile, 11, 64).unwrap();
        for c in rho_fibre_check(&alg, &z).unwrap() {
            assert!(c.ok, "degree {}", c.degree);
        }
    }

    #[test]
    fn fixed_rank_sampler_hits_the_stratum() {
        let alg = a2(Field::prime(5).unwrap());
        let d = DimArray::new(2, 0, vec![dv(&[1, 0]), dv(&[1, 1])]);
        let r = DimArray::new(2, 1, vec![dv(&[1, 1])]);
        let profile = strata_profile(&alg, &d, &r);
        for seed in 0..5 {
            let x = crate::complexes::random_complex_fixed_rank(&alg, &profile, seed, 64).unwrap();
            validate_complex(&alg, &x).unwrap();
            assert_eq!(rank_profile(&alg, &x), r);
        }
    }

    #[test]
    fn fixed_rank_sampler_and_lift_on_the_worked_instance() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let d = DimArray::new(3, 0, vec![dv(&[2, 2, 2]), dv(&[2, 4, 1]), dv(&[2, 3, 2])]);
        let r = DimArray::new(3, 1, vec![dv(&[0, 2, 1]), dv(&[0, 1, 1])]);
        let profile = strata_profile(&alg, &d, &r);
        let f = fibre_dims(&profile).unwrap();
        assert_eq!(f.pi4, 60); // three degrees of (2,2,2).(2,4,4) = 20

        let x = crate::complexes::random_complex_fixed_rank(&alg, &profile, 4, 256).unwrap();
        validate_complex(&alg, &x).unwrap();
        assert_eq!(rank_profile(&alg, &x), r);
        for c in fibre_dim_check(&alg, &x).unwrap() {
            assert!(c.ok);
            if (1..=3).contains(&c.degree) {
                assert_eq!(c.hom_dim, 20, "degree {}", c.degree);
            }
        }

        // lifting the sampled point frames every kernel as P^{(2,2,2)}
        let z = lift(&alg, &x, 9, 48).unwrap();
        let zp = strata_profile(&alg, &z.d, &z.r);
        for i in 1..=3 {
            assert_eq!(zp.m_at(i), Some(dv(&[2, 2, 2])));
        }
        assert_eq!(pi(&z), x);
    }

    #[test]
    fn lift_fails_when_a_kernel_is_not_projective() {
        // A4 with the two length-two paths zero has global dimension 3;
        // the kernel of the P_2 -> P_1 hom is the non-projective simple S_3
        let field = Field::prime(5).unwrap();
        let quiver = crate::algebra::Quiver {
            vertices: 4,
            arrows: vec![
                crate::algebra::Arrow {
                    name: "a".into(),
                    source: 0,
                    target: 1,
                },
                crate::algebra::Arrow {
                    name: "b".into(),
                    source: 1,
                    target: 2,
                },
                crate::algebra::Arrow {
                    name: "c".into(),
                    source: 2,
                    target: 3,
                },
            ],
        };
        let relations = vec![
            crate::algebra::Relation {
                terms: vec![(field.one(), vec![0, 1])],
            },
            crate::algebra::Relation {
                terms: vec![(field.one(), vec![1, 2])],
            },
        ];
        let alg = crate::algebra::build_algebra(quiver, relations, field, 8).unwrap();
        assert_eq!(
            crate::algebra::global_dimension(&alg, 8),
            crate::algebra::GlobalDim::Finite(3)
        );
        let d = DimArray::new(4, 0, vec![dv(&[1, 0, 0, 0]), dv(&[0, 1, 0, 0])]);
        let hs = HomSpace::new(&alg, &dv(&[0, 1, 0, 0]), &dv(&[1, 0, 0, 0]));
        assert_eq!(hs.dim, 1);
        let x = ComplexPoint {
            d,
            diffs: vec![hs.elem_from_coords(vec![alg.field.one()])],
        };
        validate_complex(&alg, &x).unwrap();
        let err = lift(&alg, &x, 1, 48).unwrap_err();
        assert!(matches!(err, Error::KernelNotProjective { .. }));
    }

    #[test]
    fn two_lifts_differ_by_framing() {
        let alg = a3_bound(Field::prime(5).unwrap());
        let d = DimArray::new(3, 0, vec![dv(&[1, 1, 1]), dv(&[1, 2, 1])]);
        let x = random_complex(&alg, &d, 21);
        let z1 = lift(&alg, &x, 100, 40).unwrap();
        let z2 = lift(&alg, &x, 200, 40).unwrap();
        assert!(lifts_differ_by_framing(&alg, &z1, &z2).unwrap());
    }

    #[test]
    fn validator_rejects_broken_gamma() {
        let alg = a2(Field::prime(5).unwrap());
        let x = a2_instance(&alg, 1, 0);
        let mut z = lift(&alg, &x, 7, 40).unwrap();
        // wreck gamma at the top degree: zero map is not surjective
        let t = z.degrees.len() - 1;
        let gamma = &mut z.degrees[t].gamma;
        for b in gamma.blocks.iter_mut() {
            *b = Mat::zeros(alg.field, b.rows(), b.cols());
        }
        let err = validate_point(&alg, &z).unwrap_err();
        assert!(matches!(err, Error::RealizationCondition { .. }));
    }
}
