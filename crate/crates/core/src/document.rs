//! The JSON instance document: one structured text document per instance,
//! integers only, scalars as integers (mod p) or exact fraction strings.
//!
//! Vertices are 1-based in documents and 0-based internally. Paths are
//! written source-to-target as lists of arrow names: `["a","b"]` traverses
//! `a` first, then `b`. Complexes serialize as per-degree block matrices:
//! `blocks[b][a][j][i]` is the coefficient list (over the hom-space basis
//! of maps `P_a -> P_b`) of the entry from source copy `i` to target copy
//! `j`.

use serde::{Deserialize, Serialize};

use crate::algebra::{build_algebra, Algebra, Arrow, DimVec, Quiver, Relation};
use crate::complexes::{ComplexPoint, DimArray, HomProjElement, HomSpace};
use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::matrix::Mat;
use crate::realization::{GradedModule, RealizationDegree, RealizationPoint};
use crate::rep::{GradedMap, Representation};
use crate::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub algebra: AlgebraDoc,
    pub field: FieldDoc,
    #[serde(default)]
    pub dimension_array: Option<ArrayDoc>,
    #[serde(default)]
    pub rank_array: Option<ArrayDoc>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub primes: Vec<u64>,
    #[serde(default)]
    pub complex: Option<ComplexDoc>,
    #[serde(default)]
    pub homology: Option<GradedModuleDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub vertices: usize,
    pub arrows: Vec<ArrowDoc>,
    #[serde(default)]
    pub relations: Vec<RelationDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub name: String,
    /// 1-based vertex.
    pub source: usize,
    /// 1-based vertex.
    pub target: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: ScalarDoc,
    /// Arrow names in traversal order (source to target).
    pub path: Vec<String>,
}

/// A scalar in a document: a plain integer, or a string like `"-2/3"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Int(i64),
    Str(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldDoc {
    Prime { p: u64 },
    Rationals,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayDoc {
    pub start: i64,
    pub vectors: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Path enumeration cap for the algebra basis.
    pub length_cap: usize,
    /// Cap for the global dimension search.
    pub gldim_cap: u32,
    /// Trials for decomposition / isomorphism certificates.
    pub trials: usize,
    /// Rejection budget for sampling relation-satisfying representations.
    pub rejection: usize,
    /// Attempts for the fixed-rank sampler per degree.
    pub sampler: usize,
    /// Point budget for exhaustive enumerations.
    pub enumeration: u128,
    /// Field used for component enumeration.
    pub enumeration_prime: u64,
}

impl Default for Budgets {
    fn default() -> Budgets {
        Budgets {
            length_cap: 8,
            gldim_cap: 8,
            trials: 48,
            rejection: 4096,
            sampler: 256,
            enumeration: 10_000_000,
            enumeration_prime: 2,
        }
    }
}

/// Per-degree five-block serialization of a differential or of the maps of
/// a homology realization.
pub type BlockGrid = Vec<Vec<Vec<Vec<Vec<ScalarDoc>>>>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    /// `differentials[t]` is the map at degree `dimension_array.start+1+t`.
    pub differentials: Vec<BlockGrid>,
}

pub type MatrixDoc = Vec<Vec<ScalarDoc>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDoc {
    pub dims: Vec<i64>,
    /// One matrix per arrow, document order.
    pub maps: Vec<MatrixDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedModuleDoc {
    pub start: i64,
    pub modules: Vec<RepDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealizationDegreeDoc {
    pub degree: i64,
    pub partial: BlockGrid,
    pub eta: BlockGrid,
    pub phi: BlockGrid,
    pub gamma: Vec<MatrixDoc>,
    pub homology: RepDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealizationPointDoc {
    pub start: i64,
    pub degrees: Vec<RealizationDegreeDoc>,
}

pub fn parse_document(text: &str) -> Result<InstanceDocument> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

impl ScalarDoc {
    pub fn to_scalar(&self, field: Field) -> Result<Scalar> {
        match self {
            ScalarDoc::Int(v) => Ok(field.from_i64(*v)),
            ScalarDoc::Str(s) => field.parse(s),
        }
    }

    pub fn from_scalar(s: &Scalar) -> ScalarDoc {
        match s {
            Scalar::Fp(x) => ScalarDoc::Int(*x as i64),
            Scalar::Rat(r) => {
                use num_traits::{One, ToPrimitive};
                if r.denom().is_one() {
                    if let Some(v) = r.numer().to_i64() {
                        return ScalarDoc::Int(v);
                    }
                }
                ScalarDoc::Str(s.to_string())
            }
        }
    }
}

impl FieldDoc {
    pub fn to_field(&self) -> Result<Field> {
        match self {
            FieldDoc::Prime { p } => Field::prime(*p),
            FieldDoc::Rationals => Ok(Field::Rationals),
        }
    }
}

fn vertex_from_doc(v: usize, n: usize, what: &str) -> Result<usize> {
    if v == 0 || v > n {
        return Err(Error::Document(format!(
            "{what}: vertex {v} out of range 1..={n}"
        )));
    }
    Ok(v - 1)
}

/// Build the algebra of a document over an explicit field (used to re-read
/// relation coefficients modulo different primes).
pub fn algebra_with_field(doc: &InstanceDocument, field: Field) -> Result<Algebra> {
    let n = doc.algebra.vertices;
    let mut arrows = Vec::with_capacity(doc.algebra.arrows.len());
    for a in &doc.algebra.arrows {
        arrows.push(Arrow {
            name: a.name.clone(),
            source: vertex_from_doc(a.source, n, &format!("arrow `{}`", a.name))?,
            target: vertex_from_doc(a.target, n, &format!("arrow `{}`", a.name))?,
        });
    }
    let quiver = Quiver {
        vertices: n,
        arrows,
    };
    let arrow_index = |name: &str| -> Result<usize> {
        quiver
            .arrows
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Document(format!("unknown arrow `{name}`")))
    };
    let mut relations = Vec::with_capacity(doc.algebra.relations.len());
    for (ri, rel) in doc.algebra.relations.iter().enumerate() {
        let mut terms = Vec::with_capacity(rel.terms.len());
        for (ti, term) in rel.terms.iter().enumerate() {
            let coeff = term
                .coeff
                .to_scalar(field)
                .map_err(|e| Error::Document(format!("relation {ri} term {ti}: {e}")))?;
            let mut path = Vec::with_capacity(term.path.len());
            for name in &term.path {
                path.push(
                    arrow_index(name)
                        .map_err(|e| Error::Document(format!("relation {ri} term {ti}: {e}")))?,
                );
            }
            terms.push((coeff, path));
        }
        relations.push(Relation { terms });
    }
    build_algebra(quiver, relations, field, doc.budgets.length_cap)
}

fn array_from_doc(doc: &ArrayDoc, n: usize, what: &str) -> Result<DimArray> {
    let mut vecs = Vec::with_capacity(doc.vectors.len());
    for (t, v) in doc.vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::Document(format!(
                "{what}: vector {t} has {} components, expected {n}",
                v.len()
            )));
        }
        if v.iter().any(|&x| x < 0) {
            return Err(Error::Document(format!(
                "{what}: vector {t} has a negative component"
            )));
        }
        vecs.push(DimVec(v.clone()));
    }
    Ok(DimArray::new(n, doc.start, vecs))
}

/// A parsed instance: the algebra over the document field plus the
/// dimension and rank arrays.
pub struct Instance {
    pub alg: Algebra,
    pub d: DimArray,
    pub r: DimArray,
}

/// The `(d, r)` arrays of a document (field-independent).
pub fn dimension_arrays(doc: &InstanceDocument, n: usize) -> Result<(DimArray, DimArray)> {
    let d = match &doc.dimension_array {
        Some(a) => array_from_doc(a, n, "dimension_array")?,
        None => DimArray::empty(n),
    };
    let r = match &doc.rank_array {
        Some(a) => array_from_doc(a, n, "rank_array")?,
        None => DimArray::empty(n),
    };
    Ok((d, r))
}

pub fn load_instance(doc: &InstanceDocument) -> Result<Instance> {
    let field = doc.field.to_field()?;
    let alg = algebra_with_field(doc, field)?;
    let (d, r) = dimension_arrays(doc, alg.vertices())?;
    Ok(Instance { alg, d, r })
}

fn grid_from_elem(hs: &HomSpace, e: &HomProjElement) -> BlockGrid {
    let alg = hs.alg;
    let n = alg.vertices();
    let mut grid: BlockGrid = Vec::with_capacity(n);
    for b in 0..n {
        let mut row_groups = Vec::with_capacity(n);
        for a in 0..n {
            let tgt_copies = e.target_mult.at(b);
            let src_copies = e.source_mult.at(a);
            let mut block = vec![vec![Vec::new(); src_copies]; tgt_copies];
            for (t, &bt) in hs.tgt.summands.iter().enumerate() {
                if bt != b {
                    continue;
                }
                let j = hs.tgt.summands[..t].iter().filter(|&&x| x == b).count();
                for (s, &at) in hs.src.summands.iter().enumerate() {
                    if at != a {
                        continue;
                    }
                    let i = hs.src.summands[..s].iter().filter(|&&x| x == a).count();
                    block[j][i] = e.coords[hs.block_range(t, s)]
                        .iter()
                        .map(ScalarDoc::from_scalar)
                        .collect();
                }
            }
            row_groups.push(block);
        }
        grid.push(row_groups);
    }
    grid
}

fn elem_from_grid(hs: &HomSpace, grid: &BlockGrid, what: &str) -> Result<HomProjElement> {
    let alg = hs.alg;
    let field = alg.field;
    let n = alg.vertices();
    if grid.len() != n {
        return Err(Error::Document(format!(
            "{what}: expected {n} target vertex groups"
        )));
    }
    let mut e = hs.zero_elem();
    for (t, &b) in hs.tgt.summands.iter().enumerate() {
        let j = hs.tgt.summands[..t].iter().filter(|&&x| x == b).count();
        for (s, &a) in hs.src.summands.iter().enumerate() {
            let i = hs.src.summands[..s].iter().filter(|&&x| x == a).count();
            let coeffs = grid
                .get(b)
                .and_then(|g| g.get(a))
                .and_then(|g| g.get(j))
                .and_then(|g| g.get(i))
                .ok_or_else(|| {
                    Error::Document(format!(
                        "{what}: missing block target P_{} copy {j}, source P_{} copy {i}",
                        b + 1,
                        a + 1
                    ))
                })?;
            let range = hs.block_range(t, s);
            if coeffs.len() != range.len() {
                return Err(Error::Document(format!(
                    "{what}: block (P_{}, P_{}) wants {} coefficients, got {}",
                    a + 1,
                    b + 1,
                    range.len(),
                    coeffs.len()
                )));
            }
            for (slot, c) in coeffs.iter().enumerate() {
                e.coords[range.start + slot] = c.to_scalar(field)?;
            }
        }
    }
    Ok(e)
}

pub fn complex_to_doc(alg: &Algebra, x: &ComplexPoint) -> ComplexDoc {
    let mut differentials = Vec::new();
    for i in x.diff_degrees() {
        let e = x.diff(i).expect("in range");
        let hs = HomSpace::new(alg, &e.source_mult, &e.target_mult);
        differentials.push(grid_from_elem(&hs, e));
    }
    ComplexDoc { differentials }
}

pub fn complex_from_doc(alg: &Algebra, d: &DimArray, doc: &ComplexDoc) -> Result<ComplexPoint> {
    let expected = if d.len() > 1 { d.len() - 1 } else { 0 };
    if doc.differentials.len() != expected {
        return Err(Error::Document(format!(
            "complex: expected {expected} differentials for this dimension array, got {}",
            doc.differentials.len()
        )));
    }
    let mut diffs = Vec::with_capacity(expected);
    for (t, grid) in doc.differentials.iter().enumerate() {
        let i = d.start + 1 + t as i64;
        let hs = HomSpace::new(alg, &d.get(i), &d.get(i - 1));
        diffs.push(elem_from_grid(
            &hs,
            grid,
            &format!("differential at degree {i}"),
        )?);
    }
    Ok(ComplexPoint {
        d: d.clone(),
        diffs,
    })
}

fn matrix_to_doc(m: &Mat) -> MatrixDoc {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| ScalarDoc::from_scalar(m.get(r, c)))
                .collect()
        })
        .collect()
}

fn matrix_from_doc(
    field: Field,
    rows: usize,
    cols: usize,
    doc: &MatrixDoc,
    what: &str,
) -> Result<Mat> {
    if doc.len() != rows || doc.iter().any(|r| r.len() != cols) {
        return Err(Error::Document(format!(
            "{what}: expected a {rows}x{cols} matrix"
        )));
    }
    let mut m = Mat::zeros(field, rows, cols);
    for (r, row) in doc.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            m.set(r, c, v.to_scalar(field)?);
        }
    }
    Ok(m)
}

pub fn rep_to_doc(v: &Representation) -> RepDoc {
    RepDoc {
        dims: v.dims.0.clone(),
        maps: v.maps.iter().map(matrix_to_doc).collect(),
    }
}

pub fn rep_from_doc(alg: &Algebra, doc: &RepDoc, what: &str) -> Result<Representation> {
    if doc.dims.len() != alg.vertices() {
        return Err(Error::Document(format!(
            "{what}: dims must have {} components",
            alg.vertices()
        )));
    }
    if doc.dims.iter().any(|&x| x < 0) {
        return Err(Error::Document(format!("{what}: negative dimension")));
    }
    if doc.maps.len() != alg.quiver.arrows.len() {
        return Err(Error::Document(format!(
            "{what}: expected one matrix per arrow ({})",
            alg.quiver.arrows.len()
        )));
    }
    let dims = DimVec(doc.dims.clone());
    let mut maps = Vec::with_capacity(doc.maps.len());
    for (ai, arrow) in alg.quiver.arrows.iter().enumerate() {
        maps.push(matrix_from_doc(
            alg.field,
            dims.at(arrow.target),
            dims.at(arrow.source),
            &doc.maps[ai],
            &format!("{what}: arrow `{}`", arrow.name),
        )?);
    }
    let rep = Representation {
        field: alg.field,
        dims,
        maps,
    };
    crate::rep::validate_rep(alg, &rep).map_err(|e| Error::Document(format!("{what}: {e}")))?;
    Ok(rep)
}

pub fn graded_module_from_doc(alg: &Algebra, doc: &GradedModuleDoc) -> Result<GradedModule> {
    let mut reps = Vec::with_capacity(doc.modules.len());
    for (t, m) in doc.modules.iter().enumerate() {
        reps.push(rep_from_doc(
            alg,
            m,
            &format!("homology at degree {}", doc.start + t as i64),
        )?);
    }
    Ok(GradedModule {
        start: doc.start,
        reps,
    })
}

pub fn graded_module_to_doc(h: &GradedModule) -> GradedModuleDoc {
    GradedModuleDoc {
        start: h.start,
        modules: h.reps.iter().map(rep_to_doc).collect(),
    }
}

fn graded_map_to_doc(g: &GradedMap) -> Vec<MatrixDoc> {
    g.blocks.iter().map(matrix_to_doc).collect()
}

pub fn realization_to_doc(alg: &Algebra, z: &RealizationPoint) -> RealizationPointDoc {
    let degrees = z
        .degrees
        .iter()
        .enumerate()
        .map(|(t, deg)| {
            let i = z.start + t as i64;
            let to_grid = |e: &HomProjElement| {
                let hs = HomSpace::new(alg, &e.source_mult, &e.target_mult);
                grid_from_elem(&hs, e)
            };
            RealizationDegreeDoc {
                degree: i,
                partial: to_grid(&deg.partial),
                eta: to_grid(&deg.eta),
                phi: to_grid(&deg.phi),
                gamma: graded_map_to_doc(&deg.gamma),
                homology: rep_to_doc(&deg.homology),
            }
        })
        .collect();
    RealizationPointDoc {
        start: z.start,
        degrees,
    }
}

#[allow(clippy::type_complexity)]
pub fn realization_from_doc(
    alg: &Algebra,
    d: &DimArray,
    r: &DimArray,
    doc: &RealizationPointDoc,
) -> Result<RealizationPoint> {
    let profile = crate::complexes::strata_profile(alg, d, r);
    let mut degrees = Vec::with_capacity(doc.degrees.len());
    for dd in &doc.degrees {
        let i = dd.degree;
        let d_i = d.get(i);
        let d_prev = d.get(i - 1);
        let m_i = profile.m_at(i).ok_or(Error::InfeasibleProfile {
            reason: format!("no kernel multiplicities at degree {i}"),
        })?;
        let partial = elem_from_grid(
            &HomSpace::new(alg, &d_i, &d_prev),
            &dd.partial,
            &format!("partial at degree {i}"),
        )?;
        let eta = elem_from_grid(
            &HomSpace::new(alg, &m_i, &d_prev),
            &dd.eta,
            &format!("eta at degree {i}"),
        )?;
        let phi = elem_from_grid(
            &HomSpace::new(alg, &d_i, &m_i),
            &dd.phi,
            &format!("phi at degree {i}"),
        )?;
        let homology = rep_from_doc(alg, &dd.homology, &format!("homology at degree {i}"))?;
        let m_dims = alg.cartan().apply(&m_i);
        if dd.gamma.len() != alg.vertices() {
            return Err(Error::Document(format!(
                "gamma at degree {i}: expected one block per vertex"
            )));
        }
        let mut gamma_blocks = Vec::with_capacity(alg.vertices());
        for a in 0..alg.vertices() {
            gamma_blocks.push(matrix_from_doc(
                alg.field,
                homology.dims.at(a),
                m_dims.at(a),
                &dd.gamma[a],
                &format!("gamma at degree {i}, vertex {}", a + 1),
            )?);
        }
        degrees.push(RealizationDegree {
            partial,
            eta,
            phi,
            gamma: GradedMap {
                blocks: gamma_blocks,
            },
            homology,
        });
    }
    Ok(RealizationPoint {
        d: d.clone(),
        r: r.clone(),
        start: d.start,
        degrees,
    })
}
