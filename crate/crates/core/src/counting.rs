//! Exhaustive finite-field point counts of complex varieties, binned by
//! rank profile, with exact interpolation of the count polynomials.
//!
//! The ambient coordinates are already the hom-space coefficients, so the
//! the only equations are the vanishing composites. Counts of each rank
//! stratum grow polynomially in the field size; the interpolated degree is
//! the empirical dimension of the stratum.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::DimVec;
use crate::complexes::HomSpace;
use crate::document::{algebra_with_field, InstanceDocument};
use crate::error::Error;
use crate::field::{Field, Scalar};
use crate::Result;

/// Fitted count polynomial of one rank stratum.
#[derive(Clone, Debug, Serialize)]
pub struct PolyFit {
    /// Coefficients, constant term first, as exact fraction strings.
    pub coeffs: Vec<String>,
    pub degree: usize,
    pub display: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BinReport {
    /// (degree, rank vector) pairs for the nonzero ranks of the stratum.
    pub ranks: Vec<(i64, DimVec)>,
    /// One count per supplied prime.
    pub counts: Vec<u64>,
    pub poly: PolyFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub primes: Vec<u64>,
    /// Number of ambient hom coordinates.
    pub coords: usize,
    /// Total solution count (all differentials composing to zero), per prime.
    pub totals: Vec<u64>,
    pub bins: Vec<BinReport>,
    /// Set when fewer than `coords + 1` primes were supplied: the fitted
    /// degrees are then only lower bounds, nothing is extrapolated.
    pub underdetermined: bool,
}

fn lagrange(points: &[(u64, u64)]) -> Vec<BigRational> {
    let n = points.len();
    let mut acc = vec![BigRational::zero(); n.max(1)];
    for (j, &(xj, yj)) in points.iter().enumerate() {
        // numerator polynomial prod_{k != j} (x - x_k)
        let mut num = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (k, &(xk, _)) in points.iter().enumerate() {
            if k == j {
                continue;
            }
            let root = BigRational::from(BigInt::from(xk));
            // num *= (x - root)
            let mut next = vec![BigRational::zero(); num.len() + 1];
            for (i, c) in num.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * &root;
            }
            num = next;
            denom *= BigRational::from(BigInt::from(xj)) - root;
        }
        let scale = BigRational::from(BigInt::from(yj)) / denom;
        for (i, c) in num.into_iter().enumerate() {
            acc[i] += c * &scale;
        }
    }
    while acc.len() > 1 && acc.last().is_some_and(Zero::is_zero) {
        acc.pop();
    }
    acc
}

fn poly_display(coeffs: &[BigRational]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let mag_str = if mag.denom().is_one() {
            mag.numer().to_string()
        } else {
            format!("{}/{}", mag.numer(), mag.denom())
        };
        let term = match i {
            0 => mag_str,
            1 if mag.is_one() => "q".to_string(),
            1 => format!("{mag_str}*q"),
            _ if mag.is_one() => format!("q^{i}"),
            _ => format!("{mag_str}*q^{i}"),
        };
        if parts.is_empty() {
            parts.push(if c.is_negative() {
                format!("-{term}")
            } else {
                term
            });
        } else {
            parts.push(format!(
                "{} {term}",
                if c.is_negative() { "-" } else { "+" }
            ));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

fn poly_eval(coeffs: &[BigRational], q: u64) -> BigRational {
    let x = BigRational::from(BigInt::from(q));
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &x + c;
    }
    acc
}

/// Count all points of the complex variety of the document's dimension
/// array over each supplied prime, binned by rank profile, and fit the
/// count polynomial of every bin.
pub fn count_points(doc: &InstanceDocument, primes: &[u64], budget: u128) -> Result<CountReport> {
    if primes.is_empty() {
        return Err(Error::Document("count: no primes supplied".into()));
    }
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();

    // layout is field-independent: use the smallest prime to size the run
    let probe_alg = algebra_with_field(doc, Field::prime(primes[0])?)?;
    let (d, _) = crate::document::dimension_arrays(doc, probe_alg.vertices())?;

    let mut bins: BTreeMap<Vec<DimVec>, Vec<u64>> = BTreeMap::new();
    let mut totals = Vec::with_capacity(primes.len());
    let mut coords_total = 0usize;
    for (pi, &p) in primes.iter().enumerate() {
        let alg = algebra_with_field(doc, Field::prime(p)?)?;
        let interior: Vec<i64> = (d.start + 1..d.end()).collect();
        let spaces: Vec<HomSpace> = interior
            .iter()
            .map(|&i| HomSpace::new(&alg, &d.get(i), &d.get(i - 1)))
            .collect();
        let dims: Vec<usize> = spaces.iter().map(|s| s.dim).collect();
        let coords: usize = dims.iter().sum();
        coords_total = coords;
        let points = (p as u128).saturating_pow(coords as u32);
        if points > budget {
            return Err(Error::CountingBudget {
                coords,
                p,
                points,
                budget,
            });
        }

        // precompute, per degree, the graded blocks of each unit
        // coordinate as raw residues, and the composition tensor of each
        // consecutive pair
        let unit_blocks: Vec<Vec<Vec<Vec<u64>>>> = spaces
            .iter()
            .map(|hs| {
                (0..hs.dim)
                    .map(|pos| {
                        let mut unit = vec![alg.field.zero(); hs.dim];
                        unit[pos] = alg.field.one();
                        let g = hs.to_graded(&hs.elem_from_coords(unit));
                        g.blocks
                            .iter()
                            .map(|m| {
                                let mut flat = Vec::with_capacity(m.rows() * m.cols());
                                for rr in 0..m.rows() {
                                    for cc in 0..m.cols() {
                                        flat.push(match m.get(rr, cc) {
                                            Scalar::Fp(x) => *x,
                                            _ => unreachable!("prime field"),
                                        });
                                    }
                                }
                                flat
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let block_shapes: Vec<Vec<(usize, usize)>> = spaces
            .iter()
            .map(|hs| {
                (0..alg.vertices())
                    .map(|a| (hs.tgt.total.dims.at(a), hs.src.total.dims.at(a)))
                    .collect()
            })
            .collect();
        // tensor[t][a_pos * dims[t+1] + b_pos] = sparse composite coords
        let mut tensors: Vec<Vec<Vec<(usize, u64)>>> = Vec::new();
        for t in 0..spaces.len().saturating_sub(1) {
            let here = &spaces[t];
            let next = &spaces[t + 1];
            let mut tensor = Vec::with_capacity(here.dim * next.dim);
            for a_pos in 0..here.dim {
                let mut ua = vec![alg.field.zero(); here.dim];
                ua[a_pos] = alg.field.one();
                let ea = here.elem_from_coords(ua);
                for b_pos in 0..next.dim {
                    let mut ub = vec![alg.field.zero(); next.dim];
                    ub[b_pos] = alg.field.one();
                    let eb = next.elem_from_coords(ub);
                    let comp = crate::complexes::hom_compose(&alg, &ea, &eb);
                    let sparse: Vec<(usize, u64)> = comp
                        .coords
                        .iter()
                        .enumerate()
                        .filter_map(|(w, v)| match v {
                            Scalar::Fp(0) => None,
                            Scalar::Fp(x) => Some((w, *x)),
                            _ => unreachable!("prime field"),
                        })
                        .collect();
                    tensor.push(sparse);
                }
            }
            tensors.push(tensor);
        }
        let composite_dims: Vec<usize> = (0..spaces.len().saturating_sub(1))
            .map(|t| {
                let i = interior[t];
                HomSpace::new(&alg, &d.get(i + 1), &d.get(i - 1)).dim
            })
            .collect();

        let mut digits = vec![0u64; coords];
        let mut total = 0u64;
        'points: loop {
            // composite checks, earliest failing pair first
            let mut offset_a = 0usize;
            let mut ok = true;
            for t in 0..tensors.len() {
                let offset_b = offset_a + dims[t];
                let mut composite = vec![0u64; composite_dims[t]];
                for a_pos in 0..dims[t] {
                    let da = digits[offset_a + a_pos];
                    if da == 0 {
                        continue;
                    }
                    for b_pos in 0..dims[t + 1] {
                        let db = digits[offset_b + b_pos];
                        if db == 0 {
                            continue;
                        }
                        let scale = da * db % p;
                        for &(w, v) in &tensors[t][a_pos * dims[t + 1] + b_pos] {
                            composite[w] = (composite[w] + scale * v) % p;
                        }
                    }
                }
                if composite.iter().any(|&x| x != 0) {
                    ok = false;
                    break;
                }
                offset_a = offset_b;
            }
            if ok {
                total += 1;
                // rank profile of the point
                let mut ranks = Vec::with_capacity(dims.len());
                let mut off = 0usize;
                for (t, &dim_t) in dims.iter().enumerate() {
                    let mut rank_vec = Vec::with_capacity(alg.vertices());
                    for (a, &(rows, cols)) in block_shapes[t].iter().enumerate() {
                        let mut grid = vec![0u64; rows * cols];
                        for pos in 0..dim_t {
                            let c = digits[off + pos];
                            if c == 0 {
                                continue;
                            }
                            for (g, &u) in grid.iter_mut().zip(&unit_blocks[t][pos][a]) {
                                *g = (*g + c * u) % p;
                            }
                        }
                        rank_vec.push(rank_mod_p(&mut grid, rows, cols, p) as i64);
                    }
                    ranks.push(DimVec(rank_vec));
                    off += dim_t;
                }
                bins.entry(ranks).or_insert_with(|| vec![0; primes.len()])[pi] += 1;
            }
            // odometer
            let mut t = 0;
            while t < coords {
                digits[t] += 1;
                if digits[t] < p {
                    break;
                }
                digits[t] = 0;
                t += 1;
            }
            if t == coords || coords == 0 {
                break 'points;
            }
        }
        totals.push(total);
    }

    let interior: Vec<i64> = (d.start + 1..d.end()).collect();
    let mut reports = Vec::new();
    for (ranks, counts) in &bins {
        let points: Vec<(u64, u64)> = primes.iter().copied().zip(counts.iter().copied()).collect();
        let coeffs = lagrange(&points);
        for &(q, y) in &points {
            assert_eq!(
                poly_eval(&coeffs, q),
                BigRational::from(BigInt::from(y)),
                "interpolation reproduces the data"
            );
        }
        let degree = coeffs.len() - 1;
        let nonzero_ranks: Vec<(i64, DimVec)> = interior
            .iter()
            .zip(ranks)
            .map(|(&i, r)| (i, r.clone()))
            .collect();
        reports.push(BinReport {
            ranks: nonzero_ranks,
            counts: counts.clone(),
            poly: PolyFit {
                coeffs: coeffs
                    .iter()
                    .map(|c| {
                        if c.denom().is_one() {
                            c.numer().to_string()
                        } else {
                            format!("{}/{}", c.numer(), c.denom())
                        }
                    })
                    .collect(),
                degree: if coeffs.iter().all(Zero::is_zero) {
                    0
                } else {
                    degree
                },
                display: poly_display(&coeffs),
            },
        });
    }
    // bins partition the solutions
    for (pi, &t) in totals.iter().enumerate() {
        let sum: u64 = reports.iter().map(|b| b.counts[pi]).sum();
        assert_eq!(sum, t, "rank bins partition the solution count");
    }
    let underdetermined = primes_insufficient(coords_total, primes.len());
    Ok(CountReport {
        primes,
        coords: coords_total,
        totals,
        bins: reports,
        underdetermined,
    })
}

fn primes_insufficient(coords: usize, supplied: usize) -> bool {
    supplied < coords + 1
}

/// In-place row reduction rank of a small residue matrix.
fn rank_mod_p(grid: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !(grid[r * cols + c]).is_multiple_of(p)) else {
            continue;
        };
        for cc in 0..cols {
            grid.swap(pivot * cols + cc, rank * cols + cc);
        }
        let inv = mod_inv(grid[rank * cols + c] % p, p);
        for cc in c..cols {
            grid[rank * cols + cc] = grid[rank * cols + cc] % p * inv % p;
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = grid[r * cols + c] % p;
            if factor == 0 {
                continue;
            }
            for cc in c..cols {
                let sub = factor * grid[rank * cols + cc] % p;
                grid[r * cols + cc] = (grid[r * cols + cc] + p - sub) % p;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is prime and a nonzero
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::parse_document;

    fn a2_doc() -> InstanceDocument {
        parse_document(
            r#"{
          "algebra": {
            "vertices": 2,
            "arrows": [{"name": "a", "source": 1, "target": 2}]
          },
          "field": {"kind": "prime", "p": 5},
          "dimension_array": {"start": 0, "vectors": [[1,0],[1,1]]},
          "rank_array": {"start": 1, "vectors": [[1,1]]}
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn lagrange_fits_a_parabola() {
        let coeffs = lagrange(&[(2, 2), (3, 6), (5, 20)]);
        // q(q-1) = q^2 - q
        assert_eq!(coeffs.len(), 3);
        assert_eq!(poly_display(&coeffs), "q^2 - q");
        assert_eq!(poly_eval(&coeffs, 7), BigRational::from(BigInt::from(42)));
    }

    #[test]
    fn a2_strata_counts() {
        let doc = a2_doc();
        let report = count_points(&doc, &[2, 3, 5], 1 << 24).unwrap();
        assert_eq!(report.coords, 2);
        assert!(!report.underdetermined);
        assert_eq!(report.totals, vec![4, 9, 25]);
        // three strata: full rank (q(q-1)), radical rank (q-1), zero (1)
        let find = |ranks: &[i64]| {
            report
                .bins
                .iter()
                .find(|b| b.ranks[0].1 == DimVec(ranks.to_vec()))
                .unwrap()
                .clone()
        };
        let full = find(&[1, 1]);
        assert_eq!(full.counts, vec![2, 6, 20]);
        assert_eq!(full.poly.degree, 2);
        assert_eq!(full.poly.display, "q^2 - q");
        let rad = find(&[0, 1]);
        assert_eq!(rad.counts, vec![1, 2, 4]);
        assert_eq!(rad.poly.degree, 1);
        assert_eq!(rad.poly.display, "q - 1");
        let zero = find(&[0, 0]);
        assert_eq!(zero.counts, vec![1, 1, 1]);
        assert_eq!(zero.poly.degree, 0);
    }

    #[test]
    fn underdetermined_flagged() {
        let doc = a2_doc();
        let report = count_points(&doc, &[2, 3], 1 << 24).unwrap();
        assert!(report.underdetermined);
    }

    #[test]
    fn budget_enforced() {
        let doc = a2_doc();
        assert!(matches!(
            count_points(&doc, &[101], 100),
            Err(Error::CountingBudget { coords: 2, .. })
        ));
    }
}
