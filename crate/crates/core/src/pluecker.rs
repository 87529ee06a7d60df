//! Plücker coordinates, adjoint hyperplanes and the defect subspace.
//!
//! Coordinates are indexed by k-subsets of `[n]` in lexicographic order;
//! that order is part of every serialized table.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arrangement::{center, Arrangement, Flat, IntersectionLattice};
use crate::error::{Error, Result};
use crate::exactlin::{
    canonical_subspace, intersect, minor, orth_complement, primitive_bigint_vector, project,
    subspace_sum, Rational, RationalMatrix, Subspace,
};

/// Lexicographically ordered k-subsets of `[n]`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSubsetIndex {
    n: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
    position: HashMap<u64, usize>,
}

fn mask_of(subset: &[usize]) -> u64 {
    subset.iter().fold(0u64, |m, &i| m | 1 << i)
}

impl KSubsetIndex {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(n < 64, "k-subset index supports n < 64");
        let mut subsets = Vec::new();
        if k <= n {
            let mut cur: Vec<usize> = (0..k).collect();
            loop {
                subsets.push(cur.clone());
                // advance to the next combination in lexicographic order
                let Some(pos) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
                    break;
                };
                cur[pos] += 1;
                for j in pos + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
            }
        }
        let position = subsets
            .iter()
            .enumerate()
            .map(|(i, s)| (mask_of(s), i))
            .collect();
        Self {
            n,
            k,
            subsets,
            position,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        self.position.get(&mask_of(subset)).copied()
    }

    fn position_of_mask(&self, mask: u64) -> usize {
        self.position[&mask]
    }

    /// Subsets with 1-based labels, as written in reports.
    pub fn labels(&self) -> Vec<Vec<usize>> {
        self.subsets
            .iter()
            .map(|s| s.iter().map(|i| i + 1).collect())
            .collect()
    }

    fn check_same(&self, other: &KSubsetIndex) -> Result<()> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::IndexMismatch {
                left_n: self.n,
                left_k: self.k,
                right_n: other.n,
                right_k: other.k,
            });
        }
        Ok(())
    }
}

/// All maximal minors of an integer `d × n` matrix, ordered by
/// `KSubsetIndex::new(n, d)`. Computed fraction-free by expanding along the
/// last row, reusing the minors of the leading rows for every column subset.
pub fn maximal_minors(rows: &[Vec<BigInt>], n: usize) -> Vec<BigInt> {
    let d = rows.len();
    let mut level: HashMap<u64, BigInt> = HashMap::from([(0u64, BigInt::one())]);
    for (j, row) in rows.iter().enumerate() {
        let idx = KSubsetIndex::new(n, j + 1);
        let mut next = HashMap::with_capacity(idx.len());
        for subset in idx.subsets() {
            let mut acc = BigInt::zero();
            for (t, &c) in subset.iter().enumerate() {
                if row[c].is_zero() {
                    continue;
                }
                let rest = mask_of(subset) & !(1u64 << c);
                let term = &row[c] * &level[&rest];
                if (j + t) % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            next.insert(mask_of(subset), acc);
        }
        level = next;
    }
    KSubsetIndex::new(n, d)
        .subsets()
        .iter()
        .map(|s| level[&mask_of(s)].clone())
        .collect()
}

/// Plücker vector in canonical form: coprime integers, first nonzero entry
/// positive. `scale` maps the raw minors of the canonical basis to `coords`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlueckerVector {
    pub index: KSubsetIndex,
    pub coords: Vec<BigInt>,
    pub scale: Rational,
}

impl PlueckerVector {
    fn from_raw(index: KSubsetIndex, raw: &[BigInt]) -> Result<Self> {
        let (coords, scale) = primitive_bigint_vector(raw)
            .ok_or_else(|| Error::Invariant("all Plücker coordinates vanish".into()))?;
        Ok(Self {
            index,
            coords,
            scale,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.index.n(),
            "k": self.index.k(),
            "subsets": self.index.labels(),
            "coords": self.coords.iter().map(bigint_json).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn bigint_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.to_string()),
    }
}

fn raw_pluecker(u: &Subspace) -> Vec<BigInt> {
    maximal_minors(&u.integer_rows(), u.ambient_dim())
}

/// Δ(U). The zero subspace maps to the single coordinate `(1)`.
pub fn pluecker_vector(u: &Subspace) -> PlueckerVector {
    let index = KSubsetIndex::new(u.ambient_dim(), u.dim());
    PlueckerVector::from_raw(index, &raw_pluecker(u)).expect("basis rows are independent")
}

/// Δ of the row space of an arbitrary full-row-rank representative,
/// evaluated minor by minor through Gaussian elimination.
pub fn pluecker_from_matrix(m: &RationalMatrix) -> Result<PlueckerVector> {
    let index = KSubsetIndex::new(m.cols(), m.rows());
    let rows: Vec<usize> = (0..m.rows()).collect();
    let minors = index
        .subsets()
        .iter()
        .map(|s| minor(m, &rows, s))
        .collect::<Result<Vec<_>>>()?;
    let (coords, scale) = crate::exactlin::primitive_integer_vector(&minors)
        .ok_or_else(|| Error::InvalidArgument("representative rows are dependent".into()))?;
    Ok(PlueckerVector {
        index,
        coords,
        scale,
    })
}

fn sign_exponent(k: usize, subset: &[usize]) -> usize {
    // 1-based labels: sum of (i + 1)
    k * (k + 1) / 2 + subset.iter().map(|i| i + 1).sum::<usize>()
}

/// Signed complementary minors `a_I = (-1)^{k(k+1)/2 + ΣI} Δ_{[n]-I}(X)`
/// of the canonical basis of `x`, with `k = n - dim x`.
pub fn adjoint_coefficients(x: &Subspace) -> (KSubsetIndex, Vec<BigInt>) {
    let n = x.ambient_dim();
    let k = n - x.dim();
    let complement_minors = raw_pluecker(x);
    let complement_index = KSubsetIndex::new(n, n - k);
    let full: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let index = KSubsetIndex::new(n, k);
    let raw = index
        .subsets()
        .iter()
        .map(|s| {
            let c = complement_index.position_of_mask(full & !mask_of(s));
            let value = complement_minors[c].clone();
            if sign_exponent(k, s).is_multiple_of(2) {
                value
            } else {
                -value
            }
        })
        .collect();
    (index, raw)
}

/// The adjoint hyperplane H(X) of a k-flat X.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointHyperplane {
    pub source_flat: Flat,
    pub index: KSubsetIndex,
    /// Coefficients exactly as the signed minor formula gives them.
    pub raw: Vec<BigInt>,
    /// Canonical coefficients, `coeffs = scale * raw`.
    pub coeffs: Vec<BigInt>,
    pub scale: Rational,
}

impl AdjointHyperplane {
    pub fn k(&self) -> usize {
        self.index.k()
    }

    /// True when canonicalization flipped the sign of the raw coefficients.
    pub fn sign_flipped(&self) -> bool {
        self.scale < Rational::zero()
    }
}

pub fn adjoint_hyperplane(x: &Flat, k: usize) -> Result<AdjointHyperplane> {
    if x.rank != k {
        return Err(Error::RankMismatch {
            expected: k,
            found: x.rank,
        });
    }
    let (index, raw) = adjoint_coefficients(&x.subspace);
    let (coeffs, scale) = primitive_bigint_vector(&raw)
        .ok_or_else(|| Error::Invariant("adjoint coefficients vanish".into()))?;
    Ok(AdjointHyperplane {
        source_flat: x.clone(),
        index,
        raw,
        coeffs,
        scale,
    })
}

/// A^{(k)}: one adjoint hyperplane per k-flat, in lattice order. Empty for
/// `k = n` and whenever there are no k-flats.
pub fn k_adjoint(lattice: &IntersectionLattice, k: usize) -> Result<Vec<AdjointHyperplane>> {
    if k >= lattice.ambient_dim() {
        return Ok(Vec::new());
    }
    let hyperplanes = lattice
        .flats_of_rank(k)
        .iter()
        .map(|&x| adjoint_hyperplane(lattice.flat(x), k))
        .collect::<Result<Vec<_>>>()?;
    for (i, h) in hyperplanes.iter().enumerate() {
        if hyperplanes[..i].iter().any(|g| g.coeffs == h.coeffs) {
            return Err(Error::Invariant(format!(
                "flats {} and another share an adjoint hyperplane",
                h.source_flat.label()
            )));
        }
    }
    Ok(hyperplanes)
}

/// Serialized coefficient table of A^{(k)}.
pub fn adjoint_table_json(n: usize, k: usize, hyperplanes: &[AdjointHyperplane]) -> Value {
    json!({
        "n": n,
        "k": k,
        "subsets": KSubsetIndex::new(n, k).labels(),
        "hyperplanes": hyperplanes.iter().map(|h| json!({
            "flat": h.source_flat.generators.iter().map(|g| g + 1).collect::<Vec<_>>(),
            "coeffs": h.coeffs.iter().map(bigint_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// `Σ_I a_I(X) x_I` with canonical coefficients and coordinates.
pub fn eval_adjoint(h: &AdjointHyperplane, p: &PlueckerVector) -> Result<Rational> {
    h.index.check_same(&p.index)?;
    let sum = h
        .coeffs
        .iter()
        .zip(&p.coords)
        .fold(BigInt::zero(), |acc, (a, x)| acc + a * x);
    Ok(Rational::from_integer(sum))
}

/// The Laplace pairing `Σ_I ±Δ_I(V)Δ_{[n]-I}(X)` of the raw minors of the
/// canonical bases; equals the determinant of the stacked bases.
pub fn laplace_pairing(v: &Subspace, x: &Subspace) -> Result<BigInt> {
    if v.ambient_dim() != x.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: v.ambient_dim(),
            right: x.ambient_dim(),
        });
    }
    if v.dim() + x.dim() != v.ambient_dim() {
        return Err(Error::SizeMismatch(format!(
            "dimensions {} and {} are not complementary",
            v.dim(),
            x.dim()
        )));
    }
    let (_, coeffs) = adjoint_coefficients(x);
    let minors = raw_pluecker(v);
    Ok(coeffs
        .iter()
        .zip(&minors)
        .fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
}

/// `U ∩ (U⊥ + T⊥)` given the center `t`, cross-checked against the span of
/// the projected normals.
pub fn defect_subspace_with_center(
    a: &Arrangement,
    t: &Subspace,
    u: &Subspace,
) -> Result<Subspace> {
    let defect = intersect(u, &subspace_sum(&orth_complement(u), &orth_complement(t))?)?;
    let projections = (0..a.len())
        .map(|i| project(u, &a.normal(i)))
        .collect::<Result<Vec<_>>>()?;
    let spanned = canonical_subspace(&RationalMatrix::from_rows(a.ambient_dim(), projections)?);
    if spanned != defect {
        return Err(Error::Invariant(format!(
            "defect subspace {defect} differs from span of projected normals {spanned}"
        )));
    }
    let meet = intersect(u, t)?.dim();
    if defect.dim() + meet != u.dim() {
        return Err(Error::Invariant(format!(
            "defect dimension {} != {} - {meet}",
            defect.dim(),
            u.dim()
        )));
    }
    Ok(defect)
}

pub fn defect_subspace(a: &Arrangement, u: &Subspace) -> Result<Subspace> {
    defect_subspace_with_center(a, &center(a), u)
}

#[cfg(test)]
fn dot_raw(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{build_arrangement_i64, intersection_lattice};
    use crate::exactlin::{is_direct_sum_full, kernel, rat};
    use proptest::prelude::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn sp(n: usize, rows: &[&[i64]]) -> Subspace {
        canonical_subspace(&RationalMatrix::from_i64_rows(n, rows).unwrap())
    }

    fn braid3() -> Arrangement {
        build_arrangement_i64(3, &[&[1, -1, 0], &[1, 0, -1], &[0, 1, -1]]).unwrap()
    }

    fn flat(l: &IntersectionLattice, s: &Subspace) -> Flat {
        l.flat(l.position(s).unwrap()).clone()
    }

    #[test]
    fn subset_index_is_lexicographic() {
        let idx = KSubsetIndex::new(4, 2);
        assert_eq!(
            idx.labels(),
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        assert_eq!(idx.position(&[1, 3]), Some(4));
        assert_eq!(KSubsetIndex::new(3, 0).subsets(), &[Vec::<usize>::new()]);
        assert_eq!(KSubsetIndex::new(5, 5).len(), 1);
        assert_eq!(KSubsetIndex::new(8, 4).len(), 70);
    }

    #[test]
    fn pluecker_examples() {
        let p = pluecker_vector(&sp(3, &[&[1, 0, 0]]));
        assert_eq!(p.coords, ints(&[1, 0, 0]));
        let p = pluecker_vector(&sp(3, &[&[1, 1, 0], &[0, 0, 1]]));
        assert_eq!(p.index.labels(), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(p.coords, ints(&[0, 1, 1]));
        assert_eq!(pluecker_vector(&Subspace::full(4)).coords, ints(&[1]));
        let z = pluecker_vector(&Subspace::zero(3));
        assert_eq!(z.coords, ints(&[1]));
        assert_eq!(z.index.k(), 0);
    }

    #[test]
    fn adjoint_examples() {
        // n = 2, X = {x1 = 0}
        let a = build_arrangement_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        let l = intersection_lattice(&a);
        let h = adjoint_hyperplane(&flat(&l, &sp(2, &[&[0, 1]])), 1).unwrap();
        assert_eq!(h.raw, ints(&[1, 0]));
        assert_eq!(h.coeffs, ints(&[1, 0]));

        let l = intersection_lattice(&braid3());
        let x12 = flat(&l, &sp(3, &[&[1, 1, 0], &[0, 0, 1]]));
        let h = adjoint_hyperplane(&x12, 1).unwrap();
        assert_eq!(h.raw, ints(&[1, -1, 0]));
        assert_eq!(h.coeffs, ints(&[1, -1, 0]));
        assert!(!h.sign_flipped());

        let full = flat(&l, &Subspace::full(3));
        let h = adjoint_hyperplane(&full, 0).unwrap();
        assert_eq!(h.raw.len(), 1);
        assert!(h.raw == ints(&[1]) || h.raw == ints(&[-1]));

        assert_eq!(
            adjoint_hyperplane(&x12, 2),
            Err(Error::RankMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn k_adjoint_examples() {
        let b3 = build_arrangement_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let l = intersection_lattice(&b3);
        let hs = k_adjoint(&l, 1).unwrap();
        assert_eq!(hs.len(), 3);
        for h in &hs {
            assert_eq!(h.coeffs.iter().filter(|c| !c.is_zero()).count(), 1);
        }

        let l = intersection_lattice(&braid3());
        let coeffs: Vec<Vec<BigInt>> = k_adjoint(&l, 1)
            .unwrap()
            .into_iter()
            .map(|h| h.coeffs)
            .collect();
        let mut expected = vec![ints(&[1, -1, 0]), ints(&[1, 0, -1]), ints(&[0, 1, -1])];
        let mut got = coeffs.clone();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);

        assert!(k_adjoint(&l, 3).unwrap().is_empty());
        assert!(k_adjoint(&intersection_lattice(&b3), 3).unwrap().is_empty());
    }

    #[test]
    fn eval_examples() {
        let l = intersection_lattice(&braid3());
        let e1 = pluecker_vector(&sp(3, &[&[1, 0, 0]]));
        let h12 = adjoint_hyperplane(
            &flat(
                &l,
                &kernel(&RationalMatrix::from_i64_rows(3, &[&[1, -1, 0]]).unwrap()),
            ),
            1,
        )
        .unwrap();
        let h23 = adjoint_hyperplane(
            &flat(
                &l,
                &kernel(&RationalMatrix::from_i64_rows(3, &[&[0, 1, -1]]).unwrap()),
            ),
            1,
        )
        .unwrap();
        assert_eq!(eval_adjoint(&h12, &e1).unwrap(), rat(1));
        assert_eq!(eval_adjoint(&h23, &e1).unwrap(), rat(0));

        let h0 = adjoint_hyperplane(&flat(&l, &Subspace::full(3)), 0).unwrap();
        let z = pluecker_vector(&Subspace::zero(3));
        assert!(!eval_adjoint(&h0, &z).unwrap().is_zero());
        assert!(matches!(
            eval_adjoint(&h0, &e1),
            Err(Error::IndexMismatch { .. })
        ));
    }

    #[test]
    fn defect_examples() {
        let a = braid3();
        let e1 = sp(3, &[&[1, 0, 0]]);
        assert_eq!(defect_subspace(&a, &e1).unwrap(), e1);
        let t = center(&a);
        assert!(defect_subspace(&a, &t).unwrap().is_zero());
        let b3 = build_arrangement_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let u = sp(3, &[&[1, 2, 3], &[0, 1, -1]]);
        assert_eq!(defect_subspace(&b3, &u).unwrap(), u);
        // a plane containing T keeps only its component orthogonal to T
        let plane = sp(3, &[&[1, 1, 1], &[1, 0, 0]]);
        assert_eq!(defect_subspace(&a, &plane).unwrap(), sp(3, &[&[2, -1, -1]]));
    }

    #[test]
    fn minors_dp_matches_elimination() {
        let m = RationalMatrix::from_i64_rows(
            5,
            &[&[1, 2, 0, -1, 3], &[0, 1, 1, 2, -2], &[2, 0, 1, 1, 1]],
        )
        .unwrap();
        let rows: Vec<Vec<BigInt>> = (0..3)
            .map(|r| m.row(r).iter().map(|x| x.to_integer()).collect())
            .collect();
        let dp = maximal_minors(&rows, 5);
        let idx = KSubsetIndex::new(5, 3);
        for (s, value) in idx.subsets().iter().zip(&dp) {
            assert_eq!(
                minor(&m, &[0, 1, 2], s).unwrap(),
                Rational::from_integer(value.clone())
            );
        }
    }

    fn full_rank_rows(n: usize) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
        (0..=n).prop_flat_map(move |d| {
            (
                Just(d),
                prop::collection::vec(prop::collection::vec(-3i64..=3, n), d),
            )
        })
    }

    fn to_matrix(n: usize, rows: &[Vec<i64>]) -> RationalMatrix {
        RationalMatrix::from_rows(
            n,
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn pluecker_is_basis_independent(
            (d, rows) in full_rank_rows(5),
            mix in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 5),
        ) {
            let m = to_matrix(5, &rows);
            prop_assume!(m.rank() == d);
            // an invertible mix of the rows: unit lower-triangular combination
            let mut mixed = Vec::new();
            for i in 0..d {
                let mut row: Vec<Rational> = m.row(i).to_vec();
                for j in 0..i {
                    for (x, y) in row.iter_mut().zip(m.row(j)) {
                        *x += rat(mix[i][j]) * y;
                    }
                }
                mixed.push(row.into_iter().map(|x| x * rat(mix[i][i].abs() + 1)).collect());
            }
            let mixed = RationalMatrix::from_rows(5, mixed).unwrap();
            let u = canonical_subspace(&m);
            let expected = pluecker_vector(&u);
            prop_assert_eq!(pluecker_from_matrix(&mixed).unwrap().coords, expected.coords.clone());
            prop_assert_eq!(pluecker_from_matrix(&m).unwrap().coords, expected.coords);
        }

        #[test]
        fn laplace_pairing_is_stacked_determinant(
            (d, rows) in full_rank_rows(5),
            other in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 5),
        ) {
            let v = canonical_subspace(&to_matrix(5, &rows));
            let x = canonical_subspace(&to_matrix(5, &other[..5 - v.dim()]));
            prop_assume!(x.dim() == 5 - v.dim());
            let _ = d;
            let det = v.basis().stack(x.basis()).unwrap().determinant().unwrap();
            let pairing = laplace_pairing(&v, &x).unwrap();
            prop_assert_eq!(Rational::from_integer(pairing.clone()), det);
            prop_assert_eq!(pairing.is_zero(), !is_direct_sum_full(&v, &x).unwrap());
            // canonical scalars are positive-or-tracked: the sign of eval
            // times the tracked scales recovers the raw pairing
            let (idx, raw) = adjoint_coefficients(&x);
            let (coeffs, scale_x) = primitive_bigint_vector(&raw).unwrap();
            let p = pluecker_vector(&v);
            prop_assert_eq!(idx, p.index.clone());
            let canonical = dot_raw(&coeffs, &p.coords);
            prop_assert_eq!(
                Rational::from_integer(canonical),
                Rational::from_integer(pairing) * scale_x * p.scale
            );
        }
    }

    #[test]
    fn adjoints_are_injective_on_flats() {
        let a = build_arrangement_i64(
            4,
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[1, 1, 1, 1],
                &[1, -1, 2, 0],
            ],
        )
        .unwrap();
        let l = intersection_lattice(&a);
        assert!(k_adjoint(&l, 4).unwrap().is_empty());
        for k in 0..4 {
            let hs = k_adjoint(&l, k).unwrap();
            assert_eq!(hs.len(), l.flats_of_rank(k).len());
            for (i, h) in hs.iter().enumerate() {
                for g in &hs[..i] {
                    // non-proportional: canonical forms differ
                    assert_ne!(g.coeffs, h.coeffs);
                }
            }
        }
    }
}
