//! The matroid of projected normals on a subspace, and ranked lattices of
//! restrictions with an exact isomorphism test.

use serde::Serialize;

use crate::arrangement::{intersection_lattice, restriction, Arrangement, IntersectionLattice};
use crate::error::{Error, Result};
use crate::exactlin::{intersect, kernel, project, Rational, RationalMatrix, Subspace};

pub const MAX_GROUND_SET: usize = 16;
pub const MAX_LATTICE_SIZE: usize = 64;
/// Ground sets up to this size get the intersection-dimension cross-check
/// on every subset; larger ones on all subsets of size at most two.
pub const EXHAUSTIVE_CROSS_CHECK: usize = 10;

/// Labeled matroid on `{1..m}` given by its full rank table, indexed by
/// bitmask (bit `i` is element `i+1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matroid {
    ground_size: usize,
    rank_table: Vec<u8>,
}

impl Matroid {
    /// Validates the rank axioms on every subset. Monotonicity, unit
    /// increase and submodularity are checked in their local (single and
    /// double element) forms, which together imply the global ones.
    pub fn from_rank_table(ground_size: usize, rank_table: Vec<u8>) -> Result<Self> {
        if ground_size > MAX_GROUND_SET {
            return Err(Error::GroundSetGuard {
                size: ground_size,
                cap: MAX_GROUND_SET,
            });
        }
        if rank_table.len() != 1 << ground_size {
            return Err(Error::SizeMismatch(format!(
                "rank table of length {} for ground set {ground_size}",
                rank_table.len()
            )));
        }
        if rank_table[0] != 0 {
            return Err(Error::Invariant("rank of the empty set is nonzero".into()));
        }
        for s in 0..rank_table.len() {
            let rs = rank_table[s];
            for a in (0..ground_size).filter(|a| s >> a & 1 == 0) {
                let ra = rank_table[s | 1 << a];
                if ra < rs || ra > rs + 1 {
                    return Err(Error::Invariant(format!(
                        "rank axioms fail adding element {} to set {s:#b}",
                        a + 1
                    )));
                }
                for b in (a + 1..ground_size).filter(|b| s >> b & 1 == 0) {
                    let rb = rank_table[s | 1 << b];
                    let rab = rank_table[s | 1 << a | 1 << b];
                    if rab as u16 + rs as u16 > ra as u16 + rb as u16 {
                        return Err(Error::Invariant(format!(
                            "submodularity fails at set {s:#b} with elements {} and {}",
                            a + 1,
                            b + 1
                        )));
                    }
                }
            }
        }
        Ok(Self {
            ground_size,
            rank_table,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn rank_of(&self, mask: usize) -> usize {
        self.rank_table[mask] as usize
    }

    pub fn rank(&self) -> usize {
        self.rank_of((1 << self.ground_size) - 1)
    }

    pub fn rank_table(&self) -> &[u8] {
        &self.rank_table
    }

    /// 0-based indices of the loops.
    pub fn loops(&self) -> Vec<usize> {
        (0..self.ground_size)
            .filter(|&i| self.rank_of(1 << i) == 0)
            .collect()
    }

    pub fn summary(&self) -> MatroidSummary {
        MatroidSummary {
            m: self.ground_size,
            rank: self.rank(),
            bases: bases(self),
        }
    }
}

/// Stable serialized form: ground size, rank, sorted basis bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatroidSummary {
    pub m: usize,
    pub rank: usize,
    pub bases: Vec<u32>,
}

fn rank_of_rows(n: usize, rows: Vec<Vec<Rational>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    RationalMatrix::from_rows(n, rows).expect("length n").rank()
}

/// Projected normals `β_i = Proj_U α_i`.
pub fn projected_normals(a: &Arrangement, u: &Subspace) -> Result<Vec<Vec<Rational>>> {
    (0..a.len()).map(|i| project(u, &a.normal(i))).collect()
}

/// 𝔐_A(U): rank of a subset is the dimension spanned by its projected
/// normals, cross-checked against `dim U - dim(U ∩ ⋂ H_i)`.
pub fn matroid_from(a: &Arrangement, u: &Subspace) -> Result<Matroid> {
    let m = a.len();
    if m > MAX_GROUND_SET {
        return Err(Error::GroundSetGuard {
            size: m,
            cap: MAX_GROUND_SET,
        });
    }
    if u.ambient_dim() != a.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: a.ambient_dim(),
            right: u.ambient_dim(),
        });
    }
    let n = a.ambient_dim();
    let beta = projected_normals(a, u)?;
    let table: Vec<u8> = (0usize..1 << m)
        .map(|mask| {
            let rows = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| beta[i].clone())
                .collect();
            rank_of_rows(n, rows) as u8
        })
        .collect();

    for mask in 0usize..1 << m {
        if m > EXHAUSTIVE_CROSS_CHECK && mask.count_ones() > 2 && mask != (1 << m) - 1 {
            continue;
        }
        let codim = u.dim() - dim_in_hyperplanes(a, u, mask)?;
        if codim != table[mask] as usize {
            return Err(Error::Invariant(format!(
                "projection rank {} != intersection codimension {codim} on subset {mask:#b}",
                table[mask]
            )));
        }
    }
    Matroid::from_rank_table(m, table)
}

/// `dim(U ∩ ⋂_{i ∈ mask} H_i)`.
pub fn dim_in_hyperplanes(a: &Arrangement, u: &Subspace, mask: usize) -> Result<usize> {
    let rows: Vec<Vec<Rational>> = (0..a.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| a.normal(i))
        .collect();
    let flat = kernel(&RationalMatrix::from_rows(a.ambient_dim(), rows)?);
    Ok(intersect(u, &flat)?.dim())
}

/// Bitmasks `I` with `|I| = rk(I) = rank`, sorted. Never empty.
pub fn bases(m: &Matroid) -> Vec<u32> {
    let r = m.rank();
    (0u32..1 << m.ground_size)
        .filter(|&mask| mask.count_ones() as usize == r && m.rank_of(mask as usize) == r)
        .collect()
}

/// A finite graded poset with a bottom and a top, stored by ranks and the
/// cover relation. Element identities carry no meaning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedLattice {
    ranks: Vec<usize>,
    /// `up[x]`: elements covering `x`, sorted.
    up: Vec<Vec<usize>>,
    /// `down[x]`: elements covered by `x`, sorted.
    down: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl RankedLattice {
    pub fn new(ranks: Vec<usize>, covers: &[(usize, usize)]) -> Result<Self> {
        let size = ranks.len();
        if size == 0 {
            return Err(Error::InvalidArgument("empty lattice".into()));
        }
        let mut up = vec![Vec::new(); size];
        let mut down = vec![Vec::new(); size];
        for &(lo, hi) in covers {
            if lo >= size || hi >= size {
                return Err(Error::IndexOutOfRange {
                    index: lo.max(hi),
                    bound: size,
                });
            }
            if ranks[hi] != ranks[lo] + 1 {
                return Err(Error::InvalidArgument(format!(
                    "cover {lo} < {hi} does not raise rank by one"
                )));
            }
            up[lo].push(hi);
            down[hi].push(lo);
        }
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        let bottoms: Vec<usize> = (0..size).filter(|&x| down[x].is_empty()).collect();
        let tops: Vec<usize> = (0..size).filter(|&x| up[x].is_empty()).collect();
        if bottoms.len() != 1 || tops.len() != 1 {
            return Err(Error::InvalidArgument(
                "lattice needs a unique bottom and top".into(),
            ));
        }
        Ok(Self {
            ranks,
            up,
            down,
            bottom: bottoms[0],
            top: tops[0],
        })
    }

    pub fn from_intersection_lattice(l: &IntersectionLattice) -> Self {
        let ranks = l.flats().iter().map(|f| f.rank).collect();
        let covers: Vec<(usize, usize)> = (0..l.len())
            .flat_map(|x| l.covers_up(x).iter().map(move |&y| (x, y)))
            .collect();
        Self::new(ranks, &covers).expect("intersection lattices are bounded and graded")
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.ranks[self.top]
    }

    pub fn rank_of(&self, x: usize) -> usize {
        self.ranks[x]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn covers(&self, lo: usize, hi: usize) -> bool {
        self.up[lo].binary_search(&hi).is_ok()
    }

    pub fn atoms(&self) -> usize {
        self.ranks.iter().filter(|&&r| r == 1).count()
    }

    /// Renames element `x` to `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut ranks = vec![0; self.len()];
        for (x, &p) in perm.iter().enumerate() {
            ranks[p] = self.ranks[x];
        }
        let covers: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|x| self.up[x].iter().map(move |&y| (perm[x], perm[y])))
            .collect();
        Self::new(ranks, &covers)
    }

    fn signature(&self, x: usize) -> (usize, usize, usize) {
        (self.ranks[x], self.up[x].len(), self.down[x].len())
    }
}

/// L(A|_U) as an abstract ranked lattice.
pub fn restriction_lattice(a: &Arrangement, u: &Subspace) -> Result<RankedLattice> {
    let r = restriction(a, u)?;
    Ok(RankedLattice::from_intersection_lattice(
        &intersection_lattice(&r),
    ))
}

/// Whether a rank-preserving order isomorphism exists. Exhaustive
/// backtracking over same-rank, same-degree candidates; a bijection that
/// preserves covers in both directions preserves the order of a graded
/// poset.
pub fn lattice_isomorphic(l1: &RankedLattice, l2: &RankedLattice) -> Result<bool> {
    lattice_isomorphic_with_cap(l1, l2, MAX_LATTICE_SIZE)
}

pub fn lattice_isomorphic_with_cap(
    l1: &RankedLattice,
    l2: &RankedLattice,
    cap: usize,
) -> Result<bool> {
    for l in [l1, l2] {
        if l.len() > cap {
            return Err(Error::LatticeGuard { size: l.len(), cap });
        }
    }
    if l1.len() != l2.len() {
        return Ok(false);
    }
    let mut sig1: Vec<_> = (0..l1.len()).map(|x| l1.signature(x)).collect();
    let mut sig2: Vec<_> = (0..l2.len()).map(|x| l2.signature(x)).collect();
    sig1.sort_unstable();
    sig2.sort_unstable();
    if sig1 != sig2 {
        return Ok(false);
    }
    let mut order: Vec<usize> = (0..l1.len()).collect();
    order.sort_by_key(|&x| (l1.ranks[x], x));
    let mut map = vec![usize::MAX; l1.len()];
    let mut used = vec![false; l2.len()];
    Ok(extend(l1, l2, &order, 0, &mut map, &mut used))
}

fn extend(
    l1: &RankedLattice,
    l2: &RankedLattice,
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    let Some(&x) = order.get(depth) else {
        return true;
    };
    let sig = l1.signature(x);
    for y in 0..l2.len() {
        if used[y] || l2.signature(y) != sig {
            continue;
        }
        // every already-mapped neighbour must agree on the cover relation
        let consistent = order[..depth].iter().all(|&w| {
            let fw = map[w];
            l1.covers(w, x) == l2.covers(fw, y) && l1.covers(x, w) == l2.covers(y, fw)
        });
        if !consistent {
            continue;
        }
        map[x] = y;
        used[y] = true;
        if extend(l1, l2, order, depth + 1, map, used) {
            return true;
        }
        used[y] = false;
        map[x] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{build_arrangement_i64, center};
    use crate::exactlin::{canonical_subspace, rat};

    fn sp(n: usize, rows: &[&[i64]]) -> Subspace {
        canonical_subspace(&RationalMatrix::from_i64_rows(n, rows).unwrap())
    }

    fn braid3() -> Arrangement {
        build_arrangement_i64(3, &[&[1, -1, 0], &[1, 0, -1], &[0, 1, -1]]).unwrap()
    }

    fn boolean(n: usize) -> Arrangement {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        build_arrangement_i64(n, &refs).unwrap()
    }

    // Global rank axioms, checked on every pair of subsets.
    fn assert_global_axioms(m: &Matroid) {
        let size = 1usize << m.ground_size();
        for s in 0..size {
            for t in 0..size {
                if s & t == s {
                    assert!(m.rank_of(s) <= m.rank_of(t));
                }
                assert!(m.rank_of(s | t) + m.rank_of(s & t) <= m.rank_of(s) + m.rank_of(t));
            }
            assert!(m.rank_of(s) <= s.count_ones() as usize);
        }
    }

    #[test]
    fn matroid_examples() {
        let a = braid3();
        let m = matroid_from(&a, &sp(3, &[&[1, 0, 0]])).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.loops(), vec![2]);
        assert_eq!(bases(&m), vec![0b001, 0b010]);
        assert_global_axioms(&m);

        let m = matroid_from(&a, &center(&a)).unwrap();
        assert_eq!(m.rank(), 0);
        assert_eq!(m.loops(), vec![0, 1, 2]);
        assert_eq!(bases(&m), vec![0]);

        let m = matroid_from(&boolean(2), &Subspace::full(2)).unwrap();
        assert_eq!(m.rank(), 2);
        assert_eq!(bases(&m), vec![0b11]);

        let m = matroid_from(&boolean(3), &Subspace::full(3)).unwrap();
        assert_eq!(bases(&m), vec![0b111]);

        let m = matroid_from(&a, &sp(3, &[&[0, 0, 1]])).unwrap();
        assert_eq!(bases(&m), vec![0b010, 0b100]);
        assert_eq!(m.loops(), vec![0]);
    }

    #[test]
    fn ground_set_guard() {
        let rows: Vec<Vec<Rational>> = (1..=17).map(|i| vec![rat(1), rat(i)]).collect();
        let a = crate::arrangement::build_arrangement(2, rows).unwrap();
        assert_eq!(
            matroid_from(&a, &Subspace::full(2)),
            Err(Error::GroundSetGuard { size: 17, cap: 16 })
        );
    }

    #[test]
    fn bad_rank_tables_are_rejected() {
        // rank jumps by two
        assert!(Matroid::from_rank_table(2, vec![0, 2, 1, 2]).is_err());
        // not monotone
        assert!(Matroid::from_rank_table(2, vec![0, 1, 1, 0]).is_err());
        // 1 and 2 parallel, 3 a loop, yet the whole set has rank 2
        assert!(Matroid::from_rank_table(3, vec![0, 1, 1, 1, 0, 1, 1, 2]).is_err());
        assert!(Matroid::from_rank_table(2, vec![1, 1, 1, 1]).is_err());
        assert!(Matroid::from_rank_table(2, vec![0, 1, 1, 2]).is_ok());
    }

    #[test]
    fn restriction_lattice_examples() {
        let a = braid3();
        let plane = kernel(&RationalMatrix::from_i64_rows(3, &[&[1, 1, 1]]).unwrap());
        let l = restriction_lattice(&a, &plane).unwrap();
        assert_eq!(l.rank(), 2);
        assert_eq!(l.atoms(), 3);
        assert_eq!(l.len(), 5);

        let l = restriction_lattice(&a, &center(&a)).unwrap();
        assert_eq!(l.len(), 1);

        let l = restriction_lattice(&boolean(2), &sp(2, &[&[1, 1]])).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.rank(), 1);

        assert_eq!(
            restriction_lattice(&a, &Subspace::zero(3)),
            Err(Error::ZeroSubspace)
        );
    }

    #[test]
    fn isomorphism_examples() {
        let a = braid3();
        let p1 = sp(3, &[&[1, 2, 5], &[0, 1, -3]]);
        let p2 = sp(3, &[&[2, 0, 1], &[1, 3, 7]]);
        let l1 = restriction_lattice(&a, &p1).unwrap();
        let l2 = restriction_lattice(&a, &p2).unwrap();
        assert!(lattice_isomorphic(&l1, &l1).unwrap());
        assert!(lattice_isomorphic(&l1, &l2).unwrap());

        // rank 2 with two atoms: B2
        let b2 = RankedLattice::new(vec![0, 1, 1, 2], &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert!(!lattice_isomorphic(&l1, &b2).unwrap());

        // same size and degree profile is not enough: two rank-3 lattices
        // with 3 atoms and 3 coatoms, wired differently
        let x = RankedLattice::new(
            vec![0, 1, 1, 1, 2, 2, 2, 3],
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 4),
                (1, 5),
                (2, 4),
                (2, 6),
                (3, 5),
                (3, 6),
                (4, 7),
                (5, 7),
                (6, 7),
            ],
        )
        .unwrap();
        let y = x.relabel(&[0, 3, 1, 2, 6, 4, 5, 7]).unwrap();
        assert!(lattice_isomorphic(&x, &y).unwrap());
        assert!(lattice_isomorphic(&y, &x).unwrap());
    }

    #[test]
    fn isomorphism_detects_wiring() {
        // Same degree profile; the middle ranks form two 4-cycles in one
        // and a single 8-cycle in the other.
        let covers_a = [
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (1, 5),
            (1, 6),
            (2, 5),
            (2, 6),
            (3, 7),
            (3, 8),
            (4, 7),
            (4, 8),
            (5, 9),
            (6, 9),
            (7, 9),
            (8, 9),
        ];
        let covers_b = [
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (1, 5),
            (1, 6),
            (2, 6),
            (2, 7),
            (3, 7),
            (3, 8),
            (4, 8),
            (4, 5),
            (5, 9),
            (6, 9),
            (7, 9),
            (8, 9),
        ];
        let ranks = vec![0, 1, 1, 1, 1, 2, 2, 2, 2, 3];
        let a = RankedLattice::new(ranks.clone(), &covers_a).unwrap();
        let b = RankedLattice::new(ranks, &covers_b).unwrap();
        assert!(!lattice_isomorphic(&a, &b).unwrap());
    }

    #[test]
    fn lattice_guard() {
        let ranks: Vec<usize> = std::iter::once(0)
            .chain(std::iter::repeat_n(1, 64))
            .chain(std::iter::once(2))
            .collect();
        let covers: Vec<(usize, usize)> = (1..=64).flat_map(|i| [(0, i), (i, 65)]).collect();
        let big = RankedLattice::new(ranks, &covers).unwrap();
        assert_eq!(
            lattice_isomorphic(&big, &big),
            Err(Error::LatticeGuard { size: 66, cap: 64 })
        );
    }

    #[test]
    fn rank_formula_exhaustive() {
        let a = build_arrangement_i64(
            4,
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[1, 1, 0, 0],
                &[1, 2, 3, 0],
                &[0, 0, 1, 1],
                &[1, -1, 1, -1],
            ],
        )
        .unwrap();
        let subspaces = [
            sp(4, &[&[1, 0, 0, 0]]),
            sp(4, &[&[1, 2, 0, 1], &[0, 1, 1, -1]]),
            sp(4, &[&[0, 0, 0, 1], &[0, 0, 1, 0]]),
            sp(4, &[&[1, 1, 1, 1], &[1, -1, 0, 2], &[3, 0, 1, 0]]),
            Subspace::full(4),
        ];
        for u in &subspaces {
            let m = matroid_from(&a, u).unwrap();
            assert_global_axioms(&m);
            for mask in 0..1usize << a.len() {
                assert_eq!(
                    m.rank_of(mask),
                    u.dim() - dim_in_hyperplanes(&a, u, mask).unwrap()
                );
            }
        }
    }
}
