//! Linear hyperplane arrangements and their intersection lattices.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactlin::{
    intersect, kernel, orth_complement, primitive_integer_vector, Rational, RationalMatrix,
    Subspace,
};

pub const DEFAULT_CHAIN_CAP: usize = 1_000_000;

/// A finite set of distinct hyperplanes through the origin, each stored by
/// its primitive integer normal. Hyperplane `i` (0-based) carries label `i+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrangement {
    ambient_dim: usize,
    normals: Vec<Vec<BigInt>>,
}

impl Arrangement {
    pub fn empty(n: usize) -> Self {
        Self {
            ambient_dim: n,
            normals: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[Vec<BigInt>] {
        &self.normals
    }

    pub fn normal(&self, i: usize) -> Vec<Rational> {
        self.normals[i]
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect()
    }

    pub fn normal_matrix(&self) -> RationalMatrix {
        RationalMatrix::from_rows(
            self.ambient_dim,
            (0..self.len()).map(|i| self.normal(i)).collect(),
        )
        .expect("normals have length n")
    }

    pub fn hyperplane(&self, i: usize) -> Subspace {
        kernel(
            &RationalMatrix::from_rows(self.ambient_dim, vec![self.normal(i)]).expect("length n"),
        )
    }

    /// Whether `u` lies inside hyperplane `i`.
    pub fn hyperplane_contains(&self, i: usize, u: &Subspace) -> bool {
        let alpha = self.normal(i);
        (0..u.dim()).all(|r| crate::exactlin::dot(u.basis().row(r), &alpha).is_zero())
    }

    /// Text form accepted by [`parse_arrangement`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.ambient_dim);
        for normal in &self.normals {
            let row: Vec<String> = normal.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// Canonicalizes the raw normals and rejects zero, ragged or repeated ones.
pub fn build_arrangement(n: usize, raw_normals: Vec<Vec<Rational>>) -> Result<Arrangement> {
    let mut normals: Vec<Vec<BigInt>> = Vec::with_capacity(raw_normals.len());
    for (index, raw) in raw_normals.iter().enumerate() {
        if raw.len() != n {
            return Err(Error::LengthMismatch {
                index: index + 1,
                expected: n,
                found: raw.len(),
            });
        }
        let (ints, _) =
            primitive_integer_vector(raw).ok_or(Error::ZeroNormal { index: index + 1 })?;
        if let Some(first) = normals.iter().position(|other| *other == ints) {
            return Err(Error::DuplicateHyperplane {
                first: first + 1,
                second: index + 1,
            });
        }
        normals.push(ints);
    }
    Ok(Arrangement {
        ambient_dim: n,
        normals,
    })
}

pub fn build_arrangement_i64(n: usize, normals: &[&[i64]]) -> Result<Arrangement> {
    build_arrangement(
        n,
        normals
            .iter()
            .map(|row| row.iter().map(|&x| crate::exactlin::rat(x)).collect())
            .collect(),
    )
}

fn parse_rational(token: &str, line: usize) -> Result<Rational> {
    let value = Rational::from_str(token).map_err(|_| Error::Parse {
        line,
        message: format!("invalid rational `{token}`"),
    })?;
    Ok(value)
}

/// Meaningful lines of a text file: `#` starts a comment, blank lines are
/// skipped. Yields (1-based line number, tokens).
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

pub(crate) fn parse_count(token: &str, line: usize) -> Result<usize> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a nonnegative integer, found `{token}`"),
    })
}

pub(crate) fn parse_row(tokens: &[&str], n: usize, line: usize) -> Result<Vec<Rational>> {
    if tokens.len() != n {
        return Err(Error::Parse {
            line,
            message: format!("expected {n} entries, found {}", tokens.len()),
        });
    }
    tokens.iter().map(|t| parse_rational(t, line)).collect()
}

/// Parses the arrangement text format: a header line `n`, then one normal
/// per line as `n` rationals (`p` or `p/q`).
pub fn parse_arrangement(text: &str) -> Result<Arrangement> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing dimension header".into(),
    })?;
    if header.len() != 1 {
        return Err(Error::Parse {
            line: header_line,
            message: "header must be a single integer n".into(),
        });
    }
    let n = parse_count(header[0], header_line)?;
    let mut normals = Vec::new();
    let mut line_of = Vec::new();
    for (line, tokens) in lines {
        normals.push(parse_row(&tokens, n, line)?);
        line_of.push(line);
    }
    build_arrangement(n, normals).map_err(|err| match err {
        Error::ZeroNormal { index } => Error::Parse {
            line: line_of[index - 1],
            message: "zero normal vector".into(),
        },
        Error::DuplicateHyperplane { first, second } => Error::Parse {
            line: line_of[second - 1],
            message: format!("duplicates the hyperplane on line {}", line_of[first - 1]),
        },
        other => other,
    })
}

/// An element of the intersection lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    pub subspace: Subspace,
    pub rank: usize,
    /// 0-based indices of every hyperplane containing the flat.
    pub generators: Vec<usize>,
}

impl Flat {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    /// Generator set with 1-based hyperplane labels, e.g. `{1,3}`.
    pub fn label(&self) -> String {
        let labels: Vec<String> = self
            .generators
            .iter()
            .map(|g| (g + 1).to_string())
            .collect();
        format!("{{{}}}", labels.join(","))
    }
}

/// Intersection lattice, ordered by reverse inclusion and graded by
/// `rank = n - dim`. Flats are sorted by rank, then by canonical subspace.
#[derive(Clone, Debug)]
pub struct IntersectionLattice {
    ambient_dim: usize,
    flats: Vec<Flat>,
    by_rank: Vec<Vec<usize>>,
    /// `up[x]`: flats of rank `rk(x)+1` contained in `x`.
    up: Vec<Vec<usize>>,
    /// `down[x]`: flats of rank `rk(x)-1` containing `x`.
    down: Vec<Vec<usize>>,
    index: HashMap<Subspace, usize>,
}

impl IntersectionLattice {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn flat(&self, i: usize) -> &Flat {
        &self.flats[i]
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    /// r(A), the rank of the center.
    pub fn rank(&self) -> usize {
        self.by_rank.len() - 1
    }

    pub fn by_rank(&self) -> &[Vec<usize>] {
        &self.by_rank
    }

    /// Flats of rank `k` (empty when `k > r`).
    pub fn flats_of_rank(&self, k: usize) -> &[usize] {
        self.by_rank.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn covers_up(&self, x: usize) -> &[usize] {
        &self.up[x]
    }

    pub fn covers_down(&self, x: usize) -> &[usize] {
        &self.down[x]
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.by_rank[self.rank()][0]
    }

    pub fn position(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }
}

/// All intersections of subsets of hyperplanes, found by breadth-first
/// closure from the ambient space.
pub fn intersection_lattice(a: &Arrangement) -> IntersectionLattice {
    let n = a.ambient_dim();
    let hyperplanes: Vec<Subspace> = (0..a.len()).map(|i| a.hyperplane(i)).collect();
    let mut seen: BTreeSet<Subspace> = BTreeSet::new();
    let full = Subspace::full(n);
    seen.insert(full.clone());
    let mut frontier = vec![full];
    while !frontier.is_empty() {
        let mut next = BTreeSet::new();
        for x in &frontier {
            for (i, h) in hyperplanes.iter().enumerate() {
                if a.hyperplane_contains(i, x) {
                    continue;
                }
                let y = intersect(x, h).expect("same ambient space");
                if !seen.contains(&y) {
                    next.insert(y);
                }
            }
        }
        seen.extend(next.iter().cloned());
        frontier = next.into_iter().collect();
    }

    let mut flats: Vec<Flat> = seen
        .into_iter()
        .map(|subspace| {
            let generators = (0..a.len())
                .filter(|&i| a.hyperplane_contains(i, &subspace))
                .collect();
            Flat {
                rank: n - subspace.dim(),
                subspace,
                generators,
            }
        })
        .collect();
    flats.sort_by(|x, y| {
        x.rank
            .cmp(&y.rank)
            .then_with(|| x.subspace.cmp(&y.subspace))
    });

    let max_rank = flats.iter().map(|f| f.rank).max().unwrap_or(0);
    let mut by_rank = vec![Vec::new(); max_rank + 1];
    for (i, f) in flats.iter().enumerate() {
        by_rank[f.rank].push(i);
    }

    let mut up = vec![Vec::new(); flats.len()];
    let mut down = vec![Vec::new(); flats.len()];
    for rank in 0..max_rank {
        for &x in &by_rank[rank] {
            let perp = orth_complement(&flats[x].subspace);
            for &y in &by_rank[rank + 1] {
                let inside = (0..perp.dim()).all(|p| {
                    (0..flats[y].dim()).all(|q| {
                        crate::exactlin::dot(perp.basis().row(p), flats[y].subspace.basis().row(q))
                            .is_zero()
                    })
                });
                if inside {
                    up[x].push(y);
                    down[y].push(x);
                }
            }
        }
    }

    let index = flats
        .iter()
        .enumerate()
        .map(|(i, f)| (f.subspace.clone(), i))
        .collect();
    IntersectionLattice {
        ambient_dim: n,
        flats,
        by_rank,
        up,
        down,
        index,
    }
}

/// T, the intersection of all hyperplanes (the ambient space when empty).
pub fn center(a: &Arrangement) -> Subspace {
    kernel(&a.normal_matrix())
}

pub fn is_essential(a: &Arrangement) -> bool {
    center(a).is_zero()
}

/// The arrangement of traces `H ∩ U` for hyperplanes not containing `U`,
/// written in the coordinates of the canonical basis of `U`.
pub fn restriction(a: &Arrangement, u: &Subspace) -> Result<Arrangement> {
    if u.ambient_dim() != a.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: a.ambient_dim(),
            right: u.ambient_dim(),
        });
    }
    if u.is_zero() {
        return Err(Error::ZeroSubspace);
    }
    let b = u.basis();
    let mut normals: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..a.len() {
        let trace = b.mul_vec(&a.normal(i))?;
        if let Some((ints, _)) = primitive_integer_vector(&trace) {
            if !normals.contains(&ints) {
                normals.push(ints);
            }
        }
    }
    Ok(Arrangement {
        ambient_dim: u.dim(),
        normals,
    })
}

/// A maximal chain `T = F_0 ⊊ F_1 ⊊ … ⊊ F_r = R^n`, as flat indices.
pub type Chain = Vec<usize>;

/// Every maximal chain, walking from the center up to the ambient space.
/// Chains come out in lexicographic order of their flat indices.
pub fn maximal_chains(l: &IntersectionLattice, cap: usize) -> Result<Vec<Chain>> {
    let mut chains = Vec::new();
    let mut path = vec![l.top()];
    walk(l, &mut path, &mut chains, cap)?;
    Ok(chains)
}

fn walk(
    l: &IntersectionLattice,
    path: &mut Vec<usize>,
    out: &mut Vec<Chain>,
    cap: usize,
) -> Result<()> {
    let last = *path.last().unwrap();
    if l.flat(last).rank == 0 {
        if out.len() >= cap {
            return Err(Error::ChainGuard { cap });
        }
        out.push(path.clone());
        return Ok(());
    }
    for &next in l.covers_down(last) {
        path.push(next);
        walk(l, path, out, cap)?;
        path.pop();
    }
    Ok(())
}

/// Intersection of the hyperplanes with the given 0-based indices.
pub fn flat_of(a: &Arrangement, generators: &[usize]) -> Subspace {
    let rows = generators.iter().map(|&i| a.normal(i)).collect();
    kernel(&RationalMatrix::from_rows(a.ambient_dim(), rows).expect("length n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;

    pub(crate) fn braid3() -> Arrangement {
        build_arrangement_i64(3, &[&[1, -1, 0], &[1, 0, -1], &[0, 1, -1]]).unwrap()
    }

    fn boolean(n: usize) -> Arrangement {
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| rat((i == j) as i64)).collect())
            .collect();
        build_arrangement(n, rows).unwrap()
    }

    // Oracle: intersect every subset of hyperplanes directly.
    fn subset_flats(a: &Arrangement) -> BTreeSet<Subspace> {
        (0u32..1 << a.len())
            .map(|mask| {
                let gens: Vec<usize> = (0..a.len()).filter(|i| mask >> i & 1 == 1).collect();
                flat_of(a, &gens)
            })
            .collect()
    }

    #[test]
    fn build_examples() {
        let b2 = build_arrangement_i64(2, &[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(b2.len(), 2);
        let br = build_arrangement_i64(3, &[&[-2, 2, 0], &[1, 0, -1], &[0, 3, -3]]).unwrap();
        assert_eq!(br, braid3());
        assert_eq!(
            build_arrangement_i64(2, &[&[2, 0], &[1, 0]]),
            Err(Error::DuplicateHyperplane {
                first: 1,
                second: 2
            })
        );
        assert_eq!(
            build_arrangement_i64(2, &[&[0, 0]]),
            Err(Error::ZeroNormal { index: 1 })
        );
        assert!(matches!(
            build_arrangement_i64(2, &[&[1, 0, 0]]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn lattice_examples() {
        let a = braid3();
        let l = intersection_lattice(&a);
        assert_eq!(l.len(), 5);
        assert_eq!(l.rank(), 2);
        let flats: BTreeSet<Subspace> = l.flats().iter().map(|f| f.subspace.clone()).collect();
        assert_eq!(flats, subset_flats(&a));
        assert_eq!(
            l.flat(l.top()).subspace,
            Subspace::span(3, vec![vec![rat(1); 3]]).unwrap()
        );
        assert_eq!(l.flat(l.top()).generators, vec![0, 1, 2]);

        let e = intersection_lattice(&Arrangement::empty(3));
        assert_eq!(e.len(), 1);
        assert_eq!(e.rank(), 0);

        for n in 1..=4 {
            let b = boolean(n);
            let l = intersection_lattice(&b);
            assert_eq!(l.len(), 1 << n);
            let flats: BTreeSet<Subspace> = l.flats().iter().map(|f| f.subspace.clone()).collect();
            assert_eq!(flats, subset_flats(&b));
        }
    }

    #[test]
    fn lattice_closed_under_hyperplane_intersection() {
        let a = build_arrangement_i64(
            4,
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[1, 1, 0, 0],
                &[1, 2, 3, 0],
                &[0, 0, 1, 1],
            ],
        )
        .unwrap();
        let l = intersection_lattice(&a);
        for f in l.flats() {
            for i in 0..a.len() {
                let y = intersect(&f.subspace, &a.hyperplane(i)).unwrap();
                assert!(l.position(&y).is_some());
            }
            assert_eq!(flat_of(&a, &f.generators), f.subspace);
        }
    }

    #[test]
    fn center_examples() {
        assert_eq!(
            center(&braid3()),
            Subspace::span(3, vec![vec![rat(1); 3]]).unwrap()
        );
        assert!(center(&boolean(3)).is_zero());
        assert_eq!(center(&Arrangement::empty(3)), Subspace::full(3));
        assert!(is_essential(&boolean(2)));
        assert!(!is_essential(&braid3()));
    }

    #[test]
    fn restriction_examples() {
        let a = braid3();
        let plane = kernel(&RationalMatrix::from_i64_rows(3, &[&[1, 1, 1]]).unwrap());
        let r = restriction(&a, &plane).unwrap();
        assert_eq!(r.ambient_dim(), 2);
        assert_eq!(r.len(), 3);

        let b2 = boolean(2);
        let diag = Subspace::span(2, vec![vec![rat(1), rat(1)]]).unwrap();
        let r = restriction(&b2, &diag).unwrap();
        assert_eq!(r.ambient_dim(), 1);
        assert_eq!(r.len(), 1);

        let t = center(&a);
        assert!(restriction(&a, &t).unwrap().is_empty());
        assert_eq!(
            restriction(&a, &Subspace::zero(3)),
            Err(Error::ZeroSubspace)
        );
        assert_eq!(restriction(&a, &Subspace::full(3)).unwrap(), a);
        assert_eq!(
            restriction(&boolean(4), &Subspace::full(4)).unwrap(),
            boolean(4)
        );
    }

    #[test]
    fn chain_examples() {
        let l = intersection_lattice(&braid3());
        let chains = maximal_chains(&l, DEFAULT_CHAIN_CAP).unwrap();
        assert_eq!(chains.len(), 3);
        for c in &chains {
            assert_eq!(c.len(), 3);
            for (j, &f) in c.iter().enumerate() {
                assert_eq!(l.flat(f).dim(), 3 - 2 + j);
            }
        }
        let l = intersection_lattice(&Arrangement::empty(3));
        assert_eq!(
            maximal_chains(&l, DEFAULT_CHAIN_CAP).unwrap(),
            vec![vec![0]]
        );

        let l = intersection_lattice(&boolean(3));
        assert_eq!(maximal_chains(&l, DEFAULT_CHAIN_CAP).unwrap().len(), 6);
        let l4 = intersection_lattice(&boolean(4));
        assert_eq!(maximal_chains(&l4, DEFAULT_CHAIN_CAP).unwrap().len(), 24);
        assert_eq!(maximal_chains(&l4, 10), Err(Error::ChainGuard { cap: 10 }));
    }

    #[test]
    fn parse_format() {
        let text = "# braid\n3\n1 -1 0\n\n1 0 -1  # H13\n0 1/2 -1/2\n";
        assert_eq!(parse_arrangement(text).unwrap(), braid3());
        assert_eq!(parse_arrangement(&braid3().to_text()).unwrap(), braid3());
        assert_eq!(parse_arrangement("3\n").unwrap(), Arrangement::empty(3));

        let err = parse_arrangement("2\n1 0\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_arrangement("2\n1 0\n1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_arrangement("2\n1 0\n# c\n2 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
        let err = parse_arrangement("2\n0 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_arrangement("2\n1 1/0\n").is_err());
        assert!(parse_arrangement("").is_err());
    }
}
