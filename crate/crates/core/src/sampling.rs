//! Seeded subspace sampling.
//!
//! Every draw comes from a ChaCha8 stream keyed by `(seed, stream)`, so a
//! sample depends only on its seed and index and never on draw order or
//! thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::IntersectionLattice;
use crate::error::{Error, Result};
use crate::exactlin::{rat, Rational, RationalMatrix, Subspace};

pub const MAX_ATTEMPTS: usize = 10_000;

/// Streams at or above this offset are reserved for structured injections.
const INJECTION_STREAM: u64 = 1 << 63;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<Rational> {
    (0..n)
        .map(|_| rat(rng.random_range(-bound..=bound)))
        .collect()
}

/// Random integer combination of the basis rows of `s`.
fn random_vector_in(rng: &mut ChaCha8Rng, s: &Subspace, bound: i64) -> Vec<Rational> {
    let coeffs = random_vector(rng, s.dim(), bound);
    let mut v = vec![rat(0); s.ambient_dim()];
    for (r, c) in coeffs.iter().enumerate() {
        for (x, b) in v.iter_mut().zip(s.basis().row(r)) {
            *x += c * b;
        }
    }
    v
}

/// Adds random vectors of `container` to `start` until the span has
/// dimension `k`. Vectors that do not raise the dimension are discarded.
fn grow_within(
    rng: &mut ChaCha8Rng,
    start: Vec<Vec<Rational>>,
    container: &Subspace,
    k: usize,
    bound: i64,
) -> Result<Subspace> {
    let n = container.ambient_dim();
    let mut current = Subspace::span(n, start)?;
    let mut attempts = 0;
    while current.dim() < k {
        if attempts == MAX_ATTEMPTS {
            return Err(Error::Sampling { k, attempts });
        }
        attempts += 1;
        let mut rows = current.basis().row_vectors();
        rows.push(random_vector_in(rng, container, bound));
        let next = Subspace::span(n, rows)?;
        if next.dim() > current.dim() {
            current = next;
        }
    }
    Ok(current)
}

/// A uniformly drawn integer `k × n` matrix with entries in `[-bound, bound]`,
/// redrawn until it has rank `k`, as a canonical subspace.
pub fn sample_subspace(n: usize, k: usize, bound: u64, seed: u64, index: u64) -> Result<Subspace> {
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    if k == 0 {
        return Ok(Subspace::zero(n));
    }
    let bound =
        i64::try_from(bound).map_err(|_| Error::InvalidArgument("bound too large".into()))?;
    let mut rng = rng_for(seed, index);
    for _ in 0..MAX_ATTEMPTS {
        let rows = (0..k).map(|_| random_vector(&mut rng, n, bound)).collect();
        let m = RationalMatrix::from_rows(n, rows)?;
        if m.rank() == k {
            return Subspace::span(n, m.row_vectors());
        }
    }
    Err(Error::Sampling {
        k,
        attempts: MAX_ATTEMPTS,
    })
}

/// Where a sampled subspace came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    Random,
    Flat,
    InsideFlat,
    ContainsFlat,
    PerturbedFlat,
    FlatPair,
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub subspace: Subspace,
    pub source: SampleSource,
}

/// `count` random k-subspaces, sample `j` drawn from stream `j`.
pub fn random_samples(
    n: usize,
    k: usize,
    count: usize,
    bound: u64,
    seed: u64,
) -> Result<Vec<Sample>> {
    (0..count as u64)
        .map(|j| {
            Ok(Sample {
                subspace: sample_subspace(n, k, bound, seed, j)?,
                source: SampleSource::Random,
            })
        })
        .collect()
}

/// Subspaces aimed at non-generic strata: every flat of dimension `k`, its
/// perturbations, random k-subspaces inside larger flats and around
/// smaller ones, and subspaces meeting two random flats.
pub fn structured_samples(
    lattice: &IntersectionLattice,
    k: usize,
    bound: u64,
    seed: u64,
) -> Result<Vec<Sample>> {
    let n = lattice.ambient_dim();
    let bound = i64::try_from(bound.max(1))
        .map_err(|_| Error::InvalidArgument("bound too large".into()))?;
    let full = Subspace::full(n);
    let mut out = Vec::new();
    let mut stream = INJECTION_STREAM;
    let mut next_rng = || {
        stream += 1;
        rng_for(seed, stream)
    };
    let mut push = |subspace: Subspace, source| out.push(Sample { subspace, source });

    for flat in lattice.flats() {
        let x = &flat.subspace;
        if x.dim() == k {
            push(x.clone(), SampleSource::Flat);
            if k > 0 {
                let mut rng = next_rng();
                let mut rows = x.basis().row_vectors();
                let last = rows.len() - 1;
                for (v, d) in rows[last].iter_mut().zip(random_vector(&mut rng, n, 1)) {
                    *v += d;
                }
                let perturbed = Subspace::span(n, rows)?;
                if perturbed.dim() == k {
                    push(perturbed, SampleSource::PerturbedFlat);
                }
            }
        } else if x.dim() > k {
            for _ in 0..2 {
                let mut rng = next_rng();
                push(
                    grow_within(&mut rng, Vec::new(), x, k, bound)?,
                    SampleSource::InsideFlat,
                );
            }
        } else if x.dim() > 0 {
            for _ in 0..2 {
                let mut rng = next_rng();
                push(
                    grow_within(&mut rng, x.basis().row_vectors(), &full, k, bound)?,
                    SampleSource::ContainsFlat,
                );
            }
        }
    }

    let positive: Vec<&Subspace> = lattice
        .flats()
        .iter()
        .map(|f| &f.subspace)
        .filter(|s| s.dim() > 0)
        .collect();
    if k > 0 && positive.len() >= 2 {
        let pairs = (positive.len() * (positive.len() - 1) / 2).min(40);
        for _ in 0..pairs {
            let mut rng = next_rng();
            let a = rng.random_range(0..positive.len());
            let mut b = rng.random_range(0..positive.len() - 1);
            if b >= a {
                b += 1;
            }
            let va = random_vector_in(&mut rng, positive[a], bound);
            let vb = random_vector_in(&mut rng, positive[b], bound);
            let start: Vec<Vec<Rational>> = [va, vb].into_iter().take(k).collect();
            push(
                grow_within(&mut rng, start, &full, k, bound)?,
                SampleSource::FlatPair,
            );
        }
    }
    Ok(out)
}

/// Parses the subspace text format: header `n k`, then `k` rows of `n`
/// rationals. The rows must be independent.
pub fn parse_subspace(text: &str) -> Result<Subspace> {
    use crate::arrangement::{content_lines, parse_count, parse_row};
    let mut lines = content_lines(text);
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing `n k` header".into(),
    })?;
    if header.len() != 2 {
        return Err(Error::Parse {
            line: header_line,
            message: "header must be `n k`".into(),
        });
    }
    let n = parse_count(header[0], header_line)?;
    let k = parse_count(header[1], header_line)?;
    let mut rows = Vec::new();
    let mut last_line = header_line;
    for (line, tokens) in lines {
        if rows.len() == k {
            return Err(Error::Parse {
                line,
                message: format!("more than {k} rows"),
            });
        }
        rows.push(parse_row(&tokens, n, line)?);
        last_line = line;
    }
    if rows.len() != k {
        return Err(Error::Parse {
            line: last_line,
            message: format!("expected {k} rows, found {}", rows.len()),
        });
    }
    let s = Subspace::span(n, rows)?;
    if s.dim() != k {
        return Err(Error::Parse {
            line: header_line,
            message: format!("rows span a subspace of dimension {}, not {k}", s.dim()),
        });
    }
    Ok(s)
}

pub fn subspace_to_text(s: &Subspace) -> String {
    let mut out = format!("{} {}\n", s.ambient_dim(), s.dim());
    for r in 0..s.dim() {
        let row: Vec<String> = s.basis().row(r).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
