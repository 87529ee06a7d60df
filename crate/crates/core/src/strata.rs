//! Stratum labels of k-subspaces and the verifiers that compare the
//! partitions they induce.
//!
//! Three labels are computed for every subspace `U`:
//!
//! * the matroid label: the labeled matroid of the normals projected to `U`;
//! * the adjoint label: `i = dim(U ∩ T)` together with the (k-i)-flats whose
//!   adjoint hyperplane contains the Plücker vector of the defect subspace
//!   `U ∩ (U⊥ + T⊥)`;
//! * the Schubert label: `i` together with, for every maximal chain of the
//!   intersection lattice, the positions where `dim(U ∩ F_l)` jumps.
//!
//! [`verify_equivalence`] checks that the three labelings partition a sample
//! identically; [`verify_restriction_classification`] checks that subspaces
//! with equal labels have isomorphic restriction lattices.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arrangement::{
    center, flat_of, intersection_lattice, maximal_chains, Arrangement, Chain, IntersectionLattice,
    DEFAULT_CHAIN_CAP,
};
use crate::error::{Error, Result};
use crate::exactlin::{intersect, is_direct_sum_full, RationalMatrix, Subspace};
use crate::matroid::{
    bases, lattice_isomorphic_with_cap, matroid_from, projected_normals, restriction_lattice,
    Matroid, RankedLattice, MAX_LATTICE_SIZE,
};
use crate::pluecker::{
    adjoint_hyperplane, defect_subspace_with_center, eval_adjoint, pluecker_vector,
    AdjointHyperplane,
};

/// Matroid label: the labeled matroid 𝔐_A(U).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatroidLabel {
    pub matroid: Matroid,
}

impl MatroidLabel {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self.matroid.summary()).expect("plain data")
    }
}

/// Adjoint label `(i, L^U(A))`. `zero_set` holds lattice indices of the
/// (k-i)-flats X with Δ(defect) ∈ H(X).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdjointLabel {
    pub i: usize,
    pub zero_set: Vec<usize>,
}

impl AdjointLabel {
    pub fn to_json(&self, lattice: &IntersectionLattice) -> Value {
        let zero_set: Vec<Vec<usize>> = self
            .zero_set
            .iter()
            .map(|&x| lattice.flat(x).generators.iter().map(|g| g + 1).collect())
            .collect();
        json!({ "i": self.i, "zero_set": zero_set })
    }
}

/// Schubert label: `i` and one jump set (1-based positions in `[r]`) per
/// maximal chain, in chain order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SchubertLabel {
    pub i: usize,
    pub sigma: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceLabels {
    pub matroid: MatroidLabel,
    pub adjoint: AdjointLabel,
    pub schubert: SchubertLabel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Matroid,
    Adjoint,
    Schubert,
}

/// Agreement counts for one executable identity check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub checked: usize,
    pub agreed: usize,
}

impl CheckTally {
    pub fn all_agree(&self) -> bool {
        self.checked == self.agreed
    }

    fn record(&mut self, agree: bool) {
        self.checked += 1;
        self.agreed += agree as usize;
    }

    pub fn merge(&mut self, other: CheckTally) {
        self.checked += other.checked;
        self.agreed += other.agreed;
    }
}

/// Precomputed data for labeling k-subspaces of one arrangement: the
/// intersection lattice, the center, the maximal chains and the adjoint
/// hyperplanes of every flat of rank at most k.
#[derive(Clone, Debug)]
pub struct Stratifier {
    arrangement: Arrangement,
    k: usize,
    lattice: IntersectionLattice,
    center: Subspace,
    chains: Vec<Chain>,
    adjoints: Vec<Vec<AdjointHyperplane>>,
    lattice_cap: usize,
}

impl Stratifier {
    pub fn new(a: &Arrangement, k: usize, chain_cap: usize) -> Result<Self> {
        let n = a.ambient_dim();
        if k > n {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
        }
        let lattice = intersection_lattice(a);
        let chains = maximal_chains(&lattice, chain_cap)?;
        let adjoints = (0..=k.min(lattice.rank()))
            .map(|d| {
                lattice
                    .flats_of_rank(d)
                    .iter()
                    .map(|&x| adjoint_hyperplane(lattice.flat(x), d))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            arrangement: a.clone(),
            k,
            center: center(a),
            lattice,
            chains,
            adjoints,
            lattice_cap: MAX_LATTICE_SIZE,
        })
    }

    /// Size guard for restriction-lattice isomorphism tests.
    pub fn with_lattice_cap(mut self, cap: usize) -> Self {
        self.lattice_cap = cap;
        self
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lattice(&self) -> &IntersectionLattice {
        &self.lattice
    }

    pub fn center(&self) -> &Subspace {
        &self.center
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn is_essential(&self) -> bool {
        self.center.is_zero()
    }

    fn check_dim(&self, u: &Subspace) -> Result<()> {
        if u.ambient_dim() != self.arrangement.ambient_dim() {
            return Err(Error::AmbientMismatch {
                left: self.arrangement.ambient_dim(),
                right: u.ambient_dim(),
            });
        }
        if u.dim() != self.k {
            return Err(Error::InvalidArgument(format!(
                "subspace has dimension {}, expected {}",
                u.dim(),
                self.k
            )));
        }
        Ok(())
    }

    /// `dim(U ∩ T)`.
    pub fn meet_dim(&self, u: &Subspace) -> Result<usize> {
        Ok(intersect(u, &self.center)?.dim())
    }

    pub fn defect(&self, u: &Subspace) -> Result<Subspace> {
        defect_subspace_with_center(&self.arrangement, &self.center, u)
    }

    pub fn matroid_label(&self, u: &Subspace) -> Result<MatroidLabel> {
        self.check_dim(u)?;
        let matroid = matroid_from(&self.arrangement, u)?;
        let i = self.meet_dim(u)?;
        if matroid.rank() + i != self.k {
            return Err(Error::Invariant(format!(
                "matroid rank {} with dim(U ∩ T) = {i} and k = {}",
                matroid.rank(),
                self.k
            )));
        }
        Ok(MatroidLabel { matroid })
    }

    pub fn adjoint_label(&self, u: &Subspace) -> Result<AdjointLabel> {
        self.check_dim(u)?;
        let i = self.meet_dim(u)?;
        let defect = self.defect(u)?;
        let d = self.k - i;
        let p = pluecker_vector(&defect);
        let mut zero_set = Vec::new();
        for h in self.adjoints.get(d).map(Vec::as_slice).unwrap_or(&[]) {
            if eval_adjoint(h, &p)?.is_zero() {
                let x = self
                    .lattice
                    .position(&h.source_flat.subspace)
                    .expect("adjoints come from lattice flats");
                zero_set.push(x);
            }
        }
        Ok(AdjointLabel { i, zero_set })
    }

    /// `dim(U ∩ F)` for every flat F, indexed like the lattice.
    fn flat_meet_dims(&self, u: &Subspace) -> Result<Vec<usize>> {
        self.lattice
            .flats()
            .iter()
            .map(|f| Ok(intersect(u, &f.subspace)?.dim()))
            .collect()
    }

    pub fn schubert_label(&self, u: &Subspace) -> Result<SchubertLabel> {
        self.check_dim(u)?;
        let dims = self.flat_meet_dims(u)?;
        let i = dims[self.lattice.top()];
        let sigma = self
            .chains
            .iter()
            .map(|chain| {
                let jumps: Vec<usize> = (1..chain.len())
                    .filter(|&l| dims[chain[l]] > dims[chain[l - 1]])
                    .collect();
                if jumps.len() != self.k - i {
                    return Err(Error::Invariant(format!(
                        "chain has {} jumps, expected {}",
                        jumps.len(),
                        self.k - i
                    )));
                }
                Ok(jumps)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SchubertLabel { i, sigma })
    }

    pub fn labels(&self, u: &Subspace) -> Result<SubspaceLabels> {
        let labels = SubspaceLabels {
            matroid: self.matroid_label(u)?,
            adjoint: self.adjoint_label(u)?,
            schubert: self.schubert_label(u)?,
        };
        if labels.adjoint.i != labels.schubert.i
            || labels.matroid.matroid.rank() + labels.adjoint.i != self.k
        {
            return Err(Error::Invariant("labels disagree on dim(U ∩ T)".into()));
        }
        Ok(labels)
    }

    pub fn labels_json(&self, labels: &SubspaceLabels) -> Value {
        json!({
            "matroid": labels.matroid.to_json(),
            "adjoint": labels.adjoint.to_json(&self.lattice),
            "schubert": serde_json::to_value(&labels.schubert).expect("plain data"),
        })
    }

    /// L_U(A) recovered from a Schubert label: the flats `F_{r-k+i}` of the
    /// chains whose jump set is `{r-k+i+1, …, r}`.
    pub fn direct_sum_flats_from_schubert(&self, label: &SchubertLabel) -> Vec<usize> {
        let r = self.lattice.rank();
        let d = self.k - label.i;
        let tail: Vec<usize> = (r - d + 1..=r).collect();
        let mut flats: Vec<usize> = self
            .chains
            .iter()
            .zip(&label.sigma)
            .filter(|(_, s)| **s == tail)
            .map(|(chain, _)| chain[r - d])
            .collect();
        flats.sort_unstable();
        flats.dedup();
        flats
    }

    /// L_U(A) from an adjoint label: the (k-i)-flats outside the zero set.
    pub fn direct_sum_flats_from_adjoint(&self, label: &AdjointLabel) -> Vec<usize> {
        self.lattice
            .flats_of_rank(self.k - label.i)
            .iter()
            .copied()
            .filter(|x| !label.zero_set.contains(x))
            .collect()
    }

    /// For every (k-i)-flat X: `Δ(defect) ∉ H(X)` ⟺ `defect ⊕ X = R^n`.
    pub fn check_direct_sum_identity(&self, u: &Subspace) -> Result<CheckTally> {
        self.check_dim(u)?;
        let i = self.meet_dim(u)?;
        let d = self.k - i;
        let defect = self.defect(u)?;
        let p = pluecker_vector(&defect);
        let mut tally = CheckTally::default();
        for &x in self.lattice.flats_of_rank(d) {
            let flat = self.lattice.flat(x);
            let h = adjoint_hyperplane(flat, d)?;
            let off_hyperplane = !eval_adjoint(&h, &p)?.is_zero();
            tally.record(off_hyperplane == is_direct_sum_full(&defect, &flat.subspace)?);
        }
        Ok(tally)
    }

    /// For every `I ⊆ [m]` with `|I| = k - i`: I is a basis ⟺ the projected
    /// normals of I are independent ⟺ `⋂_{i∈I} H_i` is a (k-i)-flat in
    /// direct sum with the defect subspace.
    pub fn check_basis_identity(&self, u: &Subspace) -> Result<CheckTally> {
        let matroid = self.matroid_label(u)?.matroid;
        let i = self.meet_dim(u)?;
        let d = self.k - i;
        let defect = self.defect(u)?;
        let n = self.arrangement.ambient_dim();
        let m = self.arrangement.len();
        let beta = projected_normals(&self.arrangement, u)?;
        let basis_set = bases(&matroid);
        let mut tally = CheckTally::default();
        for mask in (0u32..1 << m).filter(|s| s.count_ones() as usize == d) {
            let members: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
            let is_basis = basis_set.binary_search(&mask).is_ok();
            let rows = members.iter().map(|&j| beta[j].clone()).collect();
            let independent = RationalMatrix::from_rows(n, rows)?.rank() == d;
            let flat = flat_of(&self.arrangement, &members);
            let in_lu = flat.dim() == n - d && is_direct_sum_full(&defect, &flat)?;
            tally.record(is_basis == independent && independent == in_lu);
        }
        Ok(tally)
    }
}

pub fn matroid_label(a: &Arrangement, u: &Subspace) -> Result<MatroidLabel> {
    Stratifier::new(a, u.dim(), DEFAULT_CHAIN_CAP)?.matroid_label(u)
}

pub fn adjoint_label(a: &Arrangement, u: &Subspace) -> Result<AdjointLabel> {
    Stratifier::new(a, u.dim(), DEFAULT_CHAIN_CAP)?.adjoint_label(u)
}

pub fn schubert_label(a: &Arrangement, u: &Subspace) -> Result<SchubertLabel> {
    Stratifier::new(a, u.dim(), DEFAULT_CHAIN_CAP)?.schubert_label(u)
}

/// Labels every subspace, fanning out over `jobs` worker threads. Results
/// are returned in input order regardless of `jobs`.
pub fn label_all(
    s: &Stratifier,
    subspaces: &[Subspace],
    jobs: usize,
) -> Result<Vec<SubspaceLabels>> {
    if jobs <= 1 {
        return subspaces.iter().map(|u| s.labels(u)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| subspaces.par_iter().map(|u| s.labels(u)).collect())
}

/// Blocks of a set partition of sample indices, each sorted, ordered by
/// smallest member.
pub type Partition = Vec<Vec<usize>>;

fn partition_by<K: Ord>(keys: &[K]) -> Partition {
    let mut groups: BTreeMap<&K, Vec<usize>> = BTreeMap::new();
    for (i, key) in keys.iter().enumerate() {
        groups.entry(key).or_default().push(i);
    }
    let mut blocks: Partition = groups.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    blocks
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partitions {
    pub matroid: Partition,
    pub adjoint: Partition,
    pub schubert: Partition,
}

impl Partitions {
    fn get(&self, kind: LabelKind) -> &Partition {
        match kind {
            LabelKind::Matroid => &self.matroid,
            LabelKind::Adjoint => &self.adjoint,
            LabelKind::Schubert => &self.schubert,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    pub left: LabelKind,
    pub right: LabelKind,
    pub equal: bool,
}

/// Two samples that share the `agree` label but not the `disagree` one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub first: usize,
    pub second: usize,
    pub agree: LabelKind,
    pub disagree: LabelKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub partitions: Partitions,
    pub verdicts: Vec<PairVerdict>,
    pub witnesses: Vec<Witness>,
    pub pass: bool,
}

/// Canonical string keys of the three labels, used for grouping.
pub fn label_keys(s: &Stratifier, labels: &SubspaceLabels) -> [String; 3] {
    [
        labels.matroid.to_json().to_string(),
        labels.adjoint.to_json(s.lattice()).to_string(),
        serde_json::to_string(&labels.schubert).expect("plain data"),
    ]
}

const KINDS: [LabelKind; 3] = [LabelKind::Matroid, LabelKind::Adjoint, LabelKind::Schubert];

fn block_of(partition: &Partition, len: usize) -> Vec<usize> {
    let mut block = vec![0; len];
    for (b, members) in partition.iter().enumerate() {
        for &m in members {
            block[m] = b;
        }
    }
    block
}

fn first_witness(
    p: &Partitions,
    len: usize,
    agree: LabelKind,
    disagree: LabelKind,
) -> Option<Witness> {
    let a = block_of(p.get(agree), len);
    let d = block_of(p.get(disagree), len);
    for first in 0..len {
        for second in first + 1..len {
            if a[first] == a[second] && d[first] != d[second] {
                return Some(Witness {
                    first,
                    second,
                    agree,
                    disagree,
                });
            }
        }
    }
    None
}

/// Compares the partitions induced by already computed labels.
pub fn compare_partitions(s: &Stratifier, labels: &[SubspaceLabels]) -> EquivalenceReport {
    let keys: Vec<[String; 3]> = labels.iter().map(|l| label_keys(s, l)).collect();
    let column = |c: usize| -> Vec<&String> { keys.iter().map(|k| &k[c]).collect() };
    let partitions = Partitions {
        matroid: partition_by(&column(0)),
        adjoint: partition_by(&column(1)),
        schubert: partition_by(&column(2)),
    };
    let mut verdicts = Vec::new();
    let mut witnesses = Vec::new();
    for (x, &left) in KINDS.iter().enumerate() {
        for &right in &KINDS[x + 1..] {
            let equal = partitions.get(left) == partitions.get(right);
            if !equal {
                witnesses.extend(first_witness(&partitions, labels.len(), left, right));
                witnesses.extend(first_witness(&partitions, labels.len(), right, left));
            }
            verdicts.push(PairVerdict { left, right, equal });
        }
    }
    let pass = verdicts.iter().all(|v| v.equal);
    EquivalenceReport {
        partitions,
        verdicts,
        witnesses,
        pass,
    }
}

/// Labels every subspace three ways and checks that the induced partitions
/// coincide.
pub fn verify_equivalence(
    a: &Arrangement,
    k: usize,
    subspaces: &[Subspace],
) -> Result<EquivalenceReport> {
    let s = Stratifier::new(a, k, DEFAULT_CHAIN_CAP)?;
    let labels = label_all(&s, subspaces, 1)?;
    Ok(compare_partitions(&s, &labels))
}

/// Isomorphism results for one label class.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ClassVerdict {
    pub members: Vec<usize>,
    pub pairs_checked: usize,
    pub pairs_isomorphic: usize,
    /// Pairs whose restriction lattices are not isomorphic.
    pub failures: Vec<(usize, usize)>,
    /// Pairs skipped because a lattice exceeded the size guard.
    pub guard_skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    /// One entry per matroid-label class.
    pub classes: Vec<ClassVerdict>,
    /// For essential arrangements: classes of equal adjoint label (i = 0).
    pub adjoint_classes: Option<Vec<ClassVerdict>>,
    /// Pairs of distinct classes whose representatives have non-isomorphic
    /// restriction lattices.
    pub non_isomorphic_class_pairs: usize,
    pub class_pairs_compared: usize,
    pub pass: bool,
}

type LatticeSlot = Option<std::result::Result<RankedLattice, Error>>;

fn class_verdict(members: &[usize], lattices: &[LatticeSlot], cap: usize) -> ClassVerdict {
    let mut v = ClassVerdict {
        members: members.to_vec(),
        ..Default::default()
    };
    for (x, &p) in members.iter().enumerate() {
        for &q in &members[x + 1..] {
            let (Some(Ok(lp)), Some(Ok(lq))) = (&lattices[p], &lattices[q]) else {
                if matches!(lattices[p], Some(Err(_))) || matches!(lattices[q], Some(Err(_))) {
                    v.guard_skipped += 1;
                }
                continue;
            };
            match lattice_isomorphic_with_cap(lp, lq, cap) {
                Ok(true) => {
                    v.pairs_checked += 1;
                    v.pairs_isomorphic += 1;
                }
                Ok(false) => {
                    v.pairs_checked += 1;
                    v.failures.push((p, q));
                }
                Err(_) => v.guard_skipped += 1,
            }
        }
    }
    v
}

/// Groups by matroid label and checks pairwise isomorphism of restriction
/// lattices inside every group (and, for essential arrangements, inside
/// every adjoint-label group).
pub fn classify_restrictions(
    s: &Stratifier,
    subspaces: &[Subspace],
    labels: &[SubspaceLabels],
) -> Result<ClassificationReport> {
    let lattices: Vec<LatticeSlot> = subspaces
        .iter()
        .map(|u| (u.dim() >= 1).then(|| restriction_lattice(s.arrangement(), u)))
        .collect();
    let keys: Vec<[String; 3]> = labels.iter().map(|l| label_keys(s, l)).collect();
    let by_matroid = partition_by(&keys.iter().map(|k| &k[0]).collect::<Vec<_>>());
    let classes: Vec<ClassVerdict> = by_matroid
        .iter()
        .map(|members| class_verdict(members, &lattices, s.lattice_cap))
        .collect();

    let adjoint_classes = s.is_essential().then(|| {
        let by_adjoint = partition_by(&keys.iter().map(|k| &k[1]).collect::<Vec<_>>());
        by_adjoint
            .iter()
            .map(|members| class_verdict(members, &lattices, s.lattice_cap))
            .collect::<Vec<_>>()
    });

    let mut non_isomorphic_class_pairs = 0;
    let mut class_pairs_compared = 0;
    for (x, a) in by_matroid.iter().enumerate() {
        for b in &by_matroid[x + 1..] {
            if let (Some(Ok(la)), Some(Ok(lb))) = (&lattices[a[0]], &lattices[b[0]]) {
                if let Ok(iso) = lattice_isomorphic_with_cap(la, lb, s.lattice_cap) {
                    class_pairs_compared += 1;
                    non_isomorphic_class_pairs += (!iso) as usize;
                }
            }
        }
    }

    let clean = |cs: &[ClassVerdict]| cs.iter().all(|c| c.failures.is_empty());
    let pass = clean(&classes) && adjoint_classes.as_deref().is_none_or(clean);
    Ok(ClassificationReport {
        classes,
        adjoint_classes,
        non_isomorphic_class_pairs,
        class_pairs_compared,
        pass,
    })
}

pub fn verify_restriction_classification(
    a: &Arrangement,
    k: usize,
    subspaces: &[Subspace],
) -> Result<ClassificationReport> {
    let s = Stratifier::new(a, k, DEFAULT_CHAIN_CAP)?;
    let labels = label_all(&s, subspaces, 1)?;
    classify_restrictions(&s, subspaces, &labels)
}
