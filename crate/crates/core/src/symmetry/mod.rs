//! Automorphism groups of symmetric cost matrices and their orbits.

mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::BinarySolution;
use crate::matrix::IntMatrix;

pub(crate) use search::CapHit;
use search::{IsoSearch, Visit};

/// Default bound on the number of explicitly stored group elements.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// A permutation of `{0, …, d-1}`; `image[i]` is σ(i).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &j in &image {
            if j >= image.len() || seen[j] {
                return Err(Error::InvalidArgument(format!(
                    "{image:?} is not a bijection"
                )));
            }
            seen[j] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            image: (0..d).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            image[j] = i;
        }
        Permutation { image }
    }

    /// Whether `b[σ(i)][σ(j)] == b[i][j]` for all `i, j`.
    pub fn preserves(&self, b: &IntMatrix) -> bool {
        let n = b.dim();
        n == self.len()
            && (0..n).all(|i| {
                let r = b.row(i);
                let rs = b.row(self.image[i]);
                (0..n).all(|j| rs[self.image[j]] == r[j])
            })
    }
}

/// An orbit with its smallest member as representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    members: Vec<usize>,
}

impl Orbit {
    pub fn new(mut members: Vec<usize>) -> Self {
        assert!(!members.is_empty(), "orbits are nonempty");
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn representative(&self) -> usize {
        self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Members as 1-based indices joined by spaces.
    pub fn members_one_based(&self) -> String {
        self.members
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// An explicitly listed permutation group with its orbit partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationGroup {
    domain_size: usize,
    elements: Vec<Permutation>,
    orbit_partition: Vec<Orbit>,
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    domain_size: usize,
    order: usize,
    elements: Vec<Vec<usize>>,
}

impl PermutationGroup {
    /// Builds a group from a full element list. The caller guarantees the
    /// list is closed; use [`PermutationGroup::check_axioms`] to confirm.
    pub fn from_elements(domain_size: usize, mut elements: Vec<Permutation>) -> Result<Self> {
        if elements.iter().any(|p| p.len() != domain_size) {
            return Err(Error::Dimension("group element of wrong length".into()));
        }
        elements.sort();
        elements.dedup();
        let orbit_partition = orbits_of(
            domain_size,
            &elements,
            &(0..domain_size).collect::<Vec<_>>(),
        )?;
        Ok(Self {
            domain_size,
            elements,
            orbit_partition,
        })
    }

    pub fn trivial(d: usize) -> Self {
        Self::from_elements(d, vec![Permutation::identity(d)]).unwrap()
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn orbit_partition(&self) -> &[Orbit] {
        &self.orbit_partition
    }

    /// Closure, identity and inverses, checked directly on the list.
    pub fn check_axioms(&self) -> bool {
        let set: BTreeSet<&Permutation> = self.elements.iter().collect();
        if !set.contains(&Permutation::identity(self.domain_size)) {
            return false;
        }
        if !self.elements.iter().all(|p| set.contains(&p.inverse())) {
            return false;
        }
        self.elements
            .iter()
            .all(|p| self.elements.iter().all(|q| set.contains(&p.compose(q))))
    }

    /// JSON export: `{"domain_size", "order", "elements"}` with 1-based
    /// image arrays.
    pub fn to_json(&self) -> Result<String> {
        let doc = GroupJson {
            domain_size: self.domain_size,
            order: self.order(),
            elements: self
                .elements
                .iter()
                .map(|p| p.image.iter().map(|j| j + 1).collect())
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GroupJson = serde_json::from_str(text)?;
        let elements = doc
            .elements
            .into_iter()
            .map(|img| {
                if img.contains(&0) {
                    return Err(Error::InvalidArgument("image arrays are 1-based".into()));
                }
                Permutation::new(img.into_iter().map(|j| j - 1).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_elements(doc.domain_size, elements)
    }
}

/// Enumerates `{σ : B[σ(i)][σ(j)] = B[i][j]}` as an explicit sorted list.
/// Fails with [`Error::GroupTooLarge`] once more than `cap` elements are
/// found.
pub fn automorphisms(b: &IntMatrix, cap: usize) -> Result<PermutationGroup> {
    if !b.is_symmetric() {
        let (row, col) = b.asymmetry().unwrap();
        return Err(Error::Asymmetric {
            which: "B",
            row,
            col,
        });
    }
    let mut elements = Vec::new();
    let mut over = false;
    // Every search node either branches at least twice or ends in a leaf,
    // so the node count stays within a small multiple of the leaf count.
    let node_budget = (cap as u64).saturating_mul(4 * b.dim().max(1) as u64);
    let mut search = IsoSearch::new(b, b, node_budget);
    let res = search.run(&[], &mut |phi| {
        if elements.len() == cap {
            over = true;
            return Visit::Stop;
        }
        elements.push(Permutation {
            image: phi.to_vec(),
        });
        Visit::Continue
    });
    if over || res.is_err() {
        return Err(Error::GroupTooLarge { cap });
    }
    PermutationGroup::from_elements(b.dim(), elements)
}

fn orbits_of(d: usize, elements: &[Permutation], domain: &[usize]) -> Result<Vec<Orbit>> {
    let mut inside = vec![false; d];
    for &i in domain {
        if i >= d {
            return Err(Error::Dimension(format!(
                "index {i} outside domain of size {d}"
            )));
        }
        inside[i] = true;
    }
    let mut assigned = vec![false; d];
    let mut out = Vec::new();
    let mut sorted: Vec<usize> = domain.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &i in &sorted {
        if assigned[i] {
            continue;
        }
        let mut members = Vec::new();
        for (k, p) in elements.iter().enumerate() {
            let j = p.get(i);
            if !inside[j] {
                return Err(Error::DomainNotInvariant(k));
            }
            if !assigned[j] {
                assigned[j] = true;
                members.push(j);
            }
        }
        if members.is_empty() {
            // Only possible for an empty element list.
            assigned[i] = true;
            members.push(i);
        }
        out.push(Orbit::new(members));
    }
    Ok(out)
}

/// Orbits of `group` on `domain`, sorted by representative.
pub fn orbits(group: &PermutationGroup, domain: &[usize]) -> Result<Vec<Orbit>> {
    orbits_of(group.domain_size, &group.elements, domain)
}

/// `x_σ` with `x_σ[j] = x[σ(j)]`.
pub fn apply(sigma: &Permutation, x: &BinarySolution) -> Result<BinarySolution> {
    if sigma.len() != x.len() {
        return Err(Error::Dimension(format!(
            "permutation of length {} applied to a vector of length {}",
            sigma.len(),
            x.len()
        )));
    }
    let bits = (0..x.len()).map(|j| x.get(sigma.get(j))).collect();
    BinarySolution::new(bits)
}

/// All distinct images of `x` under the group, sorted.
pub fn expand_solution(
    group: &PermutationGroup,
    x: &BinarySolution,
) -> Result<Vec<BinarySolution>> {
    let mut set = BTreeSet::new();
    for p in &group.elements {
        set.insert(apply(p, x)?);
    }
    Ok(set.into_iter().collect())
}

/// Orbit partition of the automorphism group of `b` without listing the
/// group. Indices `i < j` are merged once some automorphism with
/// `σ(i) = j` is found; every automorphism found also merges all of its
/// cycles. When the search budget for a pair is exhausted the pair is left
/// apart, so the result is always a refinement of the true orbit
/// partition. The second value reports whether that happened.
pub fn orbit_partition(b: &IntMatrix, node_cap_per_pair: u64) -> (Vec<Orbit>, bool) {
    let n = b.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    fn union(p: &mut [usize], a: usize, b: usize) {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            p[hi] = lo;
        }
    }
    let mut ca = vec![0u32; n];
    let mut cb = vec![0u32; n];
    search::refine_pair(b, &mut ca, b, &mut cb);
    let mut truncated = false;
    for i in 0..n {
        for j in (i + 1)..n {
            if ca[i] != ca[j] || find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            match search::find_isomorphism(b, b, &[(i, j)], node_cap_per_pair) {
                Ok(Some(phi)) => {
                    for (k, &v) in phi.iter().enumerate() {
                        union(&mut parent, k, v);
                    }
                }
                Ok(None) => {}
                Err(CapHit) => truncated = true,
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Orbit> = groups.into_values().map(Orbit::new).collect();
    out.sort_by_key(|o| o.representative());
    (out, truncated)
}

/// Some `phi` with `b[phi(i)][phi(j)] = a[i][j]`, if `a` and `b` are
/// isomorphic. `Err(CapHit)` means the search budget ran out first.
pub(crate) fn find_isomorphism(
    a: &IntMatrix,
    b: &IntMatrix,
    node_cap: u64,
) -> std::result::Result<Option<Vec<usize>>, CapHit> {
    search::find_isomorphism(a, b, &[], node_cap)
}

/// Public form of the isomorphism search; `None` also when `node_cap`
/// search nodes were not enough to decide.
pub fn find_relabelling(a: &IntMatrix, b: &IntMatrix, node_cap: u64) -> Option<Vec<usize>> {
    find_isomorphism(a, b, node_cap).ok().flatten()
}

/// Writes an orbit report: `orbit,members,size[,score]`, members 1-based
/// and space separated, indices translated through `labels`.
pub fn write_orbit_csv<W: Write>(
    out: W,
    orbits: &[Orbit],
    labels: &[usize],
    scores: Option<&[f64]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if scores.is_some() {
        w.write_record(["orbit", "members", "size", "score"])?;
    } else {
        w.write_record(["orbit", "members", "size"])?;
    }
    for (k, o) in orbits.iter().enumerate() {
        let members = o
            .members()
            .iter()
            .map(|&i| (labels[i] + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let mut rec = vec![(k + 1).to_string(), members, o.len().to_string()];
        if let Some(s) = scores {
            rec.push(format!("{}", s[k]));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
